//! Small dense complex matrices and the spectral helpers used on them.

use nalgebra::{Matrix2, Matrix4};
use num_complex::Complex64;

pub type M2 = Matrix2<Complex64>;
pub type M4 = Matrix4<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigenvalues_h2(m: &M2) -> [f64; 2] {
    let h = (m + m.adjoint()) * r(0.5);
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    [e[0], e[1]]
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn eigenvalues_h4(m: &M4) -> [f64; 4] {
    let h = (m + m.adjoint()) * r(0.5);
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    [e[0], e[1], e[2], e[3]]
}

/// Largest entrywise modulus of `m - m^dagger`.
pub fn hermiticity_defect4(m: &M4) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// `-sum x ln x` over the spectrum, ignoring (tiny) non-positive values.
pub fn entropy_of(eigs: &[f64]) -> f64 {
    eigs.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * x.ln())
        .sum()
}

/// Von Neumann entropy in nats.
pub fn entropy2(m: &M2) -> f64 {
    entropy_of(&eigenvalues_h2(m))
}

pub fn entropy4(m: &M4) -> f64 {
    entropy_of(&eigenvalues_h4(m))
}

/// Partial transpose over the second qubit in the basis
/// `(|00>, |01>, |10>, |11>)`, first index slow.
pub fn partial_transpose_second(m: &M4) -> M4 {
    let mut out = M4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for cc in 0..2 {
                for d in 0..2 {
                    // <a b| m |cc d>  ->  <a d| pt |cc b>
                    out[(2 * a + d, 2 * cc + b)] = m[(2 * a + b, 2 * cc + d)];
                }
            }
        }
    }
    out
}
