//! The qubit channel parametrized by `(P_e, A, B, C, D)`: its action on
//! density matrices, Kraus operators, Choi matrix and complementary channel.
//!
//! Basis order is `(|e>, |g>)` for one qubit and `(|ee>, |eg>, |ge>, |gg>)`
//! for two, first factor slow.

use num_complex::Complex64;

use crate::channel_params::ChannelParams;
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_h2, eigenvalues_h4, r, M2, M4};

/// Slack allowed on positivity checks, absorbing roundoff only.
pub const PSD_TOL: f64 = 1e-12;

/// Default relative eigenvalue threshold for the Choi rank.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// Qubit density matrix `[[theta, gamma], [gamma*, beta]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2 {
    m: M2,
}

impl DensityMatrix2 {
    pub fn new(theta: f64, gamma: Complex64) -> Result<Self> {
        Self::from_matrix(M2::new(r(theta), gamma, gamma.conj(), r(1.0 - theta)))
    }

    pub fn excited() -> Self {
        DensityMatrix2 {
            m: M2::new(r(1.0), r(0.0), r(0.0), r(0.0)),
        }
    }

    pub fn ground() -> Self {
        DensityMatrix2 {
            m: M2::new(r(0.0), r(0.0), r(0.0), r(1.0)),
        }
    }

    /// State with Bloch vector `(x, y, z)`, `|v| <= 1`; `z = 1` is `|e>`.
    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        Self::new(0.5 * (1.0 + z), Complex64::new(0.5 * x, -0.5 * y))
    }

    pub fn from_matrix(m: M2) -> Result<Self> {
        let herm = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix not Hermitian (defect {herm:.2e})"
            )));
        }
        let tr = (m[(0, 0)] + m[(1, 1)]).re;
        if (tr - 1.0).abs() > PSD_TOL {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        let min = eigenvalues_h2(&m)[0];
        if min < -PSD_TOL {
            return Err(Error::Domain(format!(
                "density matrix not positive (eigenvalue {min:.3e})"
            )));
        }
        Ok(DensityMatrix2 { m })
    }

    pub fn theta(&self) -> f64 {
        self.m[(0, 0)].re
    }

    pub fn beta(&self) -> f64 {
        self.m[(1, 1)].re
    }

    pub fn gamma(&self) -> Complex64 {
        self.m[(0, 1)]
    }

    pub fn matrix(&self) -> &M2 {
        &self.m
    }
}

/// Linear extension of the channel to arbitrary 2x2 matrices.
pub fn apply_linear(p: &ChannelParams, m: &M2) -> M2 {
    let (th, g, gs, be) = (m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]);
    let tr = th + be;
    let ee = tr * p.pe + th * p.a + be * p.b;
    let gg = tr * (1.0 - p.pe) - th * p.a - be * p.b;
    let eg = g * p.c + gs * p.d.conj();
    let ge = g * p.d + gs * p.c.conj();
    M2::new(ee, eg, ge, gg)
}

/// `xi(rho)`: excited population `P_e + theta A + beta B`, coherence
/// `gamma C + gamma* D*` in the upper-right entry.
pub fn apply_channel(p: &ChannelParams, rho: &DensityMatrix2) -> Result<DensityMatrix2> {
    let theta = p.pe + rho.theta() * p.a + rho.beta() * p.b;
    let gamma = rho.gamma() * p.c + rho.gamma().conj() * p.d.conj();
    let m = M2::new(r(theta), gamma, gamma.conj(), r(1.0 - theta));
    let min = eigenvalues_h2(&m)[0];
    if min < -PSD_TOL {
        return Err(Error::NonphysicalOutput(format!(
            "output eigenvalue {min:.3e}"
        )));
    }
    Ok(DensityMatrix2 { m })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrausSet {
    pub ops: [M2; 4],
}

impl KrausSet {
    pub fn apply(&self, m: &M2) -> M2 {
        self.ops.iter().map(|e| e * m * e.adjoint()).sum()
    }

    /// Operator norm of `sum E^dagger E - I`.
    pub fn completeness_defect(&self) -> f64 {
        let s: M2 = self.ops.iter().map(|e| e.adjoint() * e).sum();
        let e = eigenvalues_h2(&(s - M2::identity()));
        e[0].abs().max(e[1].abs())
    }
}

fn radicand(value: f64, what: &str) -> Result<f64> {
    if value < -PSD_TOL {
        return Err(Error::KrausRadicand(format!("{what} = {value:.3e}")));
    }
    Ok(value.max(0.0).sqrt())
}

/// The four Kraus operators
/// `E1 = diag(C/s_B, s_B)`, `E2 = diag(sqrt(P_e+A-|C|^2/s_B^2), 0)`,
/// `E3 = [[0, D*/s_A], [s_A, 0]]`, `E4 = [[0, sqrt(P_e+B-|D|^2/s_A^2)], [0, 0]]`
/// with `s_A = sqrt(1-P_e-A)`, `s_B = sqrt(1-P_e-B)`.
pub fn kraus_set(p: &ChannelParams) -> Result<KrausSet> {
    let qa = 1.0 - p.pe - p.a;
    let qb = 1.0 - p.pe - p.b;
    if qa <= 0.0 || qb <= 0.0 {
        return Err(Error::KrausDegenerate(format!(
            "1 - P_e - A = {qa:.3e}, 1 - P_e - B = {qb:.3e}"
        )));
    }
    let sa = qa.sqrt();
    let sb = qb.sqrt();
    let e2 = radicand(
        p.pe + p.a - p.c.norm_sqr() / qb,
        "P_e + A - |C|^2/(1 - P_e - B)",
    )?;
    let e4 = radicand(
        p.pe + p.b - p.d.norm_sqr() / qa,
        "P_e + B - |D|^2/(1 - P_e - A)",
    )?;
    let z = r(0.0);
    Ok(KrausSet {
        ops: [
            M2::new(p.c / sb, z, z, r(sb)),
            M2::new(r(e2), z, z, z),
            M2::new(z, p.d.conj() / sa, r(sa), z),
            M2::new(z, r(e4), z, z),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChoiMatrix {
    pub matrix: M4,
}

impl ChoiMatrix {
    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        eigenvalues_h4(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Number of eigenvalues above `threshold` times the largest one.
    pub fn rank(&self, threshold: f64) -> usize {
        let e = self.eigenvalues();
        let cut = threshold * e[3];
        e.iter().filter(|&&x| x > cut).count()
    }
}

/// `(I (x) xi)(|b><b|)` with `|b> = (|ee> + |gg>)/sqrt 2`; trace one.
pub fn choi(p: &ChannelParams) -> ChoiMatrix {
    let mut out = M4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            let mut unit = M2::zeros();
            unit[(i, j)] = r(1.0);
            let block = apply_linear(p, &unit) * r(0.5);
            for a in 0..2 {
                for b in 0..2 {
                    out[(2 * i + a, 2 * j + b)] = block[(a, b)];
                }
            }
        }
    }
    ChoiMatrix { matrix: out }
}

pub fn choi_rank(p: &ChannelParams, threshold: f64) -> usize {
    choi(p).rank(threshold)
}

/// Environment output `(xi^C(rho))_{jk} = Tr(E_k rho E_j^dagger)`.
pub fn complementary_apply(p: &ChannelParams, rho: &DensityMatrix2) -> Result<M4> {
    let k = kraus_set(p)?;
    Ok(complementary_with(&k, rho.matrix()))
}

pub fn complementary_with(k: &KrausSet, rho: &M2) -> M4 {
    let mut out = M4::zeros();
    for j in 0..4 {
        for l in 0..4 {
            out[(j, l)] = (k.ops[l] * rho * k.ops[j].adjoint()).trace();
        }
    }
    out
}
