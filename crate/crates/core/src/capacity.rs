//! Product-state classical capacity and single-use coherent information.

use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel_algebra::{apply_linear, complementary_with, kraus_set, DensityMatrix2};
use crate::channel_params::ChannelParams;
use crate::error::{Error, Result};
use crate::linalg::{entropy2, entropy4};

/// `|A - B|` below this is treated as a constant (zero-capacity) channel.
pub const DEGENERATE_GAP: f64 = 1e-12;

/// Agreement required between the optimizer and the base-2 closed form.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

pub const DEFAULT_RESTARTS: usize = 32;
pub const DEFAULT_SEED: u64 = 0x5eed;

/// Binary entropy `-x ln x - (1-x) ln(1-x)` in nats.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("binary entropy needs x in [0, 1], got {x}")));
    }
    Ok(h_nats(x))
}

fn h_nats(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
    term(x) + term(1.0 - x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub nats: f64,
    pub bits: f64,
    /// Optimal probability of sending `|e>`.
    pub prior: f64,
    /// Bits per unit time, when the window length is known.
    pub rate: Option<f64>,
    /// `A == B`: the output does not depend on the input.
    pub degenerate: bool,
    pub iterations: usize,
    pub bracket: f64,
    /// Prior from the base-2 closed form, when it could be solved.
    pub closed_form_prior: Option<f64>,
    pub closed_form_agrees: Option<bool>,
}

/// Mutual information (nats) of the binary channel `|e> -> P_e + A`,
/// `|g> -> P_e + B` at prior `p1`.
pub fn mutual_information(p: &ChannelParams, p1: f64) -> f64 {
    let a = p.pe + p.a;
    let b = p.pe + p.b;
    h_nats(p1 * a + (1.0 - p1) * b) - p1 * h_nats(a) - (1.0 - p1) * h_nats(b)
}

fn check_populations(p: &ChannelParams) -> Result<()> {
    for (name, v) in [("P_e + A", p.pe + p.a), ("P_e + B", p.pe + p.b)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    Ok(())
}

/// Maximizes the (concave) mutual information over the prior by
/// golden-section search, with the extreme input states `|e>` and `|g>`.
pub fn classical_capacity(p: &ChannelParams) -> Result<CapacityResult> {
    check_populations(p)?;
    let rate_of = |bits: f64| p.meta.window.map(|w| bits / w);
    if (p.a - p.b).abs() <= DEGENERATE_GAP {
        return Ok(CapacityResult {
            nats: 0.0,
            bits: 0.0,
            prior: 0.5,
            rate: rate_of(0.0),
            degenerate: true,
            iterations: 0,
            bracket: 0.0,
            closed_form_prior: None,
            closed_form_agrees: None,
        });
    }
    let f = |x: f64| mutual_information(p, x);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut iterations = 0;
    while hi - lo > 1e-11 && iterations < 200 {
        iterations += 1;
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        }
    }
    let mut prior = 0.5 * (lo + hi);
    let mut nats = f(prior);
    for edge in [0.0, 1.0] {
        if f(edge) > nats {
            prior = edge;
            nats = f(edge);
        }
    }
    let nats = nats.max(0.0);
    let bits = nats / LN_2;
    let closed = closed_form_prior(p).ok();
    Ok(CapacityResult {
        nats,
        bits,
        prior,
        rate: rate_of(bits),
        degenerate: false,
        iterations,
        bracket: hi - lo,
        closed_form_prior: closed,
        closed_form_agrees: closed.map(|c| (c - prior).abs() <= CLOSED_FORM_TOL),
    })
}

fn h_bits(x: f64) -> f64 {
    h_nats(x) / LN_2
}

/// Stationary prior from `w - log2(1 - 2^w) = (H(P_e+B) - H(P_e+A)) / (A - B)`
/// with entropies in bits, `p1 = (2^w - P_e - B) / (A - B)`.
///
/// The root is bracketed by requiring the optimal output population `2^w`
/// to lie between `P_e + B` and `P_e + A`.
pub fn closed_form_prior(p: &ChannelParams) -> Result<f64> {
    check_populations(p)?;
    let diff = p.a - p.b;
    if diff.abs() <= DEGENERATE_GAP {
        return Err(Error::Domain("closed form needs A != B".into()));
    }
    let a = p.pe + p.a;
    let b = p.pe + p.b;
    let rhs = (h_bits(b) - h_bits(a)) / diff;
    let g = |q: f64| (q / (1.0 - q)).log2() - rhs;
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let (mut glo, ghi) = (g(lo), g(hi));
    let diagnostics = || format!("output population bracket [{lo}, {hi}], residuals [{glo}, {ghi}]");
    if glo.is_nan() || ghi.is_nan() || glo.signum() == ghi.signum() && glo != 0.0 && ghi != 0.0 {
        return Err(Error::RootNotBracketed(diagnostics()));
    }
    // g is increasing in q; bisect to machine resolution.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let gm = g(mid);
        if gm == 0.0 {
            lo = mid;
            hi = mid;
            break;
        }
        if gm.signum() == glo.signum() {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    let q = 0.5 * (lo + hi);
    Ok(((q - b) / diff).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentInfo {
    /// Raw maximum of `S(xi(rho)) - S(xi^C(rho))`, nats; may be negative.
    pub value: f64,
    /// `max(value, 0)`.
    pub clamped: f64,
    /// Bloch vector of the maximizing input.
    pub bloch: [f64; 3],
    pub restarts: usize,
    pub converged: usize,
}

fn to_ball(x: &[f64; 3]) -> [f64; 3] {
    let n = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if n <= 1.0 {
        *x
    } else {
        [x[0] / n, x[1] / n, x[2] / n]
    }
}

/// Single-use coherent information, maximized over the Bloch ball by
/// Nelder-Mead descent from random starts.
pub fn coherent_information_single_use(p: &ChannelParams) -> Result<CoherentInfo> {
    coherent_information_with(p, DEFAULT_RESTARTS, DEFAULT_SEED)
}

pub fn coherent_information_with(p: &ChannelParams, restarts: usize, seed: u64) -> Result<CoherentInfo> {
    let k = kraus_set(p)?;
    let objective = |x: &[f64; 3]| -> f64 {
        let v = to_ball(x);
        let rho = match DensityMatrix2::from_bloch(v[0], v[1], v[2]) {
            Ok(r) => r,
            Err(_) => return f64::INFINITY,
        };
        let out = apply_linear(p, rho.matrix());
        let env = complementary_with(&k, rho.matrix());
        -(entropy2(&out) - entropy4(&env))
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::INFINITY, [0.0; 3]);
    let mut converged = 0;
    for _ in 0..restarts.max(1) {
        let start = loop {
            let x = [
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            ];
            if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
                break x;
            }
        };
        let (fx, x, ok) = nelder_mead(&objective, start, 0.2, 1e-8, 4000);
        if ok {
            converged += 1;
        }
        if fx < best.0 {
            best = (fx, x);
        }
    }
    let value = -best.0;
    if converged == 0 || !value.is_finite() {
        return Err(Error::Optimizer { best: value });
    }
    Ok(CoherentInfo {
        value,
        clamped: value.max(0.0),
        bloch: to_ball(&best.1),
        restarts: restarts.max(1),
        converged,
    })
}

/// Minimizes `f` from `x0`; returns `(f_min, x_min, converged)`.
fn nelder_mead<F>(f: &F, x0: [f64; 3], step: f64, tol: f64, max_iter: usize) -> (f64, [f64; 3], bool)
where
    F: Fn(&[f64; 3]) -> f64,
{
    let mut simplex: Vec<([f64; 3], f64)> = Vec::with_capacity(4);
    simplex.push((x0, f(&x0)));
    for i in 0..3 {
        let mut x = x0;
        x[i] += step;
        simplex.push((x, f(&x)));
    }
    let lerp = |a: &[f64; 3], b: &[f64; 3], t: f64| -> [f64; 3] {
        [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
    };
    for _ in 0..max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if (simplex[3].1 - simplex[0].1).abs() <= tol * (1.0 + simplex[0].1.abs()) {
            return (simplex[0].1, simplex[0].0, true);
        }
        let mut c = [0.0; 3];
        for s in &simplex[..3] {
            for k in 0..3 {
                c[k] += s.0[k] / 3.0;
            }
        }
        let worst = simplex[3];
        let xr = lerp(&c, &worst.0, -1.0);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = lerp(&c, &worst.0, -2.0);
            let fe = f(&xe);
            simplex[3] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[2].1 {
            simplex[3] = (xr, fr);
        } else {
            let xc = if fr < worst.1 { lerp(&c, &xr, 0.5) } else { lerp(&c, &worst.0, 0.5) };
            let fc = f(&xc);
            if fc < worst.1.min(fr) {
                simplex[3] = (xc, fc);
            } else {
                let best = simplex[0].0;
                for s in simplex.iter_mut().skip(1) {
                    s.0 = lerp(&best, &s.0, 0.5);
                    s.1 = f(&s.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    (simplex[0].1, simplex[0].0, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn pab(pe: f64, a: f64, b: f64) -> ChannelParams {
        ChannelParams::new(pe, a, b, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
    }

    #[test]
    fn entropy_examples() {
        assert!((binary_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
    }

    #[test]
    fn noiseless_channel_carries_one_bit() {
        let r = classical_capacity(&pab(0.0, 1.0, 0.0)).unwrap();
        assert!((r.bits - 1.0).abs() < 1e-12);
        assert!((r.prior - 0.5).abs() < 1e-6);
        assert!((closed_form_prior(&pab(0.0, 1.0, 0.0)).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn equal_a_b_is_degenerate() {
        let r = classical_capacity(&pab(0.1, 0.02, 0.02)).unwrap();
        assert!(r.degenerate);
        assert_eq!((r.bits, r.prior), (0.0, 0.5));
    }

    #[test]
    fn bits_are_nats_over_ln2() {
        let r = classical_capacity(&pab(0.0, 0.9, 0.1)).unwrap();
        assert_eq!(r.bits, r.nats / LN_2);
        assert_eq!(r.closed_form_agrees, Some(true));
    }

    #[test]
    fn constant_channel_has_zero_coherent_information() {
        let ci = coherent_information_single_use(&ChannelParams::zero()).unwrap();
        assert!(ci.value.abs() < 1e-7, "{}", ci.value);
    }
}
