//! Vacuum entanglement between static detectors: the dressed ground state,
//! its negativity, adiabatic switching bounds and the Casimir-Polder energy.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues_h4, partial_transpose_second, r, M4};
use crate::quadrature::gk::{integrate_real, integrate_to_infinity, GkOptions};
use crate::quadrature::{extrapolate_ladder, Regulator};

/// Couplings above this trigger a perturbative-validity warning.
pub const WEAK_COUPLING: f64 = 0.3;

/// Floor of the PSD tolerance of the dressed ground state.
pub const PSD_FLOOR: f64 = 1e-10;

/// Largest `alpha^2 max(|R|, S, |T|)` at which a negative eigenvalue is
/// still attributed to the truncation.
pub const PERTURBATIVE_LIMIT: f64 = 0.1;

/// Half-periods of `sin(pL)` integrated per adaptive call.
const CHUNK_HALF_PERIODS: f64 = 256.0;

#[derive(Debug, Clone, PartialEq)]
pub struct VacuumIntegrals {
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// Error estimates of `r, s, t`.
    pub errors: [f64; 3],
    pub p_max: f64,
    pub evaluations: usize,
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Integrates `f` over `[0, p_max]` in chunks short enough that the
/// oscillation of `sin(pL)` is resolved without unbounded segment lists.
fn radial<F: Fn(f64) -> f64>(
    f: F,
    p_max: f64,
    l: f64,
    scales: &[f64],
    scale: f64,
    evals: &mut usize,
) -> Result<(f64, f64)> {
    let chunk = if l > 0.0 { CHUNK_HALF_PERIODS * PI / l } else { p_max };
    let n = (p_max / chunk).ceil().max(1.0) as usize;
    let width = p_max / n as f64;
    let opts = GkOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-12 * scale / n as f64,
        max_segments: 20_000,
        max_initial_width: if l > 0.0 { (PI / l).min(width) } else { width / 16.0 },
    };
    let mut total = 0.0;
    let mut err = 0.0;
    for k in 0..n {
        let a = k as f64 * width;
        let b = if k + 1 == n { p_max } else { a + width };
        let breaks: Vec<f64> = scales.iter().copied().filter(|&x| x > a && x < b).collect();
        let mut count = 0;
        let (v, e) = integrate_real(
            |p| {
                count += 1;
                f(p)
            },
            a,
            b,
            &breaks,
            &opts,
        )?;
        *evals += count;
        total += v;
        err += e;
    }
    Ok((total, err))
}

/// `R`, `S` and `T` for Gaussian smearing of width `dx`, as radial integrals
/// `(1/2 pi^2) int p^2 dp e^{-p^2 dx^2} ...` after the angular reduction.
pub fn vacuum_integrals(de: f64, l: f64, dx: f64, m: f64) -> Result<VacuumIntegrals> {
    for (name, v) in [("gap", de), ("separation", l), ("smearing width", dx)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be positive, got {v}")));
        }
    }
    if !(m.is_finite() && m >= 0.0) {
        return Err(Error::Domain(format!("mass must be non-negative, got {m}")));
    }
    let p_max = (20.0 / dx).max(50.0 * de.max(m).max(1.0 / l));
    let measure = |p: f64| p * p * (-p * p * dx * dx).exp() / (2.0 * PI * PI);
    let energy = |p: f64| (p * p + m * m).sqrt();
    let mut scales = vec![de, 0.1 / dx, 1.0 / dx, 3.0 / dx, 10.0 / dx];
    if m > 0.0 {
        scales.push(m);
    }
    let mut evaluations = 0;
    let s_integrand = |p: f64| {
        let e = energy(p);
        if e == 0.0 {
            return 0.0;
        }
        measure(p) / (2.0 * e * (e + de) * (e + de))
    };
    let (s, es) = radial(s_integrand, p_max, 0.0, &scales, 1.0, &mut evaluations)?;
    let (t, et) = radial(|p| s_integrand(p) * sinc(p * l), p_max, l, &scales, s, &mut evaluations)?;
    let (rr, er) = radial(
        |p| {
            let e = energy(p);
            if e == 0.0 {
                return 0.0;
            }
            measure(p) * sinc(p * l) / (2.0 * e * (e + de) * de)
        },
        p_max,
        l,
        &scales,
        s,
        &mut evaluations,
    )?;
    Ok(VacuumIntegrals {
        r: rr,
        s,
        t,
        errors: [er, es, et],
        p_max,
        evaluations,
    })
}

/// Reduced state of both detectors in the dressed ground state, basis
/// `(ee, eg, ge, gg)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateReduced {
    pub matrix: M4,
    pub alpha: f64,
    pub min_eigenvalue: f64,
    pub warnings: Vec<String>,
}

/// The displayed matrix is exact only to second order; its corner block has
/// an eigenvalue near `-alpha^4 R^2`, so the tolerance scales accordingly.
pub fn psd_tolerance(alpha: f64, v: &VacuumIntegrals) -> f64 {
    let a2 = alpha * alpha;
    let big = v.r.abs().max(v.s.abs()).max(v.t.abs());
    PSD_FLOOR.max(2.0 * (a2 * big).powi(2))
}

pub fn ground_state_reduced(alpha: f64, v: &VacuumIntegrals) -> Result<GroundStateReduced> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::Domain(format!("coupling must be non-negative, got {alpha}")));
    }
    let mut warnings = Vec::new();
    if alpha > WEAK_COUPLING {
        warnings.push(format!(
            "coupling {alpha} exceeds the weak-coupling threshold {WEAK_COUPLING}"
        ));
    }
    let a2 = alpha * alpha;
    let mut m = M4::zeros();
    m[(0, 3)] = r(a2 * v.r);
    m[(3, 0)] = r(a2 * v.r);
    m[(1, 1)] = r(a2 * v.s);
    m[(2, 2)] = r(a2 * v.s);
    m[(1, 2)] = r(a2 * v.t);
    m[(2, 1)] = r(a2 * v.t);
    m[(3, 3)] = r(1.0 - 2.0 * a2 * v.s);
    let min_eigenvalue = eigenvalues_h4(&m)[0];
    let big = v.r.abs().max(v.s.abs()).max(v.t.abs());
    let beyond_order = a2 * big > PERTURBATIVE_LIMIT && min_eigenvalue < -PSD_FLOOR;
    if min_eigenvalue < -psd_tolerance(alpha, v) || beyond_order {
        return Err(Error::PerturbativeState { min_eigenvalue });
    }
    Ok(GroundStateReduced {
        matrix: m,
        alpha,
        min_eigenvalue,
        warnings,
    })
}

/// Twice the magnitude of the negative part of the partial-transpose spectrum.
pub fn negativity(rho: &M4) -> f64 {
    let neg: f64 = eigenvalues_h4(&partial_transpose_second(rho))
        .iter()
        .filter(|&&e| e < 0.0)
        .sum();
    2.0 * neg.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `dE >> m`, including the massless field.
    GapDominated,
    /// `dE << m`.
    MassDominated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Asymptotic {
    /// Negativity per unit `alpha^2`.
    pub value: f64,
    pub warnings: Vec<String>,
}

/// Small-separation negativity per unit `alpha^2`:
/// `(1/2 pi^2) max(pi/(2 L dE) - ln(1/(k dX)), 0)` with `k = dE` or `m`.
pub fn negativity_asymptotic(de: f64, l: f64, dx: f64, m: f64, regime: Regime) -> Asymptotic {
    let k = match regime {
        Regime::GapDominated => de,
        Regime::MassDominated => m,
    };
    let mut warnings = Vec::new();
    let mut check = |ok: bool, what: &str| {
        if !ok {
            warnings.push(format!("outside the asymptotic regime: {what}"));
        }
    };
    check(l * de <= 0.1, "L dE is not small");
    check(l * m <= 0.1, "L m is not small");
    check(l >= dx, "L is not large compared with dX");
    match regime {
        Regime::GapDominated => check(m <= 0.1 * de, "m is not small compared with dE"),
        Regime::MassDominated => check(de <= 0.1 * m, "dE is not small compared with m"),
    }
    let arg = PI / (2.0 * l * de) - (1.0 / (k * dx)).ln();
    Asymptotic {
        value: arg.max(0.0) / (2.0 * PI * PI),
        warnings,
    }
}

/// Critical separation below which the dressed ground state is entangled.
pub fn entanglement_threshold(de: f64, dx: f64, m: f64) -> Result<f64> {
    let k = if m <= de { de } else { m };
    let log = (1.0 / (k * dx)).ln();
    if !(log > 0.0) {
        return Err(Error::ThresholdValidity(format!(
            "ln(1/({k} * {dx})) = {log} is not positive"
        )));
    }
    Ok(PI / (2.0 * de * log))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticBound {
    /// Upper bound on `max_t |d eta / dt|`.
    pub bound: f64,
    pub mass: f64,
    pub gap: f64,
    pub alpha: f64,
    /// Box size; `None` is an unbounded box.
    pub box_size: Option<f64>,
}

/// `[m^2 + 3 (2 pi / L_IR)^2]^{1/4} / alpha * (sqrt(m^2 + 3 (2 pi / L_IR)^2) + dE)^2`.
pub fn adiabatic_bound(m: f64, de: f64, alpha: f64, box_size: Option<f64>) -> Result<AdiabaticBound> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {alpha}")));
    }
    let ir = match box_size {
        None => 0.0,
        Some(l) if l > 0.0 => 3.0 * (2.0 * PI / l).powi(2),
        Some(l) => return Err(Error::Domain(format!("box size must be positive, got {l}"))),
    };
    let g2 = m * m + ir;
    Ok(AdiabaticBound {
        bound: g2.powf(0.25) / alpha * (g2.sqrt() + de).powi(2),
        mass: m,
        gap: de,
        alpha,
        box_size,
    })
}

/// Maximal adiabatic approach speed `dE^{3/2} / alpha * 32 sqrt 2 / (3 sqrt 3)`.
pub fn speed_bound(de: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("coupling must be positive, got {alpha}")));
    }
    Ok(de.powf(1.5) / alpha * 32.0 * 2f64.sqrt() / (3.0 * 3f64.sqrt()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CasimirEnergy {
    /// Renormalized ground-state energy shift (negative).
    pub energy: f64,
    pub error: f64,
    /// The four bracketed momentum terms, before the `-2 alpha^4` factor.
    pub terms: [f64; 4],
}

/// Default damping ladder for the Casimir integrals, in units of `L`.
pub fn casimir_regulator(l: f64) -> Regulator {
    Regulator::halving(0.05 * l, 6)
}

fn tight() -> GkOptions {
    GkOptions {
        rel_tol: 1e-12,
        abs_tol: 0.0,
        max_segments: 4000,
        max_initial_width: f64::INFINITY,
    }
}

/// `F_k(s) = int_0^inf dp sin(pL) e^{-sp} / (p + dE)^k`, by rotating the
/// contour onto the steepest-descent ray of `e^{-(s - iL) p}`.
fn laplace_sine(k: i32, s: f64, l: f64, de: f64) -> Result<f64> {
    if k == 0 {
        return Ok(l / (l * l + s * s));
    }
    let z = Complex64::new(s, -l);
    let norm = z.norm();
    let dir = z.conj() / norm;
    let out = integrate_to_infinity(
        |u| (-norm * u).exp() * dir / (dir * u + de).powi(k),
        0.0,
        1.0 / norm,
        &tight(),
    )?;
    Ok(out.value.im)
}

/// Terms of the bracket at damping `eps`. The double-momentum terms are
/// separated with `1/x = int_0^inf e^{-tx} dt`, which factorizes them into
/// products of `F_k`.
fn casimir_terms(de: f64, l: f64, eps: f64) -> Result<[f64; 4]> {
    let pref = 1.0 / (16.0 * PI.powi(4) * l * l);
    let f1 = laplace_sine(1, eps, l, de)?;
    let t1 = (f1 / (4.0 * PI * PI * l)).powi(2) / de;
    let g = |t: f64| -> Result<(f64, f64)> {
        let s = t + eps;
        let f0 = laplace_sine(0, s, l, de)?;
        let f1 = laplace_sine(1, s, l, de)?;
        let f2 = laplace_sine(2, s, l, de)?;
        Ok((2.0 * f2 * f0 + 2.0 * f1 * f1, 2.0 * f1 * f1))
    };
    let mut failure = None;
    let mut outer = |weight: &dyn Fn(f64) -> f64, pick: usize| -> f64 {
        let scale = l.min(1.0 / de);
        let out = integrate_to_infinity(
            |t| match g(t) {
                Ok((a, b)) => {
                    let v = match pick {
                        0 => a,
                        1 => b,
                        _ => a - b,
                    };
                    Complex64::new(weight(t) * v, 0.0)
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            0.0,
            scale,
            &tight(),
        );
        match out {
            Ok(o) => o.value.re,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let decay = |t: f64| (-2.0 * de * t).exp();
    let t2 = pref * outer(&|_| 1.0, 0);
    let t3 = pref * outer(&decay, 1);
    let t4 = pref * outer(&decay, 2);
    if let Some(e) = failure {
        return Err(e);
    }
    Ok([t1, t2, t3, t4])
}

/// Casimir-Polder energy of two pointlike detectors at separation `L`
/// coupled to a massless field, to fourth order in the coupling.
pub fn casimir_energy(de: f64, l: f64, alpha: f64, reg: &Regulator) -> Result<CasimirEnergy> {
    if !(de > 0.0 && l > 0.0) {
        return Err(Error::Domain(format!("need dE > 0 and L > 0, got {de}, {l}")));
    }
    reg.validate()?;
    let mut rungs: Vec<[f64; 4]> = Vec::with_capacity(reg.ladder.len());
    for &eps in &reg.ladder {
        rungs.push(casimir_terms(de, l, eps)?);
    }
    let mut terms = [0.0; 4];
    let mut error = 0.0;
    for (k, term) in terms.iter_mut().enumerate() {
        let values: Vec<(f64, Complex64)> = reg
            .ladder
            .iter()
            .zip(&rungs)
            .map(|(&e, t)| (e, Complex64::new(t[k], 0.0)))
            .collect();
        let (v, res) = extrapolate_ladder(&values, reg.ladder.len() - 1)?;
        *term = v.re;
        error += res;
    }
    let a4 = alpha.powi(4);
    Ok(CasimirEnergy {
        energy: -2.0 * a4 * terms.iter().sum::<f64>(),
        error: 2.0 * a4 * error,
        terms,
    })
}

/// `F_C = -dE/dL` by Richardson-refined central differences with step `h`.
pub fn casimir_force_with_step(de: f64, l: f64, alpha: f64, h: f64) -> Result<f64> {
    let e = |x: f64| casimir_energy(de, x, alpha, &casimir_regulator(l)).map(|c| c.energy);
    let d = |h: f64| -> Result<f64> { Ok((e(l + h)? - e(l - h)?) / (2.0 * h)) };
    let coarse = d(h)?;
    let fine = d(h / 2.0)?;
    Ok(-(4.0 * fine - coarse) / 3.0)
}

pub fn casimir_force(de: f64, l: f64, alpha: f64) -> Result<f64> {
    casimir_force_with_step(de, l, alpha, 1e-3 * l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn speed_bound_examples() {
        assert!((speed_bound(1.0, 1.0).unwrap() - 8.709_297_8).abs() < 1e-6);
        assert!((speed_bound(4.0, 1.0).unwrap() / speed_bound(1.0, 1.0).unwrap() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn adiabatic_examples() {
        assert!((adiabatic_bound(1.0, 1.0, 0.01, None).unwrap().bound - 400.0).abs() < 1e-10);
        assert_eq!(adiabatic_bound(0.0, 1.0, 0.1, None).unwrap().bound, 0.0);
    }

    #[test]
    fn threshold_examples() {
        let e = (-1f64).exp();
        assert!((entanglement_threshold(1.0, e, 0.0).unwrap() - PI / 2.0).abs() < 1e-12);
        assert!(entanglement_threshold(1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn laplace_sine_closed_forms() {
        // F_1(s) at dE -> 0 limit is arctan(L/s); check a tiny gap.
        let v = laplace_sine(1, 0.5, 1.0, 1e-9).unwrap();
        assert!((v - (2.0f64).atan()).abs() < 1e-6);
        // Against direct damped quadrature.
        let direct = integrate_real(
            |p| (2.0 * p).sin() * (-0.7 * p).exp() / (p + 1.3).powi(2),
            0.0,
            80.0,
            &[],
            &GkOptions { max_initial_width: 0.5, ..GkOptions::default() },
        )
        .unwrap()
        .0;
        assert!((laplace_sine(2, 0.7, 2.0, 1.3).unwrap() - direct).abs() < 1e-10);
    }

    #[test]
    fn product_and_bell_negativity() {
        let mut gg = M4::zeros();
        gg[(3, 3)] = r(1.0);
        assert_eq!(negativity(&gg), 0.0);
        let mut bell = M4::zeros();
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            bell[(i, j)] = r(0.5);
        }
        assert!((negativity(&bell) - 1.0).abs() < 1e-12);
    }
}
