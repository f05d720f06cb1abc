//! Integration engine: nested adaptive quadrature over time-ordered domains,
//! delta collapse of massless commutators, and regulator-ladder
//! extrapolation.

pub mod collapse;
pub mod gk;
pub mod ladder;
pub mod nested;

use num_complex::Complex64;

use crate::error::{Error, Result};
pub use collapse::{collapse_delta, Collapsed};
pub use ladder::{extrapolate_ladder, Regulator};
pub use nested::{Domain, NestedOptions, TimeIntegrand};

/// Regulated rungs are integrated this much tighter than the policy
/// tolerance so that extrapolation does not amplify quadrature noise past it.
pub const RUNG_TIGHTENING: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePolicy {
    pub rel_tol: f64,
    pub abs_floor: f64,
    /// Segment budget of each one-dimensional adaptive pass.
    pub max_subdivisions: usize,
    /// Minimum number of nodes per period of the gap phase.
    pub oscillation_factor: f64,
    pub regulator: Regulator,
    pub extrapolation_order: usize,
}

impl Default for QuadraturePolicy {
    fn default() -> Self {
        QuadraturePolicy {
            rel_tol: 1e-6,
            abs_floor: 1e-12,
            max_subdivisions: 2000,
            oscillation_factor: 8.0,
            regulator: Regulator::default(),
            extrapolation_order: 6,
        }
    }
}

impl QuadraturePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_floor > 0.0) {
            return Err(Error::InvalidScenario(
                "quadrature tolerances must be positive".into(),
            ));
        }
        if self.oscillation_factor < 4.0 {
            return Err(Error::InvalidScenario(
                "oscillation factor must be at least 4".into(),
            ));
        }
        if self.max_subdivisions < 1 || self.extrapolation_order < 1 {
            return Err(Error::InvalidScenario(
                "subdivision budget and extrapolation order must be positive".into(),
            ));
        }
        self.regulator.validate()
    }

    pub fn nested(&self) -> NestedOptions {
        NestedOptions {
            gk: gk::GkOptions {
                rel_tol: self.rel_tol,
                abs_tol: self.abs_floor,
                max_segments: self.max_subdivisions,
                max_initial_width: f64::INFINITY,
            },
            oscillation_factor: self.oscillation_factor,
        }
    }

    /// Options for one rung of a regulator ladder.
    pub fn rung(&self) -> NestedOptions {
        let mut o = self.nested();
        o.gk.rel_tol = self.rel_tol * RUNG_TIGHTENING;
        o.gk.abs_tol = self.abs_floor * RUNG_TIGHTENING;
        o
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error: f64,
    /// Change between the last two extrapolation orders (zero when no
    /// regulator was involved).
    pub residual: f64,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

impl IntegralResult {
    pub fn zero() -> Self {
        IntegralResult::default()
    }

    /// Combined uncertainty: quadrature error plus extrapolation residual.
    pub fn uncertainty(&self) -> f64 {
        self.error + self.residual
    }

    pub fn scaled(mut self, s: Complex64) -> Self {
        self.value *= s;
        self.error *= s.norm();
        self.residual *= s.norm();
        self
    }

    pub fn add(mut self, other: IntegralResult) -> Self {
        self.value += other.value;
        self.error += other.error;
        self.residual += other.residual;
        self.evaluations += other.evaluations;
        self.warnings.extend(other.warnings);
        self
    }
}

/// A weighted integration domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub weight: Complex64,
    pub domain: Domain,
}

impl Piece {
    pub fn unit(domain: Domain) -> Self {
        Piece {
            weight: Complex64::new(1.0, 0.0),
            domain,
        }
    }
}

/// Sum over pieces of `weight * integral of f over domain`.
pub fn integrate_pieces(
    f: &TimeIntegrand<'_>,
    pieces: &[Piece],
    opts: &NestedOptions,
) -> Result<IntegralResult> {
    let mut acc = IntegralResult::zero();
    for p in pieces {
        let out = nested::integrate_domain(f, &p.domain, opts)?;
        acc = acc.add(IntegralResult {
            value: out.value * p.weight,
            error: out.error * p.weight.norm(),
            residual: 0.0,
            evaluations: out.evaluations,
            warnings: Vec::new(),
        });
    }
    Ok(acc)
}

/// Integral over the ordered simplex `end >= t_1 >= ... >= t_k >= start`.
pub fn integrate_simplex(
    f: &TimeIntegrand<'_>,
    start: f64,
    end: f64,
    policy: &QuadraturePolicy,
) -> Result<IntegralResult> {
    if !(1..=4).contains(&f.dim) {
        return Err(Error::Domain(format!(
            "simplex integration supports 1 to 4 variables, got {}",
            f.dim
        )));
    }
    integrate_pieces(
        f,
        &[Piece::unit(Domain::simplex(f.dim, start, end))],
        &policy.nested(),
    )
}

/// Runs `rung(eps)` for every rung of the policy's regulator ladder and
/// extrapolates to zero regulator.
pub fn regulated<F>(policy: &QuadraturePolicy, mut rung: F) -> Result<IntegralResult>
where
    F: FnMut(f64) -> Result<IntegralResult>,
{
    let mut values = Vec::with_capacity(policy.regulator.ladder.len());
    let mut error: f64 = 0.0;
    let mut evaluations = 0;
    let mut warnings = Vec::new();
    for &eps in &policy.regulator.ladder {
        let r = rung(eps)?;
        values.push((eps, r.value));
        error = error.max(r.error);
        evaluations += r.evaluations;
        for w in r.warnings {
            if !warnings.contains(&w) {
                warnings.push(w);
            }
        }
    }
    let (value, residual) = extrapolate_ladder(&values, policy.extrapolation_order)?;
    Ok(IntegralResult {
        value,
        error,
        residual,
        evaluations,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_volume_examples() {
        let p = QuadraturePolicy::default();
        let one = |k| TimeIntegrand::new(k, |_| Complex64::new(1.0, 0.0));
        let r2 = integrate_simplex(&one(2), 0.0, 1.0, &p).unwrap();
        assert!((r2.value.re - 0.5).abs() < 1e-12);
        let r4 = integrate_simplex(&one(4), 0.0, 1.0, &p).unwrap();
        assert!((r4.value.re - 1.0 / 24.0).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_simplex_matches_antiderivative() {
        // int_0^{2pi} dt1 int_0^{t1} dt2 exp(i (t1 - t2)) = 2 pi i
        // (inner: (exp(i t1) - 1)/i * ... ; evaluated symbolically).
        let f =
            TimeIntegrand::new(2, |t| Complex64::new(0.0, t[0] - t[1]).exp()).with_frequency(1.0);
        let p = QuadraturePolicy {
            rel_tol: 1e-10,
            ..QuadraturePolicy::default()
        };
        let r = integrate_simplex(&f, 0.0, 2.0 * std::f64::consts::PI, &p).unwrap();
        let exact = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
        assert!((r.value - exact).norm() < 1e-9, "{}", r.value);
    }

    #[test]
    fn rejects_too_many_dimensions() {
        let f = TimeIntegrand::new(5, |_| Complex64::new(1.0, 0.0));
        assert!(integrate_simplex(&f, 0.0, 1.0, &QuadraturePolicy::default()).is_err());
    }
}
