//! Regulator ladders and polynomial extrapolation to zero regulator.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The `i epsilon` regulator of the two-point functions, carried as a
/// decreasing ladder of `epsilon` values for extrapolation.
#[derive(Debug, Clone, PartialEq)]
pub struct Regulator {
    pub ladder: Vec<f64>,
}

impl Default for Regulator {
    /// `0.1, 0.05, 0.025, ...`, eight rungs.
    fn default() -> Self {
        Regulator::halving(0.1, 8)
    }
}

impl Regulator {
    pub fn halving(start: f64, rungs: usize) -> Self {
        Regulator::geometric(start, 0.5, rungs)
    }

    pub fn geometric(start: f64, ratio: f64, rungs: usize) -> Self {
        Regulator {
            ladder: (0..rungs).map(|k| start * ratio.powi(k as i32)).collect(),
        }
    }

    /// The finest (smallest) regulator value.
    pub fn epsilon(&self) -> f64 {
        *self.ladder.last().expect("non-empty ladder")
    }

    pub fn validate(&self) -> Result<()> {
        if self.ladder.len() < 3 {
            return Err(Error::InvalidScenario(
                "regulator ladder needs at least three rungs".into(),
            ));
        }
        if self.ladder.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::InvalidScenario(
                "regulator values must be positive".into(),
            ));
        }
        if self.ladder.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidScenario(
                "regulator ladder must be strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Neville-Richardson extrapolation of `values(eps)` to `eps = 0`.
///
/// Order `k` fits a degree-`k` polynomial through the `k+1` finest rungs.
/// Orders `1..=order` are tried and the one whose change from the previous
/// order is smallest is returned; that change is the residual.
pub fn extrapolate_ladder(values: &[(f64, Complex64)], order: usize) -> Result<(Complex64, f64)> {
    let n = values.len();
    if n < 3 {
        return Err(Error::Domain(
            "extrapolation needs at least three rungs".into(),
        ));
    }
    if values.windows(2).any(|w| w[1].0 >= w[0].0) || values.iter().any(|v| v.0 <= 0.0) {
        return Err(Error::Domain(
            "extrapolation rungs must be positive and strictly decreasing".into(),
        ));
    }
    if values
        .iter()
        .any(|v| !(v.1.re.is_finite() && v.1.im.is_finite()))
    {
        return Err(Error::LadderDivergent {
            rungs: values.to_vec(),
        });
    }

    if values.iter().all(|v| v.1 == values[0].1) {
        return Ok((values[0].1, 0.0));
    }

    let scale = values.iter().map(|v| v.1.norm()).fold(0.0, f64::max);
    let first = (values[1].1 - values[0].1).norm();
    let last = (values[n - 1].1 - values[n - 2].1).norm();
    if last > first * (1.0 + 1e-9) + 1e-13 * scale {
        return Err(Error::LadderDivergent {
            rungs: values.to_vec(),
        });
    }

    // p[i] holds the Neville entry built from rungs i..=j for the current j.
    let xs: Vec<f64> = values.iter().map(|v| v.0).collect();
    let mut table: Vec<Vec<Complex64>> = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    for i in 0..n {
        table[i][i] = values[i].1;
    }
    for len in 1..n {
        for i in 0..n - len {
            let j = i + len;
            table[i][j] = (table[i + 1][j] * xs[i] - table[i][j - 1] * xs[j]) / (xs[i] - xs[j]);
        }
    }
    let max_order = order.clamp(1, n - 1);
    let estimate = |k: usize| table[n - 1 - k][n - 1];
    let mut best = (estimate(1), (estimate(1) - estimate(0)).norm());
    for k in 2..=max_order {
        let change = (estimate(k) - estimate(k - 1)).norm();
        if change < best.1 {
            best = (estimate(k), change);
        }
    }
    Ok(best)
}
