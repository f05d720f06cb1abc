//! Physical configuration shared by every computation: the scalar field,
//! the two static detectors, their common switching function and the energy
//! gap. Natural units throughout (hbar = c = 1).

use crate::error::{Error, Result};
use crate::quadrature::QuadraturePolicy;

/// Number of standard deviations kept on either side of a Gaussian switching
/// centre. `exp(-50)` is far below any tolerance we integrate to.
pub const GAUSSIAN_TRUNCATION: f64 = 10.0;

/// Windows whose length exceeds the separation by this factor are reported
/// as fully timelike-reachable.
pub const TIMELIKE_REACH_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSpec {
    pub mass: f64,
}

impl FieldSpec {
    pub fn massless() -> Self {
        FieldSpec { mass: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mass.is_finite() || self.mass < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "field mass must be finite and non-negative, got {}",
                self.mass
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smearing {
    Pointlike,
    /// Gaussian profile of the given width.
    Gaussian(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSpec {
    pub position: [f64; 3],
    pub coupling: f64,
    pub smearing: Smearing,
}

impl DetectorSpec {
    pub fn pointlike(position: [f64; 3], coupling: f64) -> Self {
        DetectorSpec {
            position,
            coupling,
            smearing: Smearing::Pointlike,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.position.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidScenario(format!(
                "{name}: non-finite position"
            )));
        }
        if !self.coupling.is_finite() || self.coupling < 0.0 {
            return Err(Error::InvalidScenario(format!(
                "{name}: coupling must be finite and non-negative, got {}",
                self.coupling
            )));
        }
        if let Smearing::Gaussian(w) = self.smearing {
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidScenario(format!(
                    "{name}: smearing width must be positive, got {w}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SwitchingKind {
    /// `exp(1 - 1/(1-u^2))` on the window, identically zero outside.
    Bump,
    /// `exp(-(t-c)^2 / (2 sigma^2))`, centred on the window midpoint. The
    /// window only marks the integration truncation.
    Gaussian { sigma: f64 },
    /// Unit plateau joined to zero by C-infinity ramps of the given length.
    SmoothedTophat { ramp: f64 },
}

/// Switching function `eta(t)` with peak value one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingSpec {
    pub kind: SwitchingKind,
    pub start: f64,
    pub end: f64,
}

impl SwitchingSpec {
    pub fn bump(start: f64, end: f64) -> Self {
        SwitchingSpec {
            kind: SwitchingKind::Bump,
            start,
            end,
        }
    }

    pub fn gaussian(center: f64, sigma: f64) -> Self {
        SwitchingSpec {
            kind: SwitchingKind::Gaussian { sigma },
            start: center - GAUSSIAN_TRUNCATION * sigma,
            end: center + GAUSSIAN_TRUNCATION * sigma,
        }
    }

    pub fn smoothed_tophat(start: f64, end: f64, ramp: f64) -> Self {
        SwitchingSpec {
            kind: SwitchingKind::SmoothedTophat { ramp },
            start,
            end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite()) || self.start >= self.end {
            return Err(Error::InvalidScenario(format!(
                "switching window must satisfy start < end, got [{}, {}]",
                self.start, self.end
            )));
        }
        match self.kind {
            SwitchingKind::Bump => {}
            SwitchingKind::Gaussian { sigma } => {
                if !(sigma > 0.0 && sigma.is_finite()) {
                    return Err(Error::InvalidScenario(format!(
                        "gaussian switching needs sigma > 0, got {sigma}"
                    )));
                }
            }
            SwitchingKind::SmoothedTophat { ramp } => {
                if !(ramp > 0.0 && 2.0 * ramp <= self.length()) {
                    return Err(Error::InvalidScenario(format!(
                        "tophat ramp must lie in (0, window/2], got {ramp}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_compact(&self) -> bool {
        !matches!(self.kind, SwitchingKind::Gaussian { .. })
    }

    pub fn eval(&self, t: f64) -> f64 {
        eval_switching(self, t)
    }
}

// exp(-1/x) glued to zero; the standard C-infinity transition.
fn transition(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let a = (-1.0 / x).exp();
    let b = (-1.0 / (1.0 - x)).exp();
    a / (a + b)
}

/// Evaluates `eta(t)`. Compact kinds return an exact zero outside the window.
pub fn eval_switching(s: &SwitchingSpec, t: f64) -> f64 {
    match s.kind {
        SwitchingKind::Bump => {
            if t <= s.start || t >= s.end {
                return 0.0;
            }
            let u = (2.0 * t - s.start - s.end) / (s.end - s.start);
            let q = 1.0 - u * u;
            if q <= 0.0 {
                0.0
            } else {
                (1.0 - 1.0 / q).exp()
            }
        }
        SwitchingKind::Gaussian { sigma } => {
            let c = 0.5 * (s.start + s.end);
            let x = (t - c) / sigma;
            (-0.5 * x * x).exp()
        }
        SwitchingKind::SmoothedTophat { ramp } => {
            if t <= s.start || t >= s.end {
                return 0.0;
            }
            transition((t - s.start) / ramp) * transition((s.end - t) / ramp)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Separation {
    Spacelike,
    TimelikeReachable,
    Mixed,
}

impl Separation {
    pub fn as_str(&self) -> &'static str {
        match self {
            Separation::Spacelike => "spacelike",
            Separation::TimelikeReachable => "timelike-reachable",
            Separation::Mixed => "mixed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub field: FieldSpec,
    pub detector1: DetectorSpec,
    pub detector2: DetectorSpec,
    pub switching: SwitchingSpec,
    /// Energy gap `E_e - E_g` shared by both detectors.
    pub gap: f64,
    pub quadrature: QuadraturePolicy,
}

impl ScenarioSpec {
    /// Massless field, pointlike detectors on the x axis, bump switching.
    pub fn simple(separation: f64, start: f64, end: f64, gap: f64, coupling: f64) -> Self {
        ScenarioSpec {
            field: FieldSpec::massless(),
            detector1: DetectorSpec::pointlike([0.0; 3], coupling),
            detector2: DetectorSpec::pointlike([separation, 0.0, 0.0], coupling),
            switching: SwitchingSpec::bump(start, end),
            gap,
            quadrature: QuadraturePolicy::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.detector1.validate("detector1")?;
        self.detector2.validate("detector2")?;
        self.switching.validate()?;
        self.quadrature.validate()?;
        if !(self.gap.is_finite() && self.gap > 0.0) {
            return Err(Error::InvalidScenario(format!(
                "energy gap must be positive, got {}",
                self.gap
            )));
        }
        let l = self.separation();
        if !(l.is_finite() && l > 0.0) {
            return Err(Error::InvalidScenario(
                "detectors must be at distinct positions (L > 0)".into(),
            ));
        }
        Ok(())
    }

    /// Spatial distance `L = |x1 - x2|`.
    pub fn separation(&self) -> f64 {
        let a = self.detector1.position;
        let b = self.detector2.position;
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    pub fn with_couplings(mut self, a1: f64, a2: f64) -> Self {
        self.detector1.coupling = a1;
        self.detector2.coupling = a2;
        self
    }

    pub fn with_gap(mut self, gap: f64) -> Self {
        self.gap = gap;
        self
    }
}

/// Causal relation between the two (shared) interaction windows.
///
/// Spacelike iff the largest time difference between points where both
/// switchings are on is below `L`.
pub fn classify_separation(spec: &ScenarioSpec) -> Result<Separation> {
    if !spec.switching.is_compact() {
        return Err(Error::NonCompactSupport);
    }
    let l = spec.separation();
    let w = spec.switching.length();
    Ok(if w < l {
        Separation::Spacelike
    } else if w >= TIMELIKE_REACH_FACTOR * l {
        Separation::TimelikeReachable
    } else {
        Separation::Mixed
    })
}
