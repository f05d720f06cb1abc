//! Scenario files: TOML with a fixed key set.
//!
//! ```toml
//! mass = 0.0
//! gap = 1.0
//!
//! [detector1]
//! position = [0.0, 0.0, 0.0]
//! coupling = 0.1
//! smearing = 0.0        # Gaussian width; 0 or absent is pointlike
//!
//! [detector2]
//! position = [1.0, 0.0, 0.0]
//! coupling = 0.1
//!
//! [switching]
//! kind = "bump"         # bump | gaussian | tophat
//! start = 0.0
//! end = 4.0
//! # sigma, center (gaussian); ramp (tophat)
//!
//! [quadrature]          # optional, every key optional
//! rel_tol = 1e-6
//! abs_floor = 1e-12
//! max_subdivisions = 2000
//! oscillation_factor = 8.0
//! eps_start = 0.1
//! eps_rungs = 8
//! eps_ratio = 0.5
//! extrapolation_order = 6
//! ```

use std::ops::Range;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::quadrature::{QuadraturePolicy, Regulator};
use crate::scenario::{DetectorSpec, FieldSpec, ScenarioSpec, Smearing, SwitchingSpec};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    #[serde(default)]
    mass: f64,
    gap: Spanned<f64>,
    detector1: RawDetector,
    detector2: RawDetector,
    switching: Spanned<RawSwitching>,
    #[serde(default)]
    quadrature: Option<Spanned<RawQuadrature>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetector {
    position: [f64; 3],
    coupling: f64,
    #[serde(default)]
    smearing: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSwitching {
    kind: Spanned<String>,
    start: Option<f64>,
    end: Option<f64>,
    center: Option<f64>,
    sigma: Option<f64>,
    ramp: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuadrature {
    rel_tol: Option<f64>,
    abs_floor: Option<f64>,
    max_subdivisions: Option<usize>,
    oscillation_factor: Option<f64>,
    eps_start: Option<f64>,
    eps_rungs: Option<usize>,
    eps_ratio: Option<f64>,
    extrapolation_order: Option<usize>,
}

fn line_of(text: &str, span: &Range<usize>) -> usize {
    text[..span.start.min(text.len())].matches('\n').count() + 1
}

fn config_error(text: &str, span: &Range<usize>, message: impl Into<String>) -> Error {
    Error::Config {
        line: line_of(text, span),
        message: message.into(),
    }
}

fn detector(raw: &RawDetector) -> DetectorSpec {
    DetectorSpec {
        position: raw.position,
        coupling: raw.coupling,
        smearing: if raw.smearing > 0.0 {
            Smearing::Gaussian(raw.smearing)
        } else {
            Smearing::Pointlike
        },
    }
}

fn switching(text: &str, raw: &Spanned<RawSwitching>) -> Result<SwitchingSpec> {
    let s = raw.get_ref();
    let span = raw.span();
    let need = |v: Option<f64>, key: &str| {
        v.ok_or_else(|| config_error(text, &span, format!("[switching] needs `{key}`")))
    };
    let unused = |v: Option<f64>, key: &str| match v {
        Some(_) => Err(config_error(
            text,
            &span,
            format!("`{key}` does not apply to switching kind `{}`", s.kind.get_ref()),
        )),
        None => Ok(()),
    };
    match s.kind.get_ref().as_str() {
        "bump" => {
            unused(s.sigma, "sigma")?;
            unused(s.ramp, "ramp")?;
            unused(s.center, "center")?;
            Ok(SwitchingSpec::bump(need(s.start, "start")?, need(s.end, "end")?))
        }
        "tophat" => {
            unused(s.sigma, "sigma")?;
            unused(s.center, "center")?;
            Ok(SwitchingSpec::smoothed_tophat(
                need(s.start, "start")?,
                need(s.end, "end")?,
                need(s.ramp, "ramp")?,
            ))
        }
        "gaussian" => {
            unused(s.ramp, "ramp")?;
            unused(s.start, "start")?;
            unused(s.end, "end")?;
            Ok(SwitchingSpec::gaussian(need(s.center, "center")?, need(s.sigma, "sigma")?))
        }
        other => Err(config_error(
            text,
            &s.kind.span(),
            format!("unknown switching kind `{other}` (expected bump, gaussian or tophat)"),
        )),
    }
}

fn quadrature(raw: &RawQuadrature) -> QuadraturePolicy {
    let d = QuadraturePolicy::default();
    let regulator = if raw.eps_start.is_some() || raw.eps_rungs.is_some() || raw.eps_ratio.is_some() {
        Regulator::geometric(
            raw.eps_start.unwrap_or(d.regulator.ladder[0]),
            raw.eps_ratio.unwrap_or(0.5),
            raw.eps_rungs.unwrap_or(d.regulator.ladder.len()),
        )
    } else {
        d.regulator.clone()
    };
    QuadraturePolicy {
        rel_tol: raw.rel_tol.unwrap_or(d.rel_tol),
        abs_floor: raw.abs_floor.unwrap_or(d.abs_floor),
        max_subdivisions: raw.max_subdivisions.unwrap_or(d.max_subdivisions),
        oscillation_factor: raw.oscillation_factor.unwrap_or(d.oscillation_factor),
        regulator,
        extrapolation_order: raw.extrapolation_order.unwrap_or(d.extrapolation_order),
    }
}

/// Parses and validates a scenario. Syntax and schema errors carry the
/// line they occur on.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map(|s| line_of(text, &s)).unwrap_or(0),
        message: e.message().trim().to_string(),
    })?;
    let quadrature_span = raw.quadrature.as_ref().map(|q| q.span());
    let spec = ScenarioSpec {
        field: FieldSpec { mass: raw.mass },
        detector1: detector(&raw.detector1),
        detector2: detector(&raw.detector2),
        switching: switching(text, &raw.switching)?,
        gap: *raw.gap.get_ref(),
        quadrature: raw
            .quadrature
            .as_ref()
            .map(|q| quadrature(q.get_ref()))
            .unwrap_or_default(),
    };
    if let (Some(span), Err(e)) = (&quadrature_span, spec.quadrature.validate()) {
        return Err(config_error(text, span, e.to_string()));
    }
    if let Err(e) = spec.switching.validate() {
        return Err(config_error(text, &raw.switching.span(), e.to_string()));
    }
    spec.validate()?;
    Ok(spec)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_scenario(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "gap = 1.0\n\n[detector1]\nposition = [0.0, 0.0, 0.0]\ncoupling = 0.1\n\n[detector2]\nposition = [1.0, 0.0, 0.0]\ncoupling = 0.1\n\n[switching]\nkind = \"bump\"\nstart = 0.0\nend = 4.0\n";

    #[test]
    fn parses_the_minimal_file() {
        let s = parse_scenario(BASE).unwrap();
        assert_eq!(s.separation(), 1.0);
        assert_eq!(s.switching, SwitchingSpec::bump(0.0, 4.0));
        assert_eq!(s.quadrature, QuadraturePolicy::default());
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = BASE.replace("coupling = 0.1\n\n[detector2]", "coupling = 0.1\ncolour = 3\n\n[detector2]");
        match parse_scenario(&text) {
            Err(Error::Config { line, message }) => {
                assert_eq!(line, 6);
                assert!(message.contains("colour"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_kind_reports_its_line() {
        let text = BASE.replace("\"bump\"", "\"square\"");
        assert!(matches!(parse_scenario(&text), Err(Error::Config { line: 12, .. })));
    }

    #[test]
    fn quadrature_overrides() {
        let text = format!("{BASE}\n[quadrature]\nrel_tol = 1e-4\neps_rungs = 4\n");
        let s = parse_scenario(&text).unwrap();
        assert_eq!(s.quadrature.rel_tol, 1e-4);
        assert_eq!(s.quadrature.regulator, Regulator::halving(0.1, 4));
    }
}
