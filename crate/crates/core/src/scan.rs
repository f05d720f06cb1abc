//! Parameter sweeps and their tabular output.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::capacity::classical_capacity;
use crate::channel_params::compute_params;
use crate::error::{Error, ErrorKind, Result};
use crate::scenario::{ScenarioSpec, SwitchingKind, SwitchingSpec};
use crate::vacuum::{
    casimir_energy, casimir_force, casimir_regulator, ground_state_reduced, negativity, negativity_asymptotic,
    vacuum_integrals, Regime,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

const fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    /// One value per column; NaN where the point failed.
    pub values: Vec<f64>,
    /// Integrator error estimate of the row's primary output.
    pub error: f64,
    pub separation: Option<&'static str>,
    /// `ok`, or the error that prevented the row from being computed.
    pub status: String,
    /// Class of that error, if any.
    pub failure: Option<ErrorKind>,
}

impl Row {
    fn failed(sweep: f64, width: usize, e: &Error) -> Self {
        let mut values = vec![f64::NAN; width];
        values[0] = sweep;
        Row {
            values,
            error: f64::NAN,
            separation: None,
            status: format!("failed: {e}"),
            failure: Some(e.kind()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub command: &'static str,
    /// The first column is the swept variable.
    pub columns: Vec<Column>,
    pub rows: Vec<Row>,
}

fn fmt(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{:.12e}", v + 0.0)
    }
}

impl ScanResult {
    /// Values of the named column, one per row.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r.values[k]).collect())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = format!("# {} schema_version={SCHEMA_VERSION}\n# ", self.command);
        for c in &self.columns {
            if c.unit.is_empty() {
                let _ = write!(out, "{}\t", c.name);
            } else {
                let _ = write!(out, "{}[{}]\t", c.name, c.unit);
            }
        }
        out.push_str("error\tseparation\tstatus\n");
        for r in &self.rows {
            for v in &r.values {
                out.push_str(&fmt(*v));
                out.push('\t');
            }
            let _ = writeln!(
                out,
                "{}\t{}\t{}",
                fmt(r.error),
                r.separation.unwrap_or("-"),
                r.status
            );
        }
        out
    }

    /// One JSON object per line.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let mut obj = Map::new();
            obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
            obj.insert("command".into(), json!(self.command));
            for (c, v) in self.columns.iter().zip(&r.values) {
                obj.insert(c.name.into(), json!(v));
            }
            obj.insert("error".into(), json!(r.error));
            obj.insert("separation".into(), json!(r.separation));
            obj.insert("status".into(), json!(r.status));
            out.push_str(&Value::Object(obj).to_string());
            out.push('\n');
        }
        out
    }
}

/// Evaluates `f` at every point on at most `jobs` threads, keeping sweep order.
pub fn run_points<T, F>(points: &[f64], jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    if jobs <= 1 {
        return points.iter().map(|&x| f(x)).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(|| points.par_iter().map(|&x| f(x)).collect()),
        Err(_) => points.iter().map(|&x| f(x)).collect(),
    }
}

/// `steps` evenly spaced values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if steps < 2 || !(lo < hi) {
        return Err(Error::InvalidScenario(format!(
            "sweep needs lo < hi and at least two steps, got [{lo}, {hi}] with {steps}"
        )));
    }
    Ok((0..steps)
        .map(|k| lo + (hi - lo) * k as f64 / (steps - 1) as f64)
        .collect())
}

/// Log-spaced values covering `[lo, hi]`.
pub fn logspace(lo: f64, hi: f64, steps: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0) {
        return Err(Error::InvalidScenario(format!("log sweep needs lo > 0, got {lo}")));
    }
    Ok(linspace(lo.ln(), hi.ln(), steps)?.into_iter().map(f64::exp).collect())
}

fn sorted(mut rows: Vec<Row>) -> Vec<Row> {
    rows.sort_by(|a, b| a.values[0].total_cmp(&b.values[0]));
    rows
}

/// Replaces the switching window with `[start, start + w]`, keeping its kind.
pub fn with_window(spec: &ScenarioSpec, w: f64) -> Result<ScenarioSpec> {
    let start = spec.switching.start;
    let switching = match spec.switching.kind {
        SwitchingKind::Bump => SwitchingSpec::bump(start, start + w),
        SwitchingKind::SmoothedTophat { ramp } => SwitchingSpec::smoothed_tophat(start, start + w, ramp.min(w / 2.0)),
        SwitchingKind::Gaussian { .. } => {
            return Err(Error::InvalidScenario(
                "window sweeps need compactly supported switching".into(),
            ))
        }
    };
    Ok(ScenarioSpec {
        switching,
        ..spec.clone()
    })
}

/// Classical capacity and rate against the window length.
pub fn capacity_scan(spec: &ScenarioSpec, windows: &[f64], jobs: usize) -> Result<ScanResult> {
    let columns = vec![
        col("window", "time"),
        col("rate", "bits/time"),
        col("capacity", "bits"),
        col("prior", ""),
        col("pe", ""),
        col("a", ""),
        col("b", ""),
        col("c_re", ""),
        col("c_im", ""),
        col("d_re", ""),
        col("d_im", ""),
    ];
    let width = columns.len();
    let rows = run_points(windows, jobs, |w| {
        let point = || -> Result<Row> {
            let s = with_window(spec, w)?;
            let p = compute_params(&s)?;
            let c = classical_capacity(&p)?;
            let [upe, ua, ub, _, _] = p.meta.uncertainties;
            Ok(Row {
                values: vec![
                    w,
                    c.rate.unwrap_or(f64::NAN),
                    c.bits,
                    c.prior,
                    p.pe,
                    p.a,
                    p.b,
                    p.c.re,
                    p.c.im,
                    p.d.re,
                    p.d.im,
                ],
                error: upe + ua + ub,
                separation: p.meta.separation.map(|s| s.as_str()),
                status: "ok".into(),
                failure: None,
            })
        };
        point().unwrap_or_else(|e| Row::failed(w, width, &e))
    });
    Ok(ScanResult {
        command: "capacity-scan",
        columns,
        rows: sorted(rows),
    })
}

/// Ground-state negativity against separation for Gaussian-smeared detectors.
pub fn negativity_scan(de: f64, dx: f64, m: f64, alpha: f64, ls: &[f64], jobs: usize) -> Result<ScanResult> {
    let columns = vec![
        col("L", "length"),
        col("negativity", ""),
        col("negativity_per_alpha2", ""),
        col("asymptotic_per_alpha2", ""),
        col("r_minus_s", ""),
        col("R", ""),
        col("S", ""),
        col("T", ""),
    ];
    let width = columns.len();
    let regime = if m <= de { Regime::GapDominated } else { Regime::MassDominated };
    let rows = run_points(ls, jobs, |l| {
        let point = || -> Result<Row> {
            let v = vacuum_integrals(de, l, dx, m)?;
            let g = ground_state_reduced(alpha, &v)?;
            let n = negativity(&g.matrix);
            let a2 = alpha * alpha;
            let asym = negativity_asymptotic(de, l, dx, m, regime).value;
            Ok(Row {
                values: vec![l, n, if a2 > 0.0 { n / a2 } else { f64::NAN }, asym, v.r.abs() - v.s, v.r, v.s, v.t],
                error: v.errors.iter().sum(),
                separation: None,
                status: "ok".into(),
                failure: None,
            })
        };
        point().unwrap_or_else(|e| Row::failed(l, width, &e))
    });
    Ok(ScanResult {
        command: "negativity-scan",
        columns,
        rows: sorted(rows),
    })
}

/// Casimir-Polder energy and force against separation.
pub fn casimir_scan(de: f64, alpha: f64, ls: &[f64], jobs: usize) -> Result<ScanResult> {
    let columns = vec![col("L", "length"), col("energy", "energy"), col("force", "energy/length")];
    let width = columns.len();
    let rows = run_points(ls, jobs, |l| {
        let point = || -> Result<Row> {
            let e = casimir_energy(de, l, alpha, &casimir_regulator(l))?;
            let f = casimir_force(de, l, alpha)?;
            Ok(Row {
                values: vec![l, e.energy, f],
                error: e.error,
                separation: None,
                status: "ok".into(),
                failure: None,
            })
        };
        point().unwrap_or_else(|e| Row::failed(l, width, &e))
    });
    Ok(ScanResult {
        command: "casimir-scan",
        columns,
        rows: sorted(rows),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ScanResult {
        ScanResult {
            command: "demo",
            columns: vec![col("L", "length"), col("x", "")],
            rows: vec![
                Row {
                    values: vec![1.0, 0.5],
                    error: 1e-9,
                    separation: Some("spacelike"),
                    status: "ok".into(),
                    failure: None,
                },
                Row::failed(2.0, 2, &Error::Domain("bad".into())),
            ],
        }
    }

    #[test]
    fn tsv_layout() {
        let t = table().to_tsv();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "# demo schema_version=1");
        assert_eq!(lines[1], "# L[length]\tx\terror\tseparation\tstatus");
        assert!(lines[2].starts_with("1.000000000000e0\t5.000000000000e-1\t"));
        assert!(lines[3].contains("nan") && lines[3].ends_with("failed: domain error: bad"));
    }

    #[test]
    fn json_rows_carry_schema_and_nulls() {
        let j = table().to_json_lines();
        let rows: Vec<Value> = j.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(rows[0]["schema_version"], 1);
        assert_eq!(rows[0]["x"], 0.5);
        assert!(rows[1]["x"].is_null());
    }

    #[test]
    fn sweeps() {
        assert_eq!(linspace(0.0, 1.0, 3).unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(linspace(0.0, 1.0, 1).is_err());
        let l = logspace(1.0, 100.0, 3).unwrap();
        assert!((l[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_keeps_order() {
        let pts = linspace(0.0, 1.0, 9).unwrap();
        assert_eq!(run_points(&pts, 3, |x| x * 2.0), run_points(&pts, 1, |x| x * 2.0));
    }
}
