use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use rqchannel::capacity::{classical_capacity, coherent_information_with, DEFAULT_RESTARTS, DEFAULT_SEED};
use rqchannel::channel_algebra::{choi, kraus_set, RANK_THRESHOLD};
use rqchannel::channel_params::{compute_params, fermi_probability, glauber_leakage};
use rqchannel::config::load_scenario;
use rqchannel::scan::{self, ScanResult, SCHEMA_VERSION};
use rqchannel::scenario::{ScenarioSpec, Smearing};
use rqchannel::{Error, ErrorKind, Result};

#[derive(Parser)]
#[command(name = "rqchannel", version, about = "Relativistic quantum channel between two detectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Channel parameters, Kraus/Choi structure and capacity for one scenario
    Channel(Common),
    /// Capacity and rate against the interaction window length
    CapacityScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.25)]
        window_min: f64,
        #[arg(long, default_value_t = 4.0)]
        window_max: f64,
        #[arg(long, default_value_t = 16)]
        window_steps: usize,
    },
    /// Ground-state negativity against separation (log-spaced)
    NegativityScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Casimir-Polder energy and force against separation (log-spaced)
    CasimirScan {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        sweep: Sweep,
    },
    /// Fermi-problem transition probability
    Fermi(Common),
    /// Leading leakage term of the Glauber-detector channel
    Glauber(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Detector separation; moves detector 2 along the detector axis
    #[arg(long = "L")]
    l: Option<f64>,
    /// Energy gap
    #[arg(long = "dE")]
    de: Option<f64>,
    /// Coupling of both detectors
    #[arg(long)]
    alpha: Option<f64>,
    /// Field mass
    #[arg(long)]
    mass: Option<f64>,
    /// Gaussian smearing width (negativity scan)
    #[arg(long = "dX")]
    dx: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    out: Format,
    /// Parallel scan points
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed of the coherent-information restarts
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct Sweep {
    #[arg(long = "L-min")]
    l_min: Option<f64>,
    #[arg(long = "L-max")]
    l_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
}

fn exit_code(kind: ErrorKind) -> ExitCode {
    ExitCode::from(match kind {
        ErrorKind::Config => 2,
        ErrorKind::Physics => 3,
        ErrorKind::Convergence => 4,
    })
}

impl Common {
    fn scenario(&self, required: bool) -> Result<ScenarioSpec> {
        let mut spec = match &self.config {
            Some(path) => load_scenario(path)?,
            None if required => {
                return Err(Error::Config {
                    line: 0,
                    message: "--config is required for this command".into(),
                })
            }
            None => ScenarioSpec::simple(1.0, 0.0, 1.0, 1.0, 0.1),
        };
        if let Some(l) = self.l {
            let (a, b) = (spec.detector1.position, spec.detector2.position);
            let d = spec.separation();
            let dir = [(b[0] - a[0]) / d, (b[1] - a[1]) / d, (b[2] - a[2]) / d];
            spec.detector2.position = [a[0] + l * dir[0], a[1] + l * dir[1], a[2] + l * dir[2]];
        }
        if let Some(g) = self.de {
            spec.gap = g;
        }
        if let Some(a) = self.alpha {
            spec = spec.with_couplings(a, a);
        }
        if let Some(m) = self.mass {
            spec.field.mass = m;
        }
        if let Some(w) = self.dx {
            spec.detector1.smearing = Smearing::Gaussian(w);
            spec.detector2.smearing = Smearing::Gaussian(w);
        }
        spec.validate()?;
        Ok(spec)
    }
}

/// Single-point results: `quantity, value, uncertainty` rows.
struct Report {
    command: &'static str,
    entries: Vec<(String, Value, Option<f64>)>,
}

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        // `+ 0.0` folds -0 into 0
        format!("{:.12e}", v + 0.0)
    }
}

impl Report {
    fn new(command: &'static str) -> Self {
        Report {
            command,
            entries: Vec::new(),
        }
    }

    fn num(&mut self, name: &str, v: f64, err: Option<f64>) {
        self.entries.push((name.into(), json!(v), err));
    }

    fn text(&mut self, name: &str, v: impl Into<Value>) {
        self.entries.push((name.into(), v.into(), None));
    }

    fn render(&self, out: Format) -> String {
        match out {
            Format::Tsv => {
                let mut s = format!(
                    "# {} schema_version={SCHEMA_VERSION}\n# quantity\tvalue\tuncertainty\n",
                    self.command
                );
                for (k, v, e) in &self.entries {
                    let v = match v {
                        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
                        Value::String(t) => t.clone(),
                        Value::Null => "nan".into(),
                        other => other.to_string(),
                    };
                    let e = e.map(num).unwrap_or_else(|| "-".into());
                    s.push_str(&format!("{k}\t{v}\t{e}\n"));
                }
                s
            }
            Format::Json => {
                let mut obj = Map::new();
                obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
                obj.insert("command".into(), json!(self.command));
                for (k, v, e) in &self.entries {
                    obj.insert(k.clone(), v.clone());
                    if let Some(e) = e {
                        obj.insert(format!("{k}_uncertainty"), json!(e));
                    }
                }
                format!("{}\n", Value::Object(obj))
            }
        }
    }
}

fn channel(c: &Common) -> Result<Report> {
    let spec = c.scenario(true)?;
    let p = compute_params(&spec)?;
    let mut r = Report::new("channel");
    let sep = p.meta.separation.map(|s| s.as_str()).unwrap_or("undefined");
    r.text("separation", sep);
    let u = p.meta.uncertainties;
    r.num("pe", p.pe, Some(u[0]));
    r.num("a", p.a, Some(u[1]));
    r.num("b", p.b, Some(u[2]));
    r.num("c_re", p.c.re, Some(u[3]));
    r.num("c_im", p.c.im, Some(u[3]));
    r.num("d_re", p.d.re, Some(u[4]));
    r.num("d_im", p.d.im, Some(u[4]));
    match kraus_set(&p) {
        Ok(k) => {
            r.text("kraus", "ok");
            r.num("kraus_completeness_defect", k.completeness_defect(), None);
        }
        Err(e) => r.text("kraus", format!("failed: {e}")),
    }
    let ch = choi(&p);
    for (i, e) in ch.eigenvalues().iter().enumerate() {
        r.num(&format!("choi_eigenvalue_{i}"), *e, None);
    }
    r.text("choi_rank", ch.rank(RANK_THRESHOLD));
    let cap = classical_capacity(&p)?;
    r.num("capacity_bits", cap.bits, None);
    r.num("capacity_nats", cap.nats, None);
    r.num("prior", cap.prior, None);
    r.num("rate", cap.rate.unwrap_or(f64::NAN), None);
    r.text("degenerate", cap.degenerate);
    match coherent_information_with(&p, DEFAULT_RESTARTS, c.seed) {
        Ok(ci) => {
            r.num("coherent_information", ci.value, None);
            r.num("coherent_information_clamped", ci.clamped, None);
        }
        Err(e) => r.text("coherent_information", format!("failed: {e}")),
    }
    for w in &p.meta.warnings {
        r.text("warning", w.as_str());
    }
    Ok(r)
}

fn render_scan(s: &ScanResult, out: Format) -> String {
    match out {
        Format::Tsv => s.to_tsv(),
        Format::Json => s.to_json_lines(),
    }
}

fn run(cli: Cli) -> Result<(String, Option<ErrorKind>)> {
    let scan_out = |s: ScanResult, out| {
        let failure = s.rows.iter().find_map(|r| r.failure);
        (render_scan(&s, out), failure)
    };
    Ok(match cli.command {
        Command::Channel(c) => (channel(&c)?.render(c.out), None),
        Command::CapacityScan {
            common,
            window_min,
            window_max,
            window_steps,
        } => {
            let spec = common.scenario(false)?;
            let windows = scan::linspace(window_min, window_max, window_steps)?;
            scan_out(scan::capacity_scan(&spec, &windows, common.jobs)?, common.out)
        }
        Command::NegativityScan { common, sweep } => {
            let file = common.config.as_ref().map(|p| load_scenario(p)).transpose()?;
            let de = common.de.or(file.as_ref().map(|s| s.gap)).unwrap_or(1.0);
            let m = common.mass.or(file.as_ref().map(|s| s.field.mass)).unwrap_or(0.0);
            let alpha = common.alpha.or(file.as_ref().map(|s| s.detector1.coupling)).unwrap_or(0.01);
            let smear = file.as_ref().and_then(|s| match s.detector1.smearing {
                Smearing::Gaussian(w) => Some(w),
                Smearing::Pointlike => None,
            });
            let dx = common.dx.or(smear).unwrap_or(1e-3);
            let ls = scan::logspace(
                sweep.l_min.unwrap_or(1e-3),
                sweep.l_max.unwrap_or(1.0),
                sweep.steps.unwrap_or(16),
            )?;
            scan_out(scan::negativity_scan(de, dx, m, alpha, &ls, common.jobs)?, common.out)
        }
        Command::CasimirScan { common, sweep } => {
            let file = common.config.as_ref().map(|p| load_scenario(p)).transpose()?;
            let de = common.de.or(file.as_ref().map(|s| s.gap)).unwrap_or(1.0);
            let alpha = common.alpha.or(file.as_ref().map(|s| s.detector1.coupling)).unwrap_or(0.1);
            let ls = scan::logspace(
                sweep.l_min.unwrap_or(10.0),
                sweep.l_max.unwrap_or(100.0),
                sweep.steps.unwrap_or(5),
            )?;
            scan_out(scan::casimir_scan(de, alpha, &ls, common.jobs)?, common.out)
        }
        Command::Fermi(c) => {
            let f = fermi_probability(&c.scenario(true)?)?;
            let mut r = Report::new("fermi");
            r.num("fermi_probability", f.value, Some(f.uncertainty));
            (r.render(c.out), None)
        }
        Command::Glauber(c) => {
            let g = glauber_leakage(&c.scenario(true)?)?;
            let mut r = Report::new("glauber");
            r.num("leakage_re", g.value.re, Some(g.uncertainty));
            r.num("leakage_im", g.value.im, Some(g.uncertainty));
            r.num("leakage_abs", g.value.norm(), Some(g.uncertainty));
            (r.render(c.out), None)
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok((text, failure)) => {
            print!("{text}");
            match failure {
                Some(kind) => {
                    eprintln!("error: some scan points failed; see the status column");
                    exit_code(kind)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.kind())
        }
    }
}
