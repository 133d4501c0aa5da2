//! `biharm`: runs one experiment per invocation and writes a JSON report,
//! CSV tables and a text summary into the output directory.
//!
//! Exit status: 0 all checks pass, 1 some check failed, 2 invalid
//! configuration, 3 computation error. Errors are printed to stderr as a
//! single JSON record and leave no files behind.

mod artifacts;
mod config;
mod experiments;

use clap::{Args, Parser, Subcommand};
use config::{merge, parse_assignment, Experiment, RunConfig, OUT_DIR_ENV};
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "biharm", version, about = "Experiments for the biharmonic nonlinear Schrödinger equation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether (q, r) is a B-admissible pair.
    Admissible {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        q: Option<String>,
        #[arg(long)]
        r: Option<String>,
    },
    /// Derived exponents s_c, r₀, q₀, Q, p̃.
    Exponents(Common),
    /// Sup-norm decay of the free flow of a Gaussian.
    Dispersive {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        alpha: Option<u32>,
    },
    /// Decay of frequency-localized free flows across dyadic scales.
    LocalizedDispersive(Common),
    /// Decay of the fundamental solution, or of radial derivatives of its
    /// modified form with --beta.
    Fundsol {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        beta: Option<u32>,
    },
    /// Decay of the bipolar kernel in the time separation.
    KernelDecay(Common),
    /// Petviashvili solve for the ground state.
    GroundState(Common),
    /// Time evolution with diagnostics.
    Evolve(Common),
    /// Radiative / nonradiative split of a trajectory.
    Decompose(Common),
    /// Greedy concentration points of a field.
    Concentrate(Common),
    /// Print the versioned JSON schema of experiment reports.
    ReportSchema,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    /// focusing or defocusing.
    #[arg(long)]
    sign: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    dt: Option<f64>,
    #[arg(long = "T", allow_hyphen_values = true)]
    t_final: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    mu3: Option<f64>,
    #[arg(long = "epsilon-r0")]
    epsilon_r0: Option<f64>,
    /// Output directory (default: $BIHARM_OUT_DIR, then ./biharm-out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// Set any configuration field, e.g. --set data=soliton --set window=[1,2].
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn overrides(&self) -> Result<Value, String> {
        let mut v = json!({});
        let mut put = |key: &str, value: Value| merge(&mut v, parse_assignment(&format!("{key}={value}")).expect("key"));
        if let Some(x) = self.n {
            put("params.n", json!(x));
        }
        if let Some(x) = self.p {
            put("params.p", json!(x));
        }
        if let Some(x) = &self.sign {
            put("params.sign", json!(x));
        }
        if let Some(x) = self.epsilon_r0 {
            put("params.epsilon_r0", json!(x));
        }
        if let Some(x) = self.dt {
            put("dt", json!(x));
        }
        if let Some(x) = self.t_final {
            put("T", json!(x));
        }
        if let Some(x) = self.rmax {
            put("rmax", json!(x));
        }
        if let Some(x) = self.m {
            put("m", json!(x));
        }
        if let Some(x) = self.mu3 {
            put("mu3", json!(x));
        }
        if let Some(x) = &self.out {
            put("output_dir", json!(x));
        }
        if let Some(x) = self.workers {
            put("workers", json!(x));
        }
        for s in &self.set {
            merge(&mut v, parse_assignment(s)?);
        }
        Ok(v)
    }
}

enum Failure {
    Config(String),
    Compute(String),
}

impl Failure {
    fn exit(self) -> ExitCode {
        let (kind, code, message) = match self {
            Failure::Config(m) => ("config", 2, m),
            Failure::Compute(m) => ("compute", 3, m),
        };
        eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
        ExitCode::from(code)
    }
}

fn build_config(experiment: Experiment, common: &Common, extra: Value) -> Result<config::Resolved, Failure> {
    let mut base = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        }
        None => json!({}),
    };
    if !base.is_object() {
        return Err(Failure::Config("configuration must be a JSON object".into()));
    }
    if let Some(file_exp) = base.get("experiment").and_then(Value::as_str) {
        if file_exp != experiment.name() {
            return Err(Failure::Config(format!(
                "configuration is for {file_exp}, but {} was requested",
                experiment.name()
            )));
        }
    }
    merge(&mut base, json!({"experiment": experiment.name()}));
    merge(&mut base, extra);
    merge(&mut base, common.overrides().map_err(Failure::Config)?);
    let cfg: RunConfig = serde_json::from_value(base).map_err(|e| Failure::Config(e.to_string()))?;
    let env_out = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    cfg.resolve(env_out).map_err(Failure::Config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return {
            let first = e.to_string().lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            Failure::Config(first).exit()
        },
    };
    let opt = |key: &str, v: Option<Value>| v.map(|v| json!({ key: v })).unwrap_or(json!({}));
    let (experiment, common, extra) = match cli.command {
        Command::ReportSchema => {
            let text = serde_json::to_string_pretty(&biharm::report::report_schema()).expect("schema");
            let _ = writeln!(std::io::stdout(), "{text}");
            return ExitCode::SUCCESS;
        }
        Command::Admissible { common, q, r } => {
            let mut e = opt("q", q.map(Value::from));
            merge(&mut e, opt("r", r.map(Value::from)));
            (Experiment::Admissible, common, e)
        }
        Command::Exponents(c) => (Experiment::Exponents, c, json!({})),
        Command::Dispersive { common, alpha } => (Experiment::Dispersive, common, opt("alpha", alpha.map(Value::from))),
        Command::LocalizedDispersive(c) => (Experiment::LocalizedDispersive, c, json!({})),
        Command::Fundsol { common, beta } => (Experiment::Fundsol, common, opt("beta", beta.map(Value::from))),
        Command::KernelDecay(c) => (Experiment::KernelDecay, c, json!({})),
        Command::GroundState(c) => (Experiment::GroundState, c, json!({})),
        Command::Evolve(c) => (Experiment::Evolve, c, json!({})),
        Command::Decompose(c) => (Experiment::Decompose, c, json!({})),
        Command::Concentrate(c) => (Experiment::Concentrate, c, json!({})),
    };
    let cfg = match build_config(experiment, &common, extra) {
        Ok(c) => c,
        Err(f) => return f.exit(),
    };
    // a global pool only fails to build if one already exists
    let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build_global();
    let outcome = match experiments::run(&cfg) {
        Ok(o) => o,
        Err(e) => return Failure::Compute(e.to_string()).exit(),
    };
    let passed = outcome.report.passed();
    if let Err(e) = artifacts::write(&cfg, &outcome) {
        return Failure::Compute(format!("writing artifacts: {e}")).exit();
    }
    print!("{}", outcome.report.summary());
    if passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
