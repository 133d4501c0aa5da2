//! Run configuration: a JSON file overlaid by command-line flags, validated
//! in full before any computation starts.

use biharm::dynamics::Scheme;
use biharm::oscillatory::DerivativeKind;
use biharm::params::{Exponent, ModelParams, Sign, DEFAULT_EPSILON_R0};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::PathBuf;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "BIHARM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "biharm-out";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Admissible,
    Exponents,
    Dispersive,
    LocalizedDispersive,
    Fundsol,
    KernelDecay,
    GroundState,
    Evolve,
    Decompose,
    Concentrate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Admissible => "admissible",
            Experiment::Exponents => "exponents",
            Experiment::Dispersive => "dispersive",
            Experiment::LocalizedDispersive => "localized-dispersive",
            Experiment::Fundsol => "fundsol",
            Experiment::KernelDecay => "kernel-decay",
            Experiment::GroundState => "ground-state",
            Experiment::Evolve => "evolve",
            Experiment::Decompose => "decompose",
            Experiment::Concentrate => "concentrate",
        }
    }

    /// Experiments whose computation involves the nonlinearity exponent p.
    fn uses_p(self) -> bool {
        matches!(
            self,
            Experiment::Exponents | Experiment::GroundState | Experiment::Evolve | Experiment::Decompose
        )
    }
}

/// Initial data for the time-dependent experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialData {
    /// amplitude · e^{-r²/(2 width²)}.
    Gaussian,
    /// The ground state Q, evolved numerically.
    Soliton,
    /// The exact orbit e^{-it}Q.
    SolitonOrbit,
    /// Σ amplitude · e^{-(r−c)²/(2 width²)} over `centers`.
    Bumps,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    pub n: Option<u32>,
    pub p: Option<f64>,
    pub sign: Option<Sign>,
    pub epsilon_r0: Option<f64>,
    pub strict_regime: Option<bool>,
}

/// Everything a run may be configured with. Absent fields take
/// experiment-dependent defaults in [`RunConfig::resolve`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Option<Experiment>,
    #[serde(default)]
    pub params: ParamsSection,
    pub output_dir: Option<PathBuf>,
    pub workers: Option<usize>,
    /// Refuse settings that could make artifacts depend on scheduling.
    pub deterministic: Option<bool>,

    pub dt: Option<f64>,
    #[serde(rename = "T")]
    pub t_final: Option<f64>,
    pub rmax: Option<f64>,
    pub m: Option<usize>,
    pub mu3: Option<f64>,

    pub q: Option<String>,
    pub r: Option<String>,
    pub alpha: Option<u32>,
    pub width: Option<f64>,
    pub t_min: Option<f64>,
    pub t_max: Option<f64>,
    pub points: Option<usize>,
    pub scales: Option<Vec<i32>>,
    pub scaled_times: Option<Vec<f64>>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub beta: Option<u32>,
    pub derivative: Option<DerivativeKind>,
    pub z: Option<f64>,
    pub mu: Option<f64>,
    pub centers: Option<Vec<f64>>,
    pub separation_exponents: Option<Vec<i32>>,
    pub table_spacing: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub data: Option<InitialData>,
    pub amplitude: Option<f64>,
    pub scheme: Option<Scheme>,
    pub checkpoint_every: Option<usize>,
    pub linear_only: Option<bool>,
    pub window: Option<(f64, f64)>,
    pub probes: Option<Vec<f64>>,
    pub big_n: Option<i32>,
    pub c_exp: Option<f64>,
    pub cap_exponent: Option<f64>,
}

/// Overlay `top` onto `base` key by key; nested objects merge recursively.
pub fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Object(b), Value::Object(t)) => {
            for (k, v) in t {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, t) => *b = t,
    }
}

/// Parse `key=value` into a JSON object, reading the value as JSON when it
/// parses and as a string otherwise. Dotted keys address nested objects.
pub fn parse_assignment(s: &str) -> Result<Value, String> {
    let (key, raw) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    if key.is_empty() {
        return Err(format!("empty key in {s:?}"));
    }
    let mut value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    for part in key.rsplit('.') {
        let mut m = Map::new();
        m.insert(part.to_string(), value);
        value = Value::Object(m);
    }
    Ok(value)
}

/// A configuration with every default filled in and every field checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Resolved {
    pub experiment: Experiment,
    pub params: ModelParams,
    pub output_dir: PathBuf,
    pub workers: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub rmax: f64,
    pub m: usize,
    pub mu3: f64,
    pub q: String,
    pub r: String,
    pub alpha: u32,
    pub width: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    pub scales: Vec<i32>,
    pub scaled_times: Vec<f64>,
    pub x_min: f64,
    pub x_max: f64,
    pub beta: Option<u32>,
    pub derivative: DerivativeKind,
    pub z: f64,
    pub mu: f64,
    pub centers: Vec<f64>,
    pub separation_exponents: Vec<i32>,
    pub table_spacing: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub data: InitialData,
    pub amplitude: f64,
    pub scheme: Scheme,
    pub checkpoint_every: usize,
    pub linear_only: bool,
    pub window: (f64, f64),
    pub probes: Vec<f64>,
    pub big_n: i32,
    pub c_exp: f64,
    pub cap_exponent: f64,
}

fn positive(name: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{name} must be positive and finite, got {v}"))
    }
}

impl RunConfig {
    pub fn resolve(self, env_out: Option<PathBuf>) -> Result<Resolved, String> {
        use Experiment as E;
        let experiment = self.experiment.ok_or("no experiment selected")?;
        let ps = &self.params;
        let mut params = ModelParams::new(ps.n.unwrap_or(5), ps.p.unwrap_or(3.0), ps.sign.unwrap_or(Sign::Focusing))
            .with_epsilon_r0(ps.epsilon_r0.unwrap_or(DEFAULT_EPSILON_R0));
        if !ps.strict_regime.unwrap_or(true) || !experiment.uses_p() {
            params = params.without_regime_check();
        }
        params.validate().map_err(|e| e.to_string())?;
        if self.deterministic == Some(false) {
            return Err("nondeterministic runs are not supported".into());
        }

        let data = self.data.unwrap_or(match experiment {
            E::Concentrate => InitialData::Bumps,
            _ => InitialData::Gaussian,
        });
        let soliton = matches!(data, InitialData::Soliton | InitialData::SolitonOrbit);
        let (rmax_default, m_default) = match experiment {
            E::Dispersive => (3.0, 128),
            E::GroundState => (48.0, 192),
            E::Concentrate => (24.0, 256),
            _ if soliton => (48.0, 192),
            _ => (30.0, 128),
        };
        let t_final = positive("T", self.t_final.unwrap_or(1.0))?;
        let dt = positive("dt", self.dt.unwrap_or(1e-3))?;
        if experiment == E::Evolve || experiment == E::Decompose {
            let steps = t_final / dt;
            if (steps - steps.round()).abs() > 1e-9 * steps.max(1.0) {
                return Err(format!("T = {t_final} is not a whole number of steps dt = {dt}"));
            }
        }
        let m = self.m.unwrap_or(m_default);
        if m < 2 {
            return Err(format!("m must be at least 2, got {m}"));
        }
        let mu3 = self.mu3.unwrap_or(0.5);
        if !(mu3 > 0.0 && mu3 < 1.0) {
            return Err(format!("mu3 must lie in (0, 1), got {mu3}"));
        }
        let (x_lo, x_hi, x_pts) = if self.beta.is_some() { (100.0, 1e4, 25) } else { (10.0, 1e3, 20) };
        let window = self.window.unwrap_or((0.5 * t_final, t_final));
        if !(window.0 >= 0.0 && window.1 > window.0 && window.1 <= t_final * (1.0 + 1e-12)) {
            return Err(format!("window {window:?} must satisfy 0 ≤ a < b ≤ T"));
        }
        let probes = self
            .probes
            .unwrap_or_else(|| (0..5).map(|i| window.0 * i as f64 / 4.0).collect());
        if probes.iter().any(|&t| !(t >= 0.0 && t <= t_final)) {
            return Err("probe times must lie in [0, T]".into());
        }
        let q = self.q.unwrap_or_else(|| "2".into());
        let r = self.r.unwrap_or_else(|| "inf".into());
        for (name, v) in [("q", &q), ("r", &r)] {
            if Exponent::parse(v).is_none() {
                return Err(format!("{name} = {v:?} is neither a number nor inf"));
            }
        }
        let resolved = Resolved {
            experiment,
            params,
            output_dir: self
                .output_dir
                .or(env_out)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
            workers: self.workers.unwrap_or(1),
            dt,
            t_final,
            rmax: positive("rmax", self.rmax.unwrap_or(rmax_default))?,
            m,
            mu3,
            q,
            r,
            alpha: self.alpha.unwrap_or(0),
            width: positive(
                "width",
                self.width.unwrap_or(match experiment {
                    E::LocalizedDispersive => 0.01,
                    E::Dispersive => 0.25,
                    E::Concentrate => 0.3,
                    _ => 1.0,
                }),
            )?,
            t_min: positive("t_min", self.t_min.unwrap_or(1.0))?,
            t_max: positive("t_max", self.t_max.unwrap_or(1e3))?,
            points: self.points.unwrap_or(x_pts),
            scales: self.scales.unwrap_or_else(|| vec![0, 1, 2, 3]),
            scaled_times: self
                .scaled_times
                .unwrap_or_else(|| biharm::quad::logspace(200.0, 2e4, 10)),
            x_min: positive("x_min", self.x_min.unwrap_or(x_lo))?,
            x_max: positive("x_max", self.x_max.unwrap_or(x_hi))?,
            beta: self.beta,
            derivative: self.derivative.unwrap_or(DerivativeKind::FrozenStationaryPoint),
            z: self.z.unwrap_or(4.0),
            mu: positive("mu", self.mu.unwrap_or(1.0))?,
            centers: self.centers.unwrap_or_else(|| match experiment {
                E::Concentrate => vec![5.0, 11.0],
                _ => vec![2.0],
            }),
            separation_exponents: self.separation_exponents.unwrap_or_else(|| (0..=8).collect()),
            table_spacing: positive("table_spacing", self.table_spacing.unwrap_or(0.01))?,
            tol: positive("tol", self.tol.unwrap_or(biharm::ground_state::DEFAULT_TOL))?,
            max_iter: self.max_iter.unwrap_or(biharm::ground_state::DEFAULT_MAX_ITER),
            data,
            amplitude: self.amplitude.unwrap_or(1.0),
            scheme: self.scheme.unwrap_or_default(),
            checkpoint_every: self.checkpoint_every.unwrap_or(10).max(1),
            linear_only: self.linear_only.unwrap_or(false),
            window,
            probes,
            big_n: self.big_n.unwrap_or(4),
            c_exp: positive("c_exp", self.c_exp.unwrap_or(1.0))?,
            cap_exponent: positive("cap_exponent", self.cap_exponent.unwrap_or(biharm::dynamics::DEFAULT_CAP_EXPONENT))?,
        };
        if resolved.workers == 0 {
            return Err("workers must be at least 1".into());
        }
        if resolved.t_max <= resolved.t_min || resolved.x_max <= resolved.x_min {
            return Err("sample ranges must be increasing".into());
        }
        if resolved.beta.is_some_and(|b| b > 2) {
            return Err("beta must be 0, 1 or 2".into());
        }
        if experiment == E::Concentrate && data != InitialData::Bumps && data != InitialData::Gaussian {
            return Err("concentrate accepts gaussian or bumps data".into());
        }
        if soliton && params.sign != Sign::Focusing {
            return Err("soliton data needs the focusing sign".into());
        }
        Ok(resolved)
    }
}
