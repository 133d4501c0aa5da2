//! One function per experiment, each turning a resolved configuration into
//! a report plus any extra artifacts. Nothing here touches the disk.

use crate::config::{Experiment, InitialData, Resolved};
use biharm::bipolar_kernel::{kernel_decay_fit, KernelConfig, SmoothCutoff};
use biharm::dynamics::{
    concentration_report, decomposition_report, evolve, evolve_report, orbit_trajectory, EvolveOptions, Trajectory,
};
use biharm::field::{RadialField, RadialGrid};
use biharm::ground_state::{default_seed, ground_state_report, petviashvili_solve};
use biharm::littlewood_paley::Dyadic;
use biharm::oscillatory::{fundsol_decay, radial_derivative_decay};
use biharm::params::{admissibility_verdict, derived_exponents, Exponent};
use biharm::propagator::{dispersive_fit, l1_gaussian, localized_dispersive_gaussian, PropagatorJob};
use biharm::quad::logspace;
use biharm::report::{Check, ExperimentReport};

pub struct Outcome {
    pub report: ExperimentReport,
    /// Trajectory to be written as snapshots under `trajectory/`.
    pub trajectory: Option<Trajectory>,
    /// A field to be written as a snapshot named by the string.
    pub fields: Vec<(String, RadialField)>,
}

impl From<ExperimentReport> for Outcome {
    fn from(report: ExperimentReport) -> Self {
        Self {
            report,
            trajectory: None,
            fields: Vec::new(),
        }
    }
}

type Run = Result<Outcome, biharm::Error>;

pub fn run(cfg: &Resolved) -> Run {
    match cfg.experiment {
        Experiment::Admissible => Ok(admissible(cfg).into()),
        Experiment::Exponents => Ok(exponents(cfg)?.into()),
        Experiment::Dispersive => {
            let grid = RadialGrid::new(cfg.params.n, cfg.rmax, cfg.m)?;
            let job = PropagatorJob {
                data: l1_gaussian(&grid, cfg.width),
                times: logspace(cfg.t_min, cfg.t_max, cfg.points),
                derivative_order: cfg.alpha,
            };
            Ok(dispersive_fit(&job)?.into())
        }
        Experiment::LocalizedDispersive => {
            let scales = cfg.scales.iter().map(|&e| Dyadic::new(e)).collect::<Result<Vec<_>, _>>()?;
            Ok(localized_dispersive_gaussian(cfg.params.n, cfg.width, &scales, &cfg.scaled_times)?.into())
        }
        Experiment::Fundsol => {
            let range = (cfg.x_min, cfg.x_max);
            Ok(match cfg.beta {
                None => fundsol_decay(cfg.params.n, range, cfg.points)?,
                Some(b) => radial_derivative_decay(b, range, cfg.params.n, cfg.points, cfg.derivative)?,
            }
            .into())
        }
        Experiment::KernelDecay => {
            let base = KernelConfig {
                t_prime: 0.0,
                t0: 0.5,
                t_dprime: 1.0,
                y: 0.0,
                z: cfg.z,
                n: cfg.params.n,
                cutoff: SmoothCutoff::new(cfg.mu, cfg.centers.clone())?,
            };
            base.validate()?;
            let seps: Vec<f64> = cfg.separation_exponents.iter().map(|&e| 2f64.powi(e)).collect();
            Ok(kernel_decay_fit(&base, &seps, cfg.table_spacing)?.into())
        }
        Experiment::GroundState => {
            let grid = RadialGrid::new(cfg.params.n, cfg.rmax, cfg.m)?;
            let (res, report) = ground_state_report(&cfg.params, &grid, cfg.tol, cfg.max_iter)?;
            Ok(Outcome {
                report,
                trajectory: None,
                fields: vec![("ground_state".into(), res.q)],
            })
        }
        Experiment::Evolve => {
            let traj = trajectory(cfg)?;
            let report = evolve_report(&traj, data_label(cfg.data))?;
            Ok(Outcome {
                report,
                trajectory: Some(traj),
                fields: Vec::new(),
            })
        }
        Experiment::Decompose => {
            let traj = trajectory(cfg)?;
            let (dec, report) = decomposition_report(&traj, cfg.window, &cfg.probes)?;
            Ok(Outcome {
                report,
                trajectory: None,
                fields: vec![("u_plus".into(), dec.u_plus)],
            })
        }
        Experiment::Concentrate => {
            let v = initial_data(cfg)?;
            let (_, report) = concentration_report(&v, Dyadic::new(cfg.big_n)?, cfg.mu3, cfg.c_exp, cfg.cap_exponent)?;
            Ok(report.into())
        }
    }
}

fn data_label(d: InitialData) -> &'static str {
    match d {
        InitialData::Gaussian => "gaussian",
        InitialData::Soliton => "soliton",
        InitialData::SolitonOrbit => "soliton-orbit",
        InitialData::Bumps => "bumps",
    }
}

fn admissible(cfg: &Resolved) -> ExperimentReport {
    let q = Exponent::parse(&cfg.q).expect("validated");
    let r = Exponent::parse(&cfg.r).expect("validated");
    let n = cfg.params.n;
    let inputs = serde_json::json!({"n": n, "q": q.to_string(), "r": r.to_string()});
    let mut report = ExperimentReport::new("admissible", &inputs);
    report.metric("lhs", q.reciprocal() + n as f64 * r.reciprocal() / 4.0);
    report.metric("target", n as f64 / 8.0);
    let verdict = admissibility_verdict(q, r, n);
    report.check(Check::flag("b_admissible", verdict.is_ok(), verdict.err()));
    report
}

fn exponents(cfg: &Resolved) -> Result<ExperimentReport, biharm::Error> {
    let d = derived_exponents(&cfg.params)?;
    let mut report = ExperimentReport::new("exponents", &cfg.params);
    report.metric("s_c", d.s_c);
    report.metric("r0", d.r0);
    report.metric("r0_tilde_inv", d.r0_tilde_inv);
    report.metric("q0", d.q0);
    report.metric("Q", d.big_q);
    report.metric("p_tilde", d.p_tilde);
    report.check(Check::flag("s_c_in_(0,2)", d.s_c > 0.0 && d.s_c < 2.0, None));
    // (q₀, r₀) is a B-admissible pair by construction
    let verdict = admissibility_verdict(Exponent::Finite(d.q0), Exponent::Finite(d.r0), cfg.params.n);
    report.check(Check::flag("q0_r0_admissible", verdict.is_ok(), verdict.err()));
    Ok(report)
}

fn initial_data(cfg: &Resolved) -> Result<RadialField, biharm::Error> {
    let grid = RadialGrid::new(cfg.params.n, cfg.rmax, cfg.m)?;
    let (a, w) = (cfg.amplitude, cfg.width);
    Ok(match cfg.data {
        InitialData::Gaussian => RadialField::from_real_fn(&grid, |r| a * (-r * r / (2.0 * w * w)).exp()),
        InitialData::Bumps => RadialField::from_real_fn(&grid, |r| {
            cfg.centers.iter().map(|c| a * (-(r - c) * (r - c) / (2.0 * w * w)).exp()).sum()
        }),
        InitialData::Soliton | InitialData::SolitonOrbit => {
            petviashvili_solve(&cfg.params, &grid, &default_seed(&grid), cfg.tol, cfg.max_iter)?.q
        }
    })
}

fn trajectory(cfg: &Resolved) -> Result<Trajectory, biharm::Error> {
    let u0 = initial_data(cfg)?;
    if cfg.data == InitialData::SolitonOrbit {
        return orbit_trajectory(&u0, &cfg.params, cfg.t_final, cfg.dt);
    }
    let opts = EvolveOptions {
        checkpoint_every: cfg.checkpoint_every,
        linear_only: cfg.linear_only,
        scheme: cfg.scheme,
        frame_frequency: 0.0,
    };
    evolve(&u0, &cfg.params, cfg.t_final, cfg.dt, opts)
}
