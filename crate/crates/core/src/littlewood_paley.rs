//! Littlewood–Paley bumps and dyadic frequency projectors.
//!
//! φ equals 1 on [0, 1], vanishes on [2, ∞), and on (1, 2) is the smooth
//! transition g(2-ξ)/(g(2-ξ) + g(ξ-1)) with g(x) = exp(-1/x). The band bump is
//! ψ(ξ) = φ(ξ) − φ(2ξ), supported in [1/2, 2].

use crate::error::{Error, Result};
use crate::field::{apply_multiplier, radial_fourier, sobolev_norm_of_spectrum, RadialField, SpectralField};
use crate::quad::fit_loglog;
use crate::report::{Check, ExperimentReport, FitRecord, Table};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Allowed range of dyadic exponents j in N = 2^j.
pub const MIN_DYADIC_EXPONENT: i32 = -30;
pub const MAX_DYADIC_EXPONENT: i32 = 30;

/// Norms below this fraction of the total H² norm are treated as rounding
/// noise in tail fits.
pub const PROFILE_NOISE_FLOOR: f64 = 1e-13;

fn transition_weight(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// The pair (φ, ψ).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BumpPair;

impl BumpPair {
    pub fn phi(&self, xi: f64) -> f64 {
        let xi = xi.abs();
        if xi <= 1.0 {
            1.0
        } else if xi >= 2.0 {
            0.0
        } else {
            let a = transition_weight(2.0 - xi);
            let b = transition_weight(xi - 1.0);
            a / (a + b)
        }
    }

    pub fn psi(&self, xi: f64) -> f64 {
        self.phi(xi) - self.phi(2.0 * xi)
    }
}

/// A dyadic scale N = 2^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, schemars::JsonSchema)]
pub struct Dyadic(i32);

impl Dyadic {
    pub fn new(exponent: i32) -> Result<Self> {
        if !(MIN_DYADIC_EXPONENT..=MAX_DYADIC_EXPONENT).contains(&exponent) {
            return Err(Error::Domain(format!(
                "dyadic exponent {exponent} outside [{MIN_DYADIC_EXPONENT}, {MAX_DYADIC_EXPONENT}]"
            )));
        }
        Ok(Self(exponent))
    }

    /// The scale N, which must be an exact power of two.
    pub fn from_value(n: f64) -> Result<Self> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Domain(format!("dyadic scale must be positive, got {n}")));
        }
        let e = n.log2().round() as i32;
        if 2f64.powi(e) != n {
            return Err(Error::Domain(format!("{n} is not a power of two")));
        }
        Self::new(e)
    }

    pub fn exponent(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        2f64.powi(self.0)
    }

    pub fn half(self) -> Result<Self> {
        Self::new(self.0 - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum ProjectorKind {
    /// φ(ξ/N)
    Leq,
    /// ψ(ξ/N)
    Band,
    /// 1 − φ(ξ/N)
    Gt,
    /// 1 − φ(2ξ/N), i.e. the complement of P_{≤N/2}
    Geq,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct DyadicProjector {
    pub bump: BumpPair,
    pub scale: Dyadic,
    pub kind: ProjectorKind,
}

impl DyadicProjector {
    pub fn new(scale: Dyadic, kind: ProjectorKind) -> Self {
        Self {
            bump: BumpPair,
            scale,
            kind,
        }
    }

    pub fn leq(scale: Dyadic) -> Self {
        Self::new(scale, ProjectorKind::Leq)
    }

    pub fn band(scale: Dyadic) -> Self {
        Self::new(scale, ProjectorKind::Band)
    }

    pub fn gt(scale: Dyadic) -> Self {
        Self::new(scale, ProjectorKind::Gt)
    }

    pub fn geq(scale: Dyadic) -> Self {
        Self::new(scale, ProjectorKind::Geq)
    }

    pub fn multiplier(&self, k: f64) -> f64 {
        let x = k / self.scale.value();
        match self.kind {
            ProjectorKind::Leq => self.bump.phi(x),
            ProjectorKind::Band => self.bump.psi(x),
            ProjectorKind::Gt => 1.0 - self.bump.phi(x),
            ProjectorKind::Geq => 1.0 - self.bump.phi(2.0 * x),
        }
    }

    pub fn apply_spectrum(&self, g: &SpectralField) -> SpectralField {
        g.apply_symbol(|k| Complex64::new(self.multiplier(k), 0.0))
    }
}

pub fn apply_projector(proj: &DyadicProjector, f: &RadialField) -> RadialField {
    apply_multiplier(f, |k| Complex64::new(proj.multiplier(k), 0.0))
}

/// Restriction to frequencies between `low` and `high`: the sum of ψ(ξ/K)
/// over dyadic low ≤ K ≤ high, which telescopes to φ(ξ/high) − φ(2ξ/low).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct DyadicWindow {
    pub low: Dyadic,
    pub high: Dyadic,
}

impl DyadicWindow {
    pub fn new(low: Dyadic, high: Dyadic) -> Result<Self> {
        if low > high {
            return Err(Error::Domain("window low scale exceeds high scale".into()));
        }
        Ok(Self { low, high })
    }

    /// The window P_{1/N ≤ · ≤ N}.
    pub fn symmetric(n: Dyadic) -> Result<Self> {
        Self::new(Dyadic::new(-n.exponent())?, n)
    }

    pub fn multiplier(&self, k: f64) -> f64 {
        let b = BumpPair;
        b.phi(k / self.high.value()) - b.phi(2.0 * k / self.low.value())
    }

    pub fn apply(&self, f: &RadialField) -> RadialField {
        apply_multiplier(f, |k| Complex64::new(self.multiplier(k), 0.0))
    }
}

/// H² norms of P_{≥N}v for N ≥ 1 and of P_{≤N}v for N ≤ 1, with a power-law
/// fit ‖P_{≥N}v‖ ≈ C N^{-η} over the part of the high tail above the noise
/// floor.
pub fn frequency_profile(v: &RadialField, scales: &[Dyadic]) -> Result<ExperimentReport> {
    if scales.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 scales, got {}", scales.len())));
    }
    if scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("scales must be strictly increasing".into()));
    }
    let spectrum = radial_fourier(v);
    let total = sobolev_norm_of_spectrum(&spectrum, 2.0).inhomogeneous;
    let inputs = serde_json::json!({
        "n": v.grid.n(),
        "m": v.grid.m(),
        "r_max": v.grid.plan().r_max(),
        "scales": scales.iter().map(|s| s.exponent()).collect::<Vec<_>>(),
    });
    let mut report = ExperimentReport::new("frequency-profile", &inputs);
    let mut table = Table::new("profile", &["N", "low_norm", "high_norm"]);
    let (mut fit_n, mut fit_v) = (Vec::new(), Vec::new());
    let mut below_floor = 0;
    for &s in scales {
        let nval = s.value();
        let low = if s.exponent() <= 0 {
            sobolev_norm_of_spectrum(&DyadicProjector::leq(s).apply_spectrum(&spectrum), 2.0).inhomogeneous
        } else {
            f64::NAN
        };
        let high = if s.exponent() >= 0 {
            sobolev_norm_of_spectrum(&DyadicProjector::geq(s).apply_spectrum(&spectrum), 2.0).inhomogeneous
        } else {
            f64::NAN
        };
        if s.exponent() >= 0 {
            if high > PROFILE_NOISE_FLOOR * total {
                fit_n.push(nval);
                fit_v.push(high);
            } else {
                below_floor += 1;
            }
        }
        table.push(vec![nval, low, high]);
    }
    report.tables.push(table);
    report.metric("total_h2_norm", total);
    report.metric("scales_below_noise_floor", below_floor as f64);
    match fit_loglog(&fit_n, &fit_v) {
        Some(fit) => {
            report.metric("eta", -fit.slope);
            report.fits.push(FitRecord::new("high_tail", &fit, None, None));
        }
        None => report
            .warnings
            .push("fewer than two high-tail scales above the noise floor; no η fit".into()),
    }
    report.check(Check::flag("profile_computed", true, None));
    Ok(report)
}
