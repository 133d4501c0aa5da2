//! Model parameters and the exponent calculus of the mass-supercritical,
//! energy-subcritical regime 1 + 8/n < p < 1 + 8/(n-4).

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Tolerance for the scaling identity in [`is_b_admissible`].
pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// Default deficit realising r₀ = 2n/(n-4) − ε.
pub const DEFAULT_EPSILON_R0: f64 = 1e-3;

/// A Lebesgue exponent in [1, ∞], with ∞ kept symbolic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// 1/q, exactly zero for ∞.
    pub fn reciprocal(self) -> f64 {
        match self {
            Exponent::Finite(q) => 1.0 / q,
            Exponent::Infinite => 0.0,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// Parse "inf"/"infinity"/"∞" or a number.
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Some(Exponent::Infinite),
            t => t.parse::<f64>().ok().map(Exponent::Finite),
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(q) => write!(f, "{q}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Focusing,
    Defocusing,
}

impl Sign {
    /// Coefficient s in F(u) = s|u|^{p-1}u: +1 focusing, −1 defocusing.
    pub fn coefficient(self) -> f64 {
        match self {
            Sign::Focusing => 1.0,
            Sign::Defocusing => -1.0,
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "focusing" | "+" => Ok(Sign::Focusing),
            "defocusing" | "-" => Ok(Sign::Defocusing),
            other => Err(Error::Domain(format!("unknown sign {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct ModelParams {
    pub n: u32,
    pub p: f64,
    pub sign: Sign,
    #[serde(default = "default_epsilon")]
    pub epsilon_r0: f64,
    /// Enforce n ≥ 5 and 1 + 8/n < p < 1 + 8/(n-4).
    #[serde(default = "default_true")]
    pub strict_regime: bool,
}

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON_R0
}

fn default_true() -> bool {
    true
}

impl ModelParams {
    pub fn new(n: u32, p: f64, sign: Sign) -> Self {
        Self {
            n,
            p,
            sign,
            epsilon_r0: DEFAULT_EPSILON_R0,
            strict_regime: true,
        }
    }

    pub fn with_epsilon_r0(mut self, eps: f64) -> Self {
        self.epsilon_r0 = eps;
        self
    }

    pub fn without_regime_check(mut self) -> Self {
        self.strict_regime = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(self.p.is_finite() && self.p > 1.0) {
            return Err(Error::Domain(format!("p must exceed 1, got {}", self.p)));
        }
        if !(self.epsilon_r0 > 0.0 && self.epsilon_r0 <= 0.1) {
            return Err(Error::Domain(format!(
                "epsilon_r0 must lie in (0, 0.1], got {}",
                self.epsilon_r0
            )));
        }
        if self.strict_regime {
            if self.n < 5 {
                return Err(Error::Regime(format!("n = {} < 5", self.n)));
            }
            let (lo, hi) = regime_bounds(self.n);
            if !(self.p > lo && self.p < hi) {
                return Err(Error::Regime(format!(
                    "p = {} outside ({lo}, {hi}) for n = {}",
                    self.p, self.n
                )));
            }
        }
        Ok(())
    }

    pub fn critical_index(&self) -> f64 {
        self.n as f64 / 2.0 - 4.0 / (self.p - 1.0)
    }
}

/// Open interval (1 + 8/n, 1 + 8/(n-4)) of admissible p for n ≥ 5.
pub fn regime_bounds(n: u32) -> (f64, f64) {
    let nf = n as f64;
    (1.0 + 8.0 / nf, 1.0 + 8.0 / (nf - 4.0))
}

/// s_c = n/2 − 4/(p-1).
pub fn critical_exponent(n: u32, p: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    if !(p > 1.0) {
        return Err(Error::Domain(format!("p must exceed 1, got {p}")));
    }
    Ok(n as f64 / 2.0 - 4.0 / (p - 1.0))
}

/// Whether 1/q + n/(4r) = n/8 with 2 ≤ q, r ≤ ∞ and (q, r) ≠ (2, ∞).
pub fn is_b_admissible(q: Exponent, r: Exponent, n: u32) -> bool {
    admissibility_verdict(q, r, n).is_ok()
}

/// Like [`is_b_admissible`], explaining a failure.
pub fn admissibility_verdict(q: Exponent, r: Exponent, n: u32) -> std::result::Result<(), String> {
    for (name, e) in [("q", q), ("r", r)] {
        if let Exponent::Finite(v) = e {
            if !(v >= 2.0) || v.is_nan() {
                return Err(format!("{name} = {v} below 2"));
            }
        }
    }
    if matches!(q, Exponent::Finite(v) if v == 2.0) && r.is_infinite() {
        return Err("excluded endpoint".into());
    }
    let nf = n as f64;
    let lhs = q.reciprocal() + nf * r.reciprocal() / 4.0;
    if (lhs - nf / 8.0).abs() > ADMISSIBILITY_TOL {
        return Err(format!("1/q + n/(4r) = {lhs} differs from n/8 = {}", nf / 8.0));
    }
    Ok(())
}

/// Exponents attached to the regime. Reciprocals are stored alongside values
/// because 1/r̃₀ may be zero or negative for small n.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct DerivedExponents {
    pub s_c: f64,
    pub r0: f64,
    /// 1/r̃₀ = 1/r₀ − 1/n.
    pub r0_tilde_inv: f64,
    /// 1/r0_tilde_inv; infinite or negative values are possible.
    pub r0_tilde: f64,
    pub q0: f64,
    #[serde(rename = "Q")]
    pub big_q: f64,
    pub p_tilde: f64,
}

pub fn derived_exponents(params: &ModelParams) -> Result<DerivedExponents> {
    let eps = params.epsilon_r0;
    if !(eps > 0.0 && eps <= 0.1) {
        return Err(Error::Domain(format!("epsilon_r0 must lie in (0, 0.1], got {eps}")));
    }
    if params.n < 5 {
        return Err(Error::Regime(format!("n = {} < 5 leaves 2n/(n-4) undefined", params.n)));
    }
    let s_c = critical_exponent(params.n, params.p)?;
    let nf = params.n as f64;
    let p = params.p;
    let r0 = 2.0 * nf / (nf - 4.0) - eps;
    let r0_tilde_inv = 1.0 / r0 - 1.0 / nf;
    let q0 = 1.0 / (nf / 8.0 - nf / (4.0 * r0));
    let denom = (nf + 2.0) / (2.0 * nf) - r0_tilde_inv;
    let big_q = (p - 1.0) / denom;
    let q_hi = 2.0 * nf / (nf - 4.0);
    if !(denom > 0.0 && big_q >= 2.0 && big_q < q_hi) {
        return Err(Error::Regime(format!("Q = {big_q} outside [2, {q_hi})")));
    }
    let p_tilde = if p <= 2.0 { 2.0 / p } else { 1.0 };
    Ok(DerivedExponents {
        s_c,
        r0,
        r0_tilde_inv,
        r0_tilde: 1.0 / r0_tilde_inv,
        q0,
        big_q,
        p_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_exponent_examples() {
        assert!(critical_exponent(5, 1.0 + 8.0 / 5.0).unwrap().abs() < 1e-14);
        assert!((critical_exponent(5, 9.0).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(critical_exponent(5, 3.0).unwrap(), 0.5);
        assert!(critical_exponent(5, 1.0).is_err());
    }

    #[test]
    fn admissibility_examples() {
        use Exponent::*;
        for n in 1..12 {
            assert!(is_b_admissible(Infinite, Finite(2.0), n));
            assert!(!is_b_admissible(Finite(2.0), Infinite, n));
        }
        assert_eq!(admissibility_verdict(Finite(2.0), Infinite, 8).unwrap_err(), "excluded endpoint");
        assert!(is_b_admissible(Finite(2.0), Finite(4.0), 8));
        assert!(!is_b_admissible(Finite(1.5), Finite(4.0), 8));
    }

    #[test]
    fn regime_validation() {
        assert!(ModelParams::new(5, 3.0, Sign::Focusing).validate().is_ok());
        assert!(ModelParams::new(4, 3.0, Sign::Focusing).validate().is_err());
        assert!(ModelParams::new(5, 2.0, Sign::Focusing).validate().is_err());
        assert!(ModelParams::new(5, 2.0, Sign::Focusing).without_regime_check().validate().is_ok());
        assert!(ModelParams::new(5, 3.0, Sign::Focusing).with_epsilon_r0(0.2).validate().is_err());
    }

    #[test]
    fn exponent_parsing() {
        assert_eq!(Exponent::parse("inf"), Some(Exponent::Infinite));
        assert_eq!(Exponent::parse("2.5"), Some(Exponent::Finite(2.5)));
        assert_eq!(Exponent::parse("x"), None);
    }
}
