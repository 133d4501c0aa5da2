//! The fundamental solution I(x) = ∫_{ℝⁿ} e^{i(|ξ|⁴ + ξ·x)} dξ of the
//! biharmonic flow at unit time, its stationary point, and the modified
//! solution Ĩ(x) = e^{-iξ_st·x} I(x).
//!
//! Three independent evaluations are provided:
//!
//! * a power series in |x|, exact term by term, used near the origin;
//! * for odd n, the reduction I_{n+2} = -(2π/ρ) ∂_ρ I_n down to the line
//!   integrals A^{(j)}(ρ) = ∫_ℝ (is)^j e^{i(s⁴+sρ)} ds, which are computed on a
//!   deformed contour: the real segment [-L, 0] through the real saddle and
//!   two rays on which e^{iφ} decays exponentially;
//! * a damped real-axis integral with e^{-εs⁴}, extrapolated to ε → 0 by
//!   Richardson's method (any n, slow for large |x|).

use crate::error::{Error, Result};
use crate::quad::{fit_loglog, richardson, GaussLegendre};
use crate::report::{Check, ExperimentReport, FitRecord, Table};
use crate::special::{bessel_j_reduced, radial_twice_order};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Radius below which the power series is used by [`Method::Auto`].
pub const SERIES_RADIUS: f64 = 4.0;

/// Tolerance on the |I| and |Ĩ| decay slope for β = 0.
pub const SLOPE_TOL_BETA0: f64 = 0.05;
/// Tolerance on derivative decay slopes.
pub const SLOPE_TOL_DERIVATIVE: f64 = 0.1;
/// Target and tolerance of the slope gap between ∂_ρI and ∂_ρĨ.
pub const SLOPE_GAP_TARGET: f64 = 2.0 / 3.0;
pub const SLOPE_GAP_TOL: f64 = 0.15;

/// Signed component of ξ_st along x̂: −(|x|/4)^{1/3}.
pub fn stationary_point(x_norm: f64) -> Result<f64> {
    if !(x_norm > 0.0 && x_norm.is_finite()) {
        return Err(Error::Domain(format!("stationary point needs |x| > 0, got {x_norm}")));
    }
    Ok(-(x_norm / 4.0).cbrt())
}

/// |∇φ_x(ξ_st)| = |4|ξ_st|²ξ_st + x| along x̂.
pub fn stationary_residual(x_norm: f64) -> Result<f64> {
    let s = stationary_point(x_norm)?;
    Ok((4.0 * s * s * s + x_norm).abs())
}

/// −ξ_st·x = 4^{-1/3}|x|^{4/3}, the phase removed in Ĩ.
pub fn phase_shift(x_norm: f64) -> f64 {
    (x_norm / 4.0).cbrt() * x_norm
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Series near the origin, contour for odd n, damping otherwise.
    Auto,
    Series,
    Contour,
    Damped,
}

/// A value of I with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundSolValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub method: Method,
    /// Smallest damping ε used (zero when no regularisation is involved).
    pub reg_epsilon: f64,
}

/// One row of a fundamental-solution table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FundSolSample {
    pub x_norm: f64,
    pub i_value: Complex64,
    pub i_tilde_value: Complex64,
    pub reg_epsilon: f64,
    pub error_estimate: f64,
}

pub fn eval_i(x_norm: f64, n: u32) -> Result<FundSolValue> {
    eval_i_with(x_norm, n, Method::Auto)
}

pub fn eval_i_with(x_norm: f64, n: u32, method: Method) -> Result<FundSolValue> {
    if !(x_norm >= 0.0 && x_norm.is_finite()) {
        return Err(Error::Domain(format!("|x| must be finite and nonnegative, got {x_norm}")));
    }
    if n == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    let method = match method {
        Method::Auto if x_norm <= SERIES_RADIUS => Method::Series,
        Method::Auto if n % 2 == 1 => Method::Contour,
        Method::Auto => Method::Damped,
        m => m,
    };
    match method {
        Method::Series => series(x_norm, n),
        Method::Contour => contour(x_norm, n),
        Method::Damped => damped(x_norm, n),
        Method::Auto => unreachable!(),
    }
}

/// Ĩ(x) = e^{i4^{-1/3}|x|^{4/3}} I(x).
pub fn eval_i_tilde(x_norm: f64, n: u32) -> Result<FundSolValue> {
    if !(x_norm > 0.0) {
        return Err(Error::Domain(format!("Ĩ needs |x| > 0, got {x_norm}")));
    }
    let mut v = eval_i(x_norm, n)?;
    v.value *= Complex64::from_polar(1.0, phase_shift(x_norm));
    Ok(v)
}

pub fn sample(x_norm: f64, n: u32) -> Result<FundSolSample> {
    let v = eval_i(x_norm, n)?;
    Ok(FundSolSample {
        x_norm,
        i_value: v.value,
        i_tilde_value: v.value * Complex64::from_polar(1.0, phase_shift(x_norm)),
        reg_epsilon: v.reg_epsilon,
        error_estimate: v.error_estimate,
    })
}

/// Leading stationary-phase modulus (2π)^{n/2} |det Hess φ_x(ξ_st)|^{-1/2},
/// the Hessian having eigenvalues 12|ξ_st|² (once) and 4|ξ_st|² (n−1 times).
pub fn stationary_phase_amplitude(x_norm: f64, n: u32) -> f64 {
    let k2 = (x_norm / 4.0).cbrt().powi(2);
    let det = 12.0 * k2 * (4.0 * k2).powi(n as i32 - 1);
    (2.0 * PI).powf(n as f64 / 2.0) / det.sqrt()
}

fn series(rho: f64, n: u32) -> Result<FundSolValue> {
    // (2π)^{n/2} Σ_m (-1)^m (ρ/2)^{2m} / (2^ν m! Γ(m+ν+1)) · Γ(a/4)/4 · e^{iπa/8}, a = 2m+n
    let nu = (n as f64 - 2.0) / 2.0;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut peak: f64 = 0.0;
    let log_half_rho = if rho > 0.0 { (rho / 2.0).ln() } else { f64::NEG_INFINITY };
    for m in 0..400 {
        let mf = m as f64;
        let a = 2.0 * mf + n as f64;
        let log_mag = if m == 0 { 0.0 } else { 2.0 * mf * log_half_rho } - nu * 2f64.ln()
            - libm::lgamma(mf + 1.0)
            - libm::lgamma(mf + nu + 1.0)
            + libm::lgamma(a / 4.0)
            - 4f64.ln();
        let mag = log_mag.exp();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = Complex64::from_polar(sign * mag, PI * a / 8.0);
        sum += term;
        peak = peak.max(mag);
        if rho == 0.0 || (mag < 1e-18 * peak && mf > rho * rho) {
            break;
        }
    }
    let scale = (2.0 * PI).powf(n as f64 / 2.0);
    Ok(FundSolValue {
        value: sum * scale,
        error_estimate: 4e-16 * peak * scale * (1.0 + rho * rho),
        method: Method::Series,
        reg_epsilon: 0.0,
    })
}

/// Coefficients c_{m,j} of (ρ^{-1}∂_ρ)^m A = Σ_j c_{m,j} ρ^{j-2m} A^{(j)}.
fn reduction_coefficients(m: u32) -> Vec<f64> {
    let fact = |k: u32| (1..=k).map(|i| i as f64).product::<f64>();
    (1..=m)
        .map(|j| {
            let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
            sign * fact(2 * m - j - 1) / (2f64.powi((m - j) as i32) * fact(j - 1) * fact(m - j))
        })
        .collect()
}

/// A^{(j)}(ρ) = ∫_ℝ (is)^j e^{i(s⁴+sρ)} ds for j = 0..=jmax on the deformed
/// contour, at the given resolution (oscillations per panel).
fn line_moments(rho: f64, jmax: u32, per_panel: f64) -> Vec<Complex64> {
    let g = GaussLegendre::g20();
    let c = (rho / 4.0).cbrt();
    let l = (2.0 * c).max(1.0);
    let mut acc = vec![Complex64::new(0.0, 0.0); jmax as usize + 1];
    let phi = |s: Complex64| s * s * s * s + s * rho;
    let dphi = |s: Complex64| 4.0 * s * s * s + rho;
    let add = |s: Complex64, weight: Complex64, acc: &mut Vec<Complex64>| {
        let e = (Complex64::i() * phi(s)).exp() * weight;
        let is = Complex64::i() * s;
        let mut pw = Complex64::new(1.0, 0.0);
        for a in acc.iter_mut() {
            *a += pw * e;
            pw *= is;
        }
    };
    // real segment [-L, 0]
    let mut a = -l;
    while a < 0.0 {
        let rate = dphi(Complex64::new(a, 0.0)).norm().max(dphi(Complex64::new((a + 0.1).min(0.0), 0.0)).norm());
        let h = (2.0 * PI * per_panel / rate).min(0.1).min(-a);
        let b = a + h;
        for (&x, &w) in g.nodes.iter().zip(&g.weights) {
            let s = 0.5 * (a + b) + 0.5 * h * x;
            add(Complex64::new(s, 0.0), Complex64::new(0.5 * h * w, 0.0), &mut acc);
        }
        a = b;
    }
    // rays s = origin + r·dir, r ∈ [0, ∞), with ds = dir·dr
    let dir = Complex64::from_polar(1.0, PI / 8.0);
    for (origin, direction, orient) in [
        (Complex64::new(0.0, 0.0), dir, dir),
        (Complex64::new(-l, 0.0), -dir, dir),
    ] {
        let mut r = 0.0;
        loop {
            let s0 = origin + direction * r;
            let rate = dphi(s0).norm().max(1.0);
            let h = (2.0 * PI * per_panel / rate).min(0.25);
            for (&x, &w) in g.nodes.iter().zip(&g.weights) {
                let rr = r + 0.5 * h * (1.0 + x);
                add(origin + direction * rr, orient * (0.5 * h * w), &mut acc);
            }
            r += h;
            let decay = (-(phi(origin + direction * r)).im).exp();
            if decay < 1e-22 && r > 0.1 {
                break;
            }
            if r > 1e4 {
                break;
            }
        }
    }
    acc
}

fn contour(rho: f64, n: u32) -> Result<FundSolValue> {
    if n % 2 == 0 {
        return Err(Error::Unsupported("the line-integral reduction needs odd n".into()));
    }
    if !(rho > 0.0) {
        return Err(Error::Domain("the contour reduction needs |x| > 0".into()));
    }
    let m = (n - 1) / 2;
    let combine = |mom: &[Complex64]| {
        if m == 0 {
            return mom[0];
        }
        let coeffs = reduction_coefficients(m);
        let mut s = Complex64::new(0.0, 0.0);
        for (j, c) in (1..=m).zip(&coeffs) {
            s += mom[j as usize] * (c * rho.powi(j as i32 - 2 * m as i32));
        }
        s * (-2.0 * PI).powi(m as i32)
    };
    let fine = combine(&line_moments(rho, m, 1.0));
    let coarse = combine(&line_moments(rho, m, 2.0));
    Ok(FundSolValue {
        value: fine,
        error_estimate: (fine - coarse).norm() + 1e-15 * fine.norm(),
        method: Method::Contour,
        reg_epsilon: 0.0,
    })
}

/// I_ε(ρ) = (2π)^{n/2} ∫₀^∞ e^{i(1+iε)s⁴} j̃_ν(sρ) s^{n-1} ds.
fn damped_integral(rho: f64, n: u32, eps: f64) -> Complex64 {
    let tn = radial_twice_order(n);
    let g = GaussLegendre::g20();
    let s_max = (45.0 / eps).powf(0.25);
    let mut acc = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    let nm1 = n as i32 - 1;
    while a < s_max {
        let top = (a + 0.2).min(s_max);
        let rate = 4.0 * top.powi(3) + rho;
        let h = (4.0 * PI / rate).min(0.2).min(s_max - a);
        let b = a + h;
        for (&x, &w) in g.nodes.iter().zip(&g.weights) {
            let s = 0.5 * (a + b) + 0.5 * h * x;
            let s4 = s.powi(4);
            let amp = 0.5 * h * w * (-eps * s4).exp() * bessel_j_reduced(tn, s * rho) * s.powi(nm1);
            acc += Complex64::from_polar(amp, s4);
        }
        a = b;
    }
    acc * (2.0 * PI).powf(n as f64 / 2.0)
}

fn damped(rho: f64, n: u32) -> Result<FundSolValue> {
    let eps0 = 0.02 * (20.0 / rho.max(20.0)).powf(4.0 / 3.0);
    let levels = 6;
    let values: Vec<Complex64> = (0..levels)
        .map(|j| damped_integral(rho, n, eps0 * 0.5f64.powi(j)))
        .collect();
    let (value, change) = richardson(&values, 2.0, 1, 1);
    let (previous, _) = richardson(&values[..levels as usize - 1], 2.0, 1, 1);
    let err = change.max((value - previous).norm());
    if !(err <= 1e-5 * value.norm()) {
        return Err(Error::NonConvergence(format!(
            "damping ladder at |x| = {rho}: last correction {err:.2e} vs |I| = {:.2e}",
            value.norm()
        )));
    }
    Ok(FundSolValue {
        value,
        error_estimate: err,
        method: Method::Damped,
        reg_epsilon: eps0 * 0.5f64.powi(levels - 1),
    })
}

/// Which radial derivative of Ĩ to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeKind {
    /// ∂_ρ^β acting on the integrand with ξ_st held at its value at x, i.e.
    /// ∫ (i(ξ−ξ_st)·x̂)^β e^{i(φ_x(ξ) − ξ_st·x)} dξ.
    FrozenStationaryPoint,
    /// d^β/dρ^β of the function ρ ↦ Ĩ(ρ x̂).
    Total,
    /// d^β/dρ^β of ρ ↦ I(ρ x̂).
    Raw,
}

/// A finite-difference derivative with the magnitude of its last Richardson
/// correction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeEstimate {
    pub value: Complex64,
    pub correction: f64,
    pub step: f64,
}

/// Finite-difference step. I and Ĩ oscillate on the wavelength 2π/|ξ_st|, so
/// their step is min(0.1, 0.2|x|^{-1/3}). With ξ_st frozen the leading
/// oscillation is removed and the remaining phase varies on the scale
/// |x|^{1/3}, so the step is 0.2|x|^{1/3}.
pub fn derivative_step(x_norm: f64, kind: DerivativeKind) -> f64 {
    match kind {
        DerivativeKind::FrozenStationaryPoint => 0.2 * x_norm.cbrt(),
        _ => (0.2 * x_norm.powf(-1.0 / 3.0)).min(0.1),
    }
}

/// ∂_ρ^β of I, Ĩ, or the frozen-ξ_st form by Richardson-extrapolated central
/// differences on the ladder h, h/2, h/4.
pub fn radial_derivative(x_norm: f64, n: u32, beta: u32, kind: DerivativeKind) -> Result<DerivativeEstimate> {
    if beta > 2 {
        return Err(Error::Unsupported(format!("β = {beta} > 2 is below difference-quotient noise")));
    }
    if !(x_norm > 0.0) {
        return Err(Error::Domain("derivatives need |x| > 0".into()));
    }
    let k0 = (x_norm / 4.0).cbrt();
    let f = |r: f64| -> Result<Complex64> {
        let i = eval_i(r, n)?.value;
        Ok(match kind {
            DerivativeKind::FrozenStationaryPoint => i * Complex64::from_polar(1.0, k0 * (r - x_norm)),
            DerivativeKind::Total => i * Complex64::from_polar(1.0, phase_shift(r) - phase_shift(x_norm)),
            DerivativeKind::Raw => i,
        })
    };
    let h0 = derivative_step(x_norm, kind).min(0.25 * x_norm);
    if beta == 0 {
        let v = f(x_norm)?;
        return Ok(DerivativeEstimate {
            value: v,
            correction: 0.0,
            step: 0.0,
        });
    }
    let center = f(x_norm)?;
    let mut ladder = Vec::new();
    for level in 0..3 {
        let h = h0 * 0.5f64.powi(level);
        let plus = f(x_norm + h)?;
        let minus = f(x_norm - h)?;
        ladder.push(if beta == 1 {
            (plus - minus) / (2.0 * h)
        } else {
            (plus - 2.0 * center + minus) / (h * h)
        });
    }
    let (value, correction) = richardson(&ladder, 2.0, 2, 2);
    if !(correction <= 1e-3 * value.norm() + 1e-13 * center.norm()) {
        return Err(Error::NonConvergence(format!(
            "difference ladder for β = {beta} at |x| = {x_norm} did not settle (correction {correction:.2e})"
        )));
    }
    // the phase factors were normalised to 1 at ρ = |x|; restore Ĩ's phase
    let value = match kind {
        DerivativeKind::Raw => value,
        _ => value * Complex64::from_polar(1.0, phase_shift(x_norm)),
    };
    Ok(DerivativeEstimate {
        value,
        correction,
        step: h0,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize, schemars::JsonSchema)]
pub struct DerivativeDecayInputs {
    pub n: u32,
    pub beta: u32,
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub kind: DerivativeKind,
}

/// Slope of log|∂_ρ^β Ĩ| against log|x| (target −(n+β)/3). For β ≥ 1 the
/// raw derivative of I is fitted alongside and the slope gap reported.
pub fn radial_derivative_decay(
    beta: u32,
    x_range: (f64, f64),
    n: u32,
    points: usize,
    kind: DerivativeKind,
) -> Result<ExperimentReport> {
    let (lo, hi) = x_range;
    if !(lo > 0.0 && hi > lo) || (hi / lo).log10() < 2.0 - 1e-9 {
        return Err(Error::Fit(format!("|x| range [{lo}, {hi}] must span two decades")));
    }
    if points < 4 {
        return Err(Error::Fit("need at least 4 sample radii".into()));
    }
    let xs = crate::quad::logspace(lo, hi, points);
    let inputs = DerivativeDecayInputs {
        n,
        beta,
        x_min: lo,
        x_max: hi,
        points,
        kind,
    };
    let mut report = ExperimentReport::new("fundsol-derivative-decay", &inputs);
    let mut table = Table::new("derivatives", &["x", "tilde_norm", "tilde_correction", "raw_norm"]);
    let mut tilde = Vec::new();
    let mut raw = Vec::new();
    for &x in &xs {
        let d = radial_derivative(x, n, beta, kind)?;
        let r = if beta > 0 {
            radial_derivative(x, n, beta, DerivativeKind::Raw)?.value.norm()
        } else {
            f64::NAN
        };
        tilde.push(d.value.norm());
        raw.push(r);
        table.push(vec![x, d.value.norm(), d.correction, r]);
    }
    report.tables.push(table);
    let target = -(n as f64 + beta as f64) / 3.0;
    let tol = if beta == 0 { SLOPE_TOL_BETA0 } else { SLOPE_TOL_DERIVATIVE };
    let fit = fit_loglog(&xs, &tilde).ok_or_else(|| Error::Fit("degenerate samples".into()))?;
    report.fits.push(FitRecord::new("tilde_derivative", &fit, Some(target), Some(tol)));
    report.metric("fitted_slope", fit.slope);
    report.metric("target_slope", target);
    report.check(Check::near(&format!("tilde_slope_beta={beta}"), fit.slope, target, tol));
    if beta == 1 {
        let raw_fit = fit_loglog(&xs, &raw).ok_or_else(|| Error::Fit("degenerate samples".into()))?;
        let raw_target = -(n as f64 - 1.0) / 3.0;
        report
            .fits
            .push(FitRecord::new("raw_derivative", &raw_fit, Some(raw_target), None));
        let gap = raw_fit.slope - fit.slope;
        report.metric("raw_slope", raw_fit.slope);
        report.metric("slope_gap", gap);
        report.check(Check::near("slope_gap", gap, SLOPE_GAP_TARGET, SLOPE_GAP_TOL));
    }
    Ok(report)
}

/// |I| decay fit with the stationary-phase comparison and, optionally, a
/// cross-check of the evaluation methods at each radius.
pub fn fundsol_decay(n: u32, x_range: (f64, f64), points: usize) -> Result<ExperimentReport> {
    let xs = crate::quad::logspace(x_range.0, x_range.1, points);
    let inputs = serde_json::json!({"n": n, "x_min": x_range.0, "x_max": x_range.1, "points": points});
    let mut report = ExperimentReport::new("fundsol", &inputs);
    let mut table = Table::new(
        "fundsol",
        &["x", "re_i", "im_i", "re_i_tilde", "im_i_tilde", "err_est", "stationary_phase"],
    );
    let mut mags = Vec::new();
    for &x in &xs {
        let s = sample(x, n)?;
        let sp = stationary_phase_amplitude(x, n);
        table.push(vec![
            x,
            s.i_value.re,
            s.i_value.im,
            s.i_tilde_value.re,
            s.i_tilde_value.im,
            s.error_estimate,
            sp,
        ]);
        mags.push(s.i_value.norm());
    }
    let fit = fit_loglog(&xs, &mags).ok_or_else(|| Error::Fit("degenerate samples".into()))?;
    let target = -(n as f64) / 3.0;
    report.fits.push(FitRecord::new("abs_i", &fit, Some(target), Some(SLOPE_TOL_BETA0)));
    report.metric("fitted_slope", fit.slope);
    report.check(Check::near("abs_i_slope", fit.slope, target, SLOPE_TOL_BETA0));
    let last = xs[xs.len() - 1];
    let ratio = mags[mags.len() - 1] / stationary_phase_amplitude(last, n);
    report.metric("stationary_phase_ratio_at_max", ratio);
    if last >= 100.0 {
        report.check(Check::at_most("stationary_phase_ratio", (ratio - 1.0).abs(), 0.05));
    }
    report.tables.push(table);
    Ok(report)
}

/// Relative disagreement between the contour (or series) and damped values.
pub fn oracle_disagreement(x_norm: f64, n: u32) -> Result<f64> {
    let a = eval_i(x_norm, n)?.value;
    let b = eval_i_with(x_norm, n, Method::Damped)?.value;
    Ok((a - b).norm() / a.norm())
}

/// CSV with columns x, re_i, im_i, re_i_tilde, im_i_tilde, err_est.
pub fn samples_to_csv(samples: &[FundSolSample]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["x", "re_i", "im_i", "re_i_tilde", "im_i_tilde", "err_est"])
        .expect("in-memory write");
    for s in samples {
        w.serialize((
            s.x_norm,
            s.i_value.re,
            s.i_value.im,
            s.i_tilde_value.re,
            s.i_tilde_value.im,
            s.error_estimate,
        ))
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
}

pub fn samples_from_csv(text: &str) -> Result<Vec<FundSolSample>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize::<(f64, f64, f64, f64, f64, f64)>()
        .map(|row| {
            let (x, a, b, c, d, e) = row.map_err(|e| Error::Io(e.to_string()))?;
            Ok(FundSolSample {
                x_norm: x,
                i_value: Complex64::new(a, b),
                i_tilde_value: Complex64::new(c, d),
                reg_epsilon: 0.0,
                error_estimate: e,
            })
        })
        .collect()
}
