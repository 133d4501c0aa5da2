//! Bipolar coordinates (ρ, σ) = (|x|, |x − z|) in ℝⁿ and the two-point kernel
//!
//!   K = (t₀−t′)^{-n/4} (t″−t₀)^{-n/4} ∫ e^{iφ̃} Ĩ((x−y)/(t₀−t′)^{1/4}) Ĩ((x−z)/(t″−t₀)^{1/4}) (1−χ̃²)(x) dx
//!
//! with φ̃(x) = −4^{-1/3}(|x−y|^{4/3}/(t₀−t′)^{1/3} + |x−z|^{4/3}/(t″−t₀)^{1/3}).
//!
//! The volume element is |S^{n−2}| (ρσ/|z|)(2A/|z|)^{n−3} dρ dσ, where A is the
//! area of the triangle (0, x, z) and 2A/|z| is the distance from x to the
//! axis. Integration uses u = ρ+σ = |z| cosh τ and w = ρ−σ = |z| sin θ, which
//! absorbs the fractional-power vanishing of the weight on ∂R.

use crate::error::{Error, Result};
use crate::littlewood_paley::BumpPair;
use crate::oscillatory::{phase_shift, sample, FundSolSample};
use crate::quad::{fit_loglog, GaussLegendre};
use crate::report::{Check, ExperimentReport, FitRecord, Table};
use crate::special::unit_sphere_area;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Factor realising "ρ ≫ |z| and σ ≫ |z|" in the region R_a.
pub const DEFAULT_RA_FACTOR: f64 = 10.0;
/// Relative tolerance for snapping Heron factors and boundary tests.
pub const BOUNDARY_TOL: f64 = 1e-14;
/// Default relative tolerance of the adaptive bipolar quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-8;
pub const MAX_QUAD_LEVEL: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BipolarPoint {
    pub rho: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Ra,
    Rb,
    /// ∂R:1 is ρ−σ = |z|, ∂R:2 is ρ+σ = |z|, ∂R:3 is σ−ρ = |z|.
    Boundary(u8),
    Outside,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct TriangleGeometry {
    pub rho: f64,
    pub sigma: f64,
    pub z_norm: f64,
    pub area: f64,
}

impl TriangleGeometry {
    pub fn new(rho: f64, sigma: f64, z_norm: f64) -> Result<Self> {
        Ok(Self {
            rho,
            sigma,
            z_norm,
            area: heron_area(rho, sigma, z_norm)?,
        })
    }
}

/// The three side factors (ρ+σ−|z|, ρ−σ+|z|, −ρ+σ+|z|), snapped to zero
/// within rounding of the side lengths.
fn side_factors(rho: f64, sigma: f64, z: f64) -> [f64; 3] {
    let tol = BOUNDARY_TOL * 4.0 * (rho + sigma + z);
    let snap = |v: f64| if v.abs() <= tol { 0.0 } else { v };
    [snap(rho + sigma - z), snap(rho - sigma + z), snap(-rho + sigma + z)]
}

/// A = ¼[(ρ+σ+|z|)(ρ+σ−|z|)(ρ−σ+|z|)(−ρ+σ+|z|)]^{1/2}.
pub fn heron_area(rho: f64, sigma: f64, z_norm: f64) -> Result<f64> {
    if !(rho >= 0.0 && sigma >= 0.0 && z_norm >= 0.0) {
        return Err(Error::Domain(format!("side lengths must be nonnegative: {rho}, {sigma}, {z_norm}")));
    }
    let f = side_factors(rho, sigma, z_norm);
    if f.iter().any(|&v| v < 0.0) {
        return Err(Error::Domain(format!(
            "(ρ, σ) = ({rho}, {sigma}) lies outside R for |z| = {z_norm}"
        )));
    }
    let radicand = (rho + sigma + z_norm) * f[0] * f[1] * f[2];
    Ok(0.25 * radicand.max(0.0).sqrt())
}

/// Classify a point of the (ρ, σ) plane; `ra_factor` is the "≫" threshold.
pub fn classify_region(p: BipolarPoint, z_norm: f64, ra_factor: f64) -> Region {
    if !(p.rho >= 0.0 && p.sigma >= 0.0) {
        return Region::Outside;
    }
    let f = side_factors(p.rho, p.sigma, z_norm);
    if f.iter().any(|&v| v < 0.0) {
        return Region::Outside;
    }
    // f[1] = 0 is σ−ρ = |z| (side 3), f[2] = 0 is ρ−σ = |z| (side 1)
    if f[2] == 0.0 {
        return Region::Boundary(1);
    }
    if f[0] == 0.0 {
        return Region::Boundary(2);
    }
    if f[1] == 0.0 {
        return Region::Boundary(3);
    }
    if p.rho >= ra_factor * z_norm && p.sigma >= ra_factor * z_norm {
        Region::Ra
    } else {
        Region::Rb
    }
}

/// Truncation of R to ρ ≤ rho_max, σ ≤ sigma_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct BipolarDomain {
    pub z_norm: f64,
    pub rho_max: f64,
    pub sigma_max: f64,
}

impl BipolarDomain {
    pub fn new(z_norm: f64, rho_max: f64, sigma_max: f64) -> Result<Self> {
        if !(z_norm > 0.0 && rho_max >= 0.0 && sigma_max >= 0.0) {
            return Err(Error::Domain("bipolar domain needs |z| > 0 and nonnegative radii".into()));
        }
        Ok(Self {
            z_norm,
            rho_max,
            sigma_max,
        })
    }

    /// Whether the truncated region has positive area.
    pub fn is_empty(&self) -> bool {
        self.rho_max + self.sigma_max <= self.z_norm
    }
}

/// A bipolar quadrature value with the difference to the next coarser level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadValue {
    pub value: Complex64,
    pub error_estimate: f64,
    pub level: u32,
}

/// ∫ f dx over the truncated domain at a fixed resolution `level`
/// (panel counts scale as 2^level).
pub fn bipolar_integral_at<F>(f: &F, dom: &BipolarDomain, n: u32, level: u32) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    if n < 3 {
        return Err(Error::Domain(format!("bipolar coordinates need n ≥ 3, got {n}")));
    }
    if dom.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z = dom.z_norm;
    let (p, s) = (dom.rho_max, dom.sigma_max);
    let u_lo = z;
    let u_hi = p + s;
    let mut breaks = vec![u_lo, u_hi];
    for b in [2.0 * p - z, 2.0 * s - z] {
        if b > u_lo && b < u_hi {
            breaks.push(b);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breaks.dedup();
    let g = GaussLegendre::g20();
    let sphere = unit_sphere_area(n - 1);
    let e = n as i32 - 3;
    let per = 1usize << level;
    let mut total = Complex64::new(0.0, 0.0);
    for win in breaks.windows(2) {
        let t0 = (win[0] / z).max(1.0).acosh();
        let t1 = (win[1] / z).max(1.0).acosh();
        let tau_panels = per * (1 + ((t1 - t0) / 0.5).ceil() as usize);
        let outer = g.panels_c(t0, t1, tau_panels, |tau| {
            let (sh, ch) = (tau.sinh(), tau.cosh());
            let u = z * ch;
            let w_lo = (-z).max(u - 2.0 * s);
            let w_hi = z.min(2.0 * p - u);
            if w_lo >= w_hi {
                return Complex64::new(0.0, 0.0);
            }
            let th0 = (w_lo / z).clamp(-1.0, 1.0).asin();
            let th1 = (w_hi / z).clamp(-1.0, 1.0).asin();
            let theta_panels = per * (1 + ((th1 - th0) / 0.4).ceil() as usize);
            g.panels_c(th0, th1, theta_panels, |th| {
                let (sn, cs) = th.sin_cos();
                let w = z * sn;
                let rho = 0.5 * (u + w);
                let sigma = 0.5 * (u - w);
                let height = 0.5 * z * sh * cs;
                let jac = 0.5 * z * z * sh * cs;
                let weight = sphere * (rho * sigma / z) * height.powi(e) * jac;
                f(rho, sigma) * weight
            })
        });
        total += outer;
    }
    Ok(total)
}

/// Adaptive version of [`bipolar_integral_at`]: levels are refined until two
/// successive values agree to `rel_tol`.
pub fn bipolar_integral<F>(f: &F, dom: &BipolarDomain, n: u32, rel_tol: f64) -> Result<QuadValue>
where
    F: Fn(f64, f64) -> Complex64,
{
    let mut prev = bipolar_integral_at(f, dom, n, 0)?;
    for level in 1..=MAX_QUAD_LEVEL {
        let cur = bipolar_integral_at(f, dom, n, level)?;
        let diff = (cur - prev).norm();
        if diff <= rel_tol * cur.norm() || cur.norm() == 0.0 || diff < 1e-300 {
            return Ok(QuadValue {
                value: cur,
                error_estimate: diff,
                level,
            });
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "bipolar quadrature did not reach relative tolerance {rel_tol} by level {MAX_QUAD_LEVEL}"
    )))
}

/// Independent cylindrical evaluation of the same integral: x = (x₁, rω) with
/// dx = |S^{n−2}| r^{n−2} dr dx₁, over the lens ρ ≤ rho_max, σ ≤ sigma_max.
pub fn cylindrical_integral<F>(f: &F, dom: &BipolarDomain, n: u32, panels: usize) -> Result<Complex64>
where
    F: Fn(f64, f64) -> Complex64,
{
    if n < 3 {
        return Err(Error::Domain(format!("need n ≥ 3, got {n}")));
    }
    if dom.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z = dom.z_norm;
    let (p, s) = (dom.rho_max, dom.sigma_max);
    let a = (-p).max(z - s);
    let b = p.min(z + s);
    let cross = ((p * p - s * s + z * z) / (2.0 * z)).clamp(a, b);
    let g = GaussLegendre::g20();
    let sphere = unit_sphere_area(n - 1);
    let mut total = Complex64::new(0.0, 0.0);
    for (lo, hi) in [(a, cross), (cross, b)] {
        if hi <= lo {
            continue;
        }
        total += g.panels_c(lo, hi, panels, |x1| {
            let r2 = (p * p - x1 * x1).min(s * s - (x1 - z) * (x1 - z));
            if r2 <= 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            g.panels_c(0.0, r2.sqrt(), panels, |r| {
                let rho = (x1 * x1 + r * r).sqrt();
                let sigma = ((x1 - z) * (x1 - z) + r * r).sqrt();
                f(rho, sigma) * (sphere * r.powi(n as i32 - 2))
            })
        });
    }
    Ok(total)
}

/// The cutoff χ = 1 − Π_j (1 − φ(μ|x − c_j|)) around centers c_j on the axis
/// through the two focal points, where φ is the Littlewood–Paley bump (equal
/// to 1 within μ^{-1} and 0 beyond 2μ^{-1}). The kernel weight is
/// 1 − χ̃² = χ(2 − χ) with χ̃ = 1 − χ. No centers means χ ≡ 0, i.e. χ̃ ≡ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SmoothCutoff {
    pub mu: f64,
    /// Signed axial positions of the centers, in the same frame as y and z.
    pub centers: Vec<f64>,
}

impl SmoothCutoff {
    pub fn new(mu: f64, centers: Vec<f64>) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("cutoff scale μ must be positive, got {mu}")));
        }
        Ok(Self { mu, centers })
    }

    /// χ as a function of the distances to the centers.
    pub fn chi_from_distances(&self, distances: impl Iterator<Item = f64>) -> f64 {
        let b = BumpPair;
        let mut keep = 1.0;
        for d in distances {
            keep *= 1.0 - b.phi(self.mu * d);
        }
        1.0 - keep
    }

    /// Radius beyond which χ vanishes around each center.
    pub fn support_radius(&self) -> f64 {
        2.0 / self.mu
    }
}

/// Kernel weight 1 − (1 − χ)².
pub fn kernel_weight(chi: f64) -> f64 {
    chi * (2.0 - chi)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct KernelConfig {
    pub t_prime: f64,
    pub t0: f64,
    pub t_dprime: f64,
    /// Axial position of y (the reduction moves it to 0).
    #[serde(default)]
    pub y: f64,
    /// Axial position of z.
    pub z: f64,
    pub n: u32,
    pub cutoff: SmoothCutoff,
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_prime < self.t0 && self.t0 < self.t_dprime) {
            return Err(Error::Domain(format!(
                "need t′ < t₀ < t″, got {} {} {}",
                self.t_prime, self.t0, self.t_dprime
            )));
        }
        if self.z == self.y {
            return Err(Error::Domain("y and z must differ".into()));
        }
        if self.n < 3 {
            return Err(Error::Domain(format!("kernel needs n ≥ 3, got {}", self.n)));
        }
        Ok(())
    }

    /// a = (t₀−t′)/(t″−t₀).
    pub fn a(&self) -> f64 {
        (self.t0 - self.t_prime) / (self.t_dprime - self.t0)
    }

    pub fn z_norm(&self) -> f64 {
        (self.z - self.y).abs()
    }
}

/// Natural cubic spline of Ĩ on a uniform |x| grid starting at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItildeTable {
    pub n: u32,
    pub h: f64,
    pub values: Vec<Complex64>,
    second: Vec<Complex64>,
    /// max |spline − Ĩ| at interval midpoints, relative to max |Ĩ|.
    pub interpolation_error: f64,
}

impl ItildeTable {
    /// Tabulate Ĩ on [0, x_max] with spacing about `h`.
    pub fn build(n: u32, x_max: f64, h: f64) -> Result<Self> {
        if !(x_max > 0.0 && h > 0.0) {
            return Err(Error::Domain("table range and spacing must be positive".into()));
        }
        let count = (x_max / h).ceil() as usize + 1;
        let h = x_max / (count - 1) as f64;
        let samples: Vec<FundSolSample> = (0..count)
            .map(|i| tilde_sample(i as f64 * h, n))
            .collect::<Result<_>>()?;
        let mut table = Self::from_samples(n, &samples)?;
        let scale = table.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut worst: f64 = 0.0;
        for i in 0..count - 1 {
            let x = (i as f64 + 0.5) * h;
            let exact = tilde_sample(x, n)?.i_tilde_value;
            worst = worst.max((table.eval(x)? - exact).norm());
        }
        table.interpolation_error = worst / scale;
        Ok(table)
    }

    /// Spline through uniformly spaced samples whose first radius is 0.
    pub fn from_samples(n: u32, samples: &[FundSolSample]) -> Result<Self> {
        if samples.len() < 4 {
            return Err(Error::Coverage("need at least 4 table samples".into()));
        }
        let h = samples[1].x_norm - samples[0].x_norm;
        if samples[0].x_norm != 0.0
            || !(h > 0.0)
            || samples
                .windows(2)
                .any(|w| ((w[1].x_norm - w[0].x_norm) - h).abs() > 1e-9 * h)
        {
            return Err(Error::Coverage("table samples must be uniform from |x| = 0".into()));
        }
        let values: Vec<Complex64> = samples.iter().map(|s| s.i_tilde_value).collect();
        let second = natural_spline_second_derivatives(&values, h);
        Ok(Self {
            n,
            h,
            values,
            second,
            interpolation_error: 0.0,
        })
    }

    pub fn x_max(&self) -> f64 {
        self.h * (self.values.len() - 1) as f64
    }

    pub fn eval(&self, x: f64) -> Result<Complex64> {
        let top = self.x_max();
        if !(x >= 0.0 && x <= top * (1.0 + 1e-12)) {
            return Err(Error::Coverage(format!("|x| = {x} outside table range [0, {top}]")));
        }
        let last = self.values.len() - 2;
        let i = ((x / self.h) as usize).min(last);
        let t = (x - i as f64 * self.h) / self.h;
        let (a, b) = (1.0 - t, t);
        let h2 = self.h * self.h / 6.0;
        Ok(self.values[i] * a
            + self.values[i + 1] * b
            + (self.second[i] * (a * a * a - a) + self.second[i + 1] * (b * b * b - b)) * h2)
    }
}

fn tilde_sample(x: f64, n: u32) -> Result<FundSolSample> {
    sample(x, n)
}

fn natural_spline_second_derivatives(y: &[Complex64], h: f64) -> Vec<Complex64> {
    let m = y.len();
    let mut c = vec![0.0; m];
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    // interior rows: M_{i-1} + 4M_i + M_{i+1} = 6(y_{i+1} − 2y_i + y_{i-1})/h²
    for i in 1..m - 1 {
        let rhs = (y[i + 1] - y[i] * 2.0 + y[i - 1]) * (6.0 / (h * h));
        let denom = 4.0 - c[i - 1];
        c[i] = 1.0 / denom;
        d[i] = (rhs - d[i - 1]) / denom;
    }
    for i in (1..m - 1).rev() {
        out[i] = d[i] - out[i + 1] * c[i];
    }
    out
}

/// K with its quadrature and interpolation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub quad_error: f64,
    pub interpolation_error: f64,
    pub level: u32,
}

/// Times and geometry after moving y to 0, z to the positive axis and
/// arranging a ≥ 1.
#[derive(Debug, Clone, PartialEq)]
struct Normalized {
    t1: f64,
    t2: f64,
    z: f64,
    centers: Vec<f64>,
}

fn normalize(cfg: &KernelConfig, swap_times: bool) -> Normalized {
    let mut z = cfg.z - cfg.y;
    let mut centers: Vec<f64> = cfg.cutoff.centers.iter().map(|c| c - cfg.y).collect();
    if z < 0.0 {
        z = -z;
        centers.iter_mut().for_each(|c| *c = -*c);
    }
    let mut t1 = cfg.t0 - cfg.t_prime;
    let mut t2 = cfg.t_dprime - cfg.t0;
    if swap_times && t1 < t2 {
        // x → z − x exchanges ρ and σ
        std::mem::swap(&mut t1, &mut t2);
        centers.iter_mut().for_each(|c| *c = z - *c);
    }
    Normalized { t1, t2, z, centers }
}

/// The largest |x−y|/(t₀−t′)^{1/4} and |x−z|/(t″−t₀)^{1/4} over the cutoff
/// support, which the Ĩ table must cover.
pub fn required_table_range(cfg: &KernelConfig) -> f64 {
    let nz = normalize(cfg, true);
    let r = cfg.cutoff.support_radius();
    let far0 = nz.centers.iter().map(|c| c.abs() + r).fold(0.0, f64::max);
    let far1 = nz.centers.iter().map(|c| (nz.z - c).abs() + r).fold(0.0, f64::max);
    (far0 / nz.t1.powf(0.25)).max(far1 / nz.t2.powf(0.25))
}

/// Evaluate K. `level = None` refines adaptively to `DEFAULT_QUAD_TOL`.
pub fn eval_k(cfg: &KernelConfig, table: &ItildeTable, level: Option<u32>) -> Result<KernelValue> {
    eval_k_inner(cfg, table, level, true)
}

/// Same as [`eval_k`] without the a ≥ 1 swap; used to check that the swap is
/// an exact change of variables.
pub fn eval_k_unswapped(cfg: &KernelConfig, table: &ItildeTable, level: Option<u32>) -> Result<KernelValue> {
    eval_k_inner(cfg, table, level, false)
}

fn eval_k_inner(cfg: &KernelConfig, table: &ItildeTable, level: Option<u32>, swap: bool) -> Result<KernelValue> {
    cfg.validate()?;
    if table.n != cfg.n {
        return Err(Error::Coverage(format!("table is for n = {}, kernel needs n = {}", table.n, cfg.n)));
    }
    let zero = KernelValue {
        value: Complex64::new(0.0, 0.0),
        quad_error: 0.0,
        interpolation_error: 0.0,
        level: 0,
    };
    if cfg.cutoff.centers.is_empty() {
        return Ok(zero);
    }
    let need = required_table_range(cfg);
    if need > table.x_max() {
        return Err(Error::Coverage(format!(
            "kernel needs Ĩ up to |x| = {need:.4}, table stops at {:.4}",
            table.x_max()
        )));
    }
    let nz = normalize(cfg, swap);
    let r = cfg.cutoff.support_radius();
    let rho_max = nz.centers.iter().map(|c| c.abs() + r).fold(0.0, f64::max);
    let sigma_max = nz.centers.iter().map(|c| (nz.z - c).abs() + r).fold(0.0, f64::max);
    let dom = BipolarDomain::new(nz.z, rho_max, sigma_max)?;
    let (s1, s2) = (nz.t1.powf(0.25), nz.t2.powf(0.25));
    let z = nz.z;
    let lambdas: Vec<f64> = nz.centers.iter().map(|c| c / z).collect();
    let integrand = |rho: f64, sigma: f64| -> Complex64 {
        // |x − λz|² = ρ² − λ(ρ² + |z|² − σ²) + λ²|z|²
        let chi = cfg.cutoff.chi_from_distances(lambdas.iter().map(|&l| {
            (rho * rho - l * (rho * rho + z * z - sigma * sigma) + l * l * z * z)
                .max(0.0)
                .sqrt()
        }));
        let w = kernel_weight(chi);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let (a, b) = (rho / s1, sigma / s2);
        let phase = -(phase_shift(a) + phase_shift(b));
        let ia = table.eval(a.min(table.x_max())).unwrap_or_default();
        let ib = table.eval(b.min(table.x_max())).unwrap_or_default();
        ia * ib * Complex64::from_polar(w, phase)
    };
    let prefactor = (nz.t1 * nz.t2).powf(-(cfg.n as f64) / 4.0);
    let (value, err, lvl) = match level {
        Some(l) => (bipolar_integral_at(&integrand, &dom, cfg.n, l)?, f64::NAN, l),
        None => {
            let q = bipolar_integral(&integrand, &dom, cfg.n, DEFAULT_QUAD_TOL)?;
            (q.value, q.error_estimate, q.level)
        }
    };
    Ok(KernelValue {
        value: value * prefactor,
        quad_error: err * prefactor,
        interpolation_error: table.interpolation_error,
        level: lvl,
    })
}

/// K by cylindrical quadrature in the original frame, with y anywhere on
/// the axis. Used to check the translation reduction.
pub fn eval_k_cylindrical(cfg: &KernelConfig, table: &ItildeTable, panels: usize) -> Result<Complex64> {
    cfg.validate()?;
    if cfg.cutoff.centers.is_empty() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (t1, t2) = (cfg.t0 - cfg.t_prime, cfg.t_dprime - cfg.t0);
    let (s1, s2) = (t1.powf(0.25), t2.powf(0.25));
    let r = cfg.cutoff.support_radius();
    let lo = cfg.cutoff.centers.iter().cloned().fold(f64::INFINITY, f64::min) - r;
    let hi = cfg.cutoff.centers.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
    let g = GaussLegendre::g20();
    let sphere = unit_sphere_area(cfg.n - 1);
    let mut err = None;
    let total = g.panels_c(lo, hi, panels, |x1| {
        g.panels_c(0.0, r, panels, |rr| {
            let chi = cfg
                .cutoff
                .chi_from_distances(cfg.cutoff.centers.iter().map(|c| ((x1 - c).powi(2) + rr * rr).sqrt()));
            let w = kernel_weight(chi);
            if w == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let a = ((x1 - cfg.y).powi(2) + rr * rr).sqrt() / s1;
            let b = ((x1 - cfg.z).powi(2) + rr * rr).sqrt() / s2;
            let (ia, ib) = match (table.eval(a), table.eval(b)) {
                (Ok(p), Ok(q)) => (p, q),
                (Err(e), _) | (_, Err(e)) => {
                    err.get_or_insert(e);
                    return Complex64::new(0.0, 0.0);
                }
            };
            let phase = -(phase_shift(a) + phase_shift(b));
            ia * ib * Complex64::from_polar(w * sphere * rr.powi(cfg.n as i32 - 2), phase)
        })
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(total * (t1 * t2).powf(-(cfg.n as f64) / 4.0))
}

#[derive(Debug, Clone, Serialize, Deserialize, schemars::JsonSchema)]
pub struct KernelDecayInputs {
    pub base: KernelConfig,
    pub separations: Vec<f64>,
    pub table_spacing: f64,
}

/// Fit |K| ≈ C |t″ − t′|^{-c} with t₀ at the midpoint of [t′, t″]. Also
/// refits at doubled quadrature resolution and, for comparison, with the
/// cutoff widened eightfold (not asserted).
pub fn kernel_decay_fit(base: &KernelConfig, separations: &[f64], table_spacing: f64) -> Result<ExperimentReport> {
    if separations.len() < 5 {
        return Err(Error::Fit(format!("need at least 5 separations, got {}", separations.len())));
    }
    let lo = separations.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = separations.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || (hi / lo).log10() < 2.0 - 1e-9 {
        return Err(Error::Fit("separations must be positive and span two decades".into()));
    }
    let at = |s: f64, cutoff: &SmoothCutoff| KernelConfig {
        t_prime: base.t_prime,
        t0: base.t_prime + 0.5 * s,
        t_dprime: base.t_prime + s,
        cutoff: cutoff.clone(),
        ..base.clone()
    };
    let wide = SmoothCutoff::new(base.cutoff.mu / 8.0, base.cutoff.centers.clone())?;
    let need = separations
        .iter()
        .flat_map(|&s| [required_table_range(&at(s, &base.cutoff)), required_table_range(&at(s, &wide))])
        .fold(0.0, f64::max);
    let table = ItildeTable::build(base.n, need * 1.02 + table_spacing, table_spacing)?;
    let inputs = KernelDecayInputs {
        base: base.clone(),
        separations: separations.to_vec(),
        table_spacing,
    };
    let mut report = ExperimentReport::new("kernel-decay", &inputs);
    report.metric("table_interpolation_error", table.interpolation_error);
    report.metric("table_range", table.x_max());

    let eval_all = |cut: &SmoothCutoff, level: Option<u32>| -> Result<Vec<KernelValue>> {
        let job = |&s: &f64| eval_k(&at(s, cut), &table, level);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            separations.par_iter().map(job).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            separations.iter().map(job).collect()
        }
    };
    let adaptive = eval_all(&base.cutoff, None)?;
    let level = adaptive.iter().map(|k| k.level).max().unwrap_or(0);
    let coarse = eval_all(&base.cutoff, Some(level))?;
    let fine = eval_all(&base.cutoff, Some(level + 1))?;
    let widened = eval_all(&wide, None)?;

    let mut table_out = Table::new(
        "kernel",
        &["separation", "abs_k", "abs_k_doubled", "quad_error", "abs_k_wide_cutoff"],
    );
    for (i, &s) in separations.iter().enumerate() {
        table_out.push(vec![
            s,
            coarse[i].value.norm(),
            fine[i].value.norm(),
            adaptive[i].quad_error,
            widened[i].value.norm(),
        ]);
    }
    let mags = |v: &[KernelValue]| v.iter().map(|k| k.value.norm()).collect::<Vec<_>>();
    let fit_c = fit_loglog(separations, &mags(&coarse)).ok_or_else(|| Error::Fit("kernel vanishes".into()))?;
    let fit_f = fit_loglog(separations, &mags(&fine)).ok_or_else(|| Error::Fit("kernel vanishes".into()))?;
    let fit_w = fit_loglog(separations, &mags(&widened)).ok_or_else(|| Error::Fit("kernel vanishes".into()))?;
    let c = -fit_c.slope;
    report.fits.push(FitRecord::new("kernel", &fit_c, None, None));
    report.fits.push(FitRecord::new("kernel_doubled_resolution", &fit_f, None, None));
    report.fits.push(FitRecord::new("kernel_wide_cutoff", &fit_w, None, None));
    report.metric("c", c);
    report.metric("c_doubled_resolution", -fit_f.slope);
    report.metric("c_wide_cutoff", -fit_w.slope);
    report.metric("r_squared", fit_c.r_squared);
    report.metric("quadrature_level", level as f64);
    report.check(Check::at_least("c_positive", c, f64::MIN_POSITIVE));
    report.check(Check::at_least("r_squared", fit_c.r_squared, 0.9));
    report.check(Check::at_most("c_resolution_change", (c + fit_f.slope).abs(), 0.02));
    let empty = SmoothCutoff::new(base.cutoff.mu, Vec::new())?;
    let degenerate = eval_k(&at(separations[0], &empty), &table, None)?;
    report.check(Check::flag(
        "trivial_cutoff_gives_zero",
        degenerate.value == Complex64::new(0.0, 0.0),
        None,
    ));
    report.tables.push(table_out);
    Ok(report)
}
