//! Radial fields on ℝⁿ and the radial Fourier transform.
//!
//! For radial f the unitary Fourier transform on ℝⁿ reduces to
//!
//! ```text
//! f̂(k) = ∫₀^∞ f(r) j̃_ν(kr) r^{n-1} dr,   f(r) = ∫₀^∞ f̂(k) j̃_ν(kr) k^{n-1} dk
//! ```
//!
//! with ν = (n-2)/2 and j̃_ν(x) = x^{-ν}J_ν(x). The default discretisation is
//! the quasi-discrete Hankel transform: nodes at Bessel zeros, so the
//! quadrature is Gaussian for band-limited data. The symmetric kernel is
//! polished to exact orthogonality, making round trips and Plancherel hold to
//! rounding error. A midpoint-rule transform on uniform nodes is kept for
//! cross-validation.

use crate::error::{Error, Result};
use crate::params::Exponent;
use crate::special::{bessel_j, bessel_j_reduced, bessel_zeros, radial_twice_order, unit_sphere_area};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

/// Minimum number of radial nodes.
pub const MIN_NODES: usize = 64;

/// Mass fraction beyond 0.9·r_max above which a truncation warning is raised.
pub const TRUNCATION_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, schemars::JsonSchema)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// Nodes at scaled zeros of J_ν (quasi-discrete Hankel transform).
    BesselZeros,
    /// Midpoint nodes (i + ½)h with the midpoint rule.
    Uniform,
}

/// Precomputed transform between a spatial and a spectral node set.
#[derive(Debug)]
pub struct TransformPlan {
    n: u32,
    kind: GridKind,
    r_max: f64,
    k_max: f64,
    r: Vec<f64>,
    k: Vec<f64>,
    /// Quadrature weights for ∫ · r^{n-1} dr.
    w: Vec<f64>,
    /// Quadrature weights for ∫ · k^{n-1} dk.
    omega: Vec<f64>,
    /// f̂ = forward · f, row-major.
    forward: Vec<f64>,
    /// f = inverse · f̂, row-major.
    inverse: Vec<f64>,
    /// Frobenius norm of SᵀS − I before polishing (zero for uniform grids).
    orthogonality_defect: f64,
}

impl TransformPlan {
    fn build(n: u32, kind: GridKind, r_max: f64, m: usize) -> Self {
        match kind {
            GridKind::BesselZeros => Self::build_hankel(n, r_max, m),
            GridKind::Uniform => Self::build_uniform(n, r_max, m),
        }
    }

    fn build_hankel(n: u32, r_max: f64, m: usize) -> Self {
        let tn = radial_twice_order(n);
        let alpha = bessel_zeros(tn, m + 1);
        let s = alpha[m];
        let k_max = s / r_max;
        let jp: Vec<f64> = alpha[..m].iter().map(|&a| bessel_j(tn + 2, a).abs()).collect();
        let r: Vec<f64> = alpha[..m].iter().map(|&a| a / k_max).collect();
        let k: Vec<f64> = alpha[..m].iter().map(|&a| a / r_max).collect();
        let nm2 = n as i32 - 2;
        let w: Vec<f64> = (0..m)
            .map(|i| 2.0 * r[i].powi(nm2) / (k_max * k_max * jp[i] * jp[i]))
            .collect();
        let omega: Vec<f64> = (0..m)
            .map(|j| 2.0 * k[j].powi(nm2) / (r_max * r_max * jp[j] * jp[j]))
            .collect();
        // S_ij = √w_i j̃_ν(k_j r_i) √ω_j = 2 J_ν(α_i α_j / S) / (S |J_{ν+1}(α_i) J_{ν+1}(α_j)|)
        let mut sym = vec![0.0; m * m];
        for i in 0..m {
            for j in i..m {
                let v = 2.0 * bessel_j(tn, alpha[i] * alpha[j] / s) / (s * jp[i] * jp[j]);
                sym[i * m + j] = v;
                sym[j * m + i] = v;
            }
        }
        let defect = orthogonality_defect(&sym, m);
        polish_orthogonal(&mut sym, m);
        let mut forward = vec![0.0; m * m];
        let mut inverse = vec![0.0; m * m];
        for j in 0..m {
            for i in 0..m {
                let sji = sym[j * m + i];
                forward[j * m + i] = sji * (w[i] / omega[j]).sqrt();
                inverse[j * m + i] = sji * (omega[i] / w[j]).sqrt();
            }
        }
        Self {
            n,
            kind: GridKind::BesselZeros,
            r_max,
            k_max,
            r,
            k,
            w,
            omega,
            forward,
            inverse,
            orthogonality_defect: defect,
        }
    }

    fn build_uniform(n: u32, r_max: f64, m: usize) -> Self {
        let tn = radial_twice_order(n);
        let h = r_max / m as f64;
        let dk = std::f64::consts::PI / r_max;
        let k_max = dk * m as f64;
        let nm1 = n as i32 - 1;
        let r: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
        let k: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * dk).collect();
        let w: Vec<f64> = r.iter().map(|x| h * x.powi(nm1)).collect();
        let omega: Vec<f64> = k.iter().map(|x| dk * x.powi(nm1)).collect();
        let mut forward = vec![0.0; m * m];
        let mut inverse = vec![0.0; m * m];
        for j in 0..m {
            for i in 0..m {
                let b = bessel_j_reduced(tn, k[j] * r[i]);
                forward[j * m + i] = w[i] * b;
                inverse[i * m + j] = omega[j] * b;
            }
        }
        Self {
            n,
            kind: GridKind::Uniform,
            r_max,
            k_max,
            r,
            k,
            w,
            omega,
            forward,
            inverse,
            orthogonality_defect: 0.0,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.r.len()
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn k_max(&self) -> f64 {
        self.k_max
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r
    }

    pub fn k_nodes(&self) -> &[f64] {
        &self.k
    }

    /// Weights for ∫₀^∞ g(r) r^{n-1} dr on the spatial nodes.
    pub fn r_weights(&self) -> &[f64] {
        &self.w
    }

    /// Weights for ∫₀^∞ g(k) k^{n-1} dk on the spectral nodes.
    pub fn k_weights(&self) -> &[f64] {
        &self.omega
    }

    pub fn orthogonality_defect(&self) -> f64 {
        self.orthogonality_defect
    }

    pub fn forward(&self, f: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.forward, f)
    }

    pub fn inverse(&self, g: &[Complex64]) -> Vec<Complex64> {
        matvec(&self.inverse, g)
    }

    /// Evaluate the band-limited interpolant Σ_j ω_j ĝ_j j̃_ν(k_j r) at an
    /// arbitrary radius.
    pub fn interpolate(&self, spectrum: &[Complex64], r: f64) -> Complex64 {
        let tn = radial_twice_order(self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&k, &om), &g) in self.k.iter().zip(&self.omega).zip(spectrum) {
            acc += g * (om * bessel_j_reduced(tn, k * r));
        }
        acc
    }

    /// Evaluate Σ_i w_i f_i j̃_ν(k r_i), the transform at an arbitrary frequency.
    pub fn spectrum_at(&self, values: &[Complex64], k: f64) -> Complex64 {
        let tn = radial_twice_order(self.n);
        let mut acc = Complex64::new(0.0, 0.0);
        for ((&r, &w), &f) in self.r.iter().zip(&self.w).zip(values) {
            acc += f * (w * bessel_j_reduced(tn, k * r));
        }
        acc
    }
}

fn matvec(mat: &[f64], x: &[Complex64]) -> Vec<Complex64> {
    let m = x.len();
    debug_assert_eq!(mat.len(), m * m);
    let (re, im): (Vec<f64>, Vec<f64>) = x.iter().map(|z| (z.re, z.im)).unzip();
    mat.chunks_exact(m)
        .map(|row| {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..m {
                a += row[i] * re[i];
                b += row[i] * im[i];
            }
            Complex64::new(a, b)
        })
        .collect()
}

fn gemm(a: &[f64], b: &[f64], m: usize) -> Vec<f64> {
    let mut c = vec![0.0; m * m];
    unsafe {
        matrixmultiply::dgemm(
            m,
            m,
            m,
            1.0,
            a.as_ptr(),
            m as isize,
            1,
            b.as_ptr(),
            m as isize,
            1,
            0.0,
            c.as_mut_ptr(),
            m as isize,
            1,
        );
    }
    c
}

fn orthogonality_defect(s: &[f64], m: usize) -> f64 {
    let s2 = gemm(s, s, m);
    let mut acc = 0.0;
    for i in 0..m {
        for j in 0..m {
            let d = s2[i * m + j] - if i == j { 1.0 } else { 0.0 };
            acc += d * d;
        }
    }
    acc.sqrt()
}

/// Newton–Schulz iteration X ← X(3I − X²)/2 towards the nearest orthogonal
/// matrix; symmetry is preserved.
fn polish_orthogonal(s: &mut Vec<f64>, m: usize) {
    for _ in 0..30 {
        let s2 = gemm(s, s, m);
        let mut t = vec![0.0; m * m];
        let mut defect = 0.0;
        for i in 0..m {
            for j in 0..m {
                let id = if i == j { 1.0 } else { 0.0 };
                let d = s2[i * m + j] - id;
                defect += d * d;
                t[i * m + j] = 0.5 * (3.0 * id - s2[i * m + j]);
            }
        }
        if defect.sqrt() < 1e-15 * m as f64 {
            break;
        }
        let next = gemm(s, &t, m);
        // re-symmetrise against drift
        for i in 0..m {
            for j in 0..i {
                let v = 0.5 * (next[i * m + j] + next[j * m + i]);
                s[i * m + j] = v;
                s[j * m + i] = v;
            }
            s[i * m + i] = next[i * m + i];
        }
    }
}

#[derive(Hash, PartialEq, Eq)]
struct PlanKey {
    n: u32,
    kind: GridKind,
    r_max_bits: u64,
    m: usize,
}

fn plan_cache() -> &'static Mutex<HashMap<PlanKey, Arc<TransformPlan>>> {
    static CACHE: OnceLock<Mutex<HashMap<PlanKey, Arc<TransformPlan>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn shared_plan(n: u32, kind: GridKind, r_max: f64, m: usize) -> Arc<TransformPlan> {
    let key = PlanKey {
        n,
        kind,
        r_max_bits: r_max.to_bits(),
        m,
    };
    if let Some(p) = plan_cache().lock().unwrap().get(&key) {
        return p.clone();
    }
    let plan = Arc::new(TransformPlan::build(n, kind, r_max, m));
    plan_cache().lock().unwrap().entry(key).or_insert(plan).clone()
}

/// Which side of the transform a grid describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Space,
    Frequency,
}

/// A node set in r (or k) together with the transform plan it belongs to.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    plan: Arc<TransformPlan>,
    domain: Domain,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.same_plan(other)
    }
}

impl RadialGrid {
    /// Bessel-zero grid on (0, r_max) with `m` nodes in dimension `n`.
    pub fn new(n: u32, r_max: f64, m: usize) -> Result<Self> {
        Self::with_kind(n, r_max, m, GridKind::BesselZeros)
    }

    pub fn uniform(n: u32, r_max: f64, m: usize) -> Result<Self> {
        Self::with_kind(n, r_max, m, GridKind::Uniform)
    }

    pub fn with_kind(n: u32, r_max: f64, m: usize, kind: GridKind) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be at least 1".into()));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::Domain(format!("r_max must be positive, got {r_max}")));
        }
        if m < MIN_NODES {
            return Err(Error::Domain(format!("need at least {MIN_NODES} nodes, got {m}")));
        }
        Ok(Self {
            plan: shared_plan(n, kind, r_max, m),
            domain: Domain::Space,
        })
    }

    pub fn plan(&self) -> &TransformPlan {
        &self.plan
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n(&self) -> u32 {
        self.plan.n
    }

    pub fn m(&self) -> usize {
        self.plan.m()
    }

    pub fn kind(&self) -> GridKind {
        self.plan.kind
    }

    /// Extent of the node set: r_max in space, k_max in frequency.
    pub fn r_max(&self) -> f64 {
        match self.domain {
            Domain::Space => self.plan.r_max,
            Domain::Frequency => self.plan.k_max,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        match self.domain {
            Domain::Space => &self.plan.r,
            Domain::Frequency => &self.plan.k,
        }
    }

    /// Weights for ∫₀^∞ g(s) s^{n-1} ds over this node set.
    pub fn weights(&self) -> &[f64] {
        match self.domain {
            Domain::Space => &self.plan.w,
            Domain::Frequency => &self.plan.omega,
        }
    }

    /// The dual grid (space ↔ frequency) of the same plan.
    pub fn dual(&self) -> Self {
        Self {
            plan: self.plan.clone(),
            domain: match self.domain {
                Domain::Space => Domain::Frequency,
                Domain::Frequency => Domain::Space,
            },
        }
    }

    pub fn same_plan(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.plan, &other.plan)
    }

    pub fn header(&self) -> FieldHeader {
        FieldHeader {
            n: self.n(),
            r_max: self.plan.r_max,
            m: self.m(),
            kind: self.kind(),
        }
    }
}

/// Sampled complex radial profile f(r_j).
#[derive(Debug, Clone)]
pub struct RadialField {
    pub grid: RadialGrid,
    pub values: Vec<Complex64>,
}

/// Sampled radial Fourier transform f̂(k_j).
#[derive(Debug, Clone)]
pub struct SpectralField {
    pub kgrid: RadialGrid,
    pub values: Vec<Complex64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if grid.domain != Domain::Space {
            return Err(Error::GridMismatch("spatial field on a frequency grid".into()));
        }
        if values.len() != grid.m() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.m()
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Domain("field values must be finite".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(grid: &RadialGrid, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn from_real_fn<F: Fn(f64) -> f64>(grid: &RadialGrid, f: F) -> Self {
        Self::from_fn(grid, |r| Complex64::new(f(r), 0.0))
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self::from_fn(grid, |_| Complex64::new(0.0, 0.0))
    }

    pub fn nodes(&self) -> &[f64] {
        self.grid.nodes()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise combination with another field on the same grid.
    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields live on different grids".into()));
        }
        Ok(Self {
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Evaluate the band-limited interpolant at arbitrary radii.
    pub fn interpolate(&self, radii: &[f64]) -> Vec<Complex64> {
        let spectrum = self.grid.plan().forward(&self.values);
        radii.iter().map(|&r| self.grid.plan().interpolate(&spectrum, r)).collect()
    }

    /// Fraction of the mass carried by r > 0.9·r_max.
    pub fn edge_mass_fraction(&self) -> f64 {
        let r_cut = 0.9 * self.grid.plan().r_max;
        let mut edge = 0.0;
        let mut total = 0.0;
        for ((&r, &w), v) in self.nodes().iter().zip(self.grid.weights()).zip(&self.values) {
            let dm = w * v.norm_sqr();
            total += dm;
            if r > r_cut {
                edge += dm;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            edge / total
        }
    }

    /// Edge mass fraction, logging a warning above [`TRUNCATION_THRESHOLD`].
    pub fn truncation_check(&self) -> f64 {
        let frac = self.edge_mass_fraction();
        if frac > TRUNCATION_THRESHOLD {
            log::warn!("mass fraction {frac:.3e} beyond 0.9 r_max exceeds {TRUNCATION_THRESHOLD:e}");
        }
        frac
    }

    /// CSV with columns r, re, im.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["r", "re", "im"]).expect("in-memory write");
        for (r, v) in self.nodes().iter().zip(&self.values) {
            w.serialize((r, v.re, v.im)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf8")
    }

    /// Write `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write_snapshot(&self, dir: &Path, stem: &str) -> Result<()> {
        std::fs::write(dir.join(format!("{stem}.csv")), self.to_csv())?;
        let header = serde_json::to_string_pretty(&self.grid.header())?;
        std::fs::write(dir.join(format!("{stem}.json")), header + "\n")?;
        Ok(())
    }

    /// Read a snapshot written by [`RadialField::write_snapshot`].
    pub fn read_snapshot(dir: &Path, stem: &str) -> Result<Self> {
        let header: FieldHeader = serde_json::from_str(&std::fs::read_to_string(dir.join(format!("{stem}.json")))?)?;
        let grid = RadialGrid::with_kind(header.n, header.r_max, header.m, header.kind)?;
        let mut rdr = csv::Reader::from_path(dir.join(format!("{stem}.csv"))).map_err(|e| Error::Io(e.to_string()))?;
        let mut values = Vec::with_capacity(header.m);
        for (row, &node) in rdr.deserialize::<(f64, f64, f64)>().zip(grid.nodes()) {
            let (r, re, im) = row.map_err(|e| Error::Io(e.to_string()))?;
            if (r - node).abs() > 1e-12 * node.max(1.0) {
                return Err(Error::GridMismatch(format!("node {r} does not match grid node {node}")));
            }
            values.push(Complex64::new(re, im));
        }
        RadialField::new(grid, values)
    }
}

impl SpectralField {
    pub fn new(kgrid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if kgrid.domain != Domain::Frequency {
            return Err(Error::GridMismatch("spectral field on a spatial grid".into()));
        }
        if values.len() != kgrid.m() {
            return Err(Error::GridMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                kgrid.m()
            )));
        }
        Ok(Self { kgrid, values })
    }

    pub fn nodes(&self) -> &[f64] {
        self.kgrid.nodes()
    }

    /// Multiply by a radial symbol m(k).
    pub fn apply_symbol<F: Fn(f64) -> Complex64>(&self, symbol: F) -> Self {
        Self {
            kgrid: self.kgrid.clone(),
            values: self
                .nodes()
                .iter()
                .zip(&self.values)
                .map(|(&k, &v)| v * symbol(k))
                .collect(),
        }
    }
}

/// JSON header accompanying a field CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct FieldHeader {
    pub n: u32,
    pub r_max: f64,
    pub m: usize,
    pub kind: GridKind,
}

pub fn radial_fourier(f: &RadialField) -> SpectralField {
    SpectralField {
        kgrid: f.grid.dual(),
        values: f.grid.plan().forward(&f.values),
    }
}

/// Transform to a prescribed frequency grid, which must be the dual of the
/// field's spatial grid.
pub fn radial_fourier_onto(f: &RadialField, kgrid: &RadialGrid) -> Result<SpectralField> {
    if kgrid.domain != Domain::Frequency || !kgrid.same_plan(&f.grid) {
        return Err(Error::GridMismatch(
            "frequency grid is not the dual of the field's spatial grid".into(),
        ));
    }
    Ok(radial_fourier(f))
}

pub fn inverse_radial_fourier(g: &SpectralField) -> RadialField {
    RadialField {
        grid: g.kgrid.dual(),
        values: g.kgrid.plan().inverse(&g.values),
    }
}

/// Apply a Fourier multiplier m(|ξ|) to a field.
pub fn apply_multiplier<F: Fn(f64) -> Complex64>(f: &RadialField, symbol: F) -> RadialField {
    inverse_radial_fourier(&radial_fourier(f).apply_symbol(symbol))
}

/// L^q norm over ℝⁿ: (|S^{n-1}| ∫|f|^q r^{n-1} dr)^{1/q}, or the largest
/// sample magnitude for q = ∞.
pub fn lq_norm(f: &RadialField, q: Exponent) -> f64 {
    match q {
        Exponent::Infinite => f.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        Exponent::Finite(q) => {
            let s: f64 = f
                .grid
                .weights()
                .iter()
                .zip(&f.values)
                .map(|(w, v)| w * v.norm().powf(q))
                .sum();
            (unit_sphere_area(f.grid.n()) * s).powf(1.0 / q)
        }
    }
}

pub fn l2_norm(f: &RadialField) -> f64 {
    lq_norm(f, Exponent::Finite(2.0))
}

/// L² norm of a spectral field over ℝⁿ.
pub fn spectral_l2_norm(g: &SpectralField) -> f64 {
    let s: f64 = g.kgrid.weights().iter().zip(&g.values).map(|(w, v)| w * v.norm_sqr()).sum();
    (unit_sphere_area(g.kgrid.n()) * s).sqrt()
}

/// Inhomogeneous ‖⟨k⟩^s f̂‖₂ and homogeneous ‖k^s f̂‖₂ Sobolev norms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, schemars::JsonSchema)]
pub struct SobolevNorms {
    pub s: f64,
    pub inhomogeneous: f64,
    pub homogeneous: f64,
}

pub fn sobolev_norm(f: &RadialField, s: f64) -> Result<SobolevNorms> {
    if !(0.0..=4.0).contains(&s) {
        return Err(Error::Domain(format!("Sobolev index must lie in [0, 4], got {s}")));
    }
    Ok(sobolev_norm_of_spectrum(&radial_fourier(f), s))
}

pub fn sobolev_norm_of_spectrum(g: &SpectralField, s: f64) -> SobolevNorms {
    let sigma = unit_sphere_area(g.kgrid.n());
    let mut inh = 0.0;
    let mut hom = 0.0;
    for ((&k, &w), v) in g.nodes().iter().zip(g.kgrid.weights()).zip(&g.values) {
        let a = w * v.norm_sqr();
        inh += a * (1.0 + k * k).powf(s);
        hom += a * k.powf(2.0 * s);
    }
    SobolevNorms {
        s,
        inhomogeneous: (sigma * inh).sqrt(),
        homogeneous: (sigma * hom).sqrt(),
    }
}

/// Inner product ⟨f, g⟩ = ∫ f ḡ dx.
pub fn inner(f: &RadialField, g: &RadialField) -> Complex64 {
    let sigma = unit_sphere_area(f.grid.n());
    let s: Complex64 = f
        .grid
        .weights()
        .iter()
        .zip(f.values.iter().zip(&g.values))
        .map(|(&w, (a, b))| a * b.conj() * w)
        .sum();
    s * sigma
}
