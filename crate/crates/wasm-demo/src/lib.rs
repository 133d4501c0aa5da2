//! wasm-bindgen entry points for the static page in `www/`. Every function
//! returns a flat `Float64Array` of interleaved columns so the page can plot
//! it without a serialization layer.

use biharm::field::RadialGrid;
use biharm::ground_state::{default_seed, petviashvili_solve, DEFAULT_MAX_ITER, DEFAULT_TOL};
use biharm::littlewood_paley::{Dyadic, DyadicProjector, ProjectorKind};
use biharm::oscillatory::{eval_i, eval_i_tilde};
use biharm::params::{ModelParams, Sign};
use biharm::quad::logspace;
use wasm_bindgen::prelude::*;

/// Upper bound on sample counts, to keep the page responsive.
pub const MAX_POINTS: usize = 4096;

fn check_points(points: usize) -> Result<(), String> {
    if (2..=MAX_POINTS).contains(&points) {
        Ok(())
    } else {
        Err(format!("points must lie in [2, {MAX_POINTS}], got {points}"))
    }
}

/// Rows (k, φ(k/N), ψ(k/N), 1 − φ(k/N)) for k uniform in [0, k_max].
pub fn lp_profiles(scale_exponent: i32, k_max: f64, points: usize) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(format!("k_max must be positive, got {k_max}"));
    }
    let scale = Dyadic::new(scale_exponent).map_err(|e| e.to_string())?;
    let kinds = [ProjectorKind::Leq, ProjectorKind::Band, ProjectorKind::Gt];
    let mut out = Vec::with_capacity(4 * points);
    for i in 0..points {
        let k = k_max * i as f64 / (points - 1) as f64;
        out.push(k);
        out.extend(kinds.iter().map(|&kind| DyadicProjector::new(scale, kind).multiplier(k)));
    }
    Ok(out)
}

/// Rows (|x|, |I(x)|, |Ĩ(x)|, |x|^{-n/3}) at log-spaced |x| in [x_min, x_max].
pub fn fundsol_curves(n: u32, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, String> {
    check_points(points)?;
    if !(x_min > 0.0 && x_max > x_min) {
        return Err(format!("need 0 < x_min < x_max, got {x_min}, {x_max}"));
    }
    let mut out = Vec::with_capacity(4 * points);
    for x in logspace(x_min, x_max, points) {
        let i = eval_i(x, n).map_err(|e| e.to_string())?;
        let it = eval_i_tilde(x, n).map_err(|e| e.to_string())?;
        out.extend([x, i.value.norm(), it.value.norm(), x.powf(-(n as f64) / 3.0)]);
    }
    Ok(out)
}

/// Rows (r, Q(r)) of the focusing ground state on an m-node grid of radius
/// r_max.
pub fn ground_state(n: u32, p: f64, r_max: f64, m: usize) -> Result<Vec<f64>, String> {
    check_points(m)?;
    let params = ModelParams::new(n, p, Sign::Focusing);
    let grid = RadialGrid::new(n, r_max, m).map_err(|e| e.to_string())?;
    let res = petviashvili_solve(&params, &grid, &default_seed(&grid), DEFAULT_TOL, DEFAULT_MAX_ITER)
        .map_err(|e| e.to_string())?;
    Ok(res.q.nodes().iter().zip(&res.q.values).flat_map(|(&r, v)| [r, v.re]).collect())
}

#[wasm_bindgen(js_name = lpProfiles)]
pub fn lp_profiles_js(scale_exponent: i32, k_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    lp_profiles(scale_exponent, k_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = fundsolCurves)]
pub fn fundsol_curves_js(n: u32, x_min: f64, x_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    fundsol_curves(n, x_min, x_max, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = groundState)]
pub fn ground_state_js(n: u32, p: f64, r_max: f64, m: usize) -> Result<Vec<f64>, JsError> {
    ground_state(n, p, r_max, m).map_err(|e| JsError::new(&e))
}
