use biharm::field::*;
use biharm::ground_state::*;
use biharm::params::*;
use num_complex::Complex64;

fn solve() -> GroundStateResult {
    let params = ModelParams::new(5, 3.0, Sign::Focusing);
    let grid = RadialGrid::new(5, 48.0, 192).unwrap();
    petviashvili_solve(&params, &grid, &default_seed(&grid), DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap()
}

#[test]
fn solution_satisfies_both_residual_forms() {
    let res = solve();
    assert!(res.residual <= DEFAULT_TOL);
    assert!(spectral_residual(&res.q, 3.0) <= 10.0 * DEFAULT_TOL);
    assert!(fixed_point_residual(&res.q, 3.0) <= 1e-9);
    assert!((res.final_multiplier() - 1.0).abs() <= 1e-10);
}

#[test]
fn orbit_solves_the_equation() {
    let res = solve();
    for t in [0.0, 0.7, 2.0] {
        assert!(orbit_residual(&res.q, 3.0, t) <= 1e-9);
    }
}

#[test]
fn orbit_preserves_modulus() {
    let res = solve();
    let u = soliton_orbit(&res.q, 1.234);
    for (a, b) in u.values.iter().zip(&res.q.values) {
        assert!((a.norm() - b.norm()).abs() <= 1e-15 * b.norm().max(1e-300));
    }
}

#[test]
fn profile_is_oscillatory_and_decaying() {
    let res = solve();
    assert!(!sign_changes(&res.q).is_empty());
    let env = tail_envelope(&res.q, 1e-12).unwrap();
    assert!(env.slope < 0.0);
    assert!(res.q.edge_mass_fraction() < 1e-8);
}

#[test]
fn scaling_the_seed_does_not_change_the_answer() {
    let params = ModelParams::new(5, 3.0, Sign::Focusing);
    let grid = RadialGrid::new(5, 48.0, 192).unwrap();
    let seed = default_seed(&grid).scale(Complex64::new(7.0, 0.0));
    let a = petviashvili_solve(&params, &grid, &seed, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
    let b = solve();
    assert!(l2_norm(&a.q.sub(&b.q).unwrap()) <= 1e-8 * l2_norm(&b.q));
}

#[test]
fn defocusing_sign_rejected() {
    let params = ModelParams::new(5, 3.0, Sign::Defocusing);
    let grid = RadialGrid::new(5, 20.0, 64).unwrap();
    assert!(petviashvili_solve(&params, &grid, &default_seed(&grid), 1e-10, 10).is_err());
}

#[test]
fn iteration_budget_enforced() {
    let params = ModelParams::new(5, 3.0, Sign::Focusing);
    let grid = RadialGrid::new(5, 48.0, 192).unwrap();
    let r = petviashvili_solve(&params, &grid, &default_seed(&grid), 1e-10, 3);
    assert!(matches!(r, Err(biharm::Error::NonConvergence(_))));
}
