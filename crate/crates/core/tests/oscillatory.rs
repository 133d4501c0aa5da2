use biharm::oscillatory::*;
use proptest::prelude::*;

#[test]
fn csv_round_trip() {
    let samples: Vec<FundSolSample> = [0.5, 3.0, 12.0].iter().map(|&x| sample(x, 5).unwrap()).collect();
    let back = samples_from_csv(&samples_to_csv(&samples)).unwrap();
    assert_eq!(back.len(), 3);
    for (a, b) in samples.iter().zip(&back) {
        assert!((a.i_value - b.i_value).norm() <= 1e-15 * a.i_value.norm());
        assert_eq!(a.x_norm, b.x_norm);
    }
}

#[test]
fn damped_ladder_agrees_with_contour() {
    for &x in &[6.0, 20.0, 80.0] {
        let c = eval_i_with(x, 5, Method::Contour).unwrap().value;
        let d = eval_i_with(x, 5, Method::Damped).unwrap();
        assert!((c - d.value).norm() <= 1e-6 * c.norm(), "x={x}");
        assert!(d.reg_epsilon > 0.0);
    }
}

#[test]
fn even_dimension_uses_damping() {
    let v = eval_i(30.0, 6).unwrap();
    assert_eq!(v.method, Method::Damped);
    let amp = stationary_phase_amplitude(30.0, 6);
    assert!((v.value.norm() / amp - 1.0).abs() < 0.05);
}

#[test]
fn contour_rejects_even_dimension() {
    assert!(eval_i_with(30.0, 6, Method::Contour).is_err());
}

#[test]
fn tilde_has_same_modulus() {
    for &x in &[1.0, 10.0, 100.0] {
        let i = eval_i(x, 7).unwrap().value;
        let t = eval_i_tilde(x, 7).unwrap().value;
        assert!((i.norm() - t.norm()).abs() <= 1e-14 * i.norm());
    }
}

#[test]
fn stationary_phase_ratio_near_one() {
    let rep = fundsol_decay(5, (10.0, 1e3), 8).unwrap();
    assert!(rep.passed(), "{}", rep.summary());
}

#[test]
fn derivative_of_i5_follows_recursion() {
    // ∂_ρ I_n = −(ρ/2π) I_{n+2}
    for &x in &[5.0, 40.0] {
        let d = radial_derivative(x, 5, 1, DerivativeKind::Raw).unwrap().value;
        let r = -(x / (2.0 * std::f64::consts::PI)) * eval_i(x, 7).unwrap().value;
        assert!((d - r).norm() <= 1e-6 * r.norm(), "x={x}");
    }
}

proptest! {
    #[test]
    fn stationary_point_solves_gradient(x in 1e-1f64..1e3) {
        prop_assert!(stationary_residual(x).unwrap() <= 1e-12);
        let k = stationary_point(x).unwrap();
        prop_assert!((4.0 * k.powi(3) + x).abs() <= 1e-12 * x.max(1.0));
    }

    #[test]
    fn series_matches_contour(x in 0.5f64..4.0, odd in 0usize..3) {
        let n = [3u32, 5, 7][odd];
        let a = eval_i_with(x, n, Method::Series).unwrap().value;
        let b = eval_i_with(x, n, Method::Contour).unwrap().value;
        prop_assert!((a - b).norm() <= 1e-9 * a.norm());
    }
}
