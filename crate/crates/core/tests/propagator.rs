use biharm::field::*;
use biharm::littlewood_paley::Dyadic;
use biharm::params::Exponent;
use biharm::propagator::*;
use biharm::quad::logspace;
use proptest::prelude::*;

fn gaussian(n: u32) -> RadialField {
    let grid = RadialGrid::new(n, 30.0, 160).unwrap();
    RadialField::from_real_fn(&grid, |r| (-r * r / 2.0).exp())
}

#[test]
fn origin_amplitude_approaches_asymptote() {
    let grid = RadialGrid::new(5, 3.0, 128).unwrap();
    let f = l1_gaussian(&grid, 0.25);
    let flow = WholeSpaceFlow::new(&f);
    let t = 1e3;
    let u0 = flow.evaluate(t, &[0.0], 0).unwrap()[0].norm();
    let c = (2.0 * std::f64::consts::PI).powf(-2.5);
    let a = origin_asymptote(5, c, t);
    assert!((u0 / a - 1.0).abs() < 1e-2, "{u0} vs {a}");
}

#[test]
fn short_time_windows_rejected() {
    let grid = RadialGrid::new(5, 3.0, 128).unwrap();
    let job = PropagatorJob {
        data: l1_gaussian(&grid, 0.25),
        times: logspace(1.0, 10.0, 5),
        derivative_order: 0,
    };
    assert!(matches!(dispersive_fit(&job), Err(biharm::Error::Fit(_))));
}

#[test]
fn truncated_data_rejected() {
    let grid = RadialGrid::new(5, 3.0, 128).unwrap();
    let job = PropagatorJob {
        data: l1_gaussian(&grid, 1.0),
        times: logspace(1.0, 1e3, 10),
        derivative_order: 0,
    };
    assert!(matches!(dispersive_fit(&job), Err(biharm::Error::Truncation(_))));
}

#[test]
fn localized_needs_four_scales() {
    let ks: Vec<Dyadic> = (0..3).map(|e| Dyadic::new(e).unwrap()).collect();
    assert!(localized_dispersive_gaussian(5, 0.01, &ks, &logspace(200.0, 2e4, 10)).is_err());
}

#[test]
fn strichartz_rejects_inadmissible_pair() {
    let f = gaussian(5);
    let traj: Vec<(f64, RadialField)> = (0..4).map(|i| (i as f64 * 0.1, free_evolve(&f, i as f64 * 0.1))).collect();
    assert!(strichartz_norm(&traj, Exponent::Finite(3.0), Exponent::Finite(3.0)).is_err());
    let sup = strichartz_norm(&traj, Exponent::Infinite, Exponent::Finite(2.0)).unwrap();
    assert!((sup - l2_norm(&f)).abs() < 1e-12 * sup);
}

proptest! {
    #[test]
    fn free_flow_is_unitary_group(t in -1.0f64..1.0, s in -1.0f64..1.0) {
        let f = gaussian(5);
        let a = free_evolve(&free_evolve(&f, t), s);
        let b = free_evolve(&f, t + s);
        prop_assert!(l2_norm(&a.sub(&b).unwrap()) <= 1e-12 * l2_norm(&f));
        prop_assert!((l2_norm(&free_evolve(&f, t)) - l2_norm(&f)).abs() <= 1e-12 * l2_norm(&f));
    }
}
