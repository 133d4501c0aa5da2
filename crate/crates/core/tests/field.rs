use biharm::field::*;
use biharm::params::Exponent;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn gaussian_is_self_dual() {
    for n in [1u32, 3, 5, 8] {
        let grid = RadialGrid::new(n, 20.0, 128).unwrap();
        let f = RadialField::from_real_fn(&grid, |r| (-r * r / 2.0).exp());
        let g = radial_fourier(&f);
        for (k, v) in g.nodes().iter().zip(&g.values) {
            assert!((v - Complex64::new((-k * k / 2.0).exp(), 0.0)).norm() < 1e-12, "n={n} k={k}");
        }
    }
}

#[test]
fn uniform_grid_agrees_with_bessel_grid() {
    let grid = RadialGrid::uniform(5, 20.0, 400).unwrap();
    let f = RadialField::from_real_fn(&grid, |r| (-r * r / 2.0).exp());
    let g = radial_fourier(&f);
    for (k, v) in g.nodes().iter().zip(&g.values).filter(|(k, _)| **k < 4.0) {
        assert!((v.re - (-k * k / 2.0).exp()).abs() < 1e-6, "k={k}");
    }
}

#[test]
fn snapshot_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let grid = RadialGrid::new(5, 10.0, 64).unwrap();
    let f = RadialField::from_fn(&grid, |r| Complex64::new((-r).exp(), r.sin()));
    f.write_snapshot(dir.path(), "u").unwrap();
    let back = RadialField::read_snapshot(dir.path(), "u").unwrap();
    assert_eq!(back.values, f.values);
    assert!(back.grid.same_plan(&grid));
}

#[test]
fn mismatched_grids_rejected() {
    let a = RadialField::zeros(&RadialGrid::new(5, 10.0, 64).unwrap());
    let b = RadialField::zeros(&RadialGrid::new(5, 12.0, 64).unwrap());
    assert!(matches!(a.sub(&b), Err(biharm::Error::GridMismatch(_))));
}

#[test]
fn sobolev_zero_is_l2() {
    let grid = RadialGrid::new(5, 20.0, 128).unwrap();
    let f = RadialField::from_real_fn(&grid, |r| (-r * r).exp());
    let s = sobolev_norm(&f, 0.0).unwrap();
    assert!((s.inhomogeneous - l2_norm(&f)).abs() < 1e-13 * l2_norm(&f));
    assert!(sobolev_norm(&f, 5.0).is_err());
}

#[test]
fn l1_of_gaussian() {
    let grid = RadialGrid::new(3, 20.0, 128).unwrap();
    let f = RadialField::from_real_fn(&grid, |r| (-r * r).exp());
    let exact = std::f64::consts::PI.powf(1.5);
    assert!((lq_norm(&f, Exponent::Finite(1.0)) - exact).abs() < 1e-10);
}

proptest! {
    #[test]
    fn plancherel_and_round_trip(a in 0.2f64..3.0, b in 0.2f64..3.0, c in -2.0f64..2.0, shift in 0.0f64..3.0) {
        let grid = RadialGrid::new(5, 24.0, 128).unwrap();
        let f = RadialField::from_fn(&grid, |r| {
            Complex64::new((-a * r * r).exp(), c * (-b * (r - shift).powi(2)).exp())
        });
        let g = radial_fourier(&f);
        let n1 = l2_norm(&f);
        prop_assert!((spectral_l2_norm(&g) - n1).abs() <= 1e-12 * n1);
        let back = inverse_radial_fourier(&g);
        prop_assert!(l2_norm(&back.sub(&f).unwrap()) <= 1e-12 * n1);
    }

    #[test]
    fn inner_product_is_hermitian(a in 0.2f64..3.0, b in 0.2f64..3.0) {
        let grid = RadialGrid::new(5, 20.0, 96).unwrap();
        let f = RadialField::from_fn(&grid, |r| Complex64::new((-a * r * r).exp(), r * (-r * r).exp()));
        let g = RadialField::from_real_fn(&grid, |r| (-b * r).exp());
        let x = inner(&f, &g);
        let y = inner(&g, &f);
        prop_assert!((x - y.conj()).norm() <= 1e-14 * x.norm().max(1e-300));
    }
}
