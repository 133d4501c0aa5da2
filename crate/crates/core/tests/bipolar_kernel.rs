use biharm::bipolar_kernel::*;
use num_complex::Complex64;
use proptest::prelude::*;

fn config(sep: f64) -> KernelConfig {
    KernelConfig {
        t_prime: 0.0,
        t0: 0.5 * sep,
        t_dprime: sep,
        y: 0.0,
        z: 4.0,
        n: 5,
        cutoff: SmoothCutoff::new(1.0, vec![2.0]).unwrap(),
    }
}

fn table_for(cfg: &KernelConfig) -> ItildeTable {
    ItildeTable::build(cfg.n, required_table_range(cfg) * 1.05 + 0.1, 0.01).unwrap()
}

#[test]
fn bipolar_matches_cylindrical_kernel() {
    let cfg = config(4.0);
    let table = table_for(&cfg);
    let a = eval_k(&cfg, &table, None).unwrap();
    let b = eval_k_cylindrical(&cfg, &table, 48).unwrap();
    assert!((a.value - b).norm() <= 1e-6 * b.norm(), "{} vs {}", a.value, b);
}

#[test]
fn kernel_is_translation_invariant() {
    let cfg = config(2.0);
    let table = table_for(&cfg);
    let moved = KernelConfig {
        y: 1.0,
        z: 5.0,
        cutoff: SmoothCutoff::new(1.0, vec![3.0]).unwrap(),
        ..cfg.clone()
    };
    let a = eval_k(&cfg, &table, Some(3)).unwrap().value;
    let b = eval_k(&moved, &table, Some(3)).unwrap().value;
    assert!((a - b).norm() <= 1e-12 * a.norm());
}

#[test]
fn time_swap_symmetry_matches_unswapped() {
    let cfg = KernelConfig { t0: 0.3, ..config(1.0) };
    let table = table_for(&cfg);
    let a = eval_k(&cfg, &table, Some(3)).unwrap().value;
    let b = eval_k_unswapped(&cfg, &table, Some(3)).unwrap().value;
    assert!((a - b).norm() <= 1e-8 * a.norm());
}

#[test]
fn empty_cutoff_gives_exact_zero() {
    let cfg = KernelConfig {
        cutoff: SmoothCutoff::new(1.0, Vec::new()).unwrap(),
        ..config(1.0)
    };
    let table = ItildeTable::build(5, 10.0, 0.05).unwrap();
    assert_eq!(eval_k(&cfg, &table, None).unwrap().value, Complex64::new(0.0, 0.0));
}

#[test]
fn invalid_times_rejected() {
    let cfg = KernelConfig { t0: 2.0, ..config(1.0) };
    assert!(cfg.validate().is_err());
}

#[test]
fn table_coverage_enforced() {
    let cfg = config(1.0);
    let small = ItildeTable::build(5, 1.0, 0.05).unwrap();
    assert!(matches!(eval_k(&cfg, &small, None), Err(biharm::Error::Coverage(_))));
}

#[test]
fn empty_domain_integrates_to_zero() {
    let dom = BipolarDomain::new(4.0, 1.0, 2.0).unwrap();
    assert!(dom.is_empty());
    let f = |_: f64, _: f64| Complex64::new(1.0, 0.0);
    assert_eq!(bipolar_integral(&f, &dom, 5, 1e-8).unwrap().value, Complex64::new(0.0, 0.0));
}

proptest! {
    #[test]
    fn heron_is_symmetric_and_nonnegative(a in 0.1f64..10.0, b in 0.1f64..10.0, frac in 0.01f64..0.99) {
        // a third side strictly between |a−b| and a+b
        let c = (a - b).abs() + frac * (a + b - (a - b).abs());
        let x = heron_area(a, b, c).unwrap();
        prop_assert!(x >= 0.0);
        prop_assert!((x - heron_area(b, a, c).unwrap()).abs() <= 1e-12 * x.max(1e-300) + 1e-12);
        prop_assert!((x - heron_area(c, b, a).unwrap()).abs() <= 1e-9 * x.max(1.0));
    }

    #[test]
    fn cutoff_weight_in_unit_interval(d in 0.0f64..5.0, mu in 0.2f64..3.0) {
        let c = SmoothCutoff::new(mu, vec![0.0]).unwrap();
        let chi = c.chi_from_distances(std::iter::once(d));
        prop_assert!((0.0..=1.0).contains(&chi));
        let w = kernel_weight(chi);
        prop_assert!((0.0..=1.0).contains(&w) && w >= chi);
    }

    #[test]
    fn gaussian_pair_closed_form(a in 0.3f64..2.0, b in 0.3f64..2.0, z in 0.5f64..3.0) {
        let dom = BipolarDomain::new(z, 14.0, 14.0).unwrap();
        let f = move |r: f64, s: f64| Complex64::new((-a * r * r - b * s * s).exp(), 0.0);
        let v = bipolar_integral(&f, &dom, 5, 1e-10).unwrap().value.re;
        let exact = (std::f64::consts::PI / (a + b)).powf(2.5) * (-a * b / (a + b) * z * z).exp();
        prop_assert!((v / exact - 1.0).abs() <= 1e-6);
    }
}
