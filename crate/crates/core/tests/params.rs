use biharm::params::*;
use proptest::prelude::*;

#[test]
fn regime_bounds_match_critical_index() {
    for n in 5..=9 {
        let (lo, hi) = regime_bounds(n);
        assert!(critical_exponent(n, lo).unwrap().abs() < 1e-14);
        assert!((critical_exponent(n, hi).unwrap() - 2.0).abs() < 1e-12);
    }
}

#[test]
fn params_json_defaults() {
    let p: ModelParams = serde_json::from_str(r#"{"n": 5, "p": 3.0, "sign": "focusing"}"#).unwrap();
    assert_eq!(p, ModelParams::new(5, 3.0, Sign::Focusing));
    let back: ModelParams = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
    assert_eq!(back, p);
}

#[test]
fn derived_exponents_n5_p3() {
    let d = derived_exponents(&ModelParams::new(5, 3.0, Sign::Focusing)).unwrap();
    assert_eq!(d.s_c, 0.5);
    assert!((d.r0 - (10.0 - 1e-3)).abs() < 1e-12);
    assert!((1.0 / d.q0 - (5.0 / 8.0 - 5.0 / (4.0 * d.r0))).abs() < 1e-14);
    assert_eq!(d.p_tilde, 1.0);
}

#[test]
fn small_dimension_rejected() {
    let p = ModelParams::new(4, 3.0, Sign::Focusing).without_regime_check();
    assert!(matches!(derived_exponents(&p), Err(biharm::Error::Regime(_))));
}

proptest! {
    #[test]
    fn big_q_stays_in_range(n in 5u32..=9, frac in 0.05f64..0.95) {
        let (lo, hi) = regime_bounds(n);
        let p = lo + frac * (hi - lo);
        let params = ModelParams::new(n, p, Sign::Focusing);
        prop_assert!(params.validate().is_ok());
        let d = derived_exponents(&params).unwrap();
        let nf = n as f64;
        prop_assert!(d.big_q >= 2.0 && d.big_q < 2.0 * nf / (nf - 4.0));
        prop_assert!(d.s_c > 0.0 && d.s_c < 2.0);
    }

    #[test]
    fn admissible_pairs_from_r(n in 1u32..12, r in 2.0f64..50.0) {
        let inv_q = n as f64 / 8.0 - n as f64 / (4.0 * r);
        let q = Exponent::Finite(1.0 / inv_q);
        let expected = inv_q > 0.0 && inv_q <= 0.5;
        prop_assert_eq!(is_b_admissible(q, Exponent::Finite(r), n), expected);
    }
}
