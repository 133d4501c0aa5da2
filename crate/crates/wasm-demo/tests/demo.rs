use biharm_wasm_demo::*;

#[test]
fn lp_rows_partition_unity() {
    let rows = lp_profiles(2, 20.0, 101).unwrap();
    assert_eq!(rows.len(), 4 * 101);
    for row in rows.chunks(4) {
        assert!((row[1] + row[3] - 1.0).abs() <= 1e-15);
        assert!((0.0..=1.0).contains(&row[2]));
    }
}

#[test]
fn fundsol_tilde_has_same_modulus() {
    let rows = fundsol_curves(5, 10.0, 100.0, 5).unwrap();
    for row in rows.chunks(4) {
        assert!((row[1] - row[2]).abs() <= 1e-12 * row[1]);
    }
}

#[test]
fn ground_state_is_peaked_at_origin() {
    let rows = ground_state(5, 3.0, 40.0, 128).unwrap();
    let q: Vec<f64> = rows.chunks(2).map(|r| r[1]).collect();
    assert!(q[0] > 0.0 && q[0] >= q.iter().cloned().fold(f64::MIN, f64::max) - 1e-12);
}

#[test]
fn bad_inputs_rejected() {
    assert!(lp_profiles(0, -1.0, 10).is_err());
    assert!(fundsol_curves(5, 10.0, 1.0, 10).is_err());
    assert!(ground_state(5, 3.0, 40.0, 1).is_err());
    assert!(ground_state(5, 1.5, 40.0, 128).is_err());
}
