use qcurrent_cli::invariants::{run_invariant_suite, Fault};

#[test]
fn default_seed_passes() {
    let report = run_invariant_suite(0, None);
    assert_eq!(report.failures(), 0, "{report:?}");
    assert!(report.entries.len() >= 15);
}

#[test]
fn other_seeds_pass() {
    for seed in [1, 7, 42, 1234] {
        let report = run_invariant_suite(seed, None);
        assert_eq!(report.failures(), 0, "seed {seed}: {report:?}");
    }
}

#[test]
fn corrupted_rate_sign_breaks_detailed_balance() {
    let report = run_invariant_suite(0, Some(Fault::RateSign));
    let db = report
        .entries
        .iter()
        .find(|e| e.name.contains("detailed balance"))
        .unwrap();
    assert!(!db.passed());
    assert!(db.residual > 1.0);
    assert!(report.failures() >= 1);
}

#[test]
fn report_carries_residuals() {
    let table = run_invariant_suite(3, None).table();
    assert_eq!(
        table.columns,
        ["invariant", "residual", "tolerance", "status"]
    );
    for r in table.column("residual").unwrap() {
        let v: f64 = r.parse().unwrap();
        assert!(v.is_finite() && v >= 0.0);
    }
    assert!(table.column("status").unwrap().iter().all(|s| *s == "PASS"));
}

#[test]
fn suite_is_deterministic() {
    assert_eq!(run_invariant_suite(9, None), run_invariant_suite(9, None));
}
