use std::collections::BTreeSet;

use pnkit::checks::{default_checks, INVARIANTS, REGISTRY};
use pnkit::config::{Pinned, RunConfig};
use pnkit::suite::{run_suite, SuiteError};

#[test]
fn invariant_catalog_covers_the_default_checks() {
    let catalog: BTreeSet<&str> = INVARIANTS.iter().flat_map(|i| i.checks.iter().copied()).collect();
    let defaults: Vec<String> = default_checks();
    let defaults: BTreeSet<&str> = defaults.iter().map(String::as_str).collect();
    assert_eq!(catalog, defaults);
    assert_eq!(REGISTRY.len(), defaults.len());
}

#[test]
fn projective_line_passes_with_fifty_samples() {
    let mut cfg = RunConfig::cpn(2);
    cfg.samples = 50;
    cfg.groupoid_cases = 500;
    let report = run_suite(&cfg).unwrap();
    let failed: Vec<_> = report.results.iter().filter(|r| !r.pass).map(|r| &r.name).collect();
    assert!(failed.is_empty(), "{failed:?}");
    assert_eq!(report.results.len(), default_checks().len());
    assert!((report.calibration.c - 0.5).abs() < 1e-6);
    assert!((report.calibration.kappa - 2.0).abs() < 1e-12);
}

#[test]
fn single_check_gives_single_result() {
    let mut cfg = RunConfig::cpn(3);
    cfg.checks = vec!["torsion".into()];
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.results.len(), 1);
    assert_eq!(report.results[0].name, "torsion");
    assert_eq!(report.results[0].points_evaluated, 100);
}

#[test]
fn identical_configs_give_identical_results() {
    let mut cfg = RunConfig::grassmannian(2, 4);
    cfg.samples = 15;
    cfg.groupoid_cases = 200;
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    assert_eq!(a.results_json(), b.results_json());

    cfg.seed += 1;
    let c = run_suite(&cfg).unwrap();
    assert_ne!(a.results_json(), c.results_json());
}

#[test]
fn wrong_pinned_constant_fails_checks_without_aborting() {
    let mut cfg = RunConfig::cpn(3);
    cfg.samples = 10;
    cfg.pinned_constants = Some(Pinned { c: 0.3, kappa: 2.0 });
    cfg.checks = vec!["spectrum_match".into(), "gt_interlacing".into()];
    let report = run_suite(&cfg).unwrap();
    assert!(!report.result("spectrum_match").unwrap().pass);
    assert!(report.result("gt_interlacing").unwrap().pass);
    assert!(!report.all_pass());
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = RunConfig::cpn(2);
    cfg.checks = vec!["nope".into()];
    assert!(matches!(run_suite(&cfg), Err(SuiteError::Config(_))));

    let mut cfg = RunConfig::cpn(2);
    cfg.k = 2;
    assert!(matches!(run_suite(&cfg), Err(SuiteError::Config(_))));

    let mut cfg = RunConfig::cpn(2);
    cfg.samples = 0;
    assert!(matches!(run_suite(&cfg), Err(SuiteError::Config(_))));

    let mut cfg = RunConfig::grassmannian(3, 2);
    cfg.samples = 5;
    assert!(matches!(run_suite(&cfg), Err(SuiteError::Config(_))));
}

#[test]
fn tolerance_overrides_are_used() {
    let mut cfg = RunConfig::cpn(3);
    cfg.samples = 10;
    cfg.checks = vec!["torsion".into()];
    cfg.tolerances.insert("torsion".into(), 1e-300);
    let report = run_suite(&cfg).unwrap();
    let r = &report.results[0];
    assert_eq!(r.tolerance, 1e-300);
    assert!(!r.pass && !r.witnesses.is_empty());
}
