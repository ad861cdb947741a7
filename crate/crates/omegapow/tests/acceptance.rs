//! Runs the full acceptance battery, printing one verdict line per
//! criterion. Criterion 10 reruns criteria 1 to 9 and compares reports.

use omegapow::suite::{run_suite, DEFAULT_SEED};

#[test]
fn acceptance() {
    let report = run_suite(DEFAULT_SEED, &[]);
    print!("{}", report.render());
    print!("{}", report.render_timings());
    assert_eq!(report.results.len(), 10);
    let failed: Vec<u8> = report.results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
