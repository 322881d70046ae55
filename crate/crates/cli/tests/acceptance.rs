use std::io::Write;

use cartierkit_cli::suites::{criterion, run_check, Context};

#[test]
fn acceptance() {
    let cache = tempfile::tempdir().unwrap();
    let ctx = Context {
        primes: None,
        seed: 0,
        cache_dir: cache.path().to_path_buf(),
        timings: true,
    };
    let mut failed = Vec::new();
    for n in 1..=10 {
        let check = criterion(n);
        let case = run_check(check, &ctx);
        let verdict = if case.passed() { "PASS" } else { "FAIL" };
        // Written to the handle directly so the lines show up without --nocapture.
        let line = format!("criterion {n:>2}: {verdict} {} ({} ms): {}", case.id, case.millis, case.detail);
        writeln!(std::io::stdout().lock(), "{line}").unwrap();
        if !case.passed() {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
