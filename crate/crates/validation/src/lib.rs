//! Shared helpers for the acceptance suite in `tests/acceptance.rs`.

use std::io::Write;
use std::time::{Duration, Instant};

/// Writes `criterion NN: PASS|FAIL | detail` straight to stderr, past the
/// test harness capture, then asserts `pass`.
pub fn report(id: u32, pass: bool, detail: impl AsRef<str>) {
    let detail = detail.as_ref();
    let line = format!("criterion {id:>2}: {} | {detail}\n", if pass { "PASS" } else { "FAIL" });
    let _ = std::io::stderr().lock().write_all(line.as_bytes());
    assert!(pass, "criterion {id} failed: {detail}");
}

/// Shortest wall time over `runs` calls.
pub fn best_of<F: FnMut()>(runs: usize, mut f: F) -> Duration {
    (0..runs)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed()
        })
        .min()
        .unwrap_or_default()
}
