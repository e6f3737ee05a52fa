//! Runner for the acceptance criteria of `nil-willmore`.
//!
//! The criteria live in `tests/acceptance.rs`; this crate supplies the loop
//! that executes them, contains panics and prints one line per criterion.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

/// Outcome of one criterion: pass flag plus a one-line summary of the evidence.
pub type Outcome = (bool, String);

/// A numbered criterion: display name and the check that produces its outcome.
pub type Criterion = (&'static str, fn() -> Outcome);

/// Runs every criterion in order and prints
/// `PASS|FAIL criterion N (name): detail [elapsed]`, then a summary line.
/// Returns the number of failed criteria; a panic counts as a failure.
pub fn run(criteria: &[Criterion]) -> usize {
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        if !ok {
            failed += 1;
        }
        let flag = if ok { "PASS" } else { "FAIL" };
        println!(
            "{flag} criterion {:>2} ({name}): {detail} [{:.2?}]",
            k + 1,
            t.elapsed()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    failed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panics_count_as_failures() {
        let c: [Criterion; 3] = [
            ("ok", || (true, "fine".into())),
            ("bad", || (false, "off".into())),
            ("boom", || panic!("no")),
        ];
        assert_eq!(run(&c), 2);
    }
}
