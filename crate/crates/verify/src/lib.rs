//! Runs verification criteria one at a time so runtime budgets are not
//! skewed by contention between test threads.

use std::io::Write;
use std::sync::Mutex;

use zonobal::suite::{run_criterion, CriterionResult};
use zonobal::Config;

static SERIAL: Mutex<()> = Mutex::new(());

/// Runs criterion `id` with the default configuration and writes its
/// PASS/FAIL line to stderr. The line goes through the raw handle so the
/// test harness does not capture it. Panics on an unknown id.
pub fn run_serial(id: u32) -> CriterionResult {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let r = run_criterion(id, &Config::default()).expect("known criterion");
    let _ = writeln!(std::io::stderr().lock(), "{}", r.line());
    r
}
