pub mod capacity;
pub mod concentration;
pub mod encode;
pub mod roundtrip;

use crate::config::Resolved;
use crate::error::CliResult;

/// Value of a count-like key, rejecting zero.
fn positive<T>(r: &Resolved<T>, key: &str, value: usize) -> CliResult<usize> {
    if value == 0 {
        return Err(r.invalid(key, "must be positive"));
    }
    Ok(value)
}

/// Shortest round-trip decimal form, '.' separated regardless of locale.
fn num(v: f64) -> String {
    format!("{v}")
}
