//! Search-space guards for the exhaustive routines.
//!
//! The limit counts candidate states and can be overridden with the
//! `QUOTKIT_GUARD_LIMIT` environment variable.

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: u128 = 20_000_000;
pub const ENV_VAR: &str = "QUOTKIT_GUARD_LIMIT";

pub fn limit() -> u128 {
    std::env::var(ENV_VAR)
        .ok()
        .and_then(|v| v.trim().parse::<u128>().ok())
        .unwrap_or(DEFAULT_LIMIT)
}

pub fn check(what: &'static str, size: u128) -> Result<()> {
    let limit = limit();
    if size > limit {
        Err(Error::GuardExceeded { what, size, limit })
    } else {
        Ok(())
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

pub fn factorial(n: u128) -> u128 {
    (1..=n).try_fold(1u128, |acc, i| acc.checked_mul(i)).unwrap_or(u128::MAX)
}
