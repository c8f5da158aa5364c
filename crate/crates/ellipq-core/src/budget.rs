//! Global term-count budget.
//!
//! Exact arithmetic can explode combinatorially when truncation orders are
//! misconfigured. Every term-map producing operation checks its result size
//! against this cap and aborts loudly instead of grinding or truncating
//! silently.

use core::sync::atomic::{AtomicUsize, Ordering};

static TERM_BUDGET: AtomicUsize = AtomicUsize::new(10_000_000);

/// Set the global cap on the number of terms any single polynomial, series
/// or tensor element may hold.
pub fn set_term_budget(limit: usize) {
    TERM_BUDGET.store(limit, Ordering::Relaxed);
}

/// Current cap.
pub fn term_budget() -> usize {
    TERM_BUDGET.load(Ordering::Relaxed)
}

/// Abort (panic) if `n` exceeds the configured budget.
#[inline]
pub fn check(n: usize) {
    let cap = term_budget();
    if n > cap {
        panic!("term budget exceeded: {n} terms > cap {cap}; raise the cap or lower the truncation orders");
    }
}
