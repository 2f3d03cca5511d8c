//! Bracketed bisection for the monotone root-finding problems of the crate.

/// Upper limit of automatic bracket expansion.
pub(crate) const BRACKET_CEILING: f64 = 1e12;

/// Maximum bisection iterations.
pub(crate) const MAX_ITERS: usize = 200;

/// Relative interval tolerance.
pub(crate) const REL_TOL: f64 = 1e-12;

/// Root of an increasing function on (0, ∞).
///
/// Starts from the bracket [lo, hi]; `hi` is doubled (up to the ceiling) until
/// the function is positive there. Returns `None` if no sign change is found —
/// for increasing g this means the root lies beyond the ceiling.
pub(crate) fn bisect_increasing(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    let mut lo = lo;
    let mut hi = hi;
    if g(lo) >= 0.0 {
        return Some(lo);
    }
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > BRACKET_CEILING {
            return None;
        }
    }
    for _ in 0..MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= REL_TOL * hi.abs().max(1.0) {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Root of a decreasing function on (0, ∞); mirror of `bisect_increasing`.
pub(crate) fn bisect_decreasing(g: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Option<f64> {
    bisect_increasing(move |x| -g(x), lo, hi)
}
