//! Bisection on monotone one-dimensional maps.

/// Solves `f(t) = target` on `[lo, hi]` for a non-increasing `f` with
/// `f(lo) >= target >= f(hi)`. Runs until the bracket collapses to machine
/// resolution, so the residual is limited only by the evaluation of `f`.
pub fn bisect_non_increasing<F>(mut lo: f64, mut hi: f64, target: f64, f: F) -> f64
where
    F: Fn(f64) -> f64,
{
    debug_assert!(lo <= hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever endpoint lands closer to the target.
    let (flo, fhi) = (f(lo), f(hi));
    if (flo - target).abs() <= (fhi - target).abs() {
        lo
    } else {
        hi
    }
}
