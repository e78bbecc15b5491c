//! Bisection on monotone functions.

use crate::{Error, Result};

/// Finds `x` in `[lo, hi]` with `f(x) = target`, for `f` monotone on the
/// interval (either direction). Stops when the bracket is narrower than
/// `x_tol` or `|f(x) - target| <= f_tol`.
pub fn bisect_monotone<F>(f: F, target: f64, lo: f64, hi: f64, x_tol: f64, f_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let g_lo = f(lo) - target;
    let g_hi = f(hi) - target;
    if g_lo.abs() <= f_tol {
        return Ok(lo);
    }
    if g_hi.abs() <= f_tol {
        return Ok(hi);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::NoBracket(format!(
            "target {target} not bracketed on [{lo}, {hi}] (f - target = {g_lo}, {g_hi})"
        )));
    }
    let increasing = g_hi > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let g = f(mid) - target;
        if g.abs() <= f_tol || hi - lo <= x_tol {
            return Ok(mid);
        }
        if (g > 0.0) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Locates the first point of `[lo, hi]` where `pred` turns true, assuming it
/// stays true for a while afterwards. A coarse scan with `step` finds the
/// first true sample, bisection then narrows the transition to `x_tol`.
/// Returns the right end of the final bracket, so `pred` holds there.
pub fn first_true<P>(pred: P, lo: f64, hi: f64, step: f64, x_tol: f64) -> Option<f64>
where
    P: Fn(f64) -> bool,
{
    if pred(lo) {
        return Some(lo);
    }
    let n = ((hi - lo) / step).ceil().max(1.0) as usize;
    let mut prev = lo;
    for k in 1..=n {
        let x = if k == n { hi } else { lo + step * k as f64 };
        if pred(x) {
            let (mut a, mut b) = (prev, x);
            while b - a > x_tol {
                let mid = 0.5 * (a + b);
                if pred(mid) {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            return Some(b);
        }
        prev = x;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect_monotone(|x| x * x, 2.0, 0.0, 2.0, 1e-14, 0.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bisect_handles_decreasing() {
        let r = bisect_monotone(|x| -x, -0.25, 0.0, 1.0, 1e-14, 0.0).unwrap();
        assert!((r - 0.25).abs() < 1e-12);
    }

    #[test]
    fn bisect_rejects_missing_bracket() {
        assert!(matches!(
            bisect_monotone(|x| x, 5.0, 0.0, 1.0, 1e-12, 0.0),
            Err(Error::NoBracket(_))
        ));
    }

    #[test]
    fn first_true_narrows_transition() {
        let x = first_true(|x| x > 0.737, 0.0, 1.0, 0.1, 1e-6).unwrap();
        assert!(x > 0.737 && x - 0.737 < 1e-6);
        assert_eq!(first_true(|_| true, 0.3, 1.0, 0.1, 1e-6), Some(0.3));
        assert_eq!(first_true(|_| false, 0.0, 1.0, 0.1, 1e-6), None);
    }
}
