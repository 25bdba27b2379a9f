//! Bracketing root finder shared by the threshold and boundary solvers.

use crate::error::{Error, Result};

/// Locates a root of `f` on `[lo, hi]` by bisection.
///
/// Requires a sign change (or an exact zero) on the bracket. Stops when
/// the bracket width drops below `tol` and returns its midpoint.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    what: &'static str,
) -> Result<f64> {
    assert!(lo < hi, "bisect: empty bracket for {what}");
    assert!(tol > 0.0, "bisect: nonpositive tolerance for {what}");

    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    if fa == 0.0 {
        return Ok(a);
    }
    let fb = f(b);
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoBracket { what, lo, hi });
    }

    // 200 halvings take any finite bracket below any representable tol.
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if b - a <= tol {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
