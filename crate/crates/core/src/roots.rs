//! Scalar root finding on a sign-changing bracket.

use crate::error::{Error, Result};

/// Root of `f` in `[lo, hi]` given `f(lo)` and `f(hi)` of opposite sign.
///
/// Bisects until the bracket is narrower than `coarse`, then takes Newton
/// steps (falling back to bisection whenever a step leaves the bracket) until
/// the update is below `fine`.
pub fn bracketed(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    coarse: f64,
    fine: f64,
    what: &'static str,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::RootNotFound {
            what,
            near: 0.5 * (lo + hi),
        });
    }
    let rising = fhi > 0.0;
    let update = |x: f64, v: f64, lo: &mut f64, hi: &mut f64| {
        if (v > 0.0) == rising {
            *hi = x;
        } else {
            *lo = x;
        }
    };
    while hi - lo > coarse {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        update(mid, v, &mut lo, &mut hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..100 {
        let v = f(x);
        if v == 0.0 {
            return Ok(x);
        }
        update(x, v, &mut lo, &mut hi);
        let mut next = x - v / df(x);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= fine || hi - lo <= fine {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::RootNotFound { what, near: x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn finds_cube_root() {
        let r = bracketed(|x| x * x * x - 2.0, |x| 3.0 * x * x, 0.0, 2.0, 1e-3, 1e-15, "cbrt").unwrap();
        assert_relative_eq!(r, 2f64.cbrt(), epsilon = 1e-15);
    }

    #[test]
    fn decreasing_function() {
        let r = bracketed(|x| 1.0 - x, |_| -1.0, 0.0, 3.0, 1e-3, 1e-15, "line").unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn no_sign_change() {
        assert!(bracketed(|x| x * x + 1.0, |x| 2.0 * x, -1.0, 1.0, 1e-3, 1e-15, "none").is_err());
    }
}
