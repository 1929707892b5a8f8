//! Root finding for monotone functions.

use super::Interval;
use crate::{Error, Result};

const MAX_ITER: usize = 500;

/// Brent's method on a sign-changing bracket `[xa, xb]`.
pub fn brent<F: Fn(f64) -> f64>(f: F, xa: f64, xb: f64, xtol: f64, rtol: f64) -> Result<f64> {
    let eval = |x: f64| -> Result<f64> {
        let y = f(x);
        if y.is_nan() {
            return Err(Error::Domain(format!("root function is NaN at {x}")));
        }
        Ok(y)
    };
    let (mut xpre, mut xcur) = (xa, xb);
    let (mut fpre, mut fcur) = (eval(xpre)?, eval(xcur)?);
    if fpre == 0.0 {
        return Ok(xpre);
    }
    if fcur == 0.0 {
        return Ok(xcur);
    }
    if (fpre < 0.0) == (fcur < 0.0) {
        return Err(Error::Bracket { target: 0.0, lo: fpre, hi: fcur });
    }
    let (mut xblk, mut fblk, mut spre, mut scur) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..MAX_ITER {
        if fpre != 0.0 && fcur != 0.0 && (fpre < 0.0) != (fcur < 0.0) {
            xblk = xpre;
            fblk = fpre;
            spre = xcur - xpre;
            scur = spre;
        }
        if fblk.abs() < fcur.abs() {
            xpre = xcur;
            xcur = xblk;
            xblk = xpre;
            fpre = fcur;
            fcur = fblk;
            fblk = fpre;
        }
        let delta = 0.5 * (xtol + rtol * xcur.abs());
        let sbis = 0.5 * (xblk - xcur);
        if fcur == 0.0 || sbis.abs() < delta {
            return Ok(xcur);
        }
        if spre.abs() > delta && fcur.abs() < fpre.abs() {
            let stry = if xpre == xblk {
                -fcur * (xcur - xpre) / (fcur - fpre)
            } else {
                let dpre = (fpre - fcur) / (xpre - xcur);
                let dblk = (fblk - fcur) / (xblk - xcur);
                -fcur * (fblk * dblk - fpre * dpre) / (dblk * dpre * (fblk - fpre))
            };
            if 2.0 * stry.abs() < spre.abs().min(3.0 * sbis.abs() - delta) {
                spre = scur;
                scur = stry;
            } else {
                spre = sbis;
                scur = sbis;
            }
        } else {
            spre = sbis;
            scur = sbis;
        }
        xpre = xcur;
        fpre = fcur;
        xcur += if scur.abs() > delta { scur } else if sbis > 0.0 { delta } else { -delta };
        fcur = eval(xcur)?;
    }
    Err(Error::NonConvergence(format!("Brent iteration did not converge near {xcur}")))
}

fn probe(bracket: &Interval, c: f64, k: i32, left: bool) -> f64 {
    let scale = (2f64).powi(k);
    if left {
        if bracket.lo.is_finite() {
            bracket.lo + (c - bracket.lo) / scale
        } else {
            c - scale
        }
    } else if bracket.hi.is_finite() {
        bracket.hi - (bracket.hi - c) / scale
    } else {
        c + scale
    }
}

/// Solve `g(s) = target` for `g` strictly monotone on `bracket`.
///
/// A finite sign-changing sub-bracket is located by probing outwards from the
/// centre (geometrically towards finite endpoints, by doubling steps towards
/// infinite ones), then refined with Brent's method to machine precision in `s`.
pub fn solve_monotone<G: Fn(f64) -> f64>(g: G, target: f64, bracket: &Interval) -> Result<f64> {
    let h = |s: f64| g(s) - target;
    let c = bracket.center();
    let hc = h(c);
    if hc == 0.0 {
        return Ok(c);
    }
    if hc.is_nan() {
        return Err(Error::Domain(format!("monotone function is NaN at bracket centre {c}")));
    }
    let (mut lo_val, mut hi_val) = (f64::NAN, f64::NAN);
    for k in 1..1100 {
        for left in [true, false] {
            let x = probe(bracket, c, k, left);
            if !(x.is_finite() && x > bracket.lo && x < bracket.hi) {
                continue;
            }
            let hx = h(x);
            if hx.is_nan() {
                continue;
            }
            if left {
                lo_val = hx + target;
            } else {
                hi_val = hx + target;
            }
            if hx == 0.0 {
                return Ok(x);
            }
            if (hx < 0.0) != (hc < 0.0) {
                let (a, b) = if left { (x, c) } else { (c, x) };
                return brent(h, a, b, 1e-300, 4.0 * f64::EPSILON);
            }
        }
    }
    Err(Error::Bracket { target, lo: lo_val, hi: hi_val })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn exponential_half() {
        let s = solve_monotone(|s| (-s).exp(), 0.5, &Interval::real_line()).unwrap();
        assert!((s - LN_2).abs() < 1e-15);
    }

    #[test]
    fn poisson_mean_map() {
        let s = solve_monotone(|s| (-s).exp(), 1.0, &Interval::real_line()).unwrap();
        assert!(s.abs() < 1e-15);
    }

    #[test]
    fn landau_mean_map() {
        let s = solve_monotone(|s: f64| -s.ln(), 0.0, &Interval::positive()).unwrap();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn root_near_finite_endpoint() {
        // gamma mean map λ/s with a huge mean puts the root near 0
        let s = solve_monotone(|s| 2.0 / s, 1e9, &Interval::positive()).unwrap();
        assert!((s - 2e-9).abs() < 1e-22);
    }

    #[test]
    fn unenclosed_target() {
        let r = solve_monotone(|s: f64| s.tanh(), 2.0, &Interval::real_line());
        assert!(matches!(r, Err(Error::Bracket { .. })));
    }

    #[test]
    fn brent_needs_sign_change() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 1e-12).is_err());
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-300, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }
}
