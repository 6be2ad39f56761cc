//! Bracketed scalar root finding.

use crate::error::{Error, Result};

pub const ROOT_TOL: f64 = 1e-13;
pub const MAX_ITER: usize = 200;

/// Finds a root of `f` in `[lo, hi]`, where `f(lo)` and `f(hi)` have opposite
/// signs. Secant steps are taken when they land strictly inside the current
/// bracket and shrink it fast enough; otherwise the step is a bisection.
pub fn bracketed<F>(mut f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidInput(format!(
            "root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    let mut f_hi = f_hi;
    let mut last_width = hi - lo;
    for _ in 0..MAX_ITER {
        let width = hi - lo;
        if width <= ROOT_TOL {
            return Ok(pick(lo, f_lo, hi, f_hi));
        }
        let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
        let mid = 0.5 * (lo + hi);
        let use_secant =
            secant.is_finite() && secant > lo && secant < hi && width < 0.5 * last_width;
        let x = if use_secant { secant } else { mid };
        last_width = width;
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        // A secant step pinned against one end barely shrinks the bracket;
        // follow it with a bisection probe on the short side.
        if use_secant && hi - lo > 0.5 * width {
            let probe = 0.5 * (lo + hi);
            let fp = f(probe);
            if fp == 0.0 {
                return Ok(probe);
            }
            if fp.signum() == f_lo.signum() {
                lo = probe;
                f_lo = fp;
            } else {
                hi = probe;
                f_hi = fp;
            }
        }
        if lo == hi || (hi - lo) <= f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(pick(lo, f_lo, hi, f_hi));
        }
    }
    if hi - lo <= ROOT_TOL * 10.0 {
        return Ok(pick(lo, f_lo, hi, f_hi));
    }
    Err(Error::NoConvergence {
        what: "bracketed root finder",
        iterations: MAX_ITER,
    })
}

fn pick(lo: f64, f_lo: f64, hi: f64, f_hi: f64) -> f64 {
    if f_lo.abs() <= f_hi.abs() {
        lo
    } else {
        hi
    }
}

/// Largest root in `(0, upper]` of a function that vanishes at 0, is
/// positive just right of 0 and changes sign once (concave fixed-point
/// residuals such as `1 - x - G(1 - x)`).
///
/// Scans downward from `upper` on a geometric grid; returns `Ok(None)` when
/// no positive value is found above `floor`.
pub fn largest_positive_root<F>(mut f: F, upper: f64, floor: f64) -> Result<Option<f64>>
where
    F: FnMut(f64) -> f64,
{
    let f_upper = f(upper);
    if f_upper >= 0.0 {
        return Ok(if f_upper == 0.0 { Some(upper) } else { None });
    }
    let mut hi = upper;
    let mut x = upper;
    loop {
        x *= 0.5;
        if x < floor {
            return Ok(None);
        }
        let fx = f(x);
        if fx > 0.0 {
            return bracketed(&mut f, x, hi).map(Some);
        }
        if fx == 0.0 {
            return Ok(Some(x));
        }
        hi = x;
    }
}
