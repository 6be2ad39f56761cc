//! Adaptive Simpson quadrature with Richardson correction.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;
/// Subintervals narrower than this fraction of the full range are accepted
/// as they are; their contribution is below the tolerance for bounded integrands.
const MIN_RELATIVE_WIDTH: f64 = 1e-13;

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`.
///
/// Fails if the recursion depth limit is hit before the local error
/// estimate drops below its share of the tolerance.
pub fn adaptive_simpson<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if a > b || a.is_nan() || b.is_nan() {
        return Err(Error::Quadrature(format!("invalid interval [{a}, {b}]")));
    }
    // endpoints are sampled just inside so that jumps located exactly at
    // a or b take the interior one-sided limit
    let fa = f(a.next_up());
    let fb = f(b.next_down());
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let ctx = Ctx {
        f,
        min_width: MIN_RELATIVE_WIDTH * (b - a),
    };
    let value = recurse(&ctx, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Quadrature(format!(
            "non-finite integral over [{a}, {b}]"
        )))
    }
}

/// Sums [`adaptive_simpson`] over consecutive pieces delimited by
/// `breakpoints` (sorted, may include points outside `[a, b]`).
pub fn piecewise<F>(f: &F, a: f64, b: f64, breakpoints: &[f64], tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let pieces = cuts.len() + 1;
    let mut lo = a;
    let mut total = 0.0;
    for hi in cuts.into_iter().chain(std::iter::once(b)) {
        total += adaptive_simpson(f, lo, hi, tol / pieces as f64)?;
        lo = hi;
    }
    Ok(total)
}

struct Ctx<'a, F> {
    f: &'a F,
    min_width: f64,
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    ctx: &Ctx<'_, F>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = (ctx.f)(lm);
    let frm = (ctx.f)(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if delta.abs() <= (15.0 * tol).max(floor) || b - a <= ctx.min_width {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return Err(Error::Quadrature(format!(
            "tolerance {tol:e} not reached on [{a}, {b}] (error estimate {:e})",
            delta.abs() / 15.0
        )));
    }
    let l = recurse(ctx, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = recurse(ctx, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}
