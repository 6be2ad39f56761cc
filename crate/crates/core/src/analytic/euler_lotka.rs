//! Direct quadrature of the Euler-Lotka renewal integral
//! `∫ e^{-αt} λ P(L < t < L + I) dt`, with
//! `P(L < t < L + I) = ∫_0^t f_L(s) (1 - F_I(t - s)) ds`.
//!
//! Only Gamma densities and incomplete-gamma CDFs are used here; the
//! closed-form Laplace transforms are deliberately not touched.

use super::GrowthParams;
use crate::distributions::GammaSpec;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive_simpson, piecewise};
use crate::special::ln_gamma;

const OUTER_TOL: f64 = 1e-10;
const INNER_TOL: f64 = 1e-13;
const TAIL_CUTOFF: f64 = 1e-15;
const LATENT_QUANTILE_TAIL: f64 = 1e-12;

/// Left side of the Euler-Lotka equation evaluated by nested adaptive
/// Simpson quadrature. Equals `R0` at `α = 0`, 1 at the Malthusian
/// parameter, and decreases strictly in `α`.
pub fn euler_lotka_residual(alpha: f64, params: &GrowthParams) -> Result<f64> {
    params.validate()?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::invalid("alpha", alpha, "must be finite and >= 0"));
    }
    let lambda = params.contact_rate();
    let latent = params.latent;
    let infectious = params.infectious;
    let mu_l = latent.mean();
    let mu_i = infectious.mean();

    let t_max = outer_horizon(alpha, lambda, &latent, &infectious)?;
    let inner = InnerConvolution::new(latent, infectious)?;

    let integrand = |t: f64| {
        let p = inner.eval(t);
        (-alpha * t).exp() * lambda * p
    };

    // kinks and jumps of P(L < t < L + I) for deterministic stages
    let breaks = [mu_l, mu_i, mu_l + mu_i];
    let value = piecewise(&integrand, 0.0, t_max, &breaks, OUTER_TOL)?;
    inner.check()?;
    Ok(value)
}

/// Time beyond which the remaining integral is below `TAIL_CUTOFF`, using
/// `P(L < t < L + I) <= P(L > t/2) + P(I > t/2)`.
fn outer_horizon(
    alpha: f64,
    lambda: f64,
    latent: &GammaSpec,
    infectious: &GammaSpec,
) -> Result<f64> {
    let mut t = (latent.mean() + infectious.mean()).max(1.0);
    for _ in 0..200 {
        let tail = latent.sf(0.5 * t) + infectious.sf(0.5 * t);
        let bound = lambda * (-alpha * t).exp() * tail.min(1.0);
        if bound < TAIL_CUTOFF {
            return Ok(t);
        }
        t *= 1.5;
    }
    Err(Error::Quadrature("no finite integration horizon".into()))
}

/// `t -> P(L < t < L + I)`.
struct InnerConvolution {
    latent: GammaSpec,
    infectious: GammaSpec,
    latent_upper: f64,
    // ln(β^a / Γ(a + 1)) for the singular-density substitution
    log_scale: f64,
    failure: std::cell::RefCell<Option<Error>>,
}

impl InnerConvolution {
    fn new(latent: GammaSpec, infectious: GammaSpec) -> Result<Self> {
        let latent_upper = if latent.is_degenerate() {
            latent.mean()
        } else {
            upper_quantile(&latent, LATENT_QUANTILE_TAIL)?
        };
        let log_scale = match (latent.shape(), latent.rate()) {
            (Some(a), Some(b)) => a * b.ln() - ln_gamma(a + 1.0),
            _ => 0.0,
        };
        Ok(Self {
            latent,
            infectious,
            latent_upper,
            log_scale,
            failure: std::cell::RefCell::new(None),
        })
    }

    fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let (latent, infectious) = (&self.latent, &self.infectious);
        match (latent.is_degenerate(), infectious.is_degenerate()) {
            // L is a point mass: P(L < t < L + I) = 1{t > μ_L} P(I > t - μ_L)
            (true, _) => {
                if t > latent.mean() {
                    infectious.sf(t - latent.mean())
                } else {
                    0.0
                }
            }
            // I is a point mass: ∫_{t-μ_I}^t f_L = F_L(t) - F_L(t - μ_I)
            (false, true) => {
                let lo = (t - infectious.mean()).max(0.0);
                if lo >= t {
                    0.0
                } else {
                    (infectious_window(latent, lo, t)).max(0.0)
                }
            }
            (false, false) => match self.convolve(t) {
                Ok(v) => v,
                Err(e) => {
                    self.failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
        }
    }

    fn convolve(&self, t: f64) -> Result<f64> {
        let upper = t.min(self.latent_upper);
        let a = self.latent.shape().expect("non-degenerate");
        let b = self.latent.rate().expect("non-degenerate");
        let infectious = &self.infectious;
        if a >= 1.0 {
            let f = |s: f64| self.latent.pdf(s).unwrap_or(0.0) * infectious.sf(t - s);
            adaptive_simpson(&f, 0.0, upper, INNER_TOL)
        } else {
            // s = w^(1/a) absorbs the s^(a-1) singularity of f_L at 0
            let inv_a = 1.0 / a;
            let scale = self.log_scale;
            let f = |w: f64| {
                let s = w.powf(inv_a);
                (scale - b * s).exp() * infectious.sf(t - s)
            };
            adaptive_simpson(&f, 0.0, upper.powf(a), INNER_TOL)
        }
    }

    fn check(&self) -> Result<()> {
        match self.failure.borrow_mut().take() {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }
}

fn infectious_window(latent: &GammaSpec, lo: f64, hi: f64) -> f64 {
    // difference of survival functions is more accurate in the upper tail
    if lo > latent.mean() {
        latent.sf(lo) - latent.sf(hi)
    } else {
        latent.cdf(hi) - latent.cdf(lo)
    }
}

/// `x` with `P(X > x) = tail`, by doubling and bisection on the survival function.
fn upper_quantile(spec: &GammaSpec, tail: f64) -> Result<f64> {
    let mut hi = spec.mean().max(1e-300);
    let mut steps = 0;
    while spec.sf(hi) > tail {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 {
            return Err(Error::Quadrature("latent quantile search diverged".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if spec.sf(mid) > tail {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(hi)
}
