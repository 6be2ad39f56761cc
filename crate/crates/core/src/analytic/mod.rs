//! Closed-form and root-found quantities of the stochastic SEIR model.
//!
//! Everything here is a deterministic function of the parameters: the final
//! size of a major outbreak, the probability that one or `k` initial
//! infectives start one, the Malthusian growth rate and its inverse, and the
//! critical vaccination coverage. [`euler_lotka_residual`] evaluates the
//! renewal equation by direct quadrature and is kept independent of the
//! Laplace-transform shortcut used by [`malthusian`].

mod euler_lotka;

pub use euler_lotka::euler_lotka_residual;

use serde::{Deserialize, Serialize};

use crate::distributions::{check_r0, check_tau, offspring_pgf_complement, GammaSpec};
use crate::error::{Error, Result};
use crate::roots;

/// Bracket margin for the final-size and outbreak-probability roots.
const EDGE: f64 = 1e-14;
/// Lower end of the Malthusian bracket.
const ALPHA_FLOOR: f64 = 1e-12;

/// Parameters of the early exponential phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthParams {
    pub r0: f64,
    pub latent: GammaSpec,
    pub infectious: GammaSpec,
}

impl GrowthParams {
    pub fn new(r0: f64, latent: GammaSpec, infectious: GammaSpec) -> Result<Self> {
        let p = Self {
            r0,
            latent,
            infectious,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_r0(self.r0)?;
        check_infectious(&self.infectious)
    }

    /// Contact rate `λ = R0 / μ_I`.
    pub fn contact_rate(&self) -> f64 {
        self.r0 / self.infectious.mean()
    }

    /// Left side of the Euler-Lotka equation through the Laplace identity
    /// `λ·φ_L(α)·(1 - φ_I(α))/α`; equals `R0` at `α = 0`.
    pub fn euler_lotka_closed_form(&self, alpha: f64) -> f64 {
        if alpha == 0.0 {
            return self.r0;
        }
        let mu_i = self.infectious.mean();
        self.r0 / (alpha * mu_i)
            * self.latent.laplace_unchecked(alpha)
            * self.infectious.one_minus_laplace(alpha)
    }
}

pub(crate) fn check_infectious(spec: &GammaSpec) -> Result<()> {
    if spec.mean() <= 0.0 {
        return Err(Error::invalid(
            "infectious.mean",
            spec.mean(),
            "infectious period must have positive mean",
        ));
    }
    Ok(())
}

/// Largest solution of `1 - ρ = exp(-R0·ρ)`; zero when `R0 <= 1`.
pub fn final_size_fraction(r0: f64) -> Result<f64> {
    check_r0(r0)?;
    if r0 <= 1.0 {
        return Ok(0.0);
    }
    let root = roots::largest_positive_root(
        |rho| -rho - (-r0 * rho).exp_m1(),
        1.0 - EDGE,
        f64::MIN_POSITIVE,
    )?;
    Ok(root.unwrap_or(0.0))
}

/// Inverts the final-size relation: `R0 = -ln(1 - ρ)/ρ`.
pub fn r0_from_final_size(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::invalid("rho", rho, "must lie in (0, 1)"));
    }
    Ok(-(-rho).ln_1p() / rho)
}

/// Probability that a single initial infective starts a major outbreak.
///
/// Largest root of `1 - π = (1 + π·R0·τ_I²)^(-1/τ_I²)` (the offspring pgf
/// evaluated at `1 - π`), with the `exp(-π·R0)` limit for `τ_I = 0`. Does not
/// depend on the latent period.
pub fn major_outbreak_prob(r0: f64, tau_i: f64) -> Result<f64> {
    check_r0(r0)?;
    check_tau(tau_i)?;
    if r0 <= 1.0 {
        return Ok(0.0);
    }
    if tau_i == 1.0 {
        // exponential infectious period: geometric offspring
        return Ok(1.0 - 1.0 / r0);
    }
    solve_outbreak_prob(r0, tau_i)
}

pub(crate) fn solve_outbreak_prob(r0: f64, tau_i: f64) -> Result<f64> {
    // 1 - π - pgf(1 - π) = pgf_complement(π) - π
    let root = roots::largest_positive_root(
        |pi| offspring_pgf_complement(pi, r0, tau_i) - pi,
        1.0 - EDGE,
        f64::MIN_POSITIVE,
    )?;
    Ok(root.unwrap_or(0.0))
}

/// `π_k = 1 - (1 - π)^k` for `k` independent initial infectives.
pub fn outbreak_prob_k(r0: f64, tau_i: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid(
            "k",
            0.0,
            "need at least one initial infective",
        ));
    }
    let pi = major_outbreak_prob(r0, tau_i)?;
    Ok(prob_k_from_pi(pi, k))
}

pub fn prob_k_from_pi(pi: f64, k: u32) -> f64 {
    1.0 - (1.0 - pi).powf(f64::from(k))
}

/// Malthusian parameter: the unique `α > 0` with
/// `α = (R0/μ_I)·φ_L(α)·(1 - φ_I(α))`.
pub fn malthusian(params: &GrowthParams) -> Result<f64> {
    params.validate()?;
    if params.r0 <= 1.0 {
        return Err(Error::invalid(
            "r0",
            params.r0,
            "no positive growth rate unless r0 > 1",
        ));
    }
    let f = |alpha: f64| params.euler_lotka_closed_form(alpha) - 1.0;
    let mut hi = 1.0 / params.infectious.mean();
    let mut doublings = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::NoConvergence {
                what: "Malthusian bracket search",
                iterations: doublings,
            });
        }
    }
    roots::bracketed(f, ALPHA_FLOOR, hi)
}

/// Basic reproduction number implied by an observed growth rate:
/// `R0 = α·μ_I / (φ_L(α)·(1 - φ_I(α)))`.
pub fn r0_from_growth(alpha: f64, latent: &GammaSpec, infectious: &GammaSpec) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid("alpha", alpha, "must be finite and > 0"));
    }
    check_infectious(infectious)?;
    Ok(alpha * infectious.mean()
        / (latent.laplace_unchecked(alpha) * infectious.one_minus_laplace(alpha)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalCoverage {
    /// Herd immunity reachable by vaccinating this fraction.
    Attainable(f64),
    /// The required fraction exceeds 1.
    Unattainable(f64),
}

impl CriticalCoverage {
    pub fn value(&self) -> f64 {
        match *self {
            CriticalCoverage::Attainable(v) | CriticalCoverage::Unattainable(v) => v,
        }
    }

    pub fn is_attainable(&self) -> bool {
        matches!(self, CriticalCoverage::Attainable(_))
    }
}

/// `v_c = (1 - 1/R0)/efficacy`.
pub fn critical_vaccination_coverage(r0: f64, efficacy: f64) -> Result<CriticalCoverage> {
    check_r0(r0)?;
    if !(efficacy > 0.0 && efficacy <= 1.0) {
        return Err(Error::invalid("efficacy", efficacy, "must lie in (0, 1]"));
    }
    if r0 <= 1.0 {
        return Ok(CriticalCoverage::Attainable(0.0));
    }
    let v = (1.0 - 1.0 / r0) / efficacy;
    Ok(if v > 1.0 {
        CriticalCoverage::Unattainable(v)
    } else {
        CriticalCoverage::Attainable(v)
    })
}
