//! Gamma period laws parameterized by mean and coefficient of variation.
//!
//! A [`GammaSpec`] with coefficient of variation `cv > 0` is the Gamma law
//! with shape `1/cv²` and rate `1/(mean·cv²)`. Below [`DEGENERATE_CV2`] the
//! law is treated as the point mass at `mean`, and every closed form switches
//! to its `cv -> 0` exponential limit.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Squared CV below which a period is treated as deterministic.
pub const DEGENERATE_CV2: f64 = 1e-8;

/// `(1 + x)^(-1/cv2)`, evaluated as `exp(-log1p(x)/cv2)`.
#[inline]
pub(crate) fn neg_power(x: f64, cv2: f64) -> f64 {
    (-x.ln_1p() / cv2).exp()
}

/// `1 - (1 + x)^(-1/cv2)` without cancellation for small `x`.
#[inline]
pub(crate) fn one_minus_neg_power(x: f64, cv2: f64) -> f64 {
    -(-x.ln_1p() / cv2).exp_m1()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGamma")]
pub struct GammaSpec {
    mean: f64,
    cv: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGamma {
    mean: f64,
    cv: f64,
}

impl TryFrom<RawGamma> for GammaSpec {
    type Error = Error;

    fn try_from(raw: RawGamma) -> Result<Self> {
        GammaSpec::new(raw.mean, raw.cv)
    }
}

impl GammaSpec {
    /// A zero mean is accepted and denotes an absent stage (point mass at 0).
    pub fn new(mean: f64, cv: f64) -> Result<Self> {
        if !(mean.is_finite() && mean >= 0.0) {
            return Err(Error::invalid("mean", mean, "must be finite and >= 0"));
        }
        if !(cv.is_finite() && cv >= 0.0) {
            return Err(Error::invalid("cv", cv, "must be finite and >= 0"));
        }
        Ok(Self { mean, cv })
    }

    pub fn point_mass(mean: f64) -> Result<Self> {
        Self::new(mean, 0.0)
    }

    /// Builds the law from the usual shape/rate parameterization.
    pub fn from_shape_rate(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0 && shape.is_finite()) {
            return Err(Error::invalid("shape", shape, "must be finite and > 0"));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::invalid("rate", rate, "must be finite and > 0"));
        }
        Self::new(shape / rate, 1.0 / shape.sqrt())
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn cv(&self) -> f64 {
        self.cv
    }

    pub fn variance(&self) -> f64 {
        (self.cv * self.mean).powi(2)
    }

    pub fn is_degenerate(&self) -> bool {
        self.cv * self.cv < DEGENERATE_CV2 || self.mean == 0.0
    }

    pub fn shape(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| 1.0 / (self.cv * self.cv))
    }

    pub fn rate(&self) -> Option<f64> {
        (!self.is_degenerate()).then(|| 1.0 / (self.mean * self.cv * self.cv))
    }

    /// `E[exp(-s X)]` for `s >= 0`.
    pub fn laplace_transform(&self, s: f64) -> Result<f64> {
        check_laplace_arg(s)?;
        Ok(self.laplace_unchecked(s))
    }

    pub(crate) fn laplace_unchecked(&self, s: f64) -> f64 {
        if self.is_degenerate() {
            (-s * self.mean).exp()
        } else {
            let cv2 = self.cv * self.cv;
            neg_power(s * cv2 * self.mean, cv2)
        }
    }

    /// `1 - E[exp(-s X)]`, accurate when `s·mean` is small.
    pub(crate) fn one_minus_laplace(&self, s: f64) -> f64 {
        if self.is_degenerate() {
            -(-s * self.mean).exp_m1()
        } else {
            let cv2 = self.cv * self.cv;
            one_minus_neg_power(s * cv2 * self.mean, cv2)
        }
    }

    /// Draws one duration. Deterministic laws return `mean` exactly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sampler().sample(rng)
    }

    /// Reusable sampler; construct once when drawing many values.
    pub fn sampler(&self) -> GammaSampler {
        match (self.shape(), self.rate()) {
            (Some(shape), Some(rate)) => GammaSampler::Gamma(
                rand_distr::Gamma::new(shape, 1.0 / rate).expect("validated shape and rate"),
            ),
            _ => GammaSampler::Point(self.mean),
        }
    }

    /// Density; `None` for deterministic laws.
    pub fn pdf(&self, x: f64) -> Option<f64> {
        let (a, b) = (self.shape()?, self.rate()?);
        Some(if x < 0.0 {
            0.0
        } else if x == 0.0 {
            match a.partial_cmp(&1.0) {
                Some(std::cmp::Ordering::Less) => f64::INFINITY,
                Some(std::cmp::Ordering::Equal) => b,
                _ => 0.0,
            }
        } else {
            (a * b.ln() + (a - 1.0) * x.ln() - b * x - special::ln_gamma(a)).exp()
        })
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: f64) -> f64 {
        match (self.shape(), self.rate()) {
            (Some(a), Some(b)) => special::gamma_p(a, b * x.max(0.0)),
            _ => {
                if x >= self.mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `P(X > x)`.
    pub fn sf(&self, x: f64) -> f64 {
        match (self.shape(), self.rate()) {
            (Some(a), Some(b)) => special::gamma_q(a, b * x.max(0.0)),
            _ => {
                if x < self.mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

fn check_laplace_arg(s: f64) -> Result<()> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::invalid("s", s, "Laplace argument must be >= 0"));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub enum GammaSampler {
    Point(f64),
    Gamma(rand_distr::Gamma<f64>),
}

impl GammaSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            GammaSampler::Point(v) => *v,
            GammaSampler::Gamma(g) => rand_distr::Distribution::sample(g, rng),
        }
    }
}

/// Probability generating function of the offspring count of one infective,
/// `E[s^X]`, where `X` is Poisson with mean `λ·I` and `I` is Gamma with CV
/// `tau_i`. Mixing gives a negative binomial:
/// `(1 + (1 - s)·r0·tau_i²)^(-1/tau_i²)`, or `exp(-(1 - s)·r0)` when `tau_i = 0`.
pub fn offspring_pgf(s: f64, r0: f64, tau_i: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::invalid("s", s, "must lie in [0, 1]"));
    }
    check_r0(r0)?;
    check_tau(tau_i)?;
    Ok(unit_period(tau_i).laplace_unchecked((1.0 - s) * r0))
}

/// `1 - E[s^X]` evaluated without cancellation near `s = 1`.
pub(crate) fn offspring_pgf_complement(one_minus_s: f64, r0: f64, tau_i: f64) -> f64 {
    unit_period(tau_i).one_minus_laplace(one_minus_s * r0)
}

// Infectious period rescaled to unit mean: λ·I then has Laplace transform
// φ((1-s)λ) = unit-mean transform at (1-s)·r0.
fn unit_period(tau_i: f64) -> GammaSpec {
    GammaSpec {
        mean: 1.0,
        cv: tau_i,
    }
}

pub(crate) fn check_r0(r0: f64) -> Result<()> {
    if !(r0.is_finite() && r0 > 0.0) {
        return Err(Error::invalid("r0", r0, "must be finite and > 0"));
    }
    Ok(())
}

pub(crate) fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::invalid("tau", tau, "must be finite and >= 0"));
    }
    Ok(())
}
