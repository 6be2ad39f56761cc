//! Grid posterior for the infectious-period coefficient of variation given
//! the final size of a single observed outbreak.

use serde::{Deserialize, Serialize};

use crate::analytic::{major_outbreak_prob, r0_from_final_size};
use crate::error::{Error, Result};

/// Accepted deviation of the posterior integral from 1.
pub const NORMALIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PriorSpec {
    Exponential {
        mean: f64,
    },
    /// Piecewise-linear density through `(τ, density)` knots, zero outside.
    Tabulated(Vec<(f64, f64)>),
}

impl PriorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            PriorSpec::Exponential { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    return Err(Error::invalid(
                        "prior mean",
                        *mean,
                        "must be finite and > 0",
                    ));
                }
            }
            PriorSpec::Tabulated(knots) => {
                if knots.len() < 2 {
                    return Err(Error::InvalidInput(
                        "tabulated prior needs at least two knots".into(),
                    ));
                }
                for w in knots.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::InvalidInput(format!(
                            "tabulated prior knots must be strictly increasing (at τ = {})",
                            w[1].0
                        )));
                    }
                }
                if let Some(&(tau, d)) = knots
                    .iter()
                    .find(|(t, d)| !(t.is_finite() && d.is_finite() && *d >= 0.0))
                {
                    return Err(Error::InvalidInput(format!(
                        "tabulated prior has invalid knot ({tau}, {d})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn density(&self, tau: f64) -> f64 {
        match self {
            PriorSpec::Exponential { mean } => {
                if tau < 0.0 {
                    0.0
                } else {
                    (-tau / mean).exp() / mean
                }
            }
            PriorSpec::Tabulated(knots) => {
                let i = knots.partition_point(|&(t, _)| t <= tau);
                if i == 0 || i == knots.len() {
                    // exactly on the last knot
                    return match knots.last() {
                        Some(&(t, d)) if i == knots.len() && t == tau => d,
                        _ => 0.0,
                    };
                }
                let (t0, d0) = knots[i - 1];
                let (t1, d1) = knots[i];
                d0 + (d1 - d0) * (tau - t0) / (t1 - t0)
            }
        }
    }
}

/// Uniform grid `0 = τ_0 < … < τ_m = tau_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub step: f64,
    pub tau_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            step: 1e-3,
            tau_max: 5.0,
        }
    }
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.tau_max > 0.0 && self.step <= self.tau_max) {
            return Err(Error::InvalidInput(format!(
                "grid needs 0 < step <= tau_max, got step {} and tau_max {}",
                self.step, self.tau_max
            )));
        }
        let m = (self.tau_max / self.step).round() as usize;
        Ok((0..=m)
            .map(|i| self.tau_max * i as f64 / m as f64)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorGrid {
    pub tau_values: Vec<f64>,
    /// Prior density renormalized to unit mass on the grid.
    pub prior_density: Vec<f64>,
    pub posterior_density: Vec<f64>,
    /// Trapezoid integral of `prior·likelihood`.
    pub normalization_constant: f64,
}

impl PosteriorGrid {
    pub fn prior_cdf(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.tau_values, &self.prior_density)
    }

    pub fn posterior_cdf(&self) -> Vec<f64> {
        cumulative_trapezoid(&self.tau_values, &self.posterior_density)
    }

    pub fn posterior_integral(&self) -> f64 {
        trapezoid(&self.tau_values, &self.posterior_density)
    }
}

/// Posterior of `τ_I` after observing final fraction `observed_fraction` in a
/// single major outbreak. The likelihood of `τ_I` is the probability of a
/// major outbreak at the `R0` implied by that final size.
pub fn tau_posterior(
    prior: &PriorSpec,
    observed_fraction: f64,
    grid: &GridSpec,
) -> Result<PosteriorGrid> {
    let r0 = r0_from_final_size(observed_fraction)?;
    posterior_from_likelihood(prior, grid, |tau| major_outbreak_prob(r0, tau))
}

/// Prior times an arbitrary non-negative likelihood, normalized on the grid.
pub fn posterior_from_likelihood<F>(
    prior: &PriorSpec,
    grid: &GridSpec,
    likelihood: F,
) -> Result<PosteriorGrid>
where
    F: Fn(f64) -> Result<f64>,
{
    prior.validate()?;
    let tau_values = grid.points()?;
    let mut prior_density: Vec<f64> = tau_values.iter().map(|&t| prior.density(t)).collect();
    let prior_mass = trapezoid(&tau_values, &prior_density);
    if !(prior_mass > 0.0 && prior_mass.is_finite()) {
        return Err(Error::DegeneratePrior);
    }
    prior_density.iter_mut().for_each(|d| *d /= prior_mass);

    let mut posterior_density = tau_values
        .iter()
        .zip(&prior_density)
        .map(|(&t, &p)| Ok(p * likelihood(t)?))
        .collect::<Result<Vec<f64>>>()?;
    let normalization_constant = trapezoid(&tau_values, &posterior_density);
    if !(normalization_constant > 0.0 && normalization_constant.is_finite()) {
        return Err(Error::DegeneratePrior);
    }
    posterior_density
        .iter_mut()
        .for_each(|d| *d /= normalization_constant);
    Ok(PosteriorGrid {
        tau_values,
        prior_density,
        posterior_density,
        normalization_constant,
    })
}

/// Trapezoid `∫ τ·posterior(τ) dτ`.
pub fn posterior_mean(grid: &PosteriorGrid) -> Result<f64> {
    if grid.tau_values.len() != grid.posterior_density.len() || grid.tau_values.len() < 2 {
        return Err(Error::InvalidInput(
            "posterior grid arrays are malformed".into(),
        ));
    }
    let integral = grid.posterior_integral();
    if (integral - 1.0).abs() > NORMALIZATION_TOL || integral.is_nan() {
        return Err(Error::UnnormalizedGrid { integral });
    }
    let weighted: Vec<f64> = grid
        .tau_values
        .iter()
        .zip(&grid.posterior_density)
        .map(|(t, d)| t * d)
        .collect();
    Ok(trapezoid(&grid.tau_values, &weighted))
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(x.len());
    out.push(0.0);
    for (x, y) in x.windows(2).zip(y.windows(2)) {
        acc += 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        out.push(acc);
    }
    out
}
