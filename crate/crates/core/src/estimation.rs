//! Growth-rate estimation and the `R0` uncertainty table.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::analytic::r0_from_growth;
use crate::distributions::GammaSpec;
use crate::error::{Error, Result};
use crate::simulator::{classify_major, Classification, EpidemicParams, SimOutcome};

/// Daily incident counts and the cumulative series `R(t)` derived from them.
/// Day `t` is the 0-based offset from the first day of the series.
#[derive(Debug, Clone, PartialEq)]
pub struct IncidenceSeries {
    start_date: Option<NaiveDate>,
    incident: Vec<f64>,
    cumulative: Vec<f64>,
}

impl IncidenceSeries {
    pub fn from_incident(incident: Vec<u64>) -> Self {
        let incident: Vec<f64> = incident.into_iter().map(|c| c as f64).collect();
        let cumulative = incident
            .iter()
            .scan(0.0, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Self {
            start_date: None,
            incident,
            cumulative,
        }
    }

    /// Builds a series from a (possibly non-integer) cumulative curve, e.g.
    /// an exact exponential used for checking estimators.
    pub fn from_cumulative(cumulative: Vec<f64>) -> Result<Self> {
        let mut prev = 0.0;
        let mut incident = Vec::with_capacity(cumulative.len());
        for (day, &c) in cumulative.iter().enumerate() {
            if !(c.is_finite() && c >= prev) {
                return Err(Error::InvalidInput(format!(
                    "cumulative series must be finite and non-decreasing (day {day})"
                )));
            }
            incident.push(c - prev);
            prev = c;
        }
        Ok(Self {
            start_date: None,
            incident,
            cumulative,
        })
    }

    pub fn with_start_date(mut self, date: NaiveDate) -> Self {
        self.start_date = Some(date);
        self
    }

    pub fn start_date(&self) -> Option<NaiveDate> {
        self.start_date
    }

    pub fn len(&self) -> usize {
        self.incident.len()
    }

    pub fn is_empty(&self) -> bool {
        self.incident.is_empty()
    }

    pub fn incident(&self) -> &[f64] {
        &self.incident
    }

    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }
}

/// `α̂ = (ln R(t1) - ln R(t0)) / (t1 - t0)`.
pub fn growth_rate_window(series: &IncidenceSeries, t0: usize, t1: usize) -> Result<f64> {
    if t0 >= t1 {
        return Err(Error::InvalidInput(format!(
            "window needs t0 < t1, got ({t0}, {t1})"
        )));
    }
    if t1 >= series.len() {
        return Err(Error::InvalidInput(format!(
            "window end {t1} is past the last day {}",
            series.len().saturating_sub(1)
        )));
    }
    let c = series.cumulative();
    if c[t0] <= 0.0 {
        return Err(Error::WindowBeforeTakeoff { day: t0 });
    }
    Ok((c[t1].ln() - c[t0].ln()) / (t1 - t0) as f64)
}

/// Arithmetic mean of the per-window estimates.
pub fn growth_rate_mean(series: &IncidenceSeries, windows: &[(usize, usize)]) -> Result<f64> {
    if windows.is_empty() {
        return Err(Error::InvalidInput(
            "at least one window is required".into(),
        ));
    }
    let estimates = windows
        .iter()
        .map(|&(t0, t1)| growth_rate_window(series, t0, t1))
        .collect::<Result<Vec<_>>>()?;
    Ok(mean(&estimates))
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub low: f64,
    pub high: f64,
}

impl Interval {
    pub fn new(low: f64, high: f64) -> Result<Self> {
        if !(low.is_finite() && high.is_finite() && low >= 0.0 && low <= high) {
            return Err(Error::InvalidInput(format!(
                "interval [{low}, {high}] must satisfy 0 <= low <= high"
            )));
        }
        Ok(Self { low, high })
    }

    pub fn point(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.low + self.high)
    }

    fn ends(&self) -> [f64; 2] {
        [self.low, self.high]
    }
}

/// Assumed ranges for the four period parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamIntervals {
    pub mu_l: Interval,
    pub mu_i: Interval,
    pub tau_l: Interval,
    pub tau_i: Interval,
}

impl ParamIntervals {
    pub fn validate(&self) -> Result<()> {
        for iv in [self.mu_l, self.mu_i, self.tau_l, self.tau_i] {
            Interval::new(iv.low, iv.high)?;
        }
        if self.mu_i.low <= 0.0 {
            return Err(Error::invalid(
                "mu_i.low",
                self.mu_i.low,
                "mean infectious period must be > 0",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct R0TableRow {
    pub mu_l: f64,
    pub mu_i: f64,
    pub tau_l: f64,
    pub tau_i: f64,
    pub r0: f64,
    pub midpoint: bool,
}

/// `R0` implied by `alpha_hat` at the 16 interval corners, ordered
/// lexicographically by `(μ_L, μ_I, τ_L, τ_I)` with low before high, followed
/// by the componentwise midpoint.
pub fn r0_uncertainty_table(alpha_hat: f64, intervals: &ParamIntervals) -> Result<Vec<R0TableRow>> {
    intervals.validate()?;
    let row =
        |mu_l: f64, mu_i: f64, tau_l: f64, tau_i: f64, midpoint: bool| -> Result<R0TableRow> {
            let latent = GammaSpec::new(mu_l, tau_l)?;
            let infectious = GammaSpec::new(mu_i, tau_i)?;
            Ok(R0TableRow {
                mu_l,
                mu_i,
                tau_l,
                tau_i,
                r0: r0_from_growth(alpha_hat, &latent, &infectious)?,
                midpoint,
            })
        };
    let mut rows = Vec::with_capacity(17);
    for mu_l in intervals.mu_l.ends() {
        for mu_i in intervals.mu_i.ends() {
            for tau_l in intervals.tau_l.ends() {
                for tau_i in intervals.tau_i.ends() {
                    rows.push(row(mu_l, mu_i, tau_l, tau_i, false)?);
                }
            }
        }
    }
    rows.push(row(
        intervals.mu_l.midpoint(),
        intervals.mu_i.midpoint(),
        intervals.tau_l.midpoint(),
        intervals.tau_i.midpoint(),
        true,
    )?);
    Ok(rows)
}

/// Minimum number of removal events inside the regression window.
pub const MIN_WINDOW_EVENTS: usize = 5;

/// Cumulative-removed range `[max(50, 10k), 0.05·n]` used for regression.
pub fn simulation_window(params: &EpidemicParams) -> (f64, f64) {
    (
        (50.0f64).max(10.0 * params.k as f64),
        0.05 * params.n as f64,
    )
}

/// Least-squares slope of `ln R(t)` against `t`, where `R` counts removals,
/// over the events whose cumulative count lies in [`simulation_window`].
pub fn growth_rate_from_simulation(outcome: &SimOutcome, params: &EpidemicParams) -> Result<f64> {
    if classify_major(outcome, params)? != Classification::Major {
        return Err(Error::InvalidInput(
            "growth rate needs a major outbreak".into(),
        ));
    }
    let (lo, hi) = simulation_window(params);
    let (times, logs): (Vec<f64>, Vec<f64>) = outcome
        .removal_times()
        .enumerate()
        .map(|(i, t)| (t, (i + 1) as f64))
        .filter(|&(_, c)| c >= lo && c <= hi)
        .map(|(t, c)| (t, c.ln()))
        .unzip();
    if times.len() < MIN_WINDOW_EVENTS {
        return Err(Error::InsufficientWindow {
            found: times.len(),
            needed: MIN_WINDOW_EVENTS,
        });
    }
    Ok(ols_slope(&times, &logs))
}

pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let mx = mean(x);
    let my = mean(y);
    let (sxy, sxx) = x.iter().zip(y).fold((0.0, 0.0), |(sxy, sxx), (&xi, &yi)| {
        (sxy + (xi - mx) * (yi - my), sxx + (xi - mx) * (xi - mx))
    });
    sxy / sxx
}
