//! Data behind the outbreak-probability, growth-rate and posterior figures.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytic::{major_outbreak_prob, malthusian, prob_k_from_pi, GrowthParams};
use crate::bayes::{tau_posterior, GridSpec, PriorSpec};
use crate::distributions::GammaSpec;
use crate::error::{Error, Result};

use super::CsvTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
            Figure::Fig5 => "fig5",
        }
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| {
                Error::InvalidInput(format!(
                    "unknown figure `{s}` (expected fig1, fig2, fig3 or fig5)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    /// `R0` values, one curve each, for fig1.
    pub r0s: Vec<f64>,
    /// Single-seed outbreak probabilities for fig2.
    pub pis: Vec<f64>,
    pub prior: PriorSpec,
    pub rho: f64,
    pub grid: GridSpec,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            r0s: vec![1.5, 3.0, 6.0],
            pis: vec![0.25, 0.5],
            prior: PriorSpec::Exponential { mean: 0.5 },
            rho: 0.5,
            grid: GridSpec::default(),
        }
    }
}

/// `τ_I ∈ [0, 3]` in steps of 0.01.
pub fn tau_sweep() -> Vec<f64> {
    (0..=300).map(|i| i as f64 / 100.0).collect()
}

/// Mean period in `[1, 14]` in steps of 0.1.
pub fn mean_sweep() -> Vec<f64> {
    (10..=140).map(|i| i as f64 / 10.0).collect()
}

/// `π` against `τ_I`, one column per `R0`.
pub fn fig1(r0s: &[f64]) -> Result<CsvTable> {
    let mut t = CsvTable::new(
        std::iter::once("tau_i".to_string()).chain(r0s.iter().map(|r| format!("pi_r0_{r}"))),
    );
    for tau in tau_sweep() {
        let mut row = vec![tau];
        for &r0 in r0s {
            row.push(major_outbreak_prob(r0, tau)?);
        }
        t.push(row)?;
    }
    Ok(t)
}

/// `π_k = 1 - (1 - π)^k` for `k = 1..=20`, one column per `π`.
pub fn fig2(pis: &[f64]) -> Result<CsvTable> {
    if let Some(&p) = pis.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::invalid("pi", p, "must lie in [0, 1]"));
    }
    let mut t = CsvTable::new(
        std::iter::once("k".to_string()).chain(pis.iter().map(|p| format!("pi_k_{p}"))),
    );
    for k in 1..=20u32 {
        let mut row = vec![f64::from(k)];
        row.extend(pis.iter().map(|&p| prob_k_from_pi(p, k)));
        t.push(row)?;
    }
    Ok(t)
}

/// Baseline for the growth-rate sweeps: `R0 = 2`, both means 7, both CVs 3/7.
pub fn fig3_defaults() -> GrowthParams {
    let period = GammaSpec::new(7.0, 3.0 / 7.0).expect("valid default period");
    GrowthParams {
        r0: 2.0,
        latent: period,
        infectious: period,
    }
}

/// Four one-at-a-time sweeps of the Malthusian parameter, keyed by the
/// swept column name (`mu_l`, `mu_i`, `tau_l`, `tau_i`).
pub fn fig3() -> Result<Vec<(&'static str, CsvTable)>> {
    let base = fig3_defaults();
    type Setter = fn(&mut GrowthParams, f64) -> Result<()>;
    let sweeps: [(&'static str, Vec<f64>, Setter); 4] = [
        ("mu_l", mean_sweep(), |p, v| {
            p.latent = GammaSpec::new(v, p.latent.cv())?;
            Ok(())
        }),
        ("mu_i", mean_sweep(), |p, v| {
            p.infectious = GammaSpec::new(v, p.infectious.cv())?;
            Ok(())
        }),
        ("tau_l", tau_sweep(), |p, v| {
            p.latent = GammaSpec::new(p.latent.mean(), v)?;
            Ok(())
        }),
        ("tau_i", tau_sweep(), |p, v| {
            p.infectious = GammaSpec::new(p.infectious.mean(), v)?;
            Ok(())
        }),
    ];
    sweeps
        .into_iter()
        .map(|(name, values, set)| {
            let mut t = CsvTable::new([name, "alpha"]);
            for v in values {
                let mut p = base;
                set(&mut p, v)?;
                t.push(vec![v, malthusian(&p)?])?;
            }
            Ok((name, t))
        })
        .collect()
}

/// Prior and posterior CDFs of `τ_I` and the posterior density.
pub fn fig5(prior: &PriorSpec, rho: f64, grid: &GridSpec) -> Result<CsvTable> {
    let g = tau_posterior(prior, rho, grid)?;
    let mut t = CsvTable::new(["tau", "prior_cdf", "posterior_cdf", "posterior_density"]);
    for (((tau, pc), qc), d) in g
        .tau_values
        .iter()
        .zip(g.prior_cdf())
        .zip(g.posterior_cdf())
        .zip(&g.posterior_density)
    {
        t.push(vec![*tau, pc, qc, *d])?;
    }
    Ok(t)
}

/// Tables for `figure`, each paired with its output file stem.
pub fn figure_tables(figure: Figure, opts: &FigureOptions) -> Result<Vec<(String, CsvTable)>> {
    Ok(match figure {
        Figure::Fig1 => vec![("fig1".into(), fig1(&opts.r0s)?)],
        Figure::Fig2 => vec![("fig2".into(), fig2(&opts.pis)?)],
        Figure::Fig3 => fig3()?
            .into_iter()
            .map(|(name, t)| (format!("fig3_{name}"), t))
            .collect(),
        Figure::Fig5 => vec![("fig5".into(), fig5(&opts.prior, opts.rho, &opts.grid)?)],
    })
}

/// Writes `<stem>.csv` files for `figure` into `dir` and returns their paths.
pub fn emit_figure_data(figure: Figure, opts: &FigureOptions, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    figure_tables(figure, opts)?
        .into_iter()
        .map(|(stem, t)| {
            let path = dir.join(format!("{stem}.csv"));
            t.write_path(&path)?;
            Ok(path)
        })
        .collect()
}
