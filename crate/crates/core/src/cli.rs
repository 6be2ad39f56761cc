//! Command-line front end. Every subcommand is a thin wrapper over one
//! library call; results go to stdout with at least ten significant digits
//! and, with `--out`, to CSV at full precision.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analytic::{
    critical_vaccination_coverage, final_size_fraction, major_outbreak_prob, malthusian,
    outbreak_prob_k, r0_from_final_size, r0_from_growth, GrowthParams,
};
use crate::bayes::{posterior_mean, tau_posterior, GridSpec, PriorSpec};
use crate::distributions::GammaSpec;
use crate::error::{Error, Result};
use crate::estimation::{
    growth_rate_mean, growth_rate_window, r0_uncertainty_table, Interval, ParamIntervals,
};
use crate::io::figures::{emit_figure_data, Figure, FigureOptions};
use crate::io::{format_number, parse_incidence_csv, CsvTable, RunConfig};
use crate::simulator::{replicate_runs, simulate, summarize};

#[derive(Debug, Parser)]
#[command(
    name = "epistoch",
    version,
    about = "Stochastic SEIR epidemic calculations"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forward analytic quantities
    #[command(subcommand)]
    Solve(Solve),
    /// Estimate R0 from an observed quantity
    #[command(subcommand)]
    Invert(Invert),
    /// Critical vaccination coverage
    Vc {
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        efficacy: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Run one stochastic epidemic
    Simulate(ConfigArgs),
    /// Run independent replications and summarize
    Replicate(ConfigArgs),
    /// Estimate quantities from data
    #[command(subcommand)]
    Estimate(Estimate),
    /// R0 over the corners of interval-valued period parameters
    R0Table {
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, value_parser = parse_interval)]
        mu_l: Interval,
        #[arg(long, value_parser = parse_interval)]
        mu_i: Interval,
        #[arg(long, value_parser = parse_interval)]
        tau_l: Interval,
        #[arg(long, value_parser = parse_interval)]
        tau_i: Interval,
        #[command(flatten)]
        out: Out,
    },
    /// Posterior of the infectious-period CV given an observed final size
    Posterior {
        /// `exp:<mean>` or `csv:<path>` with columns tau,density
        #[arg(long)]
        prior: String,
        #[arg(long)]
        rho: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
        #[arg(long, default_value_t = 5.0)]
        tau_max: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Write figure data as CSV
    Figures {
        /// Comma-separated subset of fig1,fig2,fig3,fig5
        #[arg(long, value_delimiter = ',', default_value = "fig1,fig2,fig3,fig5")]
        which: Vec<Figure>,
        /// R0 values for fig1
        #[arg(long, value_delimiter = ',', default_value = "1.5,3,6")]
        r0s: Vec<f64>,
        /// Output directory
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Solve {
    /// Asymptotic final fraction infected in a major outbreak
    FinalSize {
        #[arg(long)]
        r0: f64,
        #[command(flatten)]
        out: Out,
    },
    /// Probability of a major outbreak
    OutbreakProb {
        #[arg(long)]
        r0: f64,
        #[arg(long)]
        tau_i: f64,
        /// Number of initial infectives
        #[arg(long, default_value_t = 1)]
        k: u32,
        #[command(flatten)]
        out: Out,
    },
    /// Malthusian growth rate
    Malthusian {
        #[arg(long)]
        r0: f64,
        #[command(flatten)]
        periods: Periods,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Subcommand)]
pub enum Invert {
    /// R0 from the epidemic growth rate
    R0FromGrowth {
        #[arg(long)]
        alpha: f64,
        #[command(flatten)]
        periods: Periods,
        #[command(flatten)]
        out: Out,
    },
    /// R0 from the final fraction infected
    R0FromFinalSize {
        #[arg(long)]
        rho: f64,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Subcommand)]
pub enum Estimate {
    /// Growth rate from cumulative incidence over one or more windows
    Growth {
        #[arg(long)]
        csv: PathBuf,
        /// `t0:t1`, repeatable
        #[arg(long = "window", value_parser = parse_window, required = true)]
        windows: Vec<(usize, usize)>,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Debug, Args)]
pub struct Periods {
    #[arg(long)]
    pub mu_l: f64,
    #[arg(long)]
    pub mu_i: f64,
    #[arg(long)]
    pub tau_l: f64,
    #[arg(long)]
    pub tau_i: f64,
}

impl Periods {
    fn specs(&self) -> Result<(GammaSpec, GammaSpec)> {
        Ok((
            GammaSpec::new(self.mu_l, self.tau_l)?,
            GammaSpec::new(self.mu_i, self.tau_i)?,
        ))
    }
}

#[derive(Debug, Args)]
pub struct ConfigArgs {
    /// JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    #[command(flatten)]
    pub out: Out,
}

#[derive(Debug, Args)]
pub struct Out {
    /// Also write the result as CSV
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_interval(s: &str) -> std::result::Result<Interval, String> {
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let iv = match s.split_once(':') {
        Some((lo, hi)) => Interval::new(parse(lo)?, parse(hi)?),
        None => Interval::point(parse(s)?),
    };
    iv.map_err(|e| e.to_string())
}

fn parse_window(s: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected t0:t1, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(a)?, parse(b)?))
}

fn parse_prior(s: &str) -> Result<PriorSpec> {
    let prior = match s.split_once(':') {
        Some(("exp", mean)) => PriorSpec::Exponential {
            mean: mean
                .trim()
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad prior mean `{mean}`")))?,
        },
        Some(("csv", path)) => {
            let t = CsvTable::read_path(Path::new(path))?;
            let (tau, density) = t.column("tau").zip(t.column("density")).ok_or_else(|| {
                Error::InvalidInput("prior table needs columns tau,density".into())
            })?;
            PriorSpec::Tabulated(tau.into_iter().zip(density).collect())
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "prior must be `exp:<mean>` or `csv:<path>`, got `{s}`"
            )))
        }
    };
    prior.validate()?;
    Ok(prior)
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = std::io::stdout();
    match execute(cli.command, &mut stdout.lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn scalar<W: Write>(
    w: &mut W,
    out: &Out,
    headers: &[&str],
    inputs: &[f64],
    value: f64,
) -> Result<()> {
    writeln!(w, "{}", format_number(value))?;
    if let Some(path) = &out.out {
        let mut t = CsvTable::new(headers.iter().copied());
        let mut row = inputs.to_vec();
        row.push(value);
        t.push(row)?;
        t.write_path(path)?;
    }
    Ok(())
}

fn print_table<W: Write>(w: &mut W, t: &CsvTable) -> Result<()> {
    writeln!(w, "{}", t.headers.join(","))?;
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| format_number(*v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

fn table<W: Write>(w: &mut W, out: &Out, t: &CsvTable) -> Result<()> {
    print_table(w, t)?;
    if let Some(path) = &out.out {
        t.write_path(path)?;
    }
    Ok(())
}

pub fn execute<W: Write>(command: Command, w: &mut W) -> Result<()> {
    match command {
        Command::Solve(Solve::FinalSize { r0, out }) => scalar(
            w,
            &out,
            &["r0", "final_size"],
            &[r0],
            final_size_fraction(r0)?,
        ),
        Command::Solve(Solve::OutbreakProb { r0, tau_i, k, out }) => {
            let p = if k == 1 {
                major_outbreak_prob(r0, tau_i)?
            } else {
                outbreak_prob_k(r0, tau_i, k)?
            };
            scalar(
                w,
                &out,
                &["r0", "tau_i", "k", "outbreak_prob"],
                &[r0, tau_i, f64::from(k)],
                p,
            )
        }
        Command::Solve(Solve::Malthusian { r0, periods, out }) => {
            let (latent, infectious) = periods.specs()?;
            let alpha = malthusian(&GrowthParams::new(r0, latent, infectious)?)?;
            scalar(
                w,
                &out,
                &["r0", "mu_l", "mu_i", "tau_l", "tau_i", "alpha"],
                &[r0, periods.mu_l, periods.mu_i, periods.tau_l, periods.tau_i],
                alpha,
            )
        }
        Command::Invert(Invert::R0FromGrowth {
            alpha,
            periods,
            out,
        }) => {
            let (latent, infectious) = periods.specs()?;
            scalar(
                w,
                &out,
                &["alpha", "mu_l", "mu_i", "tau_l", "tau_i", "r0"],
                &[
                    alpha,
                    periods.mu_l,
                    periods.mu_i,
                    periods.tau_l,
                    periods.tau_i,
                ],
                r0_from_growth(alpha, &latent, &infectious)?,
            )
        }
        Command::Invert(Invert::R0FromFinalSize { rho, out }) => {
            scalar(w, &out, &["rho", "r0"], &[rho], r0_from_final_size(rho)?)
        }
        Command::Vc { r0, efficacy, out } => {
            let vc = critical_vaccination_coverage(r0, efficacy)?;
            if !vc.is_attainable() {
                eprintln!("note: coverage above 1 is required; elimination by vaccination alone is unattainable");
            }
            scalar(
                w,
                &out,
                &["r0", "efficacy", "coverage"],
                &[r0, efficacy],
                vc.value(),
            )
        }
        Command::Simulate(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let outcome = simulate(&cfg.params()?, cfg.seed)?;
            writeln!(w, "seed {}", cfg.seed)?;
            writeln!(w, "final_size {}", outcome.final_size)?;
            writeln!(
                w,
                "final_fraction {}",
                format_number(outcome.final_fraction())
            )?;
            writeln!(w, "duration {}", format_number(outcome.duration()))?;
            writeln!(
                w,
                "classification {}",
                classification_name(outcome.classification)
            )?;
            if let Some(path) = args.out.out.or(cfg.out) {
                let mut csv = csv::Writer::from_path(path)?;
                for ev in &outcome.events {
                    csv.serialize(ev)?;
                }
                csv.flush()?;
            }
            Ok(())
        }
        Command::Replicate(args) => {
            let cfg = RunConfig::load(&args.config)?;
            let params = cfg.params()?;
            let runs = replicate_runs(&params, cfg.replications, cfg.seed)?;
            let s = summarize(&runs, params.n);
            writeln!(w, "reps {}", s.reps)?;
            writeln!(w, "majors {}", s.majors)?;
            writeln!(w, "major_fraction {}", format_number(s.major_fraction))?;
            writeln!(
                w,
                "major_fraction_se {}",
                format_number(s.major_fraction_se)
            )?;
            writeln!(
                w,
                "mean_major_final_fraction {}",
                format_number(s.mean_major_final_fraction)
            )?;
            writeln!(
                w,
                "mean_major_final_fraction_se {}",
                format_number(s.mean_major_final_fraction_se)
            )?;
            if let Some(path) = args.out.out.or(cfg.out) {
                let mut csv = csv::Writer::from_path(path)?;
                for r in &runs {
                    csv.serialize(r)?;
                }
                csv.flush()?;
            }
            Ok(())
        }
        Command::Estimate(Estimate::Growth { csv, windows, out }) => {
            let series = parse_incidence_csv(&csv)?;
            let mut t = CsvTable::new(["t0", "t1", "alpha"]);
            for &(t0, t1) in &windows {
                t.push(vec![
                    t0 as f64,
                    t1 as f64,
                    growth_rate_window(&series, t0, t1)?,
                ])?;
            }
            table(w, &out, &t)?;
            writeln!(
                w,
                "mean {}",
                format_number(growth_rate_mean(&series, &windows)?)
            )?;
            Ok(())
        }
        Command::R0Table {
            alpha,
            mu_l,
            mu_i,
            tau_l,
            tau_i,
            out,
        } => {
            let rows = r0_uncertainty_table(
                alpha,
                &ParamIntervals {
                    mu_l,
                    mu_i,
                    tau_l,
                    tau_i,
                },
            )?;
            let mut t = CsvTable::new(["mu_l", "mu_i", "tau_l", "tau_i", "r0", "midpoint"]);
            for r in rows {
                t.push(vec![
                    r.mu_l,
                    r.mu_i,
                    r.tau_l,
                    r.tau_i,
                    r.r0,
                    f64::from(u8::from(r.midpoint)),
                ])?;
            }
            table(w, &out, &t)
        }
        Command::Posterior {
            prior,
            rho,
            step,
            tau_max,
            out,
        } => {
            let prior = parse_prior(&prior)?;
            let g = tau_posterior(&prior, rho, &GridSpec { step, tau_max })?;
            writeln!(w, "r0_hat {}", format_number(r0_from_final_size(rho)?))?;
            writeln!(w, "posterior_mean {}", format_number(posterior_mean(&g)?))?;
            writeln!(
                w,
                "normalization_constant {}",
                format_number(g.normalization_constant)
            )?;
            if let Some(path) = &out.out {
                let t = crate::io::figures::fig5(&prior, rho, &GridSpec { step, tau_max })?;
                t.write_path(path)?;
            }
            Ok(())
        }
        Command::Figures { which, r0s, out } => {
            let opts = FigureOptions {
                r0s,
                ..FigureOptions::default()
            };
            for fig in which {
                for path in emit_figure_data(fig, &opts, &out)? {
                    writeln!(w, "{}", path.display())?;
                }
            }
            Ok(())
        }
    }
}

fn classification_name(c: crate::simulator::Classification) -> &'static str {
    match c {
        crate::simulator::Classification::Major => "major",
        crate::simulator::Classification::Minor => "minor",
    }
}
