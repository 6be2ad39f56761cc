//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each and exits non-zero if any failed.
//!
//! Pass a substring as the first non-flag argument to run a subset, e.g.
//! `cargo test --test acceptance -- determinism`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use epistoch::analytic::{
    euler_lotka_residual, major_outbreak_prob, malthusian, outbreak_prob_k, r0_from_growth,
    GrowthParams,
};
use epistoch::bayes::{posterior_mean, tau_posterior, GridSpec, PriorSpec};
use epistoch::distributions::offspring_pgf;
use epistoch::estimation::{
    growth_rate_from_simulation, growth_rate_window, mean, r0_uncertainty_table, IncidenceSeries,
    Interval, ParamIntervals,
};
use epistoch::io::figures::fig3;
use epistoch::simulator::{
    replicate, replicate_runs, simulate, simulate_branching, BranchingParams, Classification,
    EpidemicParams, ReplicateSummary, DEFAULT_BRANCHING_CAP,
};
use epistoch::GammaSpec;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn g(mean: f64, cv: f64) -> GammaSpec {
    GammaSpec::new(mean, cv).unwrap()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn binomial_se(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

fn c1_outbreak_anchors() -> Outcome {
    let cases = [
        (3.0, 0.0, 0.940, 1e-3),
        (1.5, 0.0, 0.583, 1e-3),
        (3.0, 1.0, 2.0 / 3.0, 1e-9),
    ];
    let mut detail = Vec::new();
    let mut ok = true;
    for (r0, tau, want, tol) in cases {
        let start = Instant::now();
        let pi = major_outbreak_prob(r0, tau).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ok &= (pi - want).abs() <= tol && took < Duration::from_millis(1);
        detail.push(format!("pi({r0},{tau}) = {pi:.10} in {took:?}"));
    }
    ensure(ok, detail.join("; "))
}

fn c2_monotonicity() -> Outcome {
    let start = Instant::now();
    let r0s: Vec<f64> = (0..50).map(|i| 0.5 + 0.1 * i as f64).collect();
    let taus: Vec<f64> = (0..31).map(|j| j as f64 / 10.0).collect();
    let grid: Vec<Vec<f64>> = r0s
        .iter()
        .map(|&r| {
            taus.iter()
                .map(|&t| major_outbreak_prob(r, t).unwrap())
                .collect()
        })
        .collect();
    let mut bad = 0;
    for i in 0..r0s.len() {
        for j in 0..taus.len() {
            if j > 0 && grid[i][j] > grid[i][j - 1] {
                bad += 1;
            }
            if i > 0 && grid[i][j] < grid[i - 1][j] {
                bad += 1;
            }
        }
    }
    let sweeps = fig3().map_err(|e| e.to_string())?;
    for (name, t) in &sweeps {
        let a = t.column("alpha").unwrap();
        let increasing = *name == "tau_l";
        bad += a
            .windows(2)
            .filter(|w| {
                if increasing {
                    w[1] <= w[0]
                } else {
                    w[1] >= w[0]
                }
            })
            .count();
    }
    let took = start.elapsed();
    ensure(
        bad == 0 && took < Duration::from_secs(5),
        format!("{bad} violations on 50x31 pi grid and 4 alpha sweeps, {took:.2?}"),
    )
}

fn c3_euler_lotka_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for r0 in [1.5, 2.0, 3.0] {
        for mu_l in [0.0, 3.0, 7.0] {
            for mu_i in [3.0, 7.0, 11.0] {
                for tau in [0.0, 3.0 / 7.0, 1.0] {
                    let p = GrowthParams::new(r0, g(mu_l, tau), g(mu_i, tau)).unwrap();
                    let alpha = malthusian(&p).map_err(|e| e.to_string())?;
                    let res = euler_lotka_residual(alpha, &p).map_err(|e| e.to_string())?;
                    worst = worst.max((res - 1.0).abs());
                    count += 1;
                }
            }
        }
    }
    let took = start.elapsed();
    ensure(
        count == 81 && worst <= 1e-8 && took < Duration::from_secs(30),
        format!("{count} combinations, max |residual - 1| = {worst:.2e}, {took:.2?}"),
    )
}

// (mu_l, mu_i, tau_l, tau_i, reference R0), tau entries in sevenths
const REFERENCE_R0_TABLE: [(f64, f64, f64, f64, f64); 16] = [
    (3.0, 3.0, 0.0, 0.0, 1.2903),
    (3.0, 3.0, 0.0, 4.0, 1.2935),
    (3.0, 3.0, 4.0, 0.0, 1.2897),
    (3.0, 3.0, 4.0, 4.0, 1.2930),
    (3.0, 11.0, 0.0, 0.0, 1.5528),
    (3.0, 11.0, 0.0, 4.0, 1.6468),
    (3.0, 11.0, 4.0, 0.0, 1.5521),
    (3.0, 11.0, 4.0, 4.0, 1.6461),
    (11.0, 3.0, 0.0, 0.0, 1.9674),
    (11.0, 3.0, 0.0, 4.0, 1.9724),
    (11.0, 3.0, 4.0, 0.0, 1.8834),
    (11.0, 3.0, 4.0, 4.0, 1.8881),
    (11.0, 11.0, 0.0, 0.0, 2.3677),
    (11.0, 11.0, 0.0, 4.0, 2.5111),
    (11.0, 11.0, 4.0, 0.0, 2.2666),
    (11.0, 11.0, 4.0, 4.0, 2.4039),
];

fn c4_table_reproduction() -> Outcome {
    let iv = |lo, hi| Interval::new(lo, hi).unwrap();
    let rows = r0_uncertainty_table(
        0.053,
        &ParamIntervals {
            mu_l: iv(3.0, 11.0),
            mu_i: iv(3.0, 11.0),
            tau_l: iv(0.0, 4.0 / 7.0),
            tau_i: iv(0.0, 4.0 / 7.0),
        },
    )
    .map_err(|e| e.to_string())?;
    let mut ok = rows.len() == 17;
    let mut worst = (0.0f64, 0usize);
    for (i, (row, printed)) in rows.iter().zip(REFERENCE_R0_TABLE).enumerate() {
        ok &= row.mu_l == printed.0
            && row.mu_i == printed.1
            && row.tau_l == printed.2 / 7.0
            && row.tau_i == printed.3 / 7.0;
        let rel = (row.r0 - printed.4).abs() / printed.4;
        if rel > worst.0 {
            worst = (rel, i);
        }
    }
    let mid = rows[16].r0;
    ok &= (mid - 1.747).abs() <= 1e-3 && worst.0 <= 0.025;
    let w = &rows[worst.1];
    ensure(
        ok,
        format!(
            "midpoint {mid:.6}; max corner deviation {:.2}% at (mu_l {}, mu_i {}, tau_l {:.4}, tau_i {:.4}): \
             computed {:.5} vs printed {:.4}. Note: corners are evaluated with the exact Laplace-transform \
             relation; the printed corners are reproduced only to a few percent while the midpoint matches",
            100.0 * worst.0,
            w.mu_l,
            w.mu_i,
            w.tau_l,
            w.tau_i,
            w.r0,
            REFERENCE_R0_TABLE[worst.1].4
        ),
    )
}

fn c5_branching_vs_analytic() -> Outcome {
    let start = Instant::now();
    let reps = 100_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for r0 in [1.5, 3.0] {
        for tau in [0.0, 1.0] {
            let bp = BranchingParams::new(1, r0, g(7.0, tau)).unwrap();
            let hits = (0..reps as u64)
                .into_par_iter()
                .filter(|&i| {
                    simulate_branching(&bp, 0xC5_0000_0000 ^ i, DEFAULT_BRANCHING_CAP)
                        .unwrap()
                        .reached_cap()
                })
                .count();
            let pi = major_outbreak_prob(r0, tau).unwrap();
            let se = binomial_se(pi, reps);
            let obs = hits as f64 / reps as f64;
            let z = (obs - pi) / se;
            ok &= z.abs() <= 3.0;
            detail.push(format!("({r0},{tau}): {obs:.5} vs {pi:.5} (z {z:+.2})"));
        }
    }
    let took = start.elapsed();
    ok &= took < Duration::from_secs(120);
    detail.push(format!("{took:.2?}"));
    ensure(ok, detail.join("; "))
}

fn finite_params(k: usize) -> EpidemicParams {
    EpidemicParams::new(20_000, k, 1.5, g(7.0, 3.0 / 7.0), g(7.0, 1.0)).unwrap()
}

fn c6_final_size() -> Outcome {
    let start = Instant::now();
    let s = replicate(&finite_params(1), 10_000, 0xC6).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    let target = 0.5828;
    ensure(
        (s.mean_major_final_fraction - target).abs() <= 0.01 && took < Duration::from_secs(180),
        format!(
            "mean major fraction {:.5} (se {:.1e}) over {} majors vs {target}; major fraction {:.4} \
             (pi = 1/3, z {:+.2}); {took:.2?}",
            s.mean_major_final_fraction,
            s.mean_major_final_fraction_se,
            s.majors,
            s.major_fraction,
            (s.major_fraction - 1.0 / 3.0) / binomial_se(1.0 / 3.0, s.reps),
        ),
    )
}

fn c7_k_seed_formula() -> Outcome {
    let s = replicate(&finite_params(3), 10_000, 0xC7).map_err(|e| e.to_string())?;
    let want = outbreak_prob_k(1.5, 1.0, 3).unwrap();
    let z = (s.major_fraction - want) / binomial_se(want, s.reps);
    ensure(
        z.abs() <= 3.0 && (want - (1.0 - (2.0f64 / 3.0).powi(3))).abs() < 1e-12,
        format!(
            "major fraction {:.5} vs {want:.5} (z {z:+.2})",
            s.major_fraction
        ),
    )
}

fn c8_growth_estimator() -> Outcome {
    let mut rng = rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64(0xC8);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let alpha = rng.random_range(0.005..0.5);
        let w = rng.random_range(1.0..500.0);
        let t0 = rng.random_range(0..40usize);
        let t1 = rng.random_range(t0 + 1..=60usize);
        let series = IncidenceSeries::from_cumulative(
            (0..61).map(|t| w * (alpha * t as f64).exp()).collect(),
        )
        .map_err(|e| e.to_string())?;
        let est = growth_rate_window(&series, t0, t1).map_err(|e| e.to_string())?;
        worst = worst.max((est - alpha).abs() / alpha);
    }
    let m = mean(&[0.071, 0.054, 0.034]);
    ensure(
        worst < 1e-12 && m == 0.053,
        format!(
            "100 random series, max relative error {worst:.2e}; mean of reported windows = {m}"
        ),
    )
}

fn c9_simulated_growth() -> Outcome {
    let start = Instant::now();
    let params =
        EpidemicParams::new(200_000, 5, 2.0, g(7.0, 3.0 / 7.0), g(7.0, 3.0 / 7.0)).unwrap();
    let analytic =
        malthusian(&GrowthParams::new(2.0, params.latent, params.infectious).unwrap()).unwrap();
    let needed = 200;
    let batch = 32;
    let mut estimates = Vec::with_capacity(needed);
    let mut next = 0u64;
    while estimates.len() < needed {
        let found: Vec<Option<f64>> = (next..next + batch)
            .into_par_iter()
            .map(|i| {
                let out = simulate(&params, 0xC9_0000 ^ i).unwrap();
                (out.classification == Classification::Major)
                    .then(|| growth_rate_from_simulation(&out, &params).unwrap())
            })
            .collect();
        estimates.extend(found.into_iter().flatten());
        next += batch;
    }
    estimates.truncate(needed);
    let est = mean(&estimates);
    let rel = (est - analytic).abs() / analytic;
    let took = start.elapsed();
    ensure(
        rel <= 0.10 && took < Duration::from_secs(180),
        format!(
            "mean regression estimate {est:.6} over {needed} majors ({next} runs) vs analytic {analytic:.6} \
             ({:.2}% off); {took:.2?}",
            100.0 * rel
        ),
    )
}

fn c10_posterior() -> Outcome {
    let g = tau_posterior(
        &PriorSpec::Exponential { mean: 0.5 },
        0.5,
        &GridSpec::default(),
    )
    .map_err(|e| e.to_string())?;
    let m = posterior_mean(&g).map_err(|e| e.to_string())?;
    let integral = g.posterior_integral();
    let dominated = g
        .posterior_cdf()
        .iter()
        .zip(g.prior_cdf())
        .filter(|(post, prior)| **post < prior - 1e-12)
        .count();
    ensure(
        (m - 0.384).abs() <= 0.01 && (integral - 1.0).abs() <= 1e-6 && dominated == 0,
        format!("posterior mean {m:.5}, integral {integral:.9}, {dominated} grid points where posterior cdf < prior cdf"),
    )
}

fn c11_degenerate_continuity() -> Outcome {
    let eps = 2e-8f64.sqrt();
    let mut worst = (0.0f64, String::new());
    let mut check = |what: String, a: f64, b: f64| {
        let rel = if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        };
        if rel > worst.0 {
            worst = (rel, what);
        }
    };
    for i in 0..50 {
        let r0 = 0.5 + 0.1 * i as f64;
        check(
            format!("pi r0={r0}"),
            major_outbreak_prob(r0, eps).unwrap(),
            major_outbreak_prob(r0, 0.0).unwrap(),
        );
        for k in [2, 5, 20] {
            check(
                format!("pi_k r0={r0} k={k}"),
                outbreak_prob_k(r0, eps, k).unwrap(),
                outbreak_prob_k(r0, 0.0, k).unwrap(),
            );
        }
        for s in [0.0, 0.25, 0.5, 0.75] {
            check(
                format!("pgf r0={r0} s={s}"),
                offspring_pgf(s, r0, eps).unwrap(),
                offspring_pgf(s, r0, 0.0).unwrap(),
            );
        }
    }
    for r0 in [1.5, 2.0, 3.0] {
        for mu_l in [0.0, 3.0, 7.0] {
            for mu_i in [3.0, 7.0, 11.0] {
                let exact = GrowthParams::new(r0, g(mu_l, 0.0), g(mu_i, 0.0)).unwrap();
                let alpha0 = malthusian(&exact).unwrap();
                for (tl, ti) in [(eps, 0.0), (0.0, eps), (eps, eps)] {
                    let near = GrowthParams::new(r0, g(mu_l, tl), g(mu_i, ti)).unwrap();
                    let tag = format!("r0={r0} mu_l={mu_l} mu_i={mu_i} tau=({tl:.1e},{ti:.1e})");
                    check(format!("alpha {tag}"), malthusian(&near).unwrap(), alpha0);
                    check(
                        format!("r0_from_growth {tag}"),
                        r0_from_growth(alpha0, &near.latent, &near.infectious).unwrap(),
                        r0_from_growth(alpha0, &exact.latent, &exact.infectious).unwrap(),
                    );
                    check(
                        format!("laplace {tag}"),
                        near.infectious.laplace_transform(alpha0).unwrap(),
                        exact.infectious.laplace_transform(alpha0).unwrap(),
                    );
                }
            }
        }
    }
    ensure(
        worst.0 <= 1e-6,
        format!("max relative gap {:.2e} ({})", worst.0, worst.1),
    )
}

fn summary_bits(s: &ReplicateSummary) -> [u64; 6] {
    [
        s.reps as u64,
        s.majors as u64,
        s.major_fraction.to_bits(),
        s.major_fraction_se.to_bits(),
        s.mean_major_final_fraction.to_bits(),
        s.mean_major_final_fraction_se.to_bits(),
    ]
}

fn c12_determinism() -> Outcome {
    let params = EpidemicParams::new(3_000, 10, 2.5, g(4.0, 0.6), g(6.0, 0.9)).unwrap();
    let pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };
    let run = |threads: usize| {
        pool(threads).install(|| {
            (
                simulate(&params, 2024).unwrap(),
                replicate_runs(&params, 300, 77).unwrap(),
                replicate(&params, 300, 77).unwrap(),
            )
        })
    };
    let (a_out, a_runs, a_sum) = run(1);
    let (b_out, b_runs, b_sum) = run(4);
    let same_events = a_out.events.len() == b_out.events.len()
        && a_out.events.iter().zip(&b_out.events).all(|(x, y)| {
            x.time.to_bits() == y.time.to_bits() && x.kind == y.kind && x.individual == y.individual
        });
    let ok = a_out == b_out
        && same_events
        && a_runs == b_runs
        && summary_bits(&a_sum) == summary_bits(&b_sum);
    ensure(
        ok,
        format!(
            "1 vs 4 threads: outcome ({} events) identical {}, {} replicate records identical {}, summary bits identical {}",
            a_out.events.len(),
            a_out == b_out && same_events,
            a_runs.len(),
            a_runs == b_runs,
            summary_bits(&a_sum) == summary_bits(&b_sum)
        ),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "outbreak probability anchors", c1_outbreak_anchors),
        (2, "monotonicity", c2_monotonicity),
        (3, "euler-lotka quadrature oracle", c3_euler_lotka_oracle),
        (4, "r0 table reproduction", c4_table_reproduction),
        (5, "branching takeoff vs analytic", c5_branching_vs_analytic),
        (6, "monte carlo final size", c6_final_size),
        (7, "k-seed formula", c7_k_seed_formula),
        (8, "growth-rate estimator exactness", c8_growth_estimator),
        (9, "simulated vs analytic growth", c9_simulated_growth),
        (10, "posterior anchor", c10_posterior),
        (11, "degenerate-limit continuity", c11_degenerate_continuity),
        (12, "determinism", c12_determinism),
    ];
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    let mut ran = 0;
    for (n, name, check) in criteria {
        if filter.as_deref().is_some_and(|f| !name.contains(f)) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {n:>2} PASS ({name}, {secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL ({name}, {secs:.1}s): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
