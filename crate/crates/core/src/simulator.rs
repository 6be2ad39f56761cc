//! Event-driven stochastic SEIR simulation.
//!
//! The finite-population simulator is exact in continuous time. Each
//! infective owns a private random stream from which it draws its infectious
//! period, then alternating exponential contact gaps and contact targets.
//! Latent periods come from a second per-individual stream. With that
//! layout, who-contacts-whom does not depend on event timing, so for a fixed
//! seed the set of ever-infected individuals is the same whatever the latent
//! period law.
//!
//! Individuals `0..k` are the initial infectives; they start infectious at
//! `t = 0` and have no infection or activation event in the log.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{check_infectious, final_size_fraction};
use crate::distributions::{check_r0, GammaSampler, GammaSpec};
use crate::error::{Error, Result};
use crate::rng::{self, SimRng};

const STREAM_INFECTIOUS: u64 = 1;
const STREAM_LATENT: u64 = 2;

/// Default fraction of `ρ*·n` separating minor from major outbreaks.
pub const MAJOR_THRESHOLD: f64 = 0.5;
/// Default total-population cap for the branching process.
pub const DEFAULT_BRANCHING_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpidemicParams {
    pub n: usize,
    pub k: usize,
    pub r0: f64,
    pub latent: GammaSpec,
    pub infectious: GammaSpec,
}

impl EpidemicParams {
    pub fn new(
        n: usize,
        k: usize,
        r0: f64,
        latent: GammaSpec,
        infectious: GammaSpec,
    ) -> Result<Self> {
        let p = Self {
            n,
            k,
            r0,
            latent,
            infectious,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > u32::MAX as usize {
            return Err(Error::invalid(
                "n",
                self.n as f64,
                "population must be in [2, 2^32)",
            ));
        }
        if self.k < 1 || self.k >= self.n {
            return Err(Error::invalid("k", self.k as f64, "need 1 <= k < n"));
        }
        check_r0(self.r0)?;
        check_infectious(&self.infectious)
    }

    /// Individual contact rate `λ = R0/μ_I`.
    pub fn contact_rate(&self) -> f64 {
        self.r0 / self.infectious.mean()
    }

    /// Rate at which a given infective contacts a given other individual.
    pub fn pair_rate(&self) -> f64 {
        self.contact_rate() / (self.n - 1) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Infection,
    Activation,
    Removal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub time: f64,
    pub kind: EventKind,
    pub individual: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Major,
    Minor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompartmentCounts {
    pub s: usize,
    pub e: usize,
    pub i: usize,
    pub r: usize,
}

impl CompartmentCounts {
    pub fn total(&self) -> usize {
        self.s + self.e + self.i + self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub time: f64,
    pub counts: CompartmentCounts,
}

/// One realized epidemic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    pub n: usize,
    pub k: usize,
    /// Number of infection events; the `k` initial infectives are not counted.
    pub final_size: usize,
    pub events: Vec<EventRecord>,
    pub classification: Classification,
}

impl SimOutcome {
    /// `T / n`.
    pub fn final_fraction(&self) -> f64 {
        self.final_size as f64 / self.n as f64
    }

    pub fn duration(&self) -> f64 {
        self.events.last().map_or(0.0, |e| e.time)
    }

    /// Step functions S, E, I, R: the initial state followed by the state
    /// just after each logged event.
    pub fn trajectory(&self) -> Vec<TrajectoryPoint> {
        let mut c = CompartmentCounts {
            s: self.n - self.k,
            e: 0,
            i: self.k,
            r: 0,
        };
        let mut out = Vec::with_capacity(self.events.len() + 1);
        out.push(TrajectoryPoint {
            time: 0.0,
            counts: c,
        });
        for ev in &self.events {
            match ev.kind {
                EventKind::Infection => {
                    c.s -= 1;
                    c.e += 1;
                }
                EventKind::Activation => {
                    c.e -= 1;
                    c.i += 1;
                }
                EventKind::Removal => {
                    c.i -= 1;
                    c.r += 1;
                }
            }
            out.push(TrajectoryPoint {
                time: ev.time,
                counts: c,
            });
        }
        out
    }

    /// Times of removal events, in order.
    pub fn removal_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Removal)
            .map(|e| e.time)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pending {
    Contact,
    Activation,
    Removal,
}

#[derive(Debug, Clone, Copy)]
struct QueuedEvent {
    time: f64,
    seq: u64,
    kind: Pending,
    individual: u32,
}

impl PartialEq for QueuedEvent {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueuedEvent {}

impl PartialOrd for QueuedEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Reversed so that BinaryHeap pops the earliest event; ties by insertion order.
impl Ord for QueuedEvent {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Susceptible,
    Exposed,
    Infectious,
    Removed,
}

struct Infective {
    rng: SimRng,
    removal_time: f64,
}

struct Engine<'a> {
    params: &'a EpidemicParams,
    seed: u64,
    latent: GammaSampler,
    infectious: GammaSampler,
    contact_rate: f64,
    status: Vec<Status>,
    infectives: Vec<Option<Infective>>,
    queue: BinaryHeap<QueuedEvent>,
    seq: u64,
    events: Vec<EventRecord>,
    counts: CompartmentCounts,
}

impl<'a> Engine<'a> {
    fn new(params: &'a EpidemicParams, seed: u64) -> Self {
        let n = params.n;
        let mut status = vec![Status::Susceptible; n];
        for s in status.iter_mut().take(params.k) {
            *s = Status::Infectious;
        }
        let mut infectives = Vec::with_capacity(n);
        infectives.resize_with(n, || None);
        Self {
            params,
            seed,
            latent: params.latent.sampler(),
            infectious: params.infectious.sampler(),
            contact_rate: params.contact_rate(),
            status,
            infectives,
            queue: BinaryHeap::new(),
            seq: 0,
            events: Vec::new(),
            counts: CompartmentCounts {
                s: n - params.k,
                e: 0,
                i: params.k,
                r: 0,
            },
        }
    }

    fn push(&mut self, time: f64, kind: Pending, individual: u32) {
        self.queue.push(QueuedEvent {
            time,
            seq: self.seq,
            kind,
            individual,
        });
        self.seq += 1;
    }

    fn log(&mut self, time: f64, kind: EventKind, individual: u32) {
        self.events.push(EventRecord {
            time,
            kind,
            individual,
        });
        debug_assert_eq!(self.counts.total(), self.params.n);
    }

    /// `id` starts its infectious period at `now`.
    fn start_infectious(&mut self, id: u32, now: f64) {
        let mut rng = rng::stream(self.seed, u64::from(id), STREAM_INFECTIOUS);
        let duration = self.infectious.sample(&mut rng);
        let removal_time = now + duration;
        self.push(removal_time, Pending::Removal, id);
        self.infectives[id as usize] = Some(Infective { rng, removal_time });
        self.schedule_contact(id, now);
    }

    fn schedule_contact(&mut self, id: u32, now: f64) {
        let inf = self.infectives[id as usize]
            .as_mut()
            .expect("contact from an active infective");
        let gap: f64 = Exp1.sample(&mut inf.rng);
        let t = now + gap / self.contact_rate;
        if t < inf.removal_time {
            self.push(t, Pending::Contact, id);
        }
    }

    fn contact(&mut self, id: u32, now: f64) {
        let n = self.params.n as u32;
        let inf = self.infectives[id as usize]
            .as_mut()
            .expect("contact from an active infective");
        let mut target = inf.rng.random_range(0..n - 1);
        if target >= id {
            target += 1;
        }
        if self.status[target as usize] == Status::Susceptible {
            self.status[target as usize] = Status::Exposed;
            self.counts.s -= 1;
            self.counts.e += 1;
            self.log(now, EventKind::Infection, target);
            let mut latent_rng = rng::stream(self.seed, u64::from(target), STREAM_LATENT);
            let latency = self.latent.sample(&mut latent_rng);
            self.push(now + latency, Pending::Activation, target);
        }
        self.schedule_contact(id, now);
    }

    fn run(mut self) -> (Vec<EventRecord>, usize) {
        for id in 0..self.params.k as u32 {
            self.start_infectious(id, 0.0);
        }
        let mut final_size = 0;
        while let Some(ev) = self.queue.pop() {
            match ev.kind {
                Pending::Contact => self.contact(ev.individual, ev.time),
                Pending::Activation => {
                    self.status[ev.individual as usize] = Status::Infectious;
                    self.counts.e -= 1;
                    self.counts.i += 1;
                    final_size += 1;
                    self.log(ev.time, EventKind::Activation, ev.individual);
                    self.start_infectious(ev.individual, ev.time);
                }
                Pending::Removal => {
                    self.status[ev.individual as usize] = Status::Removed;
                    self.counts.i -= 1;
                    self.counts.r += 1;
                    self.infectives[ev.individual as usize] = None;
                    self.log(ev.time, EventKind::Removal, ev.individual);
                }
            }
        }
        debug_assert_eq!(self.counts.e + self.counts.i, 0);
        (self.events, final_size)
    }
}

/// Simulates one epidemic to extinction.
pub fn simulate(params: &EpidemicParams, seed: u64) -> Result<SimOutcome> {
    params.validate()?;
    let (events, final_size) = Engine::new(params, seed).run();
    let classification = classify_final_size(final_size, params, MAJOR_THRESHOLD)?;
    Ok(SimOutcome {
        n: params.n,
        k: params.k,
        final_size,
        events,
        classification,
    })
}

/// Major iff `final_size >= 0.5·ρ*(R0)·n`; always minor when `R0 <= 1`.
pub fn classify_major(outcome: &SimOutcome, params: &EpidemicParams) -> Result<Classification> {
    classify_final_size(outcome.final_size, params, MAJOR_THRESHOLD)
}

/// As [`classify_major`] with the cut at `factor·ρ*·n`.
pub fn classify_with_threshold(
    outcome: &SimOutcome,
    params: &EpidemicParams,
    factor: f64,
) -> Result<Classification> {
    classify_final_size(outcome.final_size, params, factor)
}

/// Classifies a bare final size with the cut at `factor·ρ*·n`.
pub fn classify_final_size(
    final_size: usize,
    params: &EpidemicParams,
    factor: f64,
) -> Result<Classification> {
    let rho = final_size_fraction(params.r0)?;
    if rho == 0.0 || final_size == 0 {
        return Ok(Classification::Minor);
    }
    Ok(if final_size as f64 >= factor * rho * params.n as f64 {
        Classification::Major
    } else {
        Classification::Minor
    })
}

/// Infinite-population limit: only the offspring structure matters for
/// extinction, so latent periods are not needed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchingParams {
    pub k: usize,
    pub r0: f64,
    pub infectious: GammaSpec,
}

impl BranchingParams {
    pub fn new(k: usize, r0: f64, infectious: GammaSpec) -> Result<Self> {
        let p = Self { k, r0, infectious };
        if k == 0 {
            return Err(Error::invalid("k", 0.0, "need at least one ancestor"));
        }
        check_r0(r0)?;
        check_infectious(&infectious)?;
        Ok(p)
    }
}

impl From<&EpidemicParams> for BranchingParams {
    fn from(p: &EpidemicParams) -> Self {
        Self {
            k: p.k,
            r0: p.r0,
            infectious: p.infectious,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BranchingOutcome {
    /// Died out; `total` counts every individual ever born, ancestors included.
    Extinct { total: u64 },
    /// Total ever born reached the cap.
    ReachedCap { total: u64 },
}

impl BranchingOutcome {
    pub fn reached_cap(&self) -> bool {
        matches!(self, BranchingOutcome::ReachedCap { .. })
    }
}

/// Simulates the branching process started by `k` ancestors until extinction
/// or until the number of individuals ever born reaches `cap`.
///
/// Each individual has a Poisson number of children with mean `λ·I`.
/// Individuals are processed depth-first; total progeny, and so both the
/// extinction event and whether the cap is reached, does not depend on the
/// processing order.
pub fn simulate_branching(
    params: &BranchingParams,
    seed: u64,
    cap: u64,
) -> Result<BranchingOutcome> {
    if cap < 1000 {
        return Err(Error::invalid(
            "cap",
            cap as f64,
            "cap must be at least 1000",
        ));
    }
    BranchingParams::new(params.k, params.r0, params.infectious)?;
    let lambda = params.r0 / params.infectious.mean();
    let sampler = params.infectious.sampler();
    let mut rng = rng::from_seed(seed);
    let mut pending = params.k as u64;
    let mut total = params.k as u64;
    if total >= cap {
        return Ok(BranchingOutcome::ReachedCap { total });
    }
    while pending > 0 {
        pending -= 1;
        let mean = lambda * sampler.sample(&mut rng);
        let children = if mean > 0.0 {
            Poisson::new(mean)
                .expect("finite positive mean")
                .sample(&mut rng) as u64
        } else {
            0
        };
        total += children;
        pending += children;
        if total >= cap {
            return Ok(BranchingOutcome::ReachedCap { total });
        }
    }
    Ok(BranchingOutcome::Extinct { total })
}

/// Aggregate over independent replications.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicateSummary {
    pub reps: usize,
    pub majors: usize,
    pub major_fraction: f64,
    pub major_fraction_se: f64,
    /// Mean of `T/n` over major outbreaks; NaN when there were none.
    pub mean_major_final_fraction: f64,
    pub mean_major_final_fraction_se: f64,
}

/// Per-replication result kept by [`replicate_runs`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub index: usize,
    pub seed: u64,
    pub final_size: usize,
    pub classification: Classification,
}

/// Seed of replication `index`: `base_seed XOR index`.
pub fn replication_seed(base_seed: u64, index: usize) -> u64 {
    base_seed ^ index as u64
}

/// Runs `reps` simulations (in parallel) and returns them in index order.
pub fn replicate_runs(
    params: &EpidemicParams,
    reps: usize,
    base_seed: u64,
) -> Result<Vec<ReplicationRecord>> {
    params.validate()?;
    if reps == 0 {
        return Err(Error::invalid("reps", 0.0, "need at least one replication"));
    }
    (0..reps)
        .into_par_iter()
        .map(|index| {
            let seed = replication_seed(base_seed, index);
            let out = simulate(params, seed)?;
            Ok(ReplicationRecord {
                index,
                seed,
                final_size: out.final_size,
                classification: out.classification,
            })
        })
        .collect()
}

pub fn replicate(params: &EpidemicParams, reps: usize, base_seed: u64) -> Result<ReplicateSummary> {
    let runs = replicate_runs(params, reps, base_seed)?;
    Ok(summarize(&runs, params.n))
}

/// Aggregates in index order so the result does not depend on scheduling.
pub fn summarize(runs: &[ReplicationRecord], n: usize) -> ReplicateSummary {
    let reps = runs.len();
    let fractions: Vec<f64> = runs
        .iter()
        .filter(|r| r.classification == Classification::Major)
        .map(|r| r.final_size as f64 / n as f64)
        .collect();
    let majors = fractions.len();
    let p = majors as f64 / reps as f64;
    let (mean, se) = mean_and_se(&fractions);
    ReplicateSummary {
        reps,
        majors,
        major_fraction: p,
        major_fraction_se: (p * (1.0 - p) / reps as f64).sqrt(),
        mean_major_final_fraction: mean,
        mean_major_final_fraction_se: se,
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
