//! Trajectory simulation with explosion detection, return-time statistics and
//! empirical occupation measures.
//!
//! Randomness comes from ChaCha8, a counter-based generator: trajectory `k`
//! of a run seeded with `seed` uses stream `k` of the key derived from
//! `seed`, so every trajectory can be replayed in isolation and results do
//! not depend on the thread count.

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, Move};
use crate::classify::{classify_recurrence, Recurrence};
use crate::error::{input, Error, Result};
use crate::lattice::{states_up_to, State};
use crate::log_sum_exp;

/// Events in the explosion-detector window.
pub const EXPLOSION_WINDOW: usize = 1000;
const DETECTOR_STRIDE: u64 = 100;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub seed: u64,
    pub max_events: u64,
    pub max_time: f64,
    /// The trajectory is declared escaped once `S(xi)` exceeds this.
    pub norm_cap: u64,
    pub explosion_threshold: f64,
    /// Stop at the first return to the origin after leaving it.
    pub stop_at_origin: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            max_events: 10_000_000,
            max_time: f64::INFINITY,
            norm_cap: 10_000,
            explosion_threshold: 1e-6,
            stop_at_origin: true,
        }
    }
}

impl SimConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_events < 1 {
            return input("max_events must be at least 1");
        }
        if self.norm_cap < 1 {
            return input("norm_cap must be at least 1");
        }
        if !(self.max_time > 0.0) {
            return input("max_time must be positive");
        }
        if !(self.explosion_threshold > 0.0) {
            return input("explosion_threshold must be positive");
        }
        Ok(())
    }
}

/// The generator for trajectory `index` of a run seeded with `seed`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    ReturnedToOrigin,
    Escaped,
    ExplosionSuspected,
    EventBudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryOutcome {
    pub verdict: Verdict,
    pub elapsed_time: f64,
    pub events: u64,
    /// `sum 1/q` over the visited states of the embedded chain.
    pub inverse_rate_sum: f64,
    pub final_state: State,
}

/// Time spent in each state.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct OccupationHistogram {
    pub holding: BTreeMap<State, f64>,
    pub total_time: f64,
}

/// Exponential holding time with log-rate `log_q`, sampled as
/// `exp(ln(-ln U) - log_q)` so that rates far beyond `f64::MAX` work.
pub fn sample_holding<R: Rng + ?Sized>(log_q: f64, rng: &mut R) -> f64 {
    // U in (0, 1].
    let u = 1.0 - rng.random::<f64>();
    ((-u.ln()).ln() - log_q).exp()
}

fn choose_move<R: Rng + ?Sized>(moves: &[Move], log_q: f64, rng: &mut R) -> usize {
    let target = rng.random::<f64>();
    let mut acc = 0.0;
    for (k, m) in moves.iter().enumerate() {
        acc += (m.log_rate - log_q).exp();
        if target < acc {
            return k;
        }
    }
    moves.len() - 1
}

fn apply(s: &mut State, m: &Move) {
    if m.up {
        s.increment(m.vertex);
    } else {
        s.decrement(m.vertex);
    }
}

fn check_dim(chain: &Chain, s: &State) -> Result<()> {
    if s.dim() != chain.n() {
        return input(format!(
            "state has {} coordinates, graph has {} vertices",
            s.dim(),
            chain.n()
        ));
    }
    Ok(())
}

fn log_total(s: &State, moves: &[Move]) -> Result<f64> {
    let lq = log_sum_exp(moves.iter().map(|m| m.log_rate));
    if !lq.is_finite() {
        return Err(Error::Model(format!("total rate at {s:?} has log {lq}")));
    }
    Ok(lq)
}

/// One jump of the continuous-time chain: the next state and the holding
/// time spent in `s` before it.
pub fn step_ctmc<R: Rng + ?Sized>(chain: &Chain, s: &State, rng: &mut R) -> Result<(State, f64)> {
    check_dim(chain, s)?;
    let moves = chain.moves(s);
    let lq = log_total(s, &moves)?;
    let h = sample_holding(lq, rng);
    let k = choose_move(&moves, lq, rng);
    let mut next = s.clone();
    apply(&mut next, &moves[k]);
    Ok((next, h))
}

/// Rolling window of log-rates feeding the explosion heuristic.
struct ExplosionDetector {
    window: VecDeque<f64>,
    monotone_run: usize,
    log_threshold: f64,
}

impl ExplosionDetector {
    fn new(threshold: f64) -> Self {
        Self {
            window: VecDeque::with_capacity(EXPLOSION_WINDOW + 1),
            monotone_run: 0,
            log_threshold: threshold.ln(),
        }
    }

    fn push(&mut self, log_q: f64) {
        match self.window.back() {
            Some(&prev) if log_q >= prev => self.monotone_run += 1,
            Some(_) => self.monotone_run = 0,
            None => {}
        }
        self.window.push_back(log_q);
        if self.window.len() > EXPLOSION_WINDOW {
            self.window.pop_front();
        }
    }

    /// Log of the remaining-time bound, or `None` when the window is not
    /// full, not monotone, or not geometrically decaying.
    fn log_tail_bound(&self) -> Option<f64> {
        if self.window.len() < EXPLOSION_WINDOW || self.monotone_run + 1 < EXPLOSION_WINDOW {
            return None;
        }
        let half = EXPLOSION_WINDOW / 2;
        let first = log_sum_exp(self.window.iter().take(half).map(|l| -l));
        let last = log_sum_exp(self.window.iter().skip(half).map(|l| -l));
        let log_ratio = last - first;
        if !(log_ratio < 0.0) {
            return None;
        }
        // Remaining half-windows continue the observed ratio:
        // last * r / (1 - r).
        let extra = last + log_ratio - (-(log_ratio.exp_m1())).ln();
        Some(log_sum_exp([first, last, extra]))
    }

    fn flagged(&self) -> bool {
        self.log_tail_bound()
            .is_some_and(|t| t < self.log_threshold)
    }
}

/// Runs one trajectory from `start` until it returns to the origin, leaves
/// the level cap, trips the explosion detector or exhausts its budget.
pub fn run_trajectory<R: Rng + ?Sized>(
    chain: &Chain,
    start: &State,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<TrajectoryOutcome> {
    run_inner(chain, start, cfg, rng, None)
}

fn run_inner<R: Rng + ?Sized>(
    chain: &Chain,
    start: &State,
    cfg: &SimConfig,
    rng: &mut R,
    mut occupation: Option<&mut OccupationHistogram>,
) -> Result<TrajectoryOutcome> {
    cfg.validate()?;
    check_dim(chain, start)?;
    let mut state = start.clone();
    let mut level = state.level();
    let mut moves = Vec::with_capacity(2 * chain.n());
    let mut detector = ExplosionDetector::new(cfg.explosion_threshold);
    let mut elapsed = 0.0;
    let mut inverse_rate_sum = 0.0;
    let mut events = 0u64;

    let outcome = |verdict, elapsed, events, inverse_rate_sum, state: State| TrajectoryOutcome {
        verdict,
        elapsed_time: elapsed,
        events,
        inverse_rate_sum,
        final_state: state,
    };

    loop {
        if events >= cfg.max_events {
            return Ok(outcome(
                Verdict::EventBudgetExhausted,
                elapsed,
                events,
                inverse_rate_sum,
                state,
            ));
        }
        chain.moves_into(&state, &mut moves);
        let lq = log_total(&state, &moves)?;
        let h = sample_holding(lq, rng);
        if elapsed + h > cfg.max_time {
            if let Some(occ) = occupation.as_deref_mut() {
                let rest = cfg.max_time - elapsed;
                *occ.holding.entry(state.clone()).or_insert(0.0) += rest;
                occ.total_time += rest;
            }
            return Ok(outcome(
                Verdict::EventBudgetExhausted,
                cfg.max_time,
                events,
                inverse_rate_sum,
                state,
            ));
        }
        if let Some(occ) = occupation.as_deref_mut() {
            *occ.holding.entry(state.clone()).or_insert(0.0) += h;
            occ.total_time += h;
        }
        elapsed += h;
        inverse_rate_sum += (-lq).exp();
        detector.push(lq);
        let m = moves[choose_move(&moves, lq, rng)];
        apply(&mut state, &m);
        if m.up {
            level += 1;
        } else {
            level -= 1;
        }
        events += 1;

        if cfg.stop_at_origin && level == 0 {
            return Ok(outcome(
                Verdict::ReturnedToOrigin,
                elapsed,
                events,
                inverse_rate_sum,
                state,
            ));
        }
        if level > cfg.norm_cap {
            return Ok(outcome(
                Verdict::Escaped,
                elapsed,
                events,
                inverse_rate_sum,
                state,
            ));
        }
        if events.is_multiple_of(DETECTOR_STRIDE) && detector.flagged() {
            return Ok(outcome(
                Verdict::ExplosionSuspected,
                elapsed,
                events,
                inverse_rate_sum,
                state,
            ));
        }
    }
}

/// Runs `trials` independent trajectories in parallel; trajectory `k` uses
/// substream `k`. Output order is by trajectory index.
pub fn run_many(
    chain: &Chain,
    start: &State,
    cfg: &SimConfig,
    trials: u64,
) -> Result<Vec<TrajectoryOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(cfg.seed, k);
            run_trajectory(chain, start, cfg, &mut rng)
        })
        .collect()
}

/// Fraction of `outcomes` with the given verdict.
pub fn verdict_fraction(outcomes: &[TrajectoryOutcome], v: Verdict) -> f64 {
    if outcomes.is_empty() {
        return 0.0;
    }
    outcomes.iter().filter(|o| o.verdict == v).count() as f64 / outcomes.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnTimeStats {
    pub trials: u64,
    pub returned: u64,
    /// Trials that escaped, exploded or ran out of budget.
    pub censored: u64,
    pub censored_fraction: f64,
    pub escaped: u64,
    pub explosion_suspected: u64,
    pub budget_exhausted: u64,
    /// Mean and median over returned trials; `None` when nothing returned.
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

/// Return times to the origin for trajectories started at the origin.
pub fn return_time_stats(chain: &Chain, cfg: &SimConfig, trials: u64) -> Result<ReturnTimeStats> {
    let mut cfg = cfg.clone();
    cfg.stop_at_origin = true;
    let outcomes = run_many(chain, &State::origin(chain.n()), &cfg, trials)?;
    Ok(summarize_returns(&outcomes))
}

pub fn summarize_returns(outcomes: &[TrajectoryOutcome]) -> ReturnTimeStats {
    let count = |v| outcomes.iter().filter(|o| o.verdict == v).count() as u64;
    let mut times: Vec<f64> = outcomes
        .iter()
        .filter(|o| o.verdict == Verdict::ReturnedToOrigin)
        .map(|o| o.elapsed_time)
        .collect();
    times.sort_by(f64::total_cmp);
    let returned = times.len() as u64;
    let trials = outcomes.len() as u64;
    let mean = (!times.is_empty()).then(|| times.iter().sum::<f64>() / times.len() as f64);
    let median = (!times.is_empty()).then(|| {
        let m = times.len() / 2;
        if times.len() % 2 == 1 {
            times[m]
        } else {
            0.5 * (times[m - 1] + times[m])
        }
    });
    ReturnTimeStats {
        trials,
        returned,
        censored: trials - returned,
        censored_fraction: if trials == 0 {
            0.0
        } else {
            (trials - returned) as f64 / trials as f64
        },
        escaped: count(Verdict::Escaped),
        explosion_suspected: count(Verdict::ExplosionSuspected),
        budget_exhausted: count(Verdict::EventBudgetExhausted),
        mean,
        median,
    }
}

/// Time-weighted occupation of a single long run of `events` jumps
/// (`cfg.max_events` is overridden, `stop_at_origin` and the norm cap are
/// ignored).
pub fn occupation(
    chain: &Chain,
    start: &State,
    cfg: &SimConfig,
    events: u64,
) -> Result<OccupationHistogram> {
    check_dim(chain, start)?;
    let mut occ = OccupationHistogram::default();
    if events == 0 {
        return Ok(occ);
    }
    let cfg = SimConfig {
        max_events: events,
        stop_at_origin: false,
        norm_cap: u64::MAX,
        explosion_threshold: f64::MIN_POSITIVE,
        ..cfg.clone()
    };
    let mut rng = trajectory_rng(cfg.seed, 0);
    run_inner(chain, start, &cfg, &mut rng, Some(&mut occ))?;
    Ok(occ)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccupationComparison {
    pub level_cap: u32,
    pub events: u64,
    pub total_variation: f64,
    pub warning: Option<String>,
}

/// Total-variation distance between the time-averaged occupation restricted
/// to `{S <= level_cap}` and `exp(W)` normalized on the same set.
pub fn occupation_vs_invariant(
    chain: &Chain,
    start: &State,
    cfg: &SimConfig,
    level_cap: u32,
    events: u64,
) -> Result<OccupationComparison> {
    let warning = match classify_recurrence(chain.requested_params(), chain.graph()) {
        Ok(r) if r.class == Recurrence::PositiveRecurrent => None,
        Ok(r) => Some(format!(
            "parameters classify as {}; no stationary law exists",
            r.class.as_str()
        )),
        Err(e) => Some(format!("classification failed: {e}")),
    };
    let occ = occupation(chain, start, cfg, events)?;
    let tv = total_variation_to_invariant(chain, &occ, start, level_cap);
    Ok(OccupationComparison {
        level_cap,
        events,
        total_variation: tv,
        warning,
    })
}

/// TV distance between an occupation histogram (restricted to the level
/// ball) and the normalized invariant measure there. An empty histogram is
/// read as a point mass at `start`.
pub fn total_variation_to_invariant(
    chain: &Chain,
    occ: &OccupationHistogram,
    start: &State,
    level_cap: u32,
) -> f64 {
    let ball = states_up_to(chain.n(), level_cap);
    let logw: Vec<f64> = ball.iter().map(|s| chain.potential(s)).collect();
    let lz = log_sum_exp(logw.iter().copied());
    let inside: f64 = occ
        .holding
        .iter()
        .filter(|(s, _)| s.level() <= level_cap as u64)
        .map(|(_, t)| t)
        .sum();
    let mut tv = 0.0;
    for (s, lw) in ball.iter().zip(&logw) {
        let pi = (lw - lz).exp();
        let emp = if inside > 0.0 {
            occ.holding.get(s).copied().unwrap_or(0.0) / inside
        } else if s == start {
            1.0
        } else {
            0.0
        };
        tv += (pi - emp).abs();
    }
    0.5 * tv
}
