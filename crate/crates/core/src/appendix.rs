//! Two small experiments: the diagonal-before-axis hitting probability of a
//! planar simple random walk, and confinement of the hard-core walk on the
//! six-cycle.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, Params};
use crate::error::{input, Result};
use crate::graph::{Graph, GraphFamily};
use crate::lattice::State;
use crate::linalg::{solve_spd, CsrMatrix};
use crate::simulate::{step_ctmc, trajectory_rng};

/// Step guard for a single hitting walk; the exit time from the wedge has
/// finite mean, so this is never reached in practice.
const MAX_WALK_STEPS: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HittingEstimate {
    pub start_x: u32,
    pub trials: u64,
    pub hit_diagonal_first: u64,
    pub p_hat: f64,
    /// Binomial standard error `sqrt(p (1-p) / N)`.
    pub sigma: f64,
    /// `1.96 sigma + 1/(2N)`.
    pub ci95_halfwidth: f64,
}

/// Walk from `(x, 1)`; `true` when the diagonal is hit before `y = 0`.
fn hits_diagonal_first<R: Rng + ?Sized>(x: u32, rng: &mut R) -> bool {
    let (mut a, mut b) = (x as i64, 1i64);
    let mut steps = 0u64;
    while a != b && b != 0 && steps < MAX_WALK_STEPS {
        match rng.random_range(0..4u8) {
            0 => a += 1,
            1 => a -= 1,
            2 => b += 1,
            _ => b -= 1,
        }
        steps += 1;
    }
    a == b
}

/// Monte-Carlo estimate of the probability that the simple random walk on
/// `Z_+^2` started at `(x, 1)` hits `{X = Y}` before `{Y = 0}`.
pub fn lemma_p1_estimate(x: u32, trials: u64, seed: u64) -> Result<HittingEstimate> {
    if x < 1 {
        return input("x must be at least 1");
    }
    if trials < 1 {
        return input("trials must be positive");
    }
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(seed, k);
            hits_diagonal_first(x, &mut rng) as u64
        })
        .sum();
    let n = trials as f64;
    let p = hits as f64 / n;
    let sigma = (p * (1.0 - p) / n).sqrt();
    Ok(HittingEstimate {
        start_x: x,
        trials,
        hit_diagonal_first: hits,
        p_hat: p,
        sigma,
        ci95_halfwidth: 1.96 * sigma + 0.5 / n,
    })
}

/// The bounds `1/x <= p <= 2/(1+x)`.
pub fn lemma_p1_bounds(x: u32) -> (f64, f64) {
    (1.0 / x as f64, 2.0 / (1.0 + x as f64))
}

/// Harmonic solve on the triangle `{0 <= y <= x' <= cap}` with value 1 on
/// the diagonal, 0 on `y = 0`, and a reflecting column at `x' = cap`.
pub fn lemma_p1_harmonic(x: u32, cap: u32) -> Result<f64> {
    if x < 1 {
        return input("x must be at least 1");
    }
    if x == 1 {
        return Ok(1.0);
    }
    if cap < x + 1 {
        return input("grid cap must exceed x");
    }
    // Unknowns (a, b) with 1 <= b < a <= cap.
    let idx = |a: u32, b: u32| -> usize {
        // Column a holds b = 1..a-1; columns before a hold sum_{c=2}^{a-1} (c-1).
        let before = ((a - 1) * (a - 2) / 2) as usize;
        before + (b - 1) as usize
    };
    let m = idx(cap, cap - 1) + 1;
    let mut trip = Vec::with_capacity(5 * m);
    let mut rhs = vec![0.0; m];
    for a in 2..=cap {
        for b in 1..a {
            let k = idx(a, b);
            let mut diag = 4.0;
            let neighbours = [
                (a as i64 + 1, b as i64),
                (a as i64 - 1, b as i64),
                (a as i64, b as i64 + 1),
                (a as i64, b as i64 - 1),
            ];
            for (na, nb) in neighbours {
                if na > cap as i64 {
                    // Rejected step: the walk stays put.
                    diag -= 1.0;
                } else if na == nb {
                    rhs[k] += 1.0;
                } else if nb > 0 {
                    trip.push((k, idx(na as u32, nb as u32), -1.0));
                }
            }
            trip.push((k, k, diag));
        }
    }
    let a = CsrMatrix::from_triplets(m, trip);
    let sol = solve_spd(&a, &rhs, 1e-13)?;
    Ok(sol.x[idx(x, 1)])
}

/// Order of the leading truncation error in the cap.
pub const RICHARDSON_ORDER: i32 = 4;

/// Extrapolated hitting probability from the harmonic solves at `grid_cap`
/// and `2 * grid_cap`.
pub fn lemma_p1_exact(x: u32, grid_cap: u32) -> Result<f64> {
    if x < 1 {
        return input("x must be at least 1");
    }
    if grid_cap < 4 * x {
        return input(format!("grid cap {grid_cap} is below 4x = {}", 4 * x));
    }
    if x == 1 {
        return Ok(1.0);
    }
    let coarse = lemma_p1_harmonic(x, grid_cap)?;
    let fine = lemma_p1_harmonic(x, 2 * grid_cap)?;
    let w = 2f64.powi(RICHARDSON_ORDER);
    Ok((w * fine - coarse) / (w - 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementReport {
    pub horizon_events: u64,
    pub trials: u64,
    /// Per trial, arrivals on each axis line `{x_i = 0 unless i = k}`.
    pub line_visits: Vec<[u64; 6]>,
    pub mean_line_visits: f64,
    /// Trials whose last half of events stayed in one of the two
    /// three-vertex hulls (even or odd vertices plus their crossing planes).
    pub confined: u64,
    pub fraction_confined: f64,
    pub ci95_halfwidth: f64,
    /// States ever seen with two adjacent positive coordinates.
    pub support_violations: u64,
}

/// Number of positive coordinates among vertices of the given parity.
fn positive_of_parity(s: &State, parity: usize) -> usize {
    s.coords()
        .iter()
        .enumerate()
        .filter(|&(i, &x)| i % 2 == parity && x > 0)
        .count()
}

/// Which hulls contain `s`: bit 0 for the even hull, bit 1 for the odd one.
/// A state of the support leaves the even hull iff at least two odd vertices
/// are positive, and symmetrically.
fn hull_mask(s: &State) -> u8 {
    let mut m = 0;
    if positive_of_parity(s, 1) < 2 {
        m |= 1;
    }
    if positive_of_parity(s, 0) < 2 {
        m |= 2;
    }
    m
}

fn axis_of(s: &State) -> Option<usize> {
    let mut on = None;
    for (i, &x) in s.coords().iter().enumerate() {
        if x > 0 {
            if on.is_some() {
                return None;
            }
            on = Some(i);
        }
    }
    on
}

/// Runs `trials` hard-core simple walks on the six-cycle from the origin
/// for `horizon` events each.
pub fn c6_confinement(horizon: u64, trials: u64, seed: u64) -> Result<ConfinementReport> {
    let chain = Chain::new(
        Params::hard_core(0.0)?,
        Graph::named(GraphFamily::Cycle(6))?,
    );
    let per: Vec<([u64; 6], bool, u64)> = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let mut rng = trajectory_rng(seed, k);
            let mut s = State::origin(6);
            let mut visits = [0u64; 6];
            let mut violations = 0u64;
            let mut tail_mask = 3u8;
            let tail_start = horizon - horizon / 2;
            for ev in 0..horizon {
                let (next, _) = step_ctmc(&chain, &s, &mut rng)?;
                if let Some(k) = axis_of(&next) {
                    if axis_of(&s) != Some(k) {
                        visits[k] += 1;
                    }
                }
                if !chain.in_hard_core_support(&next) {
                    violations += 1;
                }
                s = next;
                if ev >= tail_start {
                    tail_mask &= hull_mask(&s);
                }
            }
            Ok((visits, tail_mask != 0, violations))
        })
        .collect::<Result<_>>()?;
    let confined = per.iter().filter(|p| p.1).count() as u64;
    let n = trials.max(1) as f64;
    let frac = if trials == 0 {
        1.0
    } else {
        confined as f64 / n
    };
    let total_visits: u64 = per.iter().map(|p| p.0.iter().sum::<u64>()).sum();
    Ok(ConfinementReport {
        horizon_events: horizon,
        trials,
        mean_line_visits: total_visits as f64 / n,
        line_visits: per.iter().map(|p| p.0).collect(),
        confined,
        fraction_confined: frac,
        ci95_halfwidth: 1.96 * (frac * (1.0 - frac) / n).sqrt() + 0.5 / n,
        support_violations: per.iter().map(|p| p.2).sum(),
    })
}
