//! Rates, the reversible measure `mu(xi) = exp(W(xi))`, conductances and
//! truncated partition sums.
//!
//! Every exponent that appears in the model is an integer combination
//! `a * alpha + b * beta`; [`Exponent`] keeps the two integer coefficients so
//! that identities such as detailed balance can be checked exactly and the
//! hard-core convention `0 * inf = 0` is applied structurally rather than
//! through floating-point infinities.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{capability, input, Error, Result};
use crate::graph::Graph;
use crate::lattice::{count_states_up_to, level_states, State};
use crate::LogAccumulator;

/// Relative tolerance for deciding that `alpha + beta * lambda` is zero.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Largest truncated state space the exhaustive sums accept.
pub const MAX_TRUNCATED_STATES: u128 = 10_000_000;

/// The interaction parameter: a real number or the hard-core limit `-inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    HardCore,
}

impl Beta {
    pub fn finite(&self) -> Option<f64> {
        match self {
            Beta::Finite(b) => Some(*b),
            Beta::HardCore => None,
        }
    }

    pub fn is_hard_core(&self) -> bool {
        matches!(self, Beta::HardCore)
    }

    /// Sign of beta, treating the hard-core limit as negative.
    pub fn signum(&self) -> i8 {
        match self {
            Beta::HardCore => -1,
            Beta::Finite(b) if *b < 0.0 => -1,
            Beta::Finite(b) if *b > 0.0 => 1,
            Beta::Finite(_) => 0,
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::Finite(b) => write!(f, "{b}"),
            Beta::HardCore => f.write_str("-inf"),
        }
    }
}

impl std::str::FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("-inf") || t.eq_ignore_ascii_case("-infinity") {
            return Ok(Beta::HardCore);
        }
        match t.parse::<f64>() {
            Ok(b) if b.is_finite() => Ok(Beta::Finite(b)),
            _ => input(format!("beta must be a finite number or `-inf`, got `{s}`")),
        }
    }
}

impl Serialize for Beta {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Beta::Finite(b) => s.serialize_f64(*b),
            Beta::HardCore => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(b) if b.is_finite() => Ok(Beta::Finite(b)),
            Raw::Num(_) => Err(serde::de::Error::custom("beta must be finite or \"-inf\"")),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Which rate family the chain uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Up-rate `exp(alpha xi_i + beta (A xi)_i)`, down-rate 1.
    #[default]
    Standard,
    /// Up-rate `exp(alpha xi_i)`, down-rate `exp(-beta (A xi)_i)`.
    Modified,
}

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ParamsDoc")]
pub struct Params {
    pub alpha: f64,
    pub beta: Beta,
    pub variant: Variant,
}

#[derive(Deserialize)]
struct ParamsDoc {
    alpha: f64,
    beta: Beta,
    #[serde(default)]
    variant: Variant,
}

impl TryFrom<ParamsDoc> for Params {
    type Error = Error;

    fn try_from(d: ParamsDoc) -> Result<Self> {
        Params::new(d.alpha, d.beta, d.variant)
    }
}

impl Params {
    pub fn new(alpha: f64, beta: Beta, variant: Variant) -> Result<Self> {
        if !alpha.is_finite() {
            return input("alpha must be finite");
        }
        if let Beta::Finite(b) = beta {
            if !b.is_finite() {
                return input("finite beta must be a finite number");
            }
        }
        if variant == Variant::Modified && beta.is_hard_core() {
            return input("the modified chain is undefined for beta = -inf");
        }
        Ok(Self {
            alpha,
            beta,
            variant,
        })
    }

    pub fn standard(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, Beta::Finite(beta), Variant::Standard)
    }

    pub fn modified(alpha: f64, beta: f64) -> Result<Self> {
        Self::new(alpha, Beta::Finite(beta), Variant::Modified)
    }

    pub fn hard_core(alpha: f64) -> Result<Self> {
        Self::new(alpha, Beta::HardCore, Variant::Standard)
    }

    /// Parses the JSON parameter document.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("parameter document: {e}")))
    }
}

/// `alpha * self.alpha + beta * self.beta` with integer coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Exponent {
    pub alpha: i64,
    pub beta: i64,
}

impl std::ops::Add for Exponent {
    type Output = Exponent;
    fn add(self, o: Exponent) -> Exponent {
        Exponent {
            alpha: self.alpha + o.alpha,
            beta: self.beta + o.beta,
        }
    }
}

impl std::ops::Sub for Exponent {
    type Output = Exponent;
    fn sub(self, o: Exponent) -> Exponent {
        Exponent {
            alpha: self.alpha - o.alpha,
            beta: self.beta - o.beta,
        }
    }
}

/// Sign of the critical combination `alpha + beta * lambda1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalSign {
    Negative,
    /// Zero to within the certified boundary tolerance.
    Boundary,
    Positive,
}

/// Exact finiteness of the total mass, or `Undetermined` when the certified
/// eigenvalue enclosure straddles the boundary tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FiniteFlag {
    Finite,
    Infinite,
    Undetermined,
}

/// Truncated masses of the CTMC measure `exp(W)` and of the jump-chain
/// measure `C_xi`, summed over `{S(xi) <= level_cap}` in log space.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub level_cap: u32,
    pub log_partial_mass: f64,
    pub partial_mass: f64,
    /// Natural log of the cumulative mass after each level `0..=level_cap`.
    pub log_partial_mass_by_level: Vec<f64>,
    pub log_dtmc_partial_mass: f64,
    pub dtmc_partial_mass: f64,
    pub finite_flag: FiniteFlag,
}

/// One possible jump out of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub vertex: usize,
    pub up: bool,
    pub log_rate: f64,
}

/// The lattice chain for one graph and one parameter set.
///
/// On edgeless graphs beta is irrelevant and is normalized to zero.
#[derive(Debug, Clone)]
pub struct Chain {
    requested: Params,
    params: Params,
    graph: Graph,
}

impl Chain {
    pub fn new(params: Params, graph: Graph) -> Self {
        let mut effective = params;
        if graph.edge_count() == 0 {
            effective.beta = Beta::Finite(0.0);
        }
        Self {
            requested: params,
            params: effective,
            graph,
        }
    }

    /// Parameters after normalization (beta = 0 on edgeless graphs).
    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Parameters as supplied by the caller.
    pub fn requested_params(&self) -> &Params {
        &self.requested
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn alpha(&self) -> f64 {
        self.params.alpha
    }

    pub fn is_hard_core(&self) -> bool {
        self.params.beta.is_hard_core()
    }

    /// Evaluates an exponent; a positive interaction count under the
    /// hard-core law gives `-inf`, a zero count contributes nothing.
    pub fn eval(&self, e: Exponent) -> f64 {
        let a = self.params.alpha * e.alpha as f64;
        match self.params.beta {
            Beta::Finite(b) => a + b * e.beta as f64,
            Beta::HardCore if e.beta > 0 => f64::NEG_INFINITY,
            Beta::HardCore if e.beta < 0 => f64::INFINITY,
            Beta::HardCore => a,
        }
    }

    /// Membership in the hard-core support: no two adjacent coordinates are
    /// both positive.
    pub fn in_hard_core_support(&self, s: &State) -> bool {
        in_hard_core_support(&self.graph, s)
    }

    /// Whether `s` is a state of the chain's essential class.
    pub fn is_admissible(&self, s: &State) -> bool {
        !self.is_hard_core() || self.in_hard_core_support(s)
    }

    /// `W(xi)` as an integer combination of alpha and beta.
    pub fn potential_exponent(&self, s: &State) -> Exponent {
        let x = s.coords();
        let self_term: i64 = x.iter().map(|&v| v as i64 * (v as i64 - 1) / 2).sum();
        let pair_term: i64 = self
            .graph
            .edges()
            .iter()
            .map(|&(i, j)| x[i] as i64 * x[j] as i64)
            .sum();
        Exponent {
            alpha: self_term,
            beta: pair_term,
        }
    }

    /// `W(xi) = (alpha/2) sum xi_i (xi_i - 1) + beta sum_{i~j} xi_i xi_j`;
    /// `-inf` off the hard-core support when beta = -inf.
    pub fn potential(&self, s: &State) -> f64 {
        self.eval(self.potential_exponent(s))
    }

    /// Exponent of the rate `xi -> xi + e_i`.
    pub fn up_exponent(&self, s: &State, i: usize) -> Exponent {
        let a = s.get(i) as i64;
        match self.params.variant {
            Variant::Standard => Exponent {
                alpha: a,
                beta: self.graph.neighbour_sum(s.coords(), i) as i64,
            },
            Variant::Modified => Exponent { alpha: a, beta: 0 },
        }
    }

    /// Exponent of the rate `xi -> xi - e_i`, `None` when `xi_i = 0`.
    pub fn down_exponent(&self, s: &State, i: usize) -> Option<Exponent> {
        if s.get(i) == 0 {
            return None;
        }
        Some(match self.params.variant {
            Variant::Standard => Exponent::default(),
            Variant::Modified => Exponent {
                alpha: 0,
                beta: -(self.graph.neighbour_sum(s.coords(), i) as i64),
            },
        })
    }

    pub fn log_up_rate(&self, s: &State, i: usize) -> f64 {
        self.eval(self.up_exponent(s, i))
    }

    pub fn log_down_rate(&self, s: &State, i: usize) -> f64 {
        self.down_exponent(s, i)
            .map_or(f64::NEG_INFINITY, |e| self.eval(e))
    }

    /// Natural log of `q_{from,to}`; `-inf` when `to` is not a lattice
    /// neighbour of `from` or the jump is blocked.
    pub fn log_rate(&self, from: &State, to: &State) -> f64 {
        match lattice_step(from, to) {
            Some((i, true)) => self.log_up_rate(from, i),
            Some((i, false)) => self.log_down_rate(from, i),
            None => f64::NEG_INFINITY,
        }
    }

    pub fn rate(&self, from: &State, to: &State) -> f64 {
        self.log_rate(from, to).exp()
    }

    /// All jumps with positive rate, ups before downs, by vertex.
    pub fn moves(&self, s: &State) -> Vec<Move> {
        let mut out = Vec::with_capacity(2 * self.n());
        self.moves_into(s, &mut out);
        out
    }

    pub(crate) fn moves_into(&self, s: &State, out: &mut Vec<Move>) {
        out.clear();
        for i in 0..self.n() {
            let lr = self.log_up_rate(s, i);
            if lr > f64::NEG_INFINITY {
                out.push(Move {
                    vertex: i,
                    up: true,
                    log_rate: lr,
                });
            }
        }
        for i in 0..self.n() {
            let lr = self.log_down_rate(s, i);
            if lr > f64::NEG_INFINITY {
                out.push(Move {
                    vertex: i,
                    up: false,
                    log_rate: lr,
                });
            }
        }
    }

    /// `log q_xi`, the log of the total jump rate.
    pub fn log_total_rate(&self, s: &State) -> f64 {
        let mut acc = LogAccumulator::default();
        for m in self.moves(s) {
            acc.add(m.log_rate);
        }
        acc.value()
    }

    pub fn total_rate(&self, s: &State) -> f64 {
        self.log_total_rate(s).exp()
    }

    /// Log conductance of the lattice edge `{lower, lower + e_i}`.
    ///
    /// Standard chain: `W(lower + e_i)`. Modified chain:
    /// `W(lower) + alpha * lower_i`. Under the hard-core law edges leaving
    /// the support carry zero conductance.
    pub fn log_conductance(&self, lower: &State, i: usize) -> f64 {
        self.eval(self.conductance_exponent(lower, i))
    }

    pub fn conductance_exponent(&self, lower: &State, i: usize) -> Exponent {
        match self.params.variant {
            Variant::Standard => self.potential_exponent(&lower.plus(i)),
            Variant::Modified => {
                self.potential_exponent(lower)
                    + Exponent {
                        alpha: lower.get(i) as i64,
                        beta: 0,
                    }
            }
        }
    }

    pub fn conductance(&self, lower: &State, i: usize) -> f64 {
        self.log_conductance(lower, i).exp()
    }

    /// Relative detailed-balance residual
    /// `|q(xi, xi+e_i) mu(xi) - q(xi+e_i, xi) mu(xi+e_i)| / max(..)` evaluated
    /// exactly on the integer exponents.
    pub fn detailed_balance_residual(&self, s: &State, i: usize) -> Result<f64> {
        let upper = s.plus(i);
        if self.is_hard_core()
            && !(self.in_hard_core_support(s) && self.in_hard_core_support(&upper))
        {
            return input("hard-core detailed balance needs both states in the support");
        }
        let forward = self.up_exponent(s, i) + self.potential_exponent(s);
        let back = self
            .down_exponent(&upper, i)
            .expect("upper state has a positive coordinate")
            + self.potential_exponent(&upper);
        let gap = self.eval(forward - back).abs();
        Ok(-(-gap).exp_m1())
    }

    /// Transition law of the embedded jump chain.
    pub fn dtmc_transition_probs(&self, s: &State) -> Result<Vec<(State, f64)>> {
        let moves = self.moves(s);
        let log_q = crate::log_sum_exp(moves.iter().map(|m| m.log_rate));
        if !log_q.is_finite() {
            return Err(Error::Model(format!(
                "total rate at {s:?} is {}",
                log_q.exp()
            )));
        }
        Ok(moves
            .into_iter()
            .map(|m| {
                let to = if m.up {
                    s.plus(m.vertex)
                } else {
                    s.minus(m.vertex).expect("down move")
                };
                (to, (m.log_rate - log_q).exp())
            })
            .collect())
    }

    /// Sign of `alpha + beta * lambda1` using the certified eigenvalue
    /// enclosure. Exact whenever beta = 0 or the graph is edgeless.
    pub fn critical_sign(&self) -> Result<CriticalSign> {
        match self.params.beta {
            Beta::HardCore => Ok(CriticalSign::Negative),
            Beta::Finite(b) => {
                let info = self.graph.spectral_info();
                critical_sign_of(self.params.alpha, b, info.lambda1, info.lambda1_error_bound)
            }
        }
    }

    /// Truncated masses over `{S(xi) <= level_cap}` plus the exact
    /// finiteness verdict of the full sums.
    pub fn measure_report(&self, level_cap: u32) -> Result<MeasureReport> {
        let count = count_states_up_to(self.n(), level_cap as u64);
        if count > MAX_TRUNCATED_STATES {
            return capability(format!(
                "{count} states below level {level_cap} exceeds the limit {MAX_TRUNCATED_STATES}"
            ));
        }
        let mut mass = LogAccumulator::default();
        let mut dtmc = LogAccumulator::default();
        let mut by_level = Vec::with_capacity(level_cap as usize + 1);
        let ln2 = std::f64::consts::LN_2;
        for level in 0..=level_cap {
            for s in level_states(self.n(), level) {
                mass.add(self.potential(&s));
                // Each internal edge {s - e_i, s} is counted from both ends.
                for i in 0..self.n() {
                    if let Some(lower) = s.minus(i) {
                        dtmc.add(self.log_conductance(&lower, i) + ln2);
                    }
                }
            }
            by_level.push(mass.value());
        }
        let finite_flag = if self.params.alpha >= 0.0 {
            FiniteFlag::Infinite
        } else {
            match self.critical_sign() {
                Ok(CriticalSign::Negative) => FiniteFlag::Finite,
                Ok(_) => FiniteFlag::Infinite,
                Err(_) => FiniteFlag::Undetermined,
            }
        };
        Ok(MeasureReport {
            level_cap,
            log_partial_mass: mass.value(),
            partial_mass: mass.value().exp(),
            log_partial_mass_by_level: by_level,
            log_dtmc_partial_mass: dtmc.value(),
            dtmc_partial_mass: dtmc.value().exp(),
            finite_flag,
        })
    }
}

/// Tolerance used for `alpha + beta * x`: `BOUNDARY_TOLERANCE * max(1, |alpha|)`.
pub fn boundary_tolerance(alpha: f64) -> f64 {
    BOUNDARY_TOLERANCE * alpha.abs().max(1.0)
}

/// Sign of `alpha + beta * lambda` where `lambda` is known to within
/// `lambda_err`. Errors when the enclosure straddles the tolerance band.
pub fn critical_sign_of(
    alpha: f64,
    beta: f64,
    lambda: f64,
    lambda_err: f64,
) -> Result<CriticalSign> {
    if beta == 0.0 || (lambda == 0.0 && lambda_err == 0.0) {
        return Ok(exact_sign(alpha));
    }
    let value = alpha + beta * lambda;
    let half = beta.abs() * lambda_err + f64::EPSILON * (alpha.abs() + (beta * lambda).abs());
    let tol = boundary_tolerance(alpha);
    if value + half < -tol {
        Ok(CriticalSign::Negative)
    } else if value - half > tol {
        Ok(CriticalSign::Positive)
    } else if value - half >= -tol && value + half <= tol {
        Ok(CriticalSign::Boundary)
    } else {
        Err(Error::Undetermined(format!(
            "alpha + beta*lambda1 = {value:e} +/- {half:e} straddles the tolerance {tol:e}"
        )))
    }
}

fn exact_sign(x: f64) -> CriticalSign {
    if x < 0.0 {
        CriticalSign::Negative
    } else if x > 0.0 {
        CriticalSign::Positive
    } else {
        CriticalSign::Boundary
    }
}

/// Whether the positive support of `s` is an independent set of `graph`.
pub fn in_hard_core_support(graph: &Graph, s: &State) -> bool {
    let x = s.coords();
    graph.edges().iter().all(|&(i, j)| x[i] == 0 || x[j] == 0)
}

/// `Some((i, up))` when `to = from +/- e_i`.
fn lattice_step(from: &State, to: &State) -> Option<(usize, bool)> {
    if from.dim() != to.dim() {
        return None;
    }
    let mut step = None;
    for (i, (&a, &b)) in from.coords().iter().zip(to.coords()).enumerate() {
        if a == b {
            continue;
        }
        if step.is_some() {
            return None;
        }
        step = match b as i64 - a as i64 {
            1 => Some((i, true)),
            -1 => Some((i, false)),
            _ => return None,
        };
    }
    step
}
