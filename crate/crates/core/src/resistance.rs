//! Effective resistance of truncated conductance networks and the explicit
//! bounds obtained from cutsets and single lattice paths.
//!
//! The truncated network at level `L` has nodes `{S(xi) <= L}` (restricted to
//! the hard-core support when beta = -inf), lattice edges weighted by the
//! chain's conductances, the origin as source and the level set `V_L`
//! merged into a single grounded sink.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::chain::Chain;
use crate::error::{capability, input, Error, Result};
use crate::lattice::{count_states_up_to, level_states, states_up_to, State};
use crate::linalg::{solve_spd, CsrMatrix};
use crate::{log_sum_exp, sum_exp};

/// Largest truncated network accepted.
pub const MAX_NETWORK_NODES: u128 = 10_000_000;
/// Relative tolerance of the linear solve.
pub const SOLVE_TOLERANCE: f64 = 1e-12;
/// Edges whose conductance is below this fraction of the largest conductance
/// at either endpoint are dropped.
pub const PRUNE_RATIO_LOG: f64 = -690.775_527_898_213_7; // ln(1e-300)

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceResult {
    pub level_cap: u32,
    pub r_eff: f64,
    pub log_r_eff: f64,
    /// Interior unknowns of the Dirichlet problem.
    pub unknowns: usize,
    pub edges: usize,
    pub pruned_edges: usize,
    pub relative_residual: f64,
    pub method: &'static str,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Source,
    Sink,
    Interior(usize),
}

/// Effective resistance between the origin and the merged level set `V_L`.
pub fn effective_resistance(chain: &Chain, level_cap: u32) -> Result<ResistanceResult> {
    if level_cap == 0 {
        return input("level cap must be at least 1");
    }
    let n = chain.n();
    let count = count_states_up_to(n, level_cap as u64);
    if count > MAX_NETWORK_NODES {
        return capability(format!(
            "{count} network nodes exceeds the limit {MAX_NETWORK_NODES}"
        ));
    }

    // Interior states 1 <= S <= L-1 in the chain's essential support.
    let interior: Vec<State> = (1..level_cap)
        .flat_map(|l| level_states(n, l))
        .filter(|s| chain.is_admissible(s))
        .collect();
    let index: HashMap<&State, usize> = interior.iter().enumerate().map(|(k, s)| (s, k)).collect();
    let node_of = |s: &State| -> Option<Node> {
        let l = s.level();
        if l == 0 {
            Some(Node::Source)
        } else if l == level_cap as u64 {
            chain.is_admissible(s).then_some(Node::Sink)
        } else {
            index.get(s).map(|&k| Node::Interior(k))
        }
    };

    // Edges (lower, lower + e_i) with finite log conductance.
    let mut edges: Vec<(Node, Node, f64)> = Vec::new();
    let origin = State::origin(n);
    for lower in std::iter::once(&origin).chain(interior.iter()) {
        let a = node_of(lower).expect("lower endpoint is a node");
        for i in 0..n {
            let lc = chain.log_conductance(lower, i);
            if lc == f64::NEG_INFINITY {
                continue;
            }
            if let Some(b) = node_of(&lower.plus(i)) {
                edges.push((a, b, lc));
            }
        }
    }

    // Prune edges negligible at both endpoints' scale.
    let m = interior.len();
    let mut row_max = vec![f64::NEG_INFINITY; m];
    for &(a, b, lc) in &edges {
        for v in [a, b] {
            if let Node::Interior(k) = v {
                row_max[k] = row_max[k].max(lc);
            }
        }
    }
    let negligible =
        |v: Node, lc: f64| matches!(v, Node::Interior(k) if lc - row_max[k] < PRUNE_RATIO_LOG);
    let before = edges.len();
    edges.retain(|&(a, b, lc)| !(negligible(a, lc) || negligible(b, lc)));
    let pruned_edges = before - edges.len();
    if !source_reaches_sink(m, &edges) {
        return Err(Error::Numerical(if pruned_edges > 0 {
            format!("pruning {pruned_edges} edges disconnected the source from the sink")
        } else {
            "the source is not connected to the sink".to_string()
        }));
    }

    // Log of the weighted degree of every interior node.
    let mut terms: Vec<Vec<f64>> = vec![Vec::new(); m];
    for &(a, b, lc) in &edges {
        for v in [a, b] {
            if let Node::Interior(k) = v {
                terms[k].push(lc);
            }
        }
    }
    let log_deg: Vec<f64> = terms
        .iter()
        .map(|t| log_sum_exp(t.iter().copied()))
        .collect();

    // Symmetrically scaled system (I - D^-1/2 A D^-1/2) y = D^-1/2 c_src,
    // with y = D^1/2 u.
    let mut triplets: Vec<(usize, usize, f64)> = (0..m).map(|k| (k, k, 1.0)).collect();
    let mut rhs = vec![0.0; m];
    let mut direct_log = f64::NEG_INFINITY;
    for &(a, b, lc) in &edges {
        match (a, b) {
            (Node::Interior(i), Node::Interior(j)) => {
                let w = (lc - 0.5 * (log_deg[i] + log_deg[j])).exp();
                triplets.push((i, j, -w));
                triplets.push((j, i, -w));
            }
            (Node::Source, Node::Interior(k)) | (Node::Interior(k), Node::Source) => {
                rhs[k] += (lc - 0.5 * log_deg[k]).exp();
            }
            (Node::Source, Node::Sink) | (Node::Sink, Node::Source) => {
                direct_log = log_sum_exp([direct_log, lc]);
            }
            _ => {}
        }
    }
    let matrix = CsrMatrix::from_triplets(m, triplets);
    let (y, residual, method) = if m == 0 {
        (Vec::new(), 0.0, "direct")
    } else {
        let sol = solve_spd(&matrix, &rhs, SOLVE_TOLERANCE)?;
        (sol.x, sol.relative_residual, sol.method)
    };
    let log_u: Vec<f64> = y
        .iter()
        .zip(&log_deg)
        .map(|(&y, &ld)| {
            if y > 0.0 {
                y.ln() - 0.5 * ld
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();

    // Total current, measured on whichever side avoids cancellation.
    let src_neighbours: Vec<usize> = edges
        .iter()
        .filter_map(|&(a, b, _)| match (a, b) {
            (Node::Source, Node::Interior(k)) => Some(k),
            _ => None,
        })
        .collect();
    let mean_u = if src_neighbours.is_empty() {
        0.0
    } else {
        src_neighbours.iter().map(|&k| log_u[k].exp()).sum::<f64>() / src_neighbours.len() as f64
    };
    let log_current = if mean_u > 0.5 {
        let mut t = vec![direct_log];
        for &(a, b, lc) in &edges {
            if let (Node::Interior(k), Node::Sink) = (a, b) {
                t.push(lc + log_u[k]);
            }
        }
        log_sum_exp(t)
    } else {
        let mut t = vec![direct_log];
        for &(a, b, lc) in &edges {
            if let (Node::Source, Node::Interior(k)) = (a, b) {
                let drop = 1.0 - log_u[k].exp();
                if drop > 0.0 {
                    t.push(lc + drop.ln());
                }
            }
        }
        log_sum_exp(t)
    };
    if !log_current.is_finite() {
        return Err(Error::Numerical(format!(
            "total current has log {log_current}"
        )));
    }
    Ok(ResistanceResult {
        level_cap,
        r_eff: (-log_current).exp(),
        log_r_eff: -log_current,
        unknowns: m,
        edges: edges.len(),
        pruned_edges,
        relative_residual: residual,
        method,
    })
}

fn source_reaches_sink(m: usize, edges: &[(Node, Node, f64)]) -> bool {
    // Union-find over interior nodes plus source (m) and sink (m + 1).
    let id = |v: Node| match v {
        Node::Interior(k) => k,
        Node::Source => m,
        Node::Sink => m + 1,
    };
    let mut parent: Vec<usize> = (0..m + 2).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for &(a, b, _) in edges {
        let (ra, rb) = (find(&mut parent, id(a)), find(&mut parent, id(b)));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    find(&mut parent, m) == find(&mut parent, m + 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResistanceCurve {
    pub points: Vec<ResistanceResult>,
    /// `R_eff` nondecreasing along increasing level caps.
    pub monotone: bool,
}

/// Effective resistance at several level caps, computed in parallel and
/// returned sorted by level.
pub fn resistance_curve(chain: &Chain, levels: &[u32]) -> Result<ResistanceCurve> {
    let mut levels = levels.to_vec();
    levels.sort_unstable();
    levels.dedup();
    let points: Vec<ResistanceResult> = levels
        .par_iter()
        .map(|&l| effective_resistance(chain, l))
        .collect::<Result<_>>()?;
    let monotone = points
        .windows(2)
        .all(|w| w[1].r_eff >= w[0].r_eff * (1.0 - 1e-9));
    Ok(ResistanceCurve { points, monotone })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelResistance {
    pub level: u32,
    /// `(sum of conductances between V_{l-1} and V_l)^-1`.
    pub r_level: f64,
    pub log_r_level: f64,
    pub partial_sum: f64,
    pub log_partial_sum: f64,
}

/// Cutset resistances between consecutive level sets for `l = 1..=L`; the
/// partial sums are lower bounds for `R_eff(L)`.
pub fn level_short_circuit_curve(chain: &Chain, level_cap: u32) -> Result<Vec<LevelResistance>> {
    let n = chain.n();
    let count = count_states_up_to(n, level_cap as u64);
    if count > MAX_NETWORK_NODES {
        return capability(format!(
            "{count} network nodes exceeds the limit {MAX_NETWORK_NODES}"
        ));
    }
    let mut out = Vec::with_capacity(level_cap as usize);
    let mut log_partial = f64::NEG_INFINITY;
    let mut partial = 0.0;
    for level in 1..=level_cap {
        let log_c = log_sum_exp(
            level_states(n, level - 1)
                .iter()
                .flat_map(|s| (0..n).map(move |i| chain.log_conductance(s, i))),
        );
        let log_r = -log_c;
        log_partial = log_sum_exp([log_partial, log_r]);
        partial += log_r.exp();
        out.push(LevelResistance {
            level,
            r_level: log_r.exp(),
            log_r_level: log_r,
            partial_sum: partial,
            log_partial_sum: log_partial,
        });
    }
    Ok(out)
}

/// The lattice path `y_0 = 0, y_1, ...` that tracks the ray `t v1`: vertex
/// `i` is incremented for the `m`-th time at time `m / v1_i`, simultaneous
/// increments are taken in vertex order. Returns the vertex incremented
/// at each step.
pub fn v1_path_steps(v1: &[f64], k: usize) -> Result<Vec<usize>> {
    if !v1.iter().any(|&v| v > 0.0) {
        return input("the Perron vector is zero");
    }
    let mut count = vec![0u64; v1.len()];
    let mut steps = Vec::with_capacity(k);
    for _ in 0..k {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in v1.iter().enumerate() {
            if v <= 0.0 {
                continue;
            }
            let t = (count[i] + 1) as f64 / v;
            if best.is_none_or(|(_, bt)| t < bt) {
                best = Some((i, t));
            }
        }
        let (i, _) = best.expect("some vertex has positive weight");
        count[i] += 1;
        steps.push(i);
    }
    Ok(steps)
}

/// Natural log of the series resistance of the first `k` edges of the
/// Perron-ray path.
pub fn v1_path_log_bound(chain: &Chain, k: usize) -> Result<f64> {
    Ok(log_sum_exp(v1_path_log_resistances(chain, k)?))
}

/// Log resistances `-log C` of the first `k` edges of the Perron-ray path.
pub fn v1_path_log_resistances(chain: &Chain, k: usize) -> Result<Vec<f64>> {
    let g = chain.graph();
    if g.edge_count() == 0 {
        return input("the Perron path needs a graph with at least one edge");
    }
    let steps = v1_path_steps(&g.spectral_info().v1, k)?;
    let mut s = State::origin(chain.n());
    let mut terms = Vec::with_capacity(k);
    for i in steps {
        terms.push(-chain.log_conductance(&s, i));
        s.increment(i);
    }
    Ok(terms)
}

/// `sum_{k=1}^{K} exp(-W(y_k))` along the Perron-ray path; an upper bound
/// for the resistance of the sub-network formed by the path.
pub fn v1_path_upper_bound(chain: &Chain, k: usize) -> Result<f64> {
    Ok(sum_exp(v1_path_log_resistances(chain, k)?))
}

/// Natural log of `sum_{k=1}^{K} exp(-(alpha/2) k (k-1))`.
pub fn axis_path_log_bound(alpha: f64, k: usize) -> f64 {
    log_sum_exp((1..=k).map(|j| -0.5 * alpha * j as f64 * (j as f64 - 1.0)))
}

/// Series resistance of the first `K` edges of the axis `Z_+ e_1`.
pub fn axis_path_upper_bound(alpha: f64, k: usize) -> f64 {
    sum_exp((1..=k).map(|j| -0.5 * alpha * j as f64 * (j as f64 - 1.0)))
}

/// Edges and conductances of the truncated network, for inspection and for
/// independent solvers.
pub fn network_edges(chain: &Chain, level_cap: u32) -> Vec<(State, State, f64)> {
    let mut out = Vec::new();
    for s in states_up_to(chain.n(), level_cap.saturating_sub(1)) {
        if !chain.is_admissible(&s) {
            continue;
        }
        for i in 0..chain.n() {
            let lc = chain.log_conductance(&s, i);
            if lc > f64::NEG_INFINITY {
                out.push((s.clone(), s.plus(i), lc.exp()));
            }
        }
    }
    out
}
