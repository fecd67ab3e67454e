//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use lattice_walks::{Chain, Graph, GraphFamily, Params, State};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn graph(f: GraphFamily) -> Graph {
    Graph::named(f).unwrap()
}

pub fn standard(alpha: f64, beta: f64, f: GraphFamily) -> Chain {
    Chain::new(Params::standard(alpha, beta).unwrap(), graph(f))
}

pub fn modified(alpha: f64, beta: f64, f: GraphFamily) -> Chain {
    Chain::new(Params::modified(alpha, beta).unwrap(), graph(f))
}

pub fn hard_core(alpha: f64, f: GraphFamily) -> Chain {
    Chain::new(Params::hard_core(alpha).unwrap(), graph(f))
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_state<R: Rng>(rng: &mut R, n: usize, max: u32) -> State {
    State::new((0..n).map(|_| rng.random_range(0..=max)).collect())
}

/// A random state whose positive coordinates form an independent set.
pub fn random_omega_state<R: Rng>(rng: &mut R, g: &Graph, max: u32) -> State {
    let n = g.n();
    let mut x = vec![0u32; n];
    let mut order: Vec<usize> = (0..n).collect();
    for k in (1..n).rev() {
        order.swap(k, rng.random_range(0..=k));
    }
    for i in order {
        let free = g.neighbours(i).iter().all(|&j| x[j] == 0);
        if free && rng.random_bool(0.7) {
            x[i] = rng.random_range(1..=max.max(1));
        }
    }
    State::new(x)
}

pub fn neighbour_sum(g: &Graph, s: &State, i: usize) -> f64 {
    g.neighbours(i).iter().map(|&j| s.get(j) as f64).sum()
}

/// `W(xi) = alpha/2 sum xi_i (xi_i - 1) + beta sum_{ij in E} xi_i xi_j`;
/// `beta = None` is the hard-core limit.
pub fn w_oracle(g: &Graph, alpha: f64, beta: Option<f64>, s: &State) -> f64 {
    let self_part: f64 = s
        .coords()
        .iter()
        .map(|&x| x as f64 * (x as f64 - 1.0))
        .sum::<f64>()
        * alpha
        / 2.0;
    let pairs: f64 = g
        .edges()
        .iter()
        .map(|&(i, j)| s.get(i) as f64 * s.get(j) as f64)
        .sum();
    match beta {
        Some(b) => self_part + b * pairs,
        None if pairs > 0.0 => f64::NEG_INFINITY,
        None => self_part,
    }
}

/// Log up-rate of coordinate `i`, read off the rate tables directly.
pub fn log_up_oracle(
    g: &Graph,
    modified: bool,
    alpha: f64,
    beta: Option<f64>,
    s: &State,
    i: usize,
) -> f64 {
    let nb = neighbour_sum(g, s, i);
    if modified {
        return alpha * s.get(i) as f64;
    }
    match beta {
        Some(b) => alpha * s.get(i) as f64 + b * nb,
        None if nb > 0.0 => f64::NEG_INFINITY,
        None => alpha * s.get(i) as f64,
    }
}

/// Log down-rate of coordinate `i` (requires `s_i > 0`).
pub fn log_down_oracle(g: &Graph, modified: bool, beta: Option<f64>, s: &State, i: usize) -> f64 {
    assert!(s.get(i) > 0);
    if modified {
        -beta.unwrap() * neighbour_sum(g, s, i)
    } else {
        0.0
    }
}

/// `Lf(s)` computed from the oracle rates.
pub fn generator_oracle<F: Fn(&State) -> f64>(
    g: &Graph,
    modified: bool,
    alpha: f64,
    beta: Option<f64>,
    f: F,
    s: &State,
) -> f64 {
    let fs = f(s);
    let mut acc = 0.0;
    for i in 0..g.n() {
        let up = log_up_oracle(g, modified, alpha, beta, s, i).exp();
        if up > 0.0 {
            acc += up * (f(&s.plus(i)) - fs);
        }
        if let Some(lower) = s.minus(i) {
            acc += log_down_oracle(g, modified, beta, s, i).exp() * (f(&lower) - fs);
        }
    }
    acc
}

/// Maximum independent set size by subset enumeration.
pub fn brute_force_independence(g: &Graph) -> usize {
    let n = g.n();
    (0u32..(1 << n))
        .filter(|&m| {
            g.edges()
                .iter()
                .all(|&(i, j)| m & (1 << i) == 0 || m & (1 << j) == 0)
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap()
}

/// Spectral radius by power iteration on `A + I` (the shift removes the
/// bipartite sign oscillation).
pub fn power_iteration_lambda1(g: &Graph) -> f64 {
    let n = g.n();
    if g.edge_count() == 0 {
        return 0.0;
    }
    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut lambda = 0.0;
    for _ in 0..20_000 {
        let mut w: Vec<f64> = (0..n)
            .map(|i| v[i] + g.neighbours(i).iter().map(|&j| v[j]).sum::<f64>())
            .collect();
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        let next = norm - 1.0;
        let done = (next - lambda).abs() < 1e-15;
        lambda = next;
        v = w;
        if done {
            break;
        }
    }
    lambda
}

/// An algebraic number `(p + q sqrt(d)) / r` with `r > 0`, `d >= 0`.
#[derive(Debug, Clone, Copy)]
pub struct Surd {
    pub p: i64,
    pub q: i64,
    pub d: i64,
    pub r: i64,
}

impl Surd {
    pub const fn int(k: i64) -> Self {
        Surd {
            p: k,
            q: 0,
            d: 0,
            r: 1,
        }
    }

    pub fn value(&self) -> f64 {
        (self.p as f64 + self.q as f64 * (self.d as f64).sqrt()) / self.r as f64
    }
}

/// Exact sign of `x + y sqrt(d)`.
fn sign_xy(x: i64, y: i64, d: i64) -> i32 {
    let (x, y) = (x as i128, y as i128);
    let y2d = y * y * d as i128;
    if y == 0 || d == 0 {
        return x.signum() as i32;
    }
    match (x.signum(), y.signum()) {
        (sx, sy) if sx >= 0 && sy > 0 => 1,
        (sx, sy) if sx <= 0 && sy < 0 => -1,
        (1, _) => (x * x - y2d).signum() as i32,
        _ => (y2d - x * x).signum() as i32,
    }
}

/// Exact sign of `a/4 + (b/4) * s`.
pub fn sign_quarter(a: i64, b: i64, s: Surd) -> i32 {
    sign_xy(a * s.r + b * s.p, b * s.q, s.d)
}

/// Hand-transcribed invariants of a fixture graph.
#[derive(Debug, Clone, Copy)]
pub struct PhaseFixture {
    pub family: GraphFamily,
    pub n: usize,
    pub edges: usize,
    pub kappa: usize,
    pub min_degree: i64,
    pub lambda1: Surd,
}

pub fn phase_fixtures() -> Vec<PhaseFixture> {
    use GraphFamily::*;
    let rt = |d| Surd {
        p: 0,
        q: 1,
        d,
        r: 1,
    };
    let golden = Surd {
        p: 1,
        q: 1,
        d: 5,
        r: 2,
    };
    let mut v = vec![
        PhaseFixture {
            family: Complete(1),
            n: 1,
            edges: 0,
            kappa: 1,
            min_degree: 0,
            lambda1: Surd::int(0),
        },
        PhaseFixture {
            family: Complete(2),
            n: 2,
            edges: 1,
            kappa: 1,
            min_degree: 1,
            lambda1: Surd::int(1),
        },
        PhaseFixture {
            family: Complete(3),
            n: 3,
            edges: 3,
            kappa: 1,
            min_degree: 2,
            lambda1: Surd::int(2),
        },
        PhaseFixture {
            family: Star(2),
            n: 3,
            edges: 2,
            kappa: 2,
            min_degree: 1,
            lambda1: rt(2),
        },
        PhaseFixture {
            family: Star(3),
            n: 4,
            edges: 3,
            kappa: 3,
            min_degree: 1,
            lambda1: rt(3),
        },
        PhaseFixture {
            family: Star(4),
            n: 5,
            edges: 4,
            kappa: 4,
            min_degree: 1,
            lambda1: Surd::int(2),
        },
    ];
    for n in 3..=8 {
        v.push(PhaseFixture {
            family: Cycle(n),
            n,
            edges: n,
            kappa: n / 2,
            min_degree: 2,
            lambda1: Surd::int(2),
        });
    }
    v.push(PhaseFixture {
        family: Path(4),
        n: 4,
        edges: 3,
        kappa: 2,
        min_degree: 1,
        lambda1: golden,
    });
    for n in 1..=3 {
        v.push(PhaseFixture {
            family: Edgeless(n),
            n,
            edges: 0,
            kappa: n,
            min_degree: 0,
            lambda1: Surd::int(0),
        });
    }
    v
}

/// Expected `(recurrence, rule)` for `alpha = a/4` and `beta = b/4`
/// (`b = None` is `beta = -inf`), read off the phase diagram.
pub fn expected_recurrence(
    f: &PhaseFixture,
    a: i64,
    b: Option<i64>,
    modified: bool,
) -> (&'static str, &'static str) {
    const PR: &str = "PositiveRecurrent";
    const NR: &str = "NullRecurrent";
    const TR: &str = "Transient";
    if a > 0 {
        return (TR, "Tmain.iii.a");
    }
    if a == 0 {
        let bs = b.map_or(-1, |b| b.signum());
        return match bs {
            -1 if f.kappa <= 2 => (NR, "Tmain.ii.a"),
            -1 => (TR, "Tmain.iii.e"),
            0 if f.n <= 2 => (NR, "Tmain.ii.b"),
            0 => (TR, "Tmain.iii.d"),
            _ if f.edges > 0 => (TR, "Tmain.iii.b"),
            _ if f.n <= 2 => (NR, "Tmain.ii.c"),
            _ => (TR, "Tmain.iii.c"),
        };
    }
    // alpha < 0; with beta = -inf the critical value is -inf when there is
    // an edge and alpha otherwise.
    let crit = match b {
        None => -1,
        Some(_) if f.edges == 0 => sign_quarter(a, 0, f.lambda1),
        Some(b) => sign_quarter(a, b, f.lambda1),
    };
    match crit {
        -1 => (PR, "Tmain.i"),
        0 if modified && f.edges == 1 => (NR, "Ttxi"),
        _ => (TR, "Tmain.iii.f"),
    }
}

/// Expected `(explosion class, rule)` for the standard chain.
pub fn expected_explosion(
    f: &PhaseFixture,
    a: i64,
    b: Option<i64>,
) -> (&'static str, &'static str) {
    const NE: &str = "NonExplosive";
    const EX: &str = "ExplosiveAS";
    const OPEN: &str = "OpenConjecturedExplosive";
    if a > 0 {
        return (EX, "Texpl.ii.a");
    }
    if a == 0 {
        return match b {
            None => (NE, "Texpl.i.b"),
            Some(b) if b <= 0 => (NE, "Texpl.i.b"),
            Some(_) if f.edges > 0 => (EX, "Texpl.ii.b"),
            Some(_) => (NE, "Texpl.i.c"),
        };
    }
    let b = match b {
        None => return (NE, "Texpl.i.a"),
        Some(_) if f.edges == 0 => return (NE, "Texpl.i.a"),
        Some(b) => b,
    };
    if sign_quarter(a, b, f.lambda1) <= 0 {
        (NE, "Texpl.i.a")
    } else if a + b * f.min_degree > 0 {
        (EX, "Texpl.ii.c")
    } else {
        (OPEN, "Rexpl.open")
    }
}

/// Quarter-step grid over [-2, 1].
pub fn quarter_grid() -> Vec<i64> {
    (-8..=4).collect()
}
