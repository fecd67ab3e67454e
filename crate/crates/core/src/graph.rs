//! Finite simple undirected graphs and the invariants the phase diagram
//! depends on: degrees, edge count, connected components, the independence
//! number and the adjacency spectrum.
//!
//! Vertices are 1-based at the API boundary (constructors, file formats) and
//! 0-based everywhere else.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{capability, input, Error, Result};

/// Default vertex cap for the exact independence-number search.
pub const DEFAULT_INDEPENDENCE_CAP: usize = 40;

/// Hard limit imposed by the 64-bit vertex masks used in the search.
const MASK_BITS: usize = 64;

/// A finite simple undirected graph on vertices `0..n`.
#[derive(Clone)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbours: Vec<Vec<usize>>,
    name: Option<String>,
    spectral: OnceLock<SpectralInfo>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("edges", &self.edges)
            .finish()
    }
}

/// Largest adjacency eigenvalue with a certified error bound, its
/// nonnegative eigenvector, and the full spectrum in decreasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralInfo {
    pub lambda1: f64,
    pub v1: Vec<f64>,
    /// Half-width of an interval around `lambda1` guaranteed to contain an
    /// exact eigenvalue.
    pub lambda1_error_bound: f64,
    pub all_eigenvalues: Vec<f64>,
}

/// One connected component together with the original indices of its
/// vertices (`vertices[k]` is the parent-graph vertex for local vertex `k`).
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub graph: Graph,
    pub vertices: Vec<usize>,
}

impl Graph {
    /// Builds a graph from 1-based vertex pairs. Duplicate edges (in either
    /// orientation) are collapsed.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        let mut zero_based = Vec::with_capacity(edge_list.len());
        for &(i, j) in edge_list {
            if i == 0 || j == 0 || i > n || j > n {
                return input(format!("edge ({i},{j}) has a vertex outside 1..={n}"));
            }
            zero_based.push((i - 1, j - 1));
        }
        Self::from_zero_based(n, &zero_based)
    }

    /// Builds a graph from 0-based vertex pairs.
    pub fn from_zero_based(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return input("a graph needs at least one vertex");
        }
        let mut set = BTreeSet::new();
        for &(i, j) in edge_list {
            if i >= n || j >= n {
                return input(format!("edge ({i},{j}) has a vertex outside 0..{n}"));
            }
            if i == j {
                return input(format!("self-loop at vertex {}", i + 1));
            }
            set.insert((i.min(j), i.max(j)));
        }
        let edges: Vec<_> = set.into_iter().collect();
        let mut neighbours = vec![Vec::new(); n];
        for &(i, j) in &edges {
            neighbours[i].push(j);
            neighbours[j].push(i);
        }
        neighbours.iter_mut().for_each(|nb| nb.sort_unstable());
        Ok(Self {
            n,
            edges,
            neighbours,
            name: None,
            spectral: OnceLock::new(),
        })
    }

    /// Standard named constructions (0-based). The star's centre is vertex 0.
    pub fn named(family: GraphFamily) -> Result<Self> {
        let (n, edges): (usize, Vec<(usize, usize)>) = match family {
            GraphFamily::Complete(n) => {
                if n == 0 {
                    return input("complete graph needs n >= 1");
                }
                let e = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .collect();
                (n, e)
            }
            GraphFamily::Star(m) => {
                if m == 0 {
                    return input("star needs m >= 1 leaves");
                }
                (m + 1, (1..=m).map(|j| (0, j)).collect())
            }
            GraphFamily::Cycle(n) => {
                if n < 3 {
                    return input("cycle needs n >= 3");
                }
                (n, (0..n).map(|i| (i, (i + 1) % n)).collect())
            }
            GraphFamily::Path(n) => {
                if n == 0 {
                    return input("path needs n >= 1");
                }
                (n, (1..n).map(|i| (i - 1, i)).collect())
            }
            GraphFamily::Edgeless(n) => {
                if n == 0 {
                    return input("edgeless graph needs n >= 1");
                }
                (n, Vec::new())
            }
        };
        let mut g = Self::from_zero_based(n, &edges)?;
        g.name = Some(family.to_string());
        Ok(g)
    }

    /// Parses either the line format (`n <count>` then `e <i> <j>` lines,
    /// 1-based, `#` comments allowed) or a JSON object `{"n":..,"edges":[[i,j],..]}`.
    pub fn parse_document(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Doc {
                n: usize,
                edges: Vec<[usize; 2]>,
            }
            let doc: Doc = serde_json::from_str(trimmed)
                .map_err(|e| Error::Input(format!("graph document: {e}")))?;
            let edges: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
            return Self::new(doc.n, &edges);
        }
        let mut n = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut tok = line.split_whitespace();
            let bad = || Error::Input(format!("graph file line {}: `{raw}`", lineno + 1));
            match tok.next() {
                Some("n") => {
                    let v = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    n = Some(v);
                }
                Some("e") => {
                    let i = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    let j = tok.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                    edges.push((i, j));
                }
                _ => return Err(bad()),
            }
            if tok.next().is_some() {
                return Err(bad());
            }
        }
        let n = n.ok_or_else(|| Error::Input("graph file is missing the `n` line".into()))?;
        Self::new(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge list, 0-based, each pair `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbours(&self, i: usize) -> &[usize] {
        &self.neighbours[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbours[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).min().unwrap_or(0)
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn is_regular(&self) -> bool {
        self.min_degree() == self.max_degree()
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.neighbours[i].binary_search(&j).is_ok()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// Human-readable label: the family name when known, else `n=..,e=..`.
    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| format!("custom(n={},e={})", self.n, self.edges.len()))
    }

    pub fn adjacency_matrix(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for &(i, j) in &self.edges {
            a[(i, j)] = 1.0;
            a[(j, i)] = 1.0;
        }
        a
    }

    /// `(A x)_i`, the sum of the neighbours' coordinates.
    pub fn neighbour_sum(&self, x: &[u32], i: usize) -> u64 {
        self.neighbours[i].iter().map(|&j| x[j] as u64).sum()
    }

    pub fn is_connected(&self) -> bool {
        self.connected_components().len() == 1
    }

    /// Partition into connected components (ordered by smallest vertex).
    pub fn connected_components(&self) -> Vec<Component> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for root in 0..self.n {
            if seen[root] {
                continue;
            }
            let mut stack = vec![root];
            let mut verts = Vec::new();
            seen[root] = true;
            while let Some(u) = stack.pop() {
                verts.push(u);
                for &w in &self.neighbours[u] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            verts.sort_unstable();
            let local = |v: usize| verts.binary_search(&v).expect("vertex in component");
            let edges: Vec<_> = self
                .edges
                .iter()
                .filter(|(i, _)| verts.binary_search(i).is_ok())
                .map(|&(i, j)| (local(i), local(j)))
                .collect();
            let graph =
                Graph::from_zero_based(verts.len(), &edges).expect("valid induced subgraph");
            out.push(Component {
                graph,
                vertices: verts,
            });
        }
        out
    }

    /// Certified spectral data, computed once and cached.
    pub fn spectral_info(&self) -> &SpectralInfo {
        self.spectral.get_or_init(|| compute_spectral(self))
    }

    /// Exact independence number with the default vertex cap.
    pub fn independence_number(&self) -> Result<usize> {
        self.independence_number_with_cap(DEFAULT_INDEPENDENCE_CAP)
    }

    /// Exact independence number by branch and bound; refuses graphs with
    /// more than `cap` vertices rather than approximating.
    pub fn independence_number_with_cap(&self, cap: usize) -> Result<usize> {
        if self.n > cap.min(MASK_BITS) {
            return capability(format!(
                "exact independence number limited to n <= {}, got n = {}",
                cap.min(MASK_BITS),
                self.n
            ));
        }
        let masks: Vec<u64> = (0..self.n)
            .map(|i| self.neighbours[i].iter().fold(0u64, |m, &j| m | (1 << j)))
            .collect();
        let all = if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        };
        let mut best = 0;
        mis_search(&masks, all, 0, &mut best);
        Ok(best as usize)
    }

    /// Whether every Perron coordinate is strictly smaller than the sum of
    /// the others, with the certified margin `10 * lambda1_error_bound`.
    /// Requires a connected graph with at least two edges.
    pub fn perron_strict_inequality_check(&self) -> Result<bool> {
        if self.edge_count() < 2 || !self.is_connected() {
            return input("Perron inequality check needs a connected graph with e(G) >= 2");
        }
        let info = self.spectral_info();
        let total: f64 = info.v1.iter().sum();
        let margin = 10.0 * info.lambda1_error_bound;
        Ok(info.v1.iter().all(|&vi| vi < (total - vi) - margin))
    }
}

fn mis_search(adj: &[u64], cand: u64, size: u32, best: &mut u32) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + clique_cover_bound(adj, cand) <= *best {
        return;
    }
    // A vertex of degree <= 1 inside `cand` belongs to some maximum set.
    let mut rest = cand;
    let mut pivot = usize::MAX;
    let mut pivot_deg = 0;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        if d <= 1 {
            mis_search(adj, cand & !(1u64 << v) & !adj[v], size + 1, best);
            return;
        }
        if d > pivot_deg {
            pivot_deg = d;
            pivot = v;
        }
    }
    let bit = 1u64 << pivot;
    mis_search(adj, cand & !bit & !adj[pivot], size + 1, best);
    mis_search(adj, cand & !bit, size, best);
}

/// Number of cliques in a greedy clique cover of `cand`; an independent set
/// meets each clique at most once.
fn clique_cover_bound(adj: &[u64], mut cand: u64) -> u32 {
    let mut count = 0;
    while cand != 0 {
        let u = cand.trailing_zeros() as usize;
        let mut clique = 1u64 << u;
        let mut common = adj[u] & cand;
        while common != 0 {
            let w = common.trailing_zeros() as usize;
            clique |= 1u64 << w;
            common &= adj[w];
        }
        cand &= !clique;
        count += 1;
    }
    count
}

fn compute_spectral(g: &Graph) -> SpectralInfo {
    let n = g.n;
    if g.edge_count() == 0 {
        return SpectralInfo {
            lambda1: 0.0,
            v1: vec![1.0 / (n as f64).sqrt(); n],
            lambda1_error_bound: 0.0,
            all_eigenvalues: vec![0.0; n],
        };
    }
    let a = g.adjacency_matrix();
    let eig = SymmetricEigen::new(a.clone());
    let mut all: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let top = (0..n)
        .max_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]))
        .expect("nonempty spectrum");
    all.sort_by(|x, y| y.total_cmp(x));

    let mut v = nonnegative_unit(eig.eigenvectors.column(top).into_owned());
    let (mut lambda, mut resid) = rayleigh(&a, &v);
    // Rayleigh-quotient refinement; keep the best iterate.
    for _ in 0..3 {
        if resid == 0.0 {
            break;
        }
        let shifted = &a - DMatrix::identity(n, n) * lambda;
        let Some(x) = shifted.lu().solve(&v) else {
            break;
        };
        if !x.iter().all(|t| t.is_finite()) {
            break;
        }
        let cand = nonnegative_unit(x);
        let (l2, r2) = rayleigh(&a, &cand);
        if r2 < resid {
            v = cand;
            lambda = l2;
            resid = r2;
        } else {
            break;
        }
    }
    let slack = 8.0 * n as f64 * f64::EPSILON * lambda.abs().max(1.0);
    SpectralInfo {
        lambda1: lambda,
        v1: v.iter().copied().collect(),
        lambda1_error_bound: resid + slack,
        all_eigenvalues: all,
    }
}

/// Flips the overall sign so that the vector is nonnegative, clamps rounding
/// noise at zero and normalizes.
fn nonnegative_unit(mut x: DVector<f64>) -> DVector<f64> {
    if x.sum() < 0.0 {
        x.neg_mut();
    }
    x.iter_mut().for_each(|t| *t = t.abs());
    let norm = x.norm();
    x / norm
}

fn rayleigh(a: &DMatrix<f64>, v: &DVector<f64>) -> (f64, f64) {
    let av = a * v;
    let lambda = v.dot(&av);
    (lambda, (av - v * lambda).norm())
}

/// The named families accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFamily {
    Complete(usize),
    /// Star `K_{1,m}` with `m` leaves.
    Star(usize),
    Cycle(usize),
    Path(usize),
    Edgeless(usize),
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Complete(n) => write!(f, "complete:{n}"),
            GraphFamily::Star(m) => write!(f, "star:{m}"),
            GraphFamily::Cycle(n) => write!(f, "cycle:{n}"),
            GraphFamily::Path(n) => write!(f, "path:{n}"),
            GraphFamily::Edgeless(n) => write!(f, "edgeless:{n}"),
        }
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, size) = s
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("graph name `{s}` is not <family>:<size>")))?;
        let size: usize = size
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("graph name `{s}` has a bad size")))?;
        match kind.trim() {
            "complete" | "K" => Ok(GraphFamily::Complete(size)),
            "star" => Ok(GraphFamily::Star(size)),
            "cycle" | "C" => Ok(GraphFamily::Cycle(size)),
            "path" | "P" => Ok(GraphFamily::Path(size)),
            "edgeless" | "empty" => Ok(GraphFamily::Edgeless(size)),
            other => input(format!("unknown graph family `{other}`")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_independence(g: &Graph) -> usize {
        let n = g.n();
        (0u32..(1 << n))
            .filter(|&s| {
                g.edges()
                    .iter()
                    .all(|&(i, j)| s & (1 << i) == 0 || s & (1 << j) == 0)
            })
            .map(|s| s.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn build_graph_examples() {
        let k2 = Graph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(k2.edge_count(), 1);
        let e4 = Graph::new(4, &[]).unwrap();
        assert_eq!(e4.edge_count(), 0);
        let c6: Vec<_> = (1..=6).map(|i| (i, i % 6 + 1)).collect();
        let c6 = Graph::new(6, &c6).unwrap();
        assert!(c6.degrees().iter().all(|&d| d == 2));
    }

    #[test]
    fn duplicates_collapse_and_bad_edges_fail() {
        let g = Graph::new(3, &[(1, 2), (2, 1), (1, 2)]).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(Graph::new(3, &[(2, 2)]), Err(Error::Input(_))));
        assert!(matches!(Graph::new(3, &[(0, 1)]), Err(Error::Input(_))));
        assert!(matches!(Graph::new(3, &[(1, 4)]), Err(Error::Input(_))));
    }

    #[test]
    fn named_families() {
        let s = Graph::named(GraphFamily::Star(3)).unwrap();
        assert_eq!(s.degrees(), vec![3, 1, 1, 1]);
        assert_eq!(Graph::named(GraphFamily::Cycle(5)).unwrap().edge_count(), 5);
        assert_eq!(
            Graph::named(GraphFamily::Complete(3)).unwrap().edge_count(),
            3
        );
        assert!(Graph::named(GraphFamily::Cycle(2)).is_err());
        assert!(Graph::named(GraphFamily::Star(0)).is_err());
        assert_eq!(
            "star:3".parse::<GraphFamily>().unwrap(),
            GraphFamily::Star(3)
        );
        assert!("hypercube:3".parse::<GraphFamily>().is_err());
    }

    #[test]
    fn spectral_examples() {
        let s4 = Graph::named(GraphFamily::Star(4)).unwrap();
        assert!((s4.spectral_info().lambda1 - 2.0).abs() < 1e-12);
        let c6 = Graph::named(GraphFamily::Cycle(6)).unwrap();
        assert!((c6.spectral_info().lambda1 - 2.0).abs() < 1e-12);
        let e3 = Graph::named(GraphFamily::Edgeless(3)).unwrap();
        let info = e3.spectral_info();
        assert_eq!(info.lambda1, 0.0);
        assert!(info
            .v1
            .iter()
            .all(|&x| (x - 1.0 / 3f64.sqrt()).abs() < 1e-15));
    }

    #[test]
    fn complete_graph_spectral_radius() {
        for n in 2..=10 {
            let k = Graph::named(GraphFamily::Complete(n)).unwrap();
            let info = k.spectral_info();
            assert!((info.lambda1 - (n - 1) as f64).abs() < 1e-10);
            assert!(info.lambda1_error_bound <= 1e-12 * info.lambda1.max(1.0));
        }
    }

    #[test]
    fn spectral_certificate_on_disconnected_graph() {
        let g = Graph::new(5, &[(1, 2), (3, 4)]).unwrap();
        let info = g.spectral_info();
        assert!((info.lambda1 - 1.0).abs() < 1e-12);
        assert!(info.v1.iter().all(|&x| x >= 0.0));
        let a = g.adjacency_matrix();
        let v = DVector::from_vec(info.v1.clone());
        let r = (&a * &v - &v * info.lambda1).norm();
        assert!(r <= 10.0 * info.lambda1_error_bound);
    }

    #[test]
    fn independence_examples() {
        let c7 = Graph::named(GraphFamily::Cycle(7)).unwrap();
        assert_eq!(c7.independence_number().unwrap(), 3);
        let s3 = Graph::named(GraphFamily::Star(3)).unwrap();
        assert_eq!(s3.independence_number().unwrap(), 3);
        let k5 = Graph::named(GraphFamily::Complete(5)).unwrap();
        assert_eq!(k5.independence_number().unwrap(), 1);
        let big = Graph::named(GraphFamily::Path(41)).unwrap();
        assert!(matches!(
            big.independence_number(),
            Err(Error::Capability(_))
        ));
        assert_eq!(big.independence_number_with_cap(64).unwrap(), 21);
    }

    #[test]
    fn independence_matches_brute_force_on_pseudorandom_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=12);
            let p: f64 = rng.random_range(0.1..0.9);
            let edges: Vec<_> = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|_| rng.random_bool(p))
                .collect();
            let g = Graph::from_zero_based(n, &edges).unwrap();
            assert_eq!(
                g.independence_number().unwrap(),
                brute_force_independence(&g)
            );
        }
    }

    #[test]
    fn perron_check_examples() {
        assert!(Graph::named(GraphFamily::Star(2))
            .unwrap()
            .perron_strict_inequality_check()
            .unwrap());
        assert!(Graph::named(GraphFamily::Cycle(6))
            .unwrap()
            .perron_strict_inequality_check()
            .unwrap());
        let k2 = Graph::named(GraphFamily::Complete(2)).unwrap();
        assert!(matches!(
            k2.perron_strict_inequality_check(),
            Err(Error::Input(_))
        ));
        let split = Graph::new(4, &[(1, 2), (3, 4)]).unwrap();
        assert!(split.perron_strict_inequality_check().is_err());
    }

    #[test]
    fn components_examples() {
        let g = Graph::new(3, &[(1, 2)]).unwrap();
        let comps = g.connected_components();
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].graph.edge_count(), 1);
        assert_eq!(comps[0].vertices, vec![0, 1]);
        assert_eq!(comps[1].graph.n(), 1);
        assert_eq!(
            Graph::named(GraphFamily::Cycle(6))
                .unwrap()
                .connected_components()
                .len(),
            1
        );
        assert_eq!(
            Graph::named(GraphFamily::Edgeless(3))
                .unwrap()
                .connected_components()
                .len(),
            3
        );
    }

    #[test]
    fn parse_both_document_forms() {
        let text = "# triangle\nn 3\ne 1 2\ne 2 3\ne 3 1\n";
        let g = Graph::parse_document(text).unwrap();
        assert_eq!(g, Graph::named(GraphFamily::Complete(3)).unwrap());
        let json = r#"{"n": 3, "edges": [[1,2],[2,3],[1,3]]}"#;
        assert_eq!(Graph::parse_document(json).unwrap(), g);
        assert!(Graph::parse_document("e 1 2\n").is_err());
        assert!(Graph::parse_document("n 2\ne 1 3\n").is_err());
    }
}
