//! Lattice points of `Z_+^n` and the fixed enumeration orders used by every
//! truncated computation.

use std::fmt;

use serde::Serialize;

/// A configuration `xi` in `Z_+^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct State(Vec<u32>);

impl fmt::Debug for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for State {
    /// Space-separated coordinates.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl From<Vec<u32>> for State {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

impl State {
    pub fn new(coords: Vec<u32>) -> Self {
        Self(coords)
    }

    pub fn origin(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// `k * e_i` in dimension `n`.
    pub fn axis(n: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; n];
        v[i] = k;
        Self(v)
    }

    pub fn coords(&self) -> &[u32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `S(xi)`, the coordinate sum.
    pub fn level(&self) -> u64 {
        self.0.iter().map(|&x| x as u64).sum()
    }

    pub fn is_origin(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn plus(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        v[i] += 1;
        Self(v)
    }

    /// `xi - e_i`, or `None` on the boundary `xi_i = 0`.
    pub fn minus(&self, i: usize) -> Option<Self> {
        if self.0[i] == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some(Self(v))
    }

    pub fn increment(&mut self, i: usize) {
        self.0[i] += 1;
    }

    pub fn decrement(&mut self, i: usize) {
        self.0[i] -= 1;
    }

    pub fn norm_sq(&self) -> u64 {
        self.0.iter().map(|&x| (x as u64) * (x as u64)).sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// Number of positive coordinates.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&x| x > 0).count()
    }

    pub fn as_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&x| x as f64).collect()
    }
}

/// All states of level exactly `level`, in colexicographic order (last
/// coordinate varies slowest).
pub fn level_states(n: usize, level: u32) -> Vec<State> {
    let mut out = Vec::new();
    let mut buf = vec![0u32; n];
    fill_level(&mut buf, n, level, &mut out);
    out
}

fn fill_level(buf: &mut [u32], k: usize, remaining: u32, out: &mut Vec<State>) {
    if k == 1 {
        buf[0] = remaining;
        out.push(State(buf.to_vec()));
        return;
    }
    for last in 0..=remaining {
        buf[k - 1] = last;
        fill_level(buf, k - 1, remaining - last, out);
    }
}

/// All states with `S(xi) <= max_level`, ordered by level then colex.
pub fn states_up_to(n: usize, max_level: u32) -> Vec<State> {
    (0..=max_level).flat_map(|l| level_states(n, l)).collect()
}

/// Number of states with `S(xi) <= max_level`, i.e. `binom(max_level + n, n)`.
pub fn count_states_up_to(n: usize, max_level: u64) -> u128 {
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c * (max_level as u128 + k) / k;
        if c > u64::MAX as u128 {
            return u128::MAX;
        }
    }
    c
}

/// All states with `norm_sq` in `(lo_sq, hi_sq]`; coordinates nondecreasing
/// in lexicographic order of the output.
pub fn states_in_shell(n: usize, lo_sq: u64, hi_sq: u64) -> Vec<State> {
    let mut out = Vec::new();
    let mut buf = vec![0u32; n];
    fill_ball(&mut buf, 0, hi_sq, &mut |s| {
        if s.norm_sq() > lo_sq {
            out.push(s);
        }
    });
    out
}

/// Counts states with `norm_sq <= hi_sq` without materializing them.
pub fn count_states_in_ball(n: usize, hi_sq: u64) -> u64 {
    let mut count = 0u64;
    let mut buf = vec![0u32; n];
    fill_ball(&mut buf, 0, hi_sq, &mut |_| count += 1);
    count
}

fn fill_ball(buf: &mut [u32], k: usize, budget: u64, f: &mut impl FnMut(State)) {
    if k == buf.len() {
        f(State(buf.to_vec()));
        return;
    }
    let mut x: u64 = 0;
    while x * x <= budget {
        buf[k] = x as u32;
        fill_ball(buf, k + 1, budget - x * x, f);
        x += 1;
    }
    buf[k] = 0;
}
