//! Interacting random walks on `Z_+^n` whose coordinates are labelled by the
//! vertices of a finite graph.
//!
//! A coordinate `xi_i` jumps up at rate `exp(alpha * xi_i + beta * (A xi)_i)`
//! and down at rate 1. The crate provides
//!
//! * [`graph`]: finite graphs with exact independence numbers and certified
//!   adjacency spectra,
//! * [`chain`]: rates, the reversible measure `exp(W)`, conductances and
//!   truncated partition sums for the standard, hard-core and modified chains,
//! * [`classify`]: exact recurrence / explosion phase classification,
//! * [`simulate`]: seedable trajectory simulation with an explosion detector,
//! * [`resistance`]: truncated electric networks and effective resistance,
//! * [`lyapunov`]: generator drift scans and the quadratic-form machinery,
//! * [`appendix`]: hitting-probability and confinement experiments in the
//!   hard-core regime.

pub mod appendix;
pub mod chain;
pub mod classify;
pub mod error;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod lyapunov;
pub mod resistance;
pub mod simulate;

pub use chain::{Beta, Chain, Params, Variant};
pub use error::{Error, Result};
pub use graph::{Graph, GraphFamily, SpectralInfo};
pub use lattice::State;

/// Log-sum-exp of a sequence; `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `sum exp(t)` computed as `exp(max) * sum exp(t - max)`, so that sums of
/// exactly representable terms stay exact when `max = 0`.
pub fn sum_exp<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return 0.0;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max.exp() * terms.iter().map(|t| (t - max).exp()).sum::<f64>()
}

/// Streaming log-sum-exp accumulator with a fixed (sequential) reduction order.
#[derive(Debug, Clone, Copy)]
pub struct LogAccumulator {
    max: f64,
    scaled: f64,
}

impl Default for LogAccumulator {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogAccumulator {
    pub fn add(&mut self, log_term: f64) {
        if log_term == f64::NEG_INFINITY {
            return;
        }
        if log_term <= self.max {
            self.scaled += (log_term - self.max).exp();
        } else {
            self.scaled = self.scaled * (self.max - log_term).exp() + 1.0;
            self.max = log_term;
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}
