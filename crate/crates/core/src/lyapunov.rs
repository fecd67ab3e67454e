//! Generator drift of Lyapunov candidates and the quadratic form behind the
//! explosion argument.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{Chain, Variant};
use crate::error::{capability, input, Error, Result};
use crate::lattice::{count_states_in_ball, states_in_shell, State};

/// Largest scan window accepted.
pub const MAX_SCAN_STATES: u64 = 10_000_000;
/// A drift counts as positive only above `DRIFT_TOLERANCE * (1 + |f|)`.
pub const DRIFT_TOLERANCE: f64 = 1e-12;

/// `Lf(s) = sum over jumps s -> t of q(s, t) (f(t) - f(s))`.
///
/// `f` returns `None` where it is undefined; that is an error at `s` and at
/// every state reachable with positive rate.
pub fn apply_generator<F>(chain: &Chain, f: F, s: &State) -> Result<f64>
where
    F: Fn(&State) -> Option<f64>,
{
    let fs = f(s).ok_or_else(|| Error::Input(format!("function undefined at {s:?}")))?;
    let mut acc = 0.0;
    for m in chain.moves(s) {
        let t = if m.up {
            s.plus(m.vertex)
        } else {
            s.minus(m.vertex).expect("down move")
        };
        let ft = f(&t).ok_or_else(|| Error::Input(format!("function undefined at {t:?}")))?;
        acc += m.log_rate.exp() * (ft - fs);
    }
    Ok(acc)
}

/// The five built-in candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Candidate {
    /// `log(||xi - e||^2 - n + 3/2)` with `e = (1, ..., 1)`.
    Eqf,
    /// `log ||xi||`.
    LogNorm,
    /// `log(||xi||^2 - 1)`.
    LogNorm2m1,
    /// `log(xi_1 + ... + xi_n + 1)`.
    LogSum,
    /// `-Q(xi) = -(1/2) <(alpha E + beta A) xi, xi>`.
    QTilde,
}

pub fn builtin_candidates() -> Vec<Candidate> {
    vec![
        Candidate::Eqf,
        Candidate::LogNorm,
        Candidate::LogNorm2m1,
        Candidate::LogSum,
        Candidate::QTilde,
    ]
}

impl Candidate {
    pub fn name(self) -> &'static str {
        match self {
            Candidate::Eqf => "eqf",
            Candidate::LogNorm => "lognorm",
            Candidate::LogNorm2m1 => "lognorm2m1",
            Candidate::LogSum => "logsum",
            Candidate::QTilde => "qtilde",
        }
    }

    /// Where the candidate is finite.
    pub fn domain(self) -> &'static str {
        match self {
            Candidate::Eqf => "||xi - e||^2 > n - 3/2",
            Candidate::LogNorm => "xi != 0",
            Candidate::LogNorm2m1 => "||xi|| > 1",
            Candidate::LogSum => "all states",
            Candidate::QTilde => "all states, finite beta",
        }
    }

    pub fn eval(self, chain: &Chain, s: &State) -> Option<f64> {
        let nsq = s.norm_sq() as f64;
        let pos_log = |x: f64| (x > 0.0).then(|| x.ln());
        match self {
            Candidate::Eqf => pos_log(eqf_argument(s)),
            Candidate::LogNorm => pos_log(nsq).map(|l| 0.5 * l),
            Candidate::LogNorm2m1 => pos_log(nsq - 1.0),
            Candidate::LogSum => Some((s.level() as f64 + 1.0).ln()),
            Candidate::QTilde => {
                let b = chain.params().beta.finite()?;
                let x = s.coords();
                let self_part: f64 = x.iter().map(|&v| (v as f64) * (v as f64)).sum();
                let pair: f64 = chain
                    .graph()
                    .edges()
                    .iter()
                    .map(|&(i, j)| x[i] as f64 * x[j] as f64)
                    .sum();
                Some(-0.5 * (chain.alpha() * self_part + 2.0 * b * pair))
            }
        }
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Candidate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        builtin_candidates()
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Input(format!("unknown candidate `{s}`")))
    }
}

/// `||xi - e||^2 - n + 3/2`, the argument of the log in [`Candidate::Eqf`].
pub fn eqf_argument(s: &State) -> f64 {
    s.coords()
        .iter()
        .map(|&x| (x as f64 - 1.0).powi(2))
        .sum::<f64>()
        - s.dim() as f64
        + 1.5
}

/// States a scan ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    #[default]
    Full,
    /// The hard-core support: positive coordinates form an independent set.
    Omega,
}

fn in_domain(chain: &Chain, d: Domain, s: &State) -> bool {
    match d {
        Domain::Full => true,
        Domain::Omega => chain.in_hard_core_support(s),
    }
}

/// The radius `C1` for [`Candidate::Eqf`]: the largest norm, among domain
/// states of norm at most `r_max`, at which the log argument is `<= 1`.
/// Every domain state in the range with larger norm has argument `> 1`.
pub fn eqf_c1(chain: &Chain, domain: Domain, r_max: f64) -> Result<f64> {
    let hi = (r_max * r_max).floor() as u64;
    check_window(chain.n(), hi)?;
    // The origin (norm 0) is not enumerated and cannot raise the maximum.
    Ok(states_in_shell(chain.n(), 0, hi)
        .into_par_iter()
        .filter(|s| in_domain(chain, domain, s) && eqf_argument(s) <= 1.0)
        .map(|s| s.norm())
        .reduce(|| 0.0, f64::max))
}

fn check_window(n: usize, hi_sq: u64) -> Result<()> {
    // Cheap upper estimate before the exact count: a cube of side r + 1.
    let side = ((hi_sq as f64).sqrt().floor() + 1.0).powi(n as i32);
    if side > 8.0 * MAX_SCAN_STATES as f64 {
        return capability(format!("scan window of about {side:e} states is too large"));
    }
    let count = count_states_in_ball(n, hi_sq);
    if count > MAX_SCAN_STATES {
        return capability(format!(
            "scan window of {count} states exceeds {MAX_SCAN_STATES}"
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftScan {
    pub r1: f64,
    pub r2: f64,
    pub worst_drift: f64,
    pub worst_state: Option<State>,
    /// States with drift above tolerance, in enumeration order.
    pub violations: Vec<(State, f64)>,
    pub states_checked: u64,
}

/// Evaluates `Lf` on every domain state with `r1 < ||xi|| <= r2`.
pub fn drift_scan<F>(chain: &Chain, f: F, r1: f64, r2: f64, domain: Domain) -> Result<DriftScan>
where
    F: Fn(&State) -> Option<f64> + Sync,
{
    if !(r1 >= 0.0 && r2 >= r1) || !r2.is_finite() {
        return input("scan window needs 0 <= r1 <= r2 < inf");
    }
    let lo = (r1 * r1).floor() as u64;
    let hi = (r2 * r2).floor() as u64;
    check_window(chain.n(), hi)?;
    let states: Vec<State> = states_in_shell(chain.n(), lo, hi)
        .into_iter()
        .filter(|s| in_domain(chain, domain, s) && s.norm() > r1)
        .collect();
    let drifts: Vec<(f64, f64)> = states
        .par_iter()
        .map(|s| {
            let lf = apply_generator(chain, &f, s)?;
            let fs = f(s).expect("checked by apply_generator");
            Ok((lf, fs))
        })
        .collect::<Result<_>>()?;
    let mut worst_drift = f64::NEG_INFINITY;
    let mut worst_state = None;
    let mut violations = Vec::new();
    for (s, &(lf, fs)) in states.iter().zip(&drifts) {
        if lf > worst_drift {
            worst_drift = lf;
            worst_state = Some(s.clone());
        }
        if lf > DRIFT_TOLERANCE * (1.0 + fs.abs()) {
            violations.push((s.clone(), lf));
        }
    }
    Ok(DriftScan {
        r1,
        r2,
        worst_drift,
        worst_state,
        violations,
        states_checked: states.len() as u64,
    })
}

/// Scan of a built-in candidate. For [`Candidate::Eqf`] callers usually set
/// `r1 = C1 + 1` from [`eqf_c1`].
pub fn candidate_scan(
    chain: &Chain,
    c: Candidate,
    r1: f64,
    r2: f64,
    domain: Domain,
) -> Result<DriftScan> {
    drift_scan(chain, |s| c.eval(chain, s), r1, r2, domain)
}

/// `Q(xi) = (1/2) <(alpha E + beta A) xi, xi>` with its spectral data.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub matrix: DMatrix<f64>,
    /// `omega_k = alpha + beta lambda_k`, in the order of `vectors`.
    pub omegas: Vec<f64>,
    /// Orthonormal eigenvectors of the adjacency matrix, as columns.
    pub vectors: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn new(chain: &Chain) -> Result<Self> {
        let b =
            chain.params().beta.finite().ok_or_else(|| {
                Error::Input("the quadratic form needs a finite beta".to_string())
            })?;
        let a = chain.graph().adjacency_matrix();
        let n = chain.n();
        let matrix = DMatrix::<f64>::identity(n, n) * chain.alpha() + &a * b;
        let eig = SymmetricEigen::new(a);
        let omegas = eig
            .eigenvalues
            .iter()
            .map(|l| chain.alpha() + b * l)
            .collect();
        Ok(Self {
            matrix,
            omegas,
            vectors: eig.eigenvectors,
        })
    }

    fn vec_of(s: &State) -> DVector<f64> {
        DVector::from_vec(s.as_f64())
    }

    pub fn q(&self, s: &State) -> f64 {
        let x = Self::vec_of(s);
        0.5 * x.dot(&(&self.matrix * &x))
    }

    /// `U(xi) = (alpha E + beta A) xi`, the gradient of `Q`.
    pub fn u(&self, s: &State) -> Vec<f64> {
        (&self.matrix * Self::vec_of(s)).iter().copied().collect()
    }

    /// `(1/2) sum_k omega_k <xi, v_k>^2`.
    pub fn q_spectral(&self, s: &State) -> f64 {
        let x = Self::vec_of(s);
        let proj = self.vectors.transpose() * x;
        0.5 * proj
            .iter()
            .zip(&self.omegas)
            .map(|(p, w)| w * p * p)
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QDrift {
    /// Expected one-step change of `Q` along the jump chain.
    pub exact: f64,
    /// `Psi(U)/Phi(U) - a_hat`, a lower bound for `exact` when `beta >= 0`
    /// (it needs `U_i >= 0` wherever `xi_i = 0`).
    pub lower_bound: f64,
}

/// `sum psi(u_i) / sum phi(u_i)` with `phi(u) = e^u + 1`,
/// `psi(u) = u (e^u - 1)`, evaluated without overflow.
pub fn psi_over_phi(u: &[f64]) -> f64 {
    let m = u.iter().copied().fold(0.0, f64::max);
    let phi: f64 = u.iter().map(|&x| (x - m).exp() + (-m).exp()).sum();
    let psi: f64 = u.iter().map(|&x| x * ((x - m).exp() - (-m).exp())).sum();
    psi / phi
}

/// One-step drift of `Q` for the embedded jump chain of the standard model:
/// `q^-1 sum_i (e^{U_i} U_i - 1{xi_i > 0} U_i) - a_hat` with `a_hat = -alpha/2`.
pub fn q_drift(chain: &Chain, s: &State) -> Result<QDrift> {
    if chain.params().variant != Variant::Standard {
        return input("the quadratic drift is defined for the standard chain");
    }
    let form = QuadraticForm::new(chain)?;
    let u = form.u(s);
    let a_hat = -0.5 * chain.alpha();
    let m = u.iter().copied().fold(0.0, f64::max);
    let down = (-m).exp();
    let mut q = 0.0;
    let mut num = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        let up = (ui - m).exp();
        q += up;
        num += up * ui;
        if s.get(i) > 0 {
            q += down;
            num -= down * ui;
        }
    }
    Ok(QDrift {
        exact: num / q - a_hat,
        lower_bound: psi_over_phi(&u) - a_hat,
    })
}
