//! `lattice-walks`: classification, simulation, resistance curves, drift
//! scans, appendix experiments and phase-diagram sweeps.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use lattice_walks::appendix::{c6_confinement, lemma_p1_bounds, lemma_p1_estimate, lemma_p1_exact};
use lattice_walks::classify::{classify_report, ChainKind};
use lattice_walks::lyapunov::{candidate_scan, eqf_c1, Candidate, Domain};
use lattice_walks::resistance::{
    axis_path_upper_bound, effective_resistance, level_short_circuit_curve, v1_path_upper_bound,
};
use lattice_walks::simulate::{occupation, run_many, summarize_returns, SimConfig, Verdict};
use lattice_walks::{Beta, Chain, Error, Graph, GraphFamily, Params, State, Variant};

const VERSION: &str = env!("CARGO_PKG_VERSION");
const MAX_SWEEP_CELLS: usize = 1_000_000;

#[derive(Parser, Debug)]
#[command(
    name = "lattice-walks",
    version,
    about = "Interacting random walks on Z_+^n indexed by a graph"
)]
struct Cli {
    /// Named graph (`complete:3`, `star:4`, `cycle:6`, `path:4`, `edgeless:2`) or a graph file.
    #[arg(long, global = true)]
    graph: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// A finite number or `-inf` for the hard-core interaction.
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, global = true, value_enum, default_value_t = VariantArg::Standard)]
    variant: VariantArg,
    /// JSON parameter document `{"alpha":..,"beta":..,"variant":..}`; overrides the flags.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum VariantArg {
    Standard,
    Modified,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Recurrence and explosion class.
    Classify {
        /// Classify the embedded jump chain.
        #[arg(long)]
        dtmc: bool,
    },
    /// Monte-Carlo trajectories.
    Simulate(SimulateArgs),
    /// Effective resistance and bounds on truncated networks.
    Resistance(ResistanceArgs),
    /// Generator drift scan of a Lyapunov candidate.
    Lyapunov(LyapunovArgs),
    /// Appendix experiments.
    Appendix {
        #[command(subcommand)]
        which: AppendixCommand,
    },
    /// Phase-diagram sweep over an (alpha, beta) grid.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Start state as space- or comma-separated coordinates (default: origin).
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 10_000_000)]
    max_events: u64,
    #[arg(long)]
    max_time: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    norm_cap: u64,
    #[arg(long, default_value_t = 1e-6)]
    explosion_threshold: f64,
    /// Keep running after returning to the origin.
    #[arg(long)]
    no_stop_at_origin: bool,
    /// Occupancy CSV (`state,holding_time`) of one long run.
    #[arg(long)]
    emit_occupancy: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    occupancy_events: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ResistanceMethod {
    Dirichlet,
    Shortcut,
    V1path,
    Axis,
}

#[derive(Args, Debug)]
struct ResistanceArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [10u32, 20, 40, 80])]
    levels: Vec<u32>,
    /// Compute only one column (default: all).
    #[arg(long, value_enum)]
    method: Option<ResistanceMethod>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CandidateArg {
    Eqf,
    Lognorm,
    Lognorm2m1,
    Logsum,
    Qtilde,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum DomainArg {
    Full,
    Omega,
}

#[derive(Args, Debug)]
struct LyapunovArgs {
    #[arg(long, value_enum)]
    candidate: CandidateArg,
    /// Inner radius, or `auto` for `C1 + 1` (eqf only).
    #[arg(long)]
    r1: String,
    #[arg(long)]
    r2: f64,
    /// Default: omega for the hard-core interaction, full otherwise.
    #[arg(long, value_enum)]
    domain: Option<DomainArg>,
    /// Per-state drift CSV (`state,f,drift`).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum AppendixCommand {
    /// Diagonal-before-axis hitting probability from (x, 1).
    P1 {
        #[arg(long)]
        x: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Grid cap of the exact oracle (default: max(40, 4x)).
        #[arg(long)]
        grid_cap: Option<u32>,
    },
    /// Confinement of the hard-core walk on the six-cycle.
    C6 {
        #[arg(long, default_value_t = 10_000)]
        horizon: u64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
    },
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// `lo:hi:step`.
    #[arg(long, allow_hyphen_values = true)]
    alpha_range: String,
    /// Comma-separated `lo:hi:step` ranges, single values, or `-inf`.
    #[arg(long, allow_hyphen_values = true)]
    beta_range: String,
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'a str,
    command: &'a str,
    report: T,
}

fn json_doc<T: Serialize>(command: &str, report: T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(&Document {
        version: VERSION,
        command,
        report,
    })?;
    s.push('\n');
    Ok(s)
}

/// 17 significant digits.
fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn beta_field(b: Beta) -> String {
    match b {
        Beta::Finite(x) => num(x),
        Beta::HardCore => "-inf".into(),
    }
}

struct Inputs<'a> {
    cli: &'a Cli,
}

impl Inputs<'_> {
    fn graph(&self) -> anyhow::Result<Graph> {
        let name = self
            .cli
            .graph
            .as_deref()
            .ok_or_else(|| usage("--graph is required"))?;
        resolve_graph(name)
    }

    fn params(&self) -> anyhow::Result<Params> {
        if let Some(path) = &self.cli.params {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return Ok(Params::from_json(&text)?);
        }
        let alpha = self.cli.alpha.ok_or_else(|| usage("--alpha is required"))?;
        let beta: Beta = self
            .cli
            .beta
            .as_deref()
            .ok_or_else(|| usage("--beta is required"))?
            .parse()?;
        let variant = match self.cli.variant {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Modified => Variant::Modified,
        };
        Ok(Params::new(alpha, beta, variant)?)
    }

    fn chain(&self) -> anyhow::Result<Chain> {
        Ok(Chain::new(self.params()?, self.graph()?))
    }
}

fn usage(msg: &str) -> anyhow::Error {
    anyhow::Error::new(Error::Input(msg.to_string()))
}

fn resolve_graph(name: &str) -> anyhow::Result<Graph> {
    match name.parse::<GraphFamily>() {
        Ok(f) => Ok(Graph::named(f)?),
        Err(_) if Path::new(name).is_file() => {
            let text = fs::read_to_string(name).with_context(|| format!("reading {name}"))?;
            Ok(Graph::parse_document(&text)?)
        }
        Err(e) => Err(e.into()),
    }
}

fn parse_state(text: &str, n: usize) -> anyhow::Result<State> {
    let coords: Vec<u32> = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| usage(&format!("bad coordinate `{t}`")))
        })
        .collect::<anyhow::Result<_>>()?;
    if coords.len() != n {
        return Err(usage(&format!("start state needs {n} coordinates")));
    }
    Ok(State::new(coords))
}

fn cmd_classify(ctx: &Inputs, dtmc: bool) -> anyhow::Result<String> {
    let p = ctx.params()?;
    let g = ctx.graph()?;
    let kind = if dtmc {
        ChainKind::Dtmc
    } else {
        ChainKind::Ctmc
    };
    let report = classify_report(&p, &g, kind)?;
    match ctx.cli.format.unwrap_or(Format::Json) {
        Format::Json => json_doc("classify", report),
        Format::Csv => {
            let mut s = String::from("alpha,beta,recurrence,explosion,rule\n");
            let ex = report.explosion.as_ref().map_or("NA", |e| e.class.as_str());
            writeln!(
                s,
                "{},{},{},{},{}",
                num(p.alpha),
                beta_field(p.beta),
                report.recurrence.class.as_str(),
                ex,
                report.rule_fired
            )?;
            Ok(s)
        }
    }
}

#[derive(Serialize)]
struct SimulateSummary {
    graph: String,
    params: Params,
    config: SimConfig,
    start: State,
    trials: u64,
    returned_to_origin: u64,
    escaped: u64,
    explosion_suspected: u64,
    event_budget_exhausted: u64,
    return_times: lattice_walks::simulate::ReturnTimeStats,
    mean_events: f64,
    mean_inverse_rate_sum: f64,
    final_states: Vec<State>,
}

fn cmd_simulate(ctx: &Inputs, a: &SimulateArgs) -> anyhow::Result<String> {
    let chain = ctx.chain()?;
    let start = match &a.start {
        Some(t) => parse_state(t, chain.n())?,
        None => State::origin(chain.n()),
    };
    let cfg = SimConfig {
        seed: ctx.cli.seed,
        max_events: a.max_events,
        max_time: a.max_time.unwrap_or(f64::INFINITY),
        norm_cap: a.norm_cap,
        explosion_threshold: a.explosion_threshold,
        stop_at_origin: !a.no_stop_at_origin,
    };
    cfg.validate()?;
    let outcomes = run_many(&chain, &start, &cfg, a.trials)?;
    if let Some(path) = &a.emit_occupancy {
        let occ = occupation(&chain, &start, &cfg, a.occupancy_events)?;
        let mut csv = String::from("state,holding_time\n");
        for (s, t) in &occ.holding {
            writeln!(csv, "{s},{}", num(*t))?;
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    let count = |v| outcomes.iter().filter(|o| o.verdict == v).count() as u64;
    let n = outcomes.len().max(1) as f64;
    let summary = SimulateSummary {
        graph: chain.graph().label(),
        params: *chain.requested_params(),
        config: cfg,
        start,
        trials: a.trials,
        returned_to_origin: count(Verdict::ReturnedToOrigin),
        escaped: count(Verdict::Escaped),
        explosion_suspected: count(Verdict::ExplosionSuspected),
        event_budget_exhausted: count(Verdict::EventBudgetExhausted),
        return_times: summarize_returns(&outcomes),
        mean_events: outcomes.iter().map(|o| o.events as f64).sum::<f64>() / n,
        mean_inverse_rate_sum: outcomes.iter().map(|o| o.inverse_rate_sum).sum::<f64>() / n,
        final_states: outcomes.iter().map(|o| o.final_state.clone()).collect(),
    };
    json_doc("simulate", summary)
}

fn cmd_resistance(ctx: &Inputs, a: &ResistanceArgs) -> anyhow::Result<String> {
    let chain = ctx.chain()?;
    let mut levels = a.levels.clone();
    levels.sort_unstable();
    levels.dedup();
    if levels.first() == Some(&0) {
        return Err(usage("levels must be positive"));
    }
    let want = |m| a.method.is_none() || a.method == Some(m);
    let rows: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|&l| -> anyhow::Result<Vec<f64>> {
            let mut row = vec![l as f64];
            if want(ResistanceMethod::Dirichlet) {
                row.push(effective_resistance(&chain, l)?.r_eff);
            }
            if want(ResistanceMethod::Shortcut) {
                let curve = level_short_circuit_curve(&chain, l)?;
                row.push(curve.last().map_or(0.0, |c| c.partial_sum));
            }
            if want(ResistanceMethod::V1path) {
                row.push(v1_path_upper_bound(&chain, l as usize).unwrap_or(f64::NAN));
            }
            if want(ResistanceMethod::Axis) {
                row.push(axis_path_upper_bound(chain.alpha(), l as usize));
            }
            Ok(row)
        })
        .collect::<anyhow::Result<_>>()?;
    let mut header = vec!["L"];
    for (m, name) in [
        (ResistanceMethod::Dirichlet, "R_eff"),
        (ResistanceMethod::Shortcut, "shortcut_lower"),
        (ResistanceMethod::V1path, "v1path_upper"),
        (ResistanceMethod::Axis, "axis_upper"),
    ] {
        if want(m) {
            header.push(name);
        }
    }
    match ctx.cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for row in rows {
                let mut fields = vec![format!("{}", row[0] as u32)];
                fields.extend(row[1..].iter().map(|&x| num(x)));
                s.push_str(&fields.join(","));
                s.push('\n');
            }
            Ok(s)
        }
        Format::Json => {
            let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
                .iter()
                .map(|row| {
                    header
                        .iter()
                        .zip(row)
                        .map(|(h, &v)| {
                            let val = if *h == "L" {
                                serde_json::Value::from(v as u32)
                            } else {
                                serde_json::Number::from_f64(v)
                                    .map_or(serde_json::Value::Null, Into::into)
                            };
                            (h.to_string(), val)
                        })
                        .collect()
                })
                .collect();
            json_doc("resistance", records)
        }
    }
}

fn cmd_lyapunov(ctx: &Inputs, a: &LyapunovArgs) -> anyhow::Result<String> {
    let chain = ctx.chain()?;
    let candidate = match a.candidate {
        CandidateArg::Eqf => Candidate::Eqf,
        CandidateArg::Lognorm => Candidate::LogNorm,
        CandidateArg::Lognorm2m1 => Candidate::LogNorm2m1,
        CandidateArg::Logsum => Candidate::LogSum,
        CandidateArg::Qtilde => Candidate::QTilde,
    };
    let domain = match a.domain {
        Some(DomainArg::Full) => Domain::Full,
        Some(DomainArg::Omega) => Domain::Omega,
        None if chain.is_hard_core() => Domain::Omega,
        None => Domain::Full,
    };
    let (r1, c1) = if a.r1 == "auto" {
        if candidate != Candidate::Eqf {
            return Err(usage("--r1 auto is only defined for the eqf candidate"));
        }
        let c1 = eqf_c1(&chain, domain, a.r2 + 1.0)?;
        (c1 + 1.0, Some(c1))
    } else {
        (
            a.r1.parse::<f64>()
                .map_err(|_| usage("--r1 must be a number or `auto`"))?,
            None,
        )
    };
    let scan = candidate_scan(&chain, candidate, r1, a.r2, domain)?;
    if let Some(path) = &a.csv {
        let lo = (r1 * r1).floor() as u64;
        let hi = (a.r2 * a.r2).floor() as u64;
        let mut csv = String::from("state,f,drift\n");
        for s in lattice_walks::lattice::states_in_shell(chain.n(), lo, hi) {
            let inside =
                s.norm() > r1 && (domain == Domain::Full || chain.in_hard_core_support(&s));
            if !inside {
                continue;
            }
            let f = candidate.eval(&chain, &s).unwrap_or(f64::NAN);
            let d = lattice_walks::lyapunov::apply_generator(
                &chain,
                |t| candidate.eval(&chain, t),
                &s,
            )?;
            writeln!(csv, "{s},{},{}", num(f), num(d))?;
        }
        fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?;
    }
    #[derive(Serialize)]
    struct Out {
        candidate: Candidate,
        domain: Domain,
        c1: Option<f64>,
        #[serde(flatten)]
        scan: lattice_walks::lyapunov::DriftScan,
    }
    json_doc(
        "lyapunov",
        Out {
            candidate,
            domain,
            c1,
            scan,
        },
    )
}

fn cmd_appendix(ctx: &Inputs, which: &AppendixCommand) -> anyhow::Result<String> {
    match which {
        AppendixCommand::P1 {
            x,
            trials,
            grid_cap,
        } => {
            let est = lemma_p1_estimate(*x, *trials, ctx.cli.seed)?;
            let cap = grid_cap.unwrap_or_else(|| (4 * x).max(40));
            let exact = lemma_p1_exact(*x, cap)?;
            let (lo, hi) = lemma_p1_bounds(*x);
            #[derive(Serialize)]
            struct Out {
                #[serde(flatten)]
                estimate: lattice_walks::appendix::HittingEstimate,
                exact: f64,
                grid_cap: u32,
                lower_bound: f64,
                upper_bound: f64,
            }
            json_doc(
                "appendix p1",
                Out {
                    estimate: est,
                    exact,
                    grid_cap: cap,
                    lower_bound: lo,
                    upper_bound: hi,
                },
            )
        }
        AppendixCommand::C6 { horizon, trials } => json_doc(
            "appendix c6",
            c6_confinement(*horizon, *trials, ctx.cli.seed)?,
        ),
    }
}

fn parse_range(text: &str) -> anyhow::Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let nums = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| usage(&format!("bad number `{s}`")))
    };
    match parts.as_slice() {
        [v] => {
            let v = nums(v)?;
            if !v.is_finite() {
                return Err(usage("range values must be finite"));
            }
            Ok(vec![v])
        }
        [lo, hi, step] => {
            let (lo, hi, step) = (nums(lo)?, nums(hi)?, nums(step)?);
            if !(lo.is_finite() && hi.is_finite()) || hi < lo {
                return Err(usage("range needs finite lo <= hi"));
            }
            if !(step > 0.0 && step.is_finite()) {
                return Err(usage("range step must be positive"));
            }
            let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
            if count > MAX_SWEEP_CELLS {
                return Err(usage("range has too many points"));
            }
            Ok((0..count).map(|k| lo + k as f64 * step).collect())
        }
        _ => Err(usage(&format!("range `{text}` is not lo:hi:step"))),
    }
}

fn cmd_sweep(ctx: &Inputs, a: &SweepArgs) -> anyhow::Result<String> {
    let g = ctx.graph()?;
    let variant = match ctx.cli.variant {
        VariantArg::Standard => Variant::Standard,
        VariantArg::Modified => Variant::Modified,
    };
    let alphas = parse_range(&a.alpha_range)?;
    let mut hard_core = false;
    let mut betas = Vec::new();
    for item in a.beta_range.split(',') {
        if item.trim().eq_ignore_ascii_case("-inf") {
            hard_core = true;
        } else {
            betas.extend(parse_range(item)?);
        }
    }
    betas.sort_by(f64::total_cmp);
    betas.dedup();
    let mut beta_row: Vec<Beta> = Vec::new();
    if hard_core {
        beta_row.push(Beta::HardCore);
    }
    beta_row.extend(betas.into_iter().map(Beta::Finite));
    let cells = alphas.len().saturating_mul(beta_row.len());
    if cells > MAX_SWEEP_CELLS {
        return Err(usage(&format!(
            "sweep grid of {cells} cells exceeds {MAX_SWEEP_CELLS}"
        )));
    }
    let grid: Vec<(f64, Beta)> = alphas
        .iter()
        .flat_map(|&al| beta_row.iter().map(move |&b| (al, b)))
        .collect();
    let rows: Vec<SweepRow> = grid
        .par_iter()
        .map(|&(al, b)| -> anyhow::Result<SweepRow> {
            let p = match Params::new(al, b, variant) {
                Ok(p) => p,
                Err(e) => return Ok(SweepRow::failed(al, b, &e)),
            };
            Ok(match classify_report(&p, &g, ChainKind::Ctmc) {
                Ok(r) => SweepRow {
                    alpha: al,
                    beta: b,
                    recurrence: r.recurrence.class.as_str().to_string(),
                    explosion: r
                        .explosion
                        .map_or("NA".to_string(), |e| e.class.as_str().to_string()),
                    rule: r.rule_fired.to_string(),
                },
                Err(e @ (Error::Undetermined(_) | Error::Capability(_))) => {
                    SweepRow::failed(al, b, &e)
                }
                Err(e) => return Err(e.into()),
            })
        })
        .collect::<anyhow::Result<_>>()?;
    match ctx.cli.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut s = String::from("alpha,beta,recurrence,explosion,rule\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{}",
                    num(r.alpha),
                    beta_field(r.beta),
                    r.recurrence,
                    r.explosion,
                    r.rule
                )?;
            }
            Ok(s)
        }
        Format::Json => json_doc("sweep", rows),
    }
}

#[derive(Serialize)]
struct SweepRow {
    alpha: f64,
    beta: Beta,
    recurrence: String,
    explosion: String,
    rule: String,
}

impl SweepRow {
    fn failed(alpha: f64, beta: Beta, e: &Error) -> Self {
        let tag = match e {
            Error::Undetermined(_) => "Undetermined",
            Error::Capability(_) => "Unsupported",
            _ => "Invalid",
        };
        Self {
            alpha,
            beta,
            recurrence: tag.into(),
            explosion: tag.into(),
            rule: "none".into(),
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("LATTICE_WALKS_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|_| anyhow!("LATTICE_WALKS_THREADS must be a positive integer"))?;
        if n == 0 {
            bail!("LATTICE_WALKS_THREADS must be a positive integer");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    configure_threads()?;
    let ctx = Inputs { cli };
    let output = match &cli.command {
        Command::Classify { dtmc } => cmd_classify(&ctx, *dtmc)?,
        Command::Simulate(a) => cmd_simulate(&ctx, a)?,
        Command::Resistance(a) => cmd_resistance(&ctx, a)?,
        Command::Lyapunov(a) => cmd_lyapunov(&ctx, a)?,
        Command::Appendix { which } => cmd_appendix(&ctx, which)?,
        Command::Sweep(a) => cmd_sweep(&ctx, a)?,
    };
    match &cli.out {
        Some(path) => {
            fs::write(path, output).with_context(|| format!("writing {}", path.display()))?
        }
        None => std::io::stdout().write_all(output.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Input(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
