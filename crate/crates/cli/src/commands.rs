use std::path::PathBuf;

use agreement_core::delay::{verify_bound, BoundKind, BoundOptions, BoundStatus};
use agreement_core::graph::Digraph;
use agreement_core::matrix::{render, Rational, Scalar};
use agreement_core::monitor::{
    check_bic, check_c, check_d1, check_d2, check_diamond, check_dstar, search_bic, search_diamond, Condition,
    ConditionReport, GraphKind,
};
use agreement_core::scenario::{counterexample_permutation, counterexample_shifting, default_eps};
use agreement_core::sim::{consensus_verdict, run_delayed, Trajectory};
use agreement_core::trace::{AnyTrace, ScenarioTrace};
use agreement_core::{Error, Result};
use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use crate::source::{parse_tol, parse_vector, Loaded, Repro, SourceArgs};

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Ok = 0,
    /// Did not converge, condition fails, bound not reached.
    Negative = 2,
}

pub struct RunResult {
    pub outcome: Outcome,
    /// Main output: a trace, a trajectory or a report.
    pub payload: String,
    /// Short human-readable lines for stderr.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Table,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Table => "txt",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for per-seed outputs of a `--seeds` sweep.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize") + "\n"
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn generate(args: &GenerateArgs, seed: u64) -> Result<RunResult> {
    let Loaded { trace, header } = args.source.load(seed)?;
    Ok(RunResult {
        outcome: Outcome::Ok,
        payload: pretty(&trace.to_json()),
        notes: vec![header],
    })
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Initial values, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: String,
    /// Consensus tolerance on osc(x(t)).
    #[arg(long, default_value = "1e-8")]
    pub tol: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn simulate_typed<S: Scalar>(
    trace: &ScenarioTrace<S>,
    x0: &[S],
    tol: &S,
    format: Format,
    header: &str,
) -> Result<RunResult> {
    let traj: Trajectory<S> = run_delayed(trace, x0)?;
    let v = consensus_verdict(&traj, tol)?;
    let summary = match v.t_hit {
        Some(t) => format!("converged: osc < {} at t={t}", render(tol)),
        None => format!("not converged by t={}: final osc {}", v.horizon, v.final_osc),
    };
    let payload = match format {
        Format::Json => {
            let mut doc = traj.to_json();
            doc["header"] = json!(header);
            doc["verdict"] = serde_json::to_value(&v)?;
            pretty(&doc)
        }
        _ => traj.to_csv(),
    };
    Ok(RunResult {
        outcome: if v.converged { Outcome::Ok } else { Outcome::Negative },
        payload,
        notes: vec![header.to_string(), summary],
    })
}

pub fn simulate(args: &SimulateArgs, seed: u64) -> Result<RunResult> {
    if args.format == Format::Table {
        return Err(Error::param("format", "simulate writes csv or json"));
    }
    let Loaded { trace, header } = args.source.load(seed)?;
    let x0 = parse_vector(&args.x0, "x0")?;
    let tol = parse_tol(&args.tol)?;
    match &trace {
        AnyTrace::Rational(t) => simulate_typed(t, &x0, &tol, args.format, &header),
        AnyTrace::Float(t) => {
            let x0: Vec<f64> = x0.iter().map(Scalar::to_f64).collect();
            simulate_typed(t, &x0, &tol.to_f64(), args.format, &header)
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Comma-separated: C, D1, D2, Dstar, diamondC, diamondD2, bic.
    #[arg(long, value_delimiter = ',', required = true)]
    pub conditions: Vec<String>,
    /// Window length for diamondC, diamondD2 and bic; searched if absent.
    #[arg(long)]
    pub phi: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub t0: usize,
    /// Declared period of the graph sequence; defaults to the trace's own.
    #[arg(long)]
    pub period: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn graphs_of(trace: &AnyTrace) -> Vec<Digraph> {
    match trace {
        AnyTrace::Rational(t) => t.graphs(),
        AnyTrace::Float(t) => t.graphs(),
    }
}

fn searched(
    found: Option<ConditionReport>,
    fallback: Result<ConditionReport>,
    horizon: usize,
) -> Result<ConditionReport> {
    match found {
        Some(r) => Ok(r),
        None => {
            let mut r = fallback?;
            r.notes.push(format!("no window length up to {horizon} works"));
            Ok(r)
        }
    }
}

pub fn run_condition(
    c: Condition,
    graphs: &[Digraph],
    args: &CheckArgs,
    period: Option<usize>,
) -> Result<ConditionReport> {
    let h = graphs.len();
    let diamond = |kind| match args.phi {
        Some(phi) => check_diamond(graphs, kind, args.t0, phi),
        None => searched(
            search_diamond(graphs, kind, args.t0, h),
            check_diamond(graphs, kind, args.t0, 1),
            h,
        ),
    };
    match c {
        Condition::C => Ok(check_c(graphs)),
        Condition::D2 => Ok(check_d2(graphs)),
        Condition::D1 => check_d1(graphs, args.t0, period),
        Condition::Dstar => check_dstar(graphs, args.t0, period),
        Condition::DiamondC => diamond(GraphKind::Oriented),
        Condition::DiamondD2 => diamond(GraphKind::Reducible),
        Condition::Bic => match args.phi {
            Some(phi) => check_bic(graphs, phi),
            None => searched(search_bic(graphs, h), check_bic(graphs, 1), h),
        },
    }
}

pub fn check(args: &CheckArgs, seed: u64) -> Result<RunResult> {
    if args.format == Format::Csv {
        return Err(Error::param("format", "check writes table or json"));
    }
    let conditions = args
        .conditions
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<Condition>>>()?;
    if args.phi == Some(0) {
        return Err(Error::param("phi", "must be at least 1"));
    }
    let Loaded { trace, header } = args.source.load(seed)?;
    let graphs = graphs_of(&trace);
    let period = args.period.or(trace.meta().period);
    let reports = conditions
        .iter()
        .map(|&c| run_condition(c, &graphs, args, period))
        .collect::<Result<Vec<_>>>()?;
    let all_ok = reports.iter().all(ConditionReport::ok);
    let table: Vec<String> = reports
        .iter()
        .map(|r| {
            let mut line = format!("{}: {}", r.condition, r.summary());
            if let Some(phi) = r.params.phi {
                line.push_str(&format!(" (phi={phi})"));
            }
            for n in &r.notes {
                line.push_str(&format!("; {n}"));
            }
            line
        })
        .collect();
    let payload = match args.format {
        Format::Json => pretty(&json!({ "schema": "v1", "header": header, "reports": reports })),
        _ => table.iter().map(|l| l.clone() + "\n").collect(),
    };
    Ok(RunResult {
        outcome: if all_ok { Outcome::Ok } else { Outcome::Negative },
        payload,
        notes: vec![header],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundMode {
    Coordinated,
    Decentralized,
    Granular,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Start of the product; defaults to delta - 1.
    #[arg(long)]
    pub t0: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: BoundMode,
    /// Window length of the granular bound.
    #[arg(long)]
    pub phi: Option<usize>,
    /// Skip the per-step support assertions.
    #[arg(long)]
    pub no_checks: bool,
    /// Follow the pi floor only this many steps past the checkpoint.
    #[arg(long)]
    pub pi_window: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn bounds(args: &BoundsArgs, seed: u64) -> Result<RunResult> {
    if args.format == Format::Csv {
        return Err(Error::param("format", "bounds writes table or json"));
    }
    let kind = match (args.mode, args.phi) {
        (BoundMode::Coordinated, _) => BoundKind::Coordinated,
        (BoundMode::Decentralized, _) => BoundKind::Decentralized,
        (BoundMode::Granular, Some(phi)) if phi > 0 => BoundKind::Granular { phi },
        (BoundMode::Granular, _) => return Err(Error::param("phi", "granular bounds need --phi >= 1")),
    };
    let Loaded { trace, header } = args.source.load(seed)?;
    let AnyTrace::Rational(trace) = trace else {
        return Err(Error::Capability(
            "bound verification needs exact arithmetic; drop --arith float or regenerate the trace in rational mode"
                .into(),
        ));
    };
    let t0 = args.t0.unwrap_or(trace.delta() - 1);
    let opts = BoundOptions {
        checks: !args.no_checks,
        pi_window: args.pi_window,
    };
    let rep = verify_bound(&trace, t0, kind, opts)?;
    let outcome = if rep.status == BoundStatus::Verified && rep.floor_failures.is_empty() {
        Outcome::Ok
    } else {
        Outcome::Negative
    };
    let status = match rep.status {
        BoundStatus::Verified => "verified",
        BoundStatus::Violated => "violated",
        BoundStatus::Inconclusive => "inconclusive",
    };
    let summary = format!(
        "{kind}: {status} at checkpoint {}; measured {} <= bound {}{}",
        rep.checkpoint.map_or("-".into(), |c| c.to_string()),
        rep.measured.as_deref().unwrap_or("-"),
        rep.bound,
        if rep.note.is_empty() {
            String::new()
        } else {
            format!("; {}", rep.note)
        }
    );
    let payload = match args.format {
        Format::Json => {
            let mut doc = serde_json::to_value(&rep)?;
            doc["schema"] = json!("v1");
            doc["header"] = json!(header);
            pretty(&doc)
        }
        _ => {
            let mut s = summary.clone() + "\n";
            for f in &rep.floor_failures {
                s.push_str(&format!("floor failure: {f}\n"));
            }
            s
        }
    };
    Ok(RunResult {
        outcome,
        payload,
        notes: vec![header],
    })
}

#[derive(Debug, Clone, Args)]
pub struct ReproArgs {
    #[arg(value_enum)]
    pub which: Repro,
    /// Length of the permutation trace.
    #[arg(long, default_value_t = 30)]
    pub horizon: usize,
    /// Phases of the shifting trace.
    #[arg(long, default_value_t = 12)]
    pub phases: usize,
    /// Comma-separated epsilons for the shifting trace.
    #[arg(long)]
    pub eps: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Writes a reference trace and lists which hypotheses it meets.
pub fn repro(args: &ReproArgs) -> Result<RunResult> {
    let (trace, header): (ScenarioTrace<Rational>, String) = match args.which {
        Repro::Permutation => (
            counterexample_permutation(args.horizon),
            format!("repro=permutation horizon={}", args.horizon),
        ),
        Repro::Shifting => {
            let eps = match &args.eps {
                Some(s) => parse_vector(s, "eps")?,
                None => default_eps(args.phases.div_ceil(2)),
            };
            let run = counterexample_shifting(&eps, args.phases)?;
            let header = format!(
                "repro=shifting phases={} eps={} horizon={}",
                args.phases,
                eps.iter().map(render).collect::<Vec<_>>().join(","),
                run.trace.horizon()
            );
            (run.trace, header)
        }
    };
    let graphs = trace.graphs();
    let period = trace.meta.period;
    let mut notes = vec![header];
    for (name, r) in [
        ("C", Ok(check_c(&graphs))),
        ("D1", check_d1(&graphs, 0, period)),
        ("D2", Ok(check_d2(&graphs))),
        ("Dstar", check_dstar(&graphs, 0, period)),
    ] {
        let r = r?;
        let mut line = format!("{name}: {}", r.summary());
        for n in &r.notes {
            line.push_str(&format!("; {n}"));
        }
        notes.push(line);
    }
    notes.push(format!("positive diagonal: {}", trace.satisfies_a2()));
    Ok(RunResult {
        outcome: Outcome::Ok,
        payload: pretty(&trace.to_json()),
        notes,
    })
}
