//! `agreement`: generate, simulate, monitor and bound-check traces of the
//! delayed agreement algorithm.
//!
//! Exit codes: 0 converged / holds / verified, 2 domain-negative result,
//! 1 usage or data error.

mod commands;
mod source;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use agreement_core::{Error, Result};
use commands::{Outcome, OutputArgs, RunResult};
use source::SourceArgs;

#[derive(Debug, Parser)]
#[command(name = "agreement", version, about = "Agreement algorithm with bounded delays")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a scenario trace as JSON.
    Generate(commands::GenerateArgs),
    /// Run the delayed recursion and report consensus.
    Simulate(commands::SimulateArgs),
    /// Evaluate connectivity conditions on a trace.
    Check(commands::CheckArgs),
    /// Verify a contraction bound on the augmented product.
    Bounds(commands::BoundsArgs),
    /// Write one of the reference non-convergent traces.
    Repro(commands::ReproArgs),
}

fn write_out(path: Option<&Path>, payload: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, payload).map_err(Error::from),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(payload.as_bytes())?;
            out.flush().map_err(Error::from)
        }
    }
}

fn finish(result: Result<RunResult>, output: &OutputArgs) -> u8 {
    match result.and_then(|r| {
        write_out(output.out.as_deref(), &r.payload)?;
        for n in &r.notes {
            eprintln!("# {n}");
        }
        Ok(r.outcome)
    }) {
        Ok(o) => o as u8,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

type SeedResult = Result<(Outcome, Vec<String>)>;

/// Runs `f` for every seed of the sweep in parallel, one output file per seed.
fn sweep(
    seeds: Vec<u64>,
    source: &SourceArgs,
    output: &OutputArgs,
    ext: &str,
    f: impl Fn(u64) -> Result<RunResult> + Sync,
) -> u8 {
    let Some(dir) = &output.out_dir else {
        eprintln!("error: --seeds needs --out-dir");
        return 1;
    };
    if let Err(e) = fs::create_dir_all(dir) {
        eprintln!("error: cannot create {}: {e}", dir.display());
        return 1;
    }
    let family = source.family.as_deref().unwrap_or("trace");
    let results: Vec<(u64, SeedResult)> = seeds
        .into_par_iter()
        .map(|seed| {
            let r = f(seed).and_then(|r| {
                fs::write(dir.join(format!("{family}-seed{seed}.{ext}")), &r.payload)?;
                Ok((r.outcome, r.notes))
            });
            (seed, r)
        })
        .collect();
    let mut code = 0u8;
    for (seed, r) in results {
        match r {
            Ok((o, notes)) => {
                println!("seed={seed} exit={} {}", o as u8, notes.join(" | "));
                code = code.max(o as u8);
            }
            Err(e) => {
                println!("seed={seed} exit=1 error: {e}");
                code = 1;
            }
        }
    }
    code
}

macro_rules! dispatch {
    ($args:expr, $ext:expr, $run:path) => {{
        let args = $args;
        match args.source.seed_range() {
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
            Ok(Some(seeds)) => sweep(seeds, &args.source, &args.output, $ext, |s| $run(&args, s)),
            Ok(None) => finish($run(&args, args.source.seed), &args.output),
        }
    }};
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let code = match cli.command {
        Command::Generate(a) => dispatch!(a, "json", commands::generate),
        Command::Simulate(a) => {
            let ext = a.format.extension();
            dispatch!(a, ext, commands::simulate)
        }
        Command::Check(a) => {
            let ext = a.format.extension();
            dispatch!(a, ext, commands::check)
        }
        Command::Bounds(a) => {
            let ext = a.format.extension();
            dispatch!(a, ext, commands::bounds)
        }
        Command::Repro(a) => finish(commands::repro(&a), &a.output),
    };
    ExitCode::from(code)
}
