//! Where a command's trace comes from: a file, a generator, or one of the
//! reference counterexamples.

use std::path::PathBuf;

use agreement_core::matrix::{parse_rational, Mode, Rational};
use agreement_core::scenario::{
    counterexample_permutation, counterexample_shifting, default_eps, generate, DelayMode, Family, FamilyOptions,
    GeneratorSpec,
};
use agreement_core::trace::AnyTrace;
use agreement_core::{Error, Result};
use clap::{Args, ValueEnum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Repro {
    Permutation,
    Shifting,
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    /// Scenario trace file (JSON).
    #[arg(long, conflicts_with_all = ["family", "repro"])]
    pub trace: Option<PathBuf>,

    /// Generator family: coordinated, decentralized, equal_neighbor,
    /// diamond_c, diamond_d2, dstar.
    #[arg(long, conflicts_with = "repro")]
    pub family: Option<String>,

    /// Reference non-convergent trace.
    #[arg(long, value_enum)]
    pub repro: Option<Repro>,

    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub delta: usize,
    /// Weight floor, as `p/q` or a decimal.
    #[arg(long, default_value = "1/5")]
    pub alpha: String,
    #[arg(long, default_value_t = 200)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Inclusive seed range `a..b` run in parallel; needs `--out-dir`.
    #[arg(long)]
    pub seeds: Option<String>,
    /// zero, max or random_nonfifo.
    #[arg(long, default_value = "zero")]
    pub delays: String,
    #[arg(long, default_value_t = 3)]
    pub window: usize,
    /// Granularity of the diamond families.
    #[arg(long, default_value_t = 2)]
    pub gen_phi: usize,
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub symmetric: bool,
    /// Comma-separated coordinator agents (0-based).
    #[arg(long, value_delimiter = ',')]
    pub coordinators: Vec<usize>,
    #[arg(long, default_value_t = 0.25)]
    pub extra_edge_prob: f64,

    /// Phases of the shifting counterexample.
    #[arg(long, default_value_t = 12)]
    pub phases: usize,

    /// Arithmetic: rational (exact) or float. Defaults to the file's mode,
    /// rational otherwise.
    #[arg(long)]
    pub arith: Option<String>,
}

pub struct Loaded {
    pub trace: AnyTrace,
    /// Everything needed to rebuild the trace.
    pub header: String,
}

impl SourceArgs {
    pub fn seed_range(&self) -> Result<Option<Vec<u64>>> {
        let Some(s) = &self.seeds else { return Ok(None) };
        let bad = || Error::param("seeds", format!("expected a..b, got {s:?}"));
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if b < a {
            return Err(bad());
        }
        if self.family.is_none() {
            return Err(Error::param("seeds", "seed sweeps need --family"));
        }
        Ok(Some((a..=b).collect()))
    }

    pub fn spec(&self, seed: u64) -> Result<GeneratorSpec> {
        let family: Family = self.family.as_deref().unwrap_or_default().parse()?;
        let n = self.n.ok_or_else(|| Error::param("n", "required with --family"))?;
        let alpha = parse_rational(&self.alpha).map_err(|e| Error::parse("alpha", e.to_string()))?;
        let delays: DelayMode = self.delays.parse()?;
        let options = FamilyOptions {
            coordinators: self.coordinators.clone(),
            window: self.window,
            blocks: self.blocks,
            symmetric: self.symmetric,
            phi: self.gen_phi,
            extra_edge_prob: self.extra_edge_prob,
        };
        Ok(GeneratorSpec::new(family, n, self.delta, alpha, self.horizon, seed)
            .with_delays(delays)
            .with_options(options))
    }

    fn arith(&self) -> Result<Option<Mode>> {
        self.arith.as_deref().map(str::parse).transpose()
    }

    pub fn load(&self, seed: u64) -> Result<Loaded> {
        let (trace, header) = if let Some(path) = &self.trace {
            let t = AnyTrace::load(path)?;
            let m = t.meta();
            let mut header = format!("trace={} generator={}", path.display(), m.generator);
            if let Some(s) = m.seed {
                header.push_str(&format!(" seed={s}"));
            }
            for (k, v) in &m.params {
                header.push_str(&format!(" {k}={v}"));
            }
            (t, header)
        } else if let Some(r) = self.repro {
            match r {
                Repro::Permutation => (
                    AnyTrace::Rational(counterexample_permutation(self.horizon)),
                    format!("repro=permutation horizon={}", self.horizon),
                ),
                Repro::Shifting => {
                    let run = counterexample_shifting(&default_eps(self.phases.div_ceil(2)), self.phases)?;
                    let h = format!("repro=shifting phases={} horizon={}", self.phases, run.trace.horizon());
                    (AnyTrace::Rational(run.trace), h)
                }
            }
        } else if self.family.is_some() {
            let spec = self.spec(seed)?;
            (AnyTrace::Rational(generate(&spec)?), spec.header())
        } else {
            return Err(Error::param("trace", "give one of --trace, --family or --repro"));
        };
        let trace = match (self.arith()?, trace) {
            (Some(Mode::Float), AnyTrace::Rational(t)) => AnyTrace::Float(t.to_float()),
            (Some(Mode::Rational), AnyTrace::Float(_)) => {
                return Err(Error::param("arith", "a float trace cannot be made exact"))
            }
            (_, t) => t,
        };
        Ok(Loaded { trace, header })
    }
}

/// Comma-separated exact values.
pub fn parse_vector(s: &str, field: &str) -> Result<Vec<Rational>> {
    s.split(',')
        .enumerate()
        .map(|(k, v)| parse_rational(v).map_err(|e| Error::parse(format!("{field}[{k}]"), e.to_string())))
        .collect()
}

/// A tolerance given as `p/q`, a decimal, or in scientific notation.
pub fn parse_tol(s: &str) -> Result<Rational> {
    parse_rational(s).or_else(|_| {
        let f: f64 = s
            .trim()
            .parse()
            .map_err(|_| Error::parse("tol", format!("not a number: {s:?}")))?;
        if !f.is_finite() {
            return Err(Error::parse("tol", format!("not finite: {s:?}")));
        }
        // f64 Display never uses exponent notation.
        parse_rational(&f.to_string())
    })
}
