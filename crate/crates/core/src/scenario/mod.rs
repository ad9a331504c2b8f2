//! Seeded scenario generators and the two non-convergent reference traces.
//!
//! Every generator draws from one `ChaCha8Rng` seeded with `spec.seed`:
//! graphs and weights step by step, then the delay table. The same
//! `(family, seed, params)` always yields the same trace.

mod counterexamples;
mod delays;
mod families;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use counterexamples::{counterexample_permutation, counterexample_shifting, default_eps, ShiftingRun};
pub use delays::{gen_delays, DelayMode};

use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::matrix::{render, Rational, Scalar, StochasticMatrix};
use crate::monitor::{check_c, check_d1, check_d2, check_diamond, check_dstar, GraphKind};
use crate::trace::{ScenarioTrace, TraceMeta};
use families::{alpha_parts, check_degree, degree_cap, equal_weights, weigh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Every graph oriented: random in-tree toward a coordinator plus extras.
    Coordinated,
    /// Every graph completely reducible; window unions strongly connected.
    Decentralized,
    /// Oriented graphs with weight `1/deg` on each row.
    EqualNeighbor,
    /// Oriented only over products of `phi` consecutive steps.
    DiamondC,
    /// Completely reducible only over products of `phi` consecutive steps.
    DiamondD2,
    /// A fixed agent whose component is oriented toward it at every step,
    /// all other components strongly connected.
    Dstar,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Coordinated,
        Family::Decentralized,
        Family::EqualNeighbor,
        Family::DiamondC,
        Family::DiamondD2,
        Family::Dstar,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Family::Coordinated => "coordinated",
            Family::Decentralized => "decentralized",
            Family::EqualNeighbor => "equal_neighbor",
            Family::DiamondC => "diamond_c",
            Family::DiamondD2 => "diamond_d2",
            Family::Dstar => "dstar",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.replace('-', "_");
        Family::ALL.into_iter().find(|f| f.name() == key).ok_or_else(|| {
            Error::param(
                "family",
                format!(
                    "unknown family {s:?}; expected one of coordinated, decentralized, \
                         equal_neighbor, diamond_c, diamond_d2, dstar"
                ),
            )
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyOptions {
    /// Coordinators cycled through step by step (coordinated), the root of
    /// the fixed tree (diamond_c), or the fixed agent (dstar). Empty: random.
    pub coordinators: Vec<usize>,
    /// Steps per window whose graph union is made strongly connected
    /// (decentralized) or oriented (dstar).
    pub window: usize,
    /// Largest number of blocks in a random partition.
    pub blocks: Option<usize>,
    /// Symmetric edges within blocks (decentralized).
    pub symmetric: bool,
    /// Granularity of the diamond families.
    pub phi: usize,
    /// Probability of each optional extra edge.
    pub extra_edge_prob: f64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            coordinators: Vec::new(),
            window: 3,
            blocks: None,
            symmetric: false,
            phi: 2,
            extra_edge_prob: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorSpec {
    pub family: Family,
    pub n: usize,
    pub delta: usize,
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational,
    pub horizon: usize,
    pub seed: u64,
    pub delays: DelayMode,
    pub options: FamilyOptions,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&render(q))
}

impl GeneratorSpec {
    pub fn new(family: Family, n: usize, delta: usize, alpha: Rational, horizon: usize, seed: u64) -> Self {
        GeneratorSpec {
            family,
            n,
            delta,
            alpha,
            horizon,
            seed,
            delays: DelayMode::Zero,
            options: FamilyOptions::default(),
        }
    }

    pub fn with_delays(mut self, mode: DelayMode) -> Self {
        self.delays = mode;
        self
    }

    pub fn with_options(mut self, options: FamilyOptions) -> Self {
        self.options = options;
        self
    }

    /// One line naming everything needed to regenerate the trace.
    pub fn header(&self) -> String {
        format!(
            "family={} seed={} n={} delta={} alpha={} horizon={} delays={} window={} phi={} blocks={} symmetric={} coordinators={:?} extra_edge_prob={}",
            self.family,
            self.seed,
            self.n,
            self.delta,
            render(&self.alpha),
            self.horizon,
            self.delays,
            self.options.window,
            self.options.phi,
            self.options.blocks.map_or("auto".to_string(), |b| b.to_string()),
            self.options.symmetric,
            self.options.coordinators,
            self.options.extra_edge_prob,
        )
    }

    fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("n".into(), self.n.to_string());
        m.insert("delta".into(), self.delta.to_string());
        m.insert("alpha".into(), render(&self.alpha));
        m.insert("horizon".into(), self.horizon.to_string());
        m.insert("delays".into(), self.delays.to_string());
        m.insert("window".into(), self.options.window.to_string());
        m.insert("phi".into(), self.options.phi.to_string());
        m.insert("symmetric".into(), self.options.symmetric.to_string());
        m.insert("extra_edge_prob".into(), self.options.extra_edge_prob.to_string());
        if let Some(b) = self.options.blocks {
            m.insert("blocks".into(), b.to_string());
        }
        if !self.options.coordinators.is_empty() {
            m.insert("coordinators".into(), format!("{:?}", self.options.coordinators));
        }
        m
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if self.delta == 0 {
            return Err(Error::param("delta", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least 1"));
        }
        if self.options.window == 0 {
            return Err(Error::param("window", "must be at least 1"));
        }
        if self.options.phi == 0 {
            return Err(Error::param("phi", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.options.extra_edge_prob) {
            return Err(Error::param("extra_edge_prob", "must lie in [0, 1]"));
        }
        if let Some(&c) = self.options.coordinators.iter().find(|&&c| c >= self.n) {
            return Err(Error::param("coordinators", format!("agent {c} outside 0..{}", self.n)));
        }
        Ok(())
    }
}

/// Generates the trace described by `spec` in exact arithmetic and checks
/// it against its family's monitor.
pub fn generate(spec: &GeneratorSpec) -> Result<ScenarioTrace<Rational>> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let equal = spec.family == Family::EqualNeighbor;
    let alpha = if equal {
        Rational::from_ratio(1, n as i64)
    } else {
        spec.alpha.clone()
    };
    let parts = alpha_parts(&alpha)?;
    let cap = if equal { n } else { degree_cap(parts).min(n) };
    if n > 1 && !equal {
        let needed = if spec.options.symmetric && spec.family == Family::Decentralized && n > 2 {
            3
        } else {
            2
        };
        check_degree(parts, needed)?;
    }

    let graphs: Vec<Digraph> = match spec.family {
        Family::Coordinated | Family::EqualNeighbor => families::coordinated_graphs(&mut rng, spec, cap),
        Family::Decentralized => families::decentralized_graphs(&mut rng, spec, cap),
        Family::DiamondC => families::granular_graphs(&mut rng, spec, cap, true),
        Family::DiamondD2 => families::granular_graphs(&mut rng, spec, cap, false),
        Family::Dstar => {
            let j = match spec.options.coordinators.first() {
                Some(&j) => j,
                None => rng.gen_range(0..n),
            };
            families::dstar_graphs(&mut rng, spec, cap, j)
        }
    };
    let matrices = graphs
        .iter()
        .map(|g| {
            if equal {
                equal_weights(g)
            } else {
                weigh(&mut rng, g, parts)
            }
        })
        .collect::<Result<Vec<StochasticMatrix<Rational>>>>()?;
    let delays = delays::delays_with(&mut rng, n, spec.delta, spec.horizon, spec.delays)?;
    let meta = TraceMeta {
        generator: spec.family.name().into(),
        seed: Some(spec.seed),
        violates_a2: false,
        period: None,
        params: spec.params(),
    };
    let trace = ScenarioTrace::new(alpha, matrices, delays, meta)?;
    self_check(spec, &graphs)?;
    Ok(trace)
}

/// Generator/monitor cross-validation.
fn self_check(spec: &GeneratorSpec, graphs: &[Digraph]) -> Result<()> {
    let fail = |what: &str, detail: String| {
        Err(Error::InvalidTrace(format!(
            "{} generator produced a trace failing {what}: {detail}",
            spec.family
        )))
    };
    let report = match spec.family {
        Family::Coordinated | Family::EqualNeighbor => check_c(graphs),
        Family::Decentralized => {
            let d2 = check_d2(graphs);
            if !d2.ok() {
                return fail("D2", d2.summary());
            }
            // Each full window's union is strongly connected.
            let w = spec.options.window;
            let mut t = 0;
            while t + w <= graphs.len() {
                let r = check_d1(&graphs[t..t + w], 0, None)?;
                if !r.ok() {
                    return fail(
                        "the window union check",
                        format!("window starting at {t}: {}", r.summary()),
                    );
                }
                t += w;
            }
            d2
        }
        Family::DiamondC | Family::DiamondD2 => {
            let kind = if spec.family == Family::DiamondC {
                GraphKind::Oriented
            } else {
                GraphKind::Reducible
            };
            if graphs.len() < spec.options.phi {
                return Ok(());
            }
            check_diamond(graphs, kind, 0, spec.options.phi)?
        }
        Family::Dstar => check_dstar(graphs, 0, None)?,
    };
    if !report.ok() {
        return fail(report.condition.name(), report.summary());
    }
    Ok(())
}
