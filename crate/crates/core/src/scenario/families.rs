//! Random graph sequences for each model family, and weights on them.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::GeneratorSpec;
use crate::error::{Error, Result};
use crate::graph::Digraph;
use crate::matrix::{Rational, Scalar, StochasticMatrix};

/// `alpha = a / b` with both parts small enough for `i64` weight units.
pub(crate) fn alpha_parts(alpha: &Rational) -> Result<(i64, i64)> {
    let bad = || Error::param("alpha", format!("{alpha} must lie in (0, 1]"));
    if !alpha.is_positive() || *alpha > Rational::from_ratio(1, 1) {
        return Err(bad());
    }
    let a = alpha.numer().to_i64().ok_or_else(bad)?;
    let b = alpha.denom().to_i64().ok_or_else(bad)?;
    if b > 1 << 20 {
        return Err(Error::param("alpha", "denominator too large for generated weights"));
    }
    Ok((a, b))
}

/// Largest in-degree (self included) a row can carry with entries `>= alpha`.
pub(crate) fn degree_cap(alpha: (i64, i64)) -> usize {
    (alpha.1 / alpha.0) as usize
}

pub(crate) fn check_degree(alpha: (i64, i64), needed: usize) -> Result<()> {
    if needed > degree_cap(alpha) {
        return Err(Error::param(
            "alpha",
            format!(
                "{}/{} is too large: rows need {needed} positive entries of at least alpha",
                alpha.0, alpha.1
            ),
        ));
    }
    Ok(())
}

/// Random row weights on `support`, each a multiple of `1 / (4b)` and at
/// least `alpha`.
fn random_row(rng: &mut ChaCha8Rng, n: usize, support: &[usize], alpha: (i64, i64)) -> Vec<Rational> {
    let units = 4 * alpha.1;
    let base = 4 * alpha.0;
    let mut w = vec![base; support.len()];
    let spare = units - base * support.len() as i64;
    debug_assert!(spare >= 0);
    for _ in 0..spare {
        w[rng.gen_range(0..support.len())] += 1;
    }
    let mut row = vec![Rational::from_ratio(0, 1); n];
    for (&j, &u) in support.iter().zip(&w) {
        row[j] = Rational::from_ratio(u, units);
    }
    row
}

/// Row-stochastic matrix on the graph `g` (which must carry self-loops).
pub(crate) fn weigh(rng: &mut ChaCha8Rng, g: &Digraph, alpha: (i64, i64)) -> Result<StochasticMatrix<Rational>> {
    let rows = (0..g.n())
        .map(|i| {
            let support: Vec<usize> = g.successors(i).collect();
            random_row(rng, g.n(), &support, alpha)
        })
        .collect();
    StochasticMatrix::new(rows)
}

/// Equal weights `1 / deg(i)` on each row's support.
pub(crate) fn equal_weights(g: &Digraph) -> Result<StochasticMatrix<Rational>> {
    let rows = (0..g.n())
        .map(|i| {
            let support: Vec<usize> = g.successors(i).collect();
            let mut row = vec![Rational::from_ratio(0, 1); g.n()];
            for &j in &support {
                row[j] = Rational::from_ratio(1, support.len() as i64);
            }
            row
        })
        .collect();
    StochasticMatrix::new(rows)
}

fn with_loops(n: usize) -> Digraph {
    let mut g = Digraph::empty(n);
    for i in 0..n {
        g.add_edge(i, i);
    }
    g
}

/// Adds each absent edge `(i, j)` with `i, j` in `nodes` with probability
/// `p`, as long as row `i` stays within `cap` entries.
fn sprinkle(rng: &mut ChaCha8Rng, g: &mut Digraph, nodes: &[usize], p: f64, cap: usize) {
    for &i in nodes {
        for &j in nodes {
            if g.has_edge(i, j) || g.successors(i).count() >= cap {
                continue;
            }
            if rng.gen_bool(p) {
                g.add_edge(i, j);
            }
        }
    }
}

/// Random in-tree on `nodes` toward `root`: every node hears its parent.
fn in_tree(rng: &mut ChaCha8Rng, g: &mut Digraph, nodes: &[usize], root: usize) {
    let mut rest: Vec<usize> = nodes.iter().copied().filter(|&v| v != root).collect();
    rest.shuffle(rng);
    let mut attached = vec![root];
    for v in rest {
        let parent = attached[rng.gen_range(0..attached.len())];
        g.add_edge(v, parent);
        attached.push(v);
    }
}

fn cycle(g: &mut Digraph, block: &[usize], symmetric: bool) {
    if block.len() < 2 {
        return;
    }
    for (k, &u) in block.iter().enumerate() {
        let v = block[(k + 1) % block.len()];
        g.add_edge(u, v);
        if symmetric {
            g.add_edge(v, u);
        }
    }
}

fn random_partition(rng: &mut ChaCha8Rng, nodes: &[usize], max_blocks: usize) -> Vec<Vec<usize>> {
    let mut order = nodes.to_vec();
    order.shuffle(rng);
    let k = rng.gen_range(1..=max_blocks.clamp(1, order.len().max(1)));
    let mut cuts: Vec<usize> = (1..order.len()).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(k);
    let mut from = 0;
    for c in cuts.into_iter().chain(std::iter::once(order.len())) {
        blocks.push(order[from..c].to_vec());
        from = c;
    }
    blocks
}

/// Strongly connected pieces on each block: a Hamiltonian cycle plus chords.
fn reducible_step(rng: &mut ChaCha8Rng, blocks: &[Vec<usize>], n: usize, spec: &GeneratorSpec, cap: usize) -> Digraph {
    let mut g = with_loops(n);
    for b in blocks {
        cycle(&mut g, b, spec.options.symmetric);
    }
    for b in blocks {
        if spec.options.symmetric {
            sprinkle_symmetric(rng, &mut g, b, spec.options.extra_edge_prob, cap);
        } else {
            sprinkle(rng, &mut g, b, spec.options.extra_edge_prob, cap);
        }
    }
    g
}

fn sprinkle_symmetric(rng: &mut ChaCha8Rng, g: &mut Digraph, nodes: &[usize], p: f64, cap: usize) {
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            if g.has_edge(i, j) || g.successors(i).count() >= cap || g.successors(j).count() >= cap {
                continue;
            }
            if rng.gen_bool(p) {
                g.add_edge(i, j);
                g.add_edge(j, i);
            }
        }
    }
}

fn union_of(gs: &[Digraph], n: usize) -> Digraph {
    gs.iter().fold(Digraph::empty(n), |u, g| u.union(g))
}

pub(crate) fn coordinated_graphs(rng: &mut ChaCha8Rng, spec: &GeneratorSpec, cap: usize) -> Vec<Digraph> {
    let n = spec.n;
    let nodes: Vec<usize> = (0..n).collect();
    (0..spec.horizon)
        .map(|t| {
            let root = match spec.options.coordinators.as_slice() {
                [] => rng.gen_range(0..n),
                cs => cs[t % cs.len()],
            };
            let mut g = with_loops(n);
            in_tree(rng, &mut g, &nodes, root);
            sprinkle(rng, &mut g, &nodes, spec.options.extra_edge_prob, cap);
            g
        })
        .collect()
}

pub(crate) fn decentralized_graphs(rng: &mut ChaCha8Rng, spec: &GeneratorSpec, cap: usize) -> Vec<Digraph> {
    let n = spec.n;
    let nodes: Vec<usize> = (0..n).collect();
    let w = spec.options.window.max(1);
    let max_blocks = spec.options.blocks.unwrap_or((n / 2).max(1));
    let mut out: Vec<Digraph> = Vec::with_capacity(spec.horizon);
    for t in 0..spec.horizon {
        let closing = t % w == w - 1;
        let blocks = if !closing {
            random_partition(rng, &nodes, max_blocks)
        } else {
            // Join the weak components of this window's union so far with a
            // block through one representative of each.
            let start = t - (w - 1);
            let comps = if w == 1 {
                nodes.iter().map(|&v| vec![v]).collect()
            } else {
                union_of(&out[start..t], n).weak_components()
            };
            if comps.len() == 1 {
                random_partition(rng, &nodes, max_blocks)
            } else {
                let mut bridge: Vec<usize> = comps.iter().map(|c| c[rng.gen_range(0..c.len())]).collect();
                bridge.shuffle(rng);
                let rest: Vec<usize> = nodes.iter().copied().filter(|v| !bridge.contains(v)).collect();
                let mut blocks = vec![bridge];
                if !rest.is_empty() {
                    blocks.extend(random_partition(rng, &rest, max_blocks));
                }
                blocks
            }
        };
        out.push(reducible_step(rng, &blocks, n, spec, cap));
    }
    out
}

pub(crate) fn dstar_graphs(rng: &mut ChaCha8Rng, spec: &GeneratorSpec, cap: usize, j: usize) -> Vec<Digraph> {
    let n = spec.n;
    let nodes: Vec<usize> = (0..n).collect();
    let w = spec.options.window.max(1);
    let max_blocks = spec.options.blocks.unwrap_or((n / 2).max(1));
    (0..spec.horizon)
        .map(|t| {
            let blocks = if t % w == w - 1 {
                vec![nodes.clone()]
            } else {
                random_partition(rng, &nodes, max_blocks)
            };
            let mut g = with_loops(n);
            for b in &blocks {
                if b.contains(&j) {
                    in_tree(rng, &mut g, b, j);
                    // Extra edges inside j's block keep it j-oriented.
                    sprinkle(rng, &mut g, b, spec.options.extra_edge_prob, cap);
                } else {
                    cycle(&mut g, b, false);
                    sprinkle(rng, &mut g, b, spec.options.extra_edge_prob, cap);
                }
            }
            g
        })
        .collect()
}

/// A fixed spanning structure whose edges are spread over `phi` phase
/// positions; every window of `phi` consecutive steps sees all of them.
pub(crate) fn granular_graphs(rng: &mut ChaCha8Rng, spec: &GeneratorSpec, cap: usize, oriented: bool) -> Vec<Digraph> {
    let n = spec.n;
    let phi = spec.options.phi.max(1);
    let nodes: Vec<usize> = (0..n).collect();
    let mut skeleton = Digraph::empty(n);
    if oriented {
        let root = match spec.options.coordinators.as_slice() {
            [] => rng.gen_range(0..n),
            cs => cs[0],
        };
        in_tree(rng, &mut skeleton, &nodes, root);
    } else {
        let mut order = nodes.clone();
        order.shuffle(rng);
        cycle(&mut skeleton, &order, false);
    }
    let phase_of: Vec<((usize, usize), usize)> = skeleton.edges().map(|e| (e, rng.gen_range(0..phi))).collect();
    (0..spec.horizon)
        .map(|t| {
            let mut g = with_loops(n);
            for &((u, v), p) in &phase_of {
                if p == t % phi {
                    g.add_edge(u, v);
                }
            }
            sprinkle(rng, &mut g, &nodes, spec.options.extra_edge_prob, cap);
            g
        })
        .collect()
}
