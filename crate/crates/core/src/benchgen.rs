//! Synthetic benchmark instances: preferential-attachment graphs and
//! connected-growth module sampling.

use std::collections::HashMap;

use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::posterior::ModulePrior;

/// Preferential-attachment graph: starting from one vertex, every new vertex
/// links to `min(m, existing)` distinct earlier vertices picked with
/// probability proportional to `degree + 1`.
pub fn generate_ba_graph(n: usize, m: usize, seed: u64) -> Result<Graph> {
    if n < 1 || m < 1 || (n >= 2 && m >= n) {
        return Err(Error::invalid(format!(
            "need n >= 2 and 1 <= m < n, got n={n}, m={m}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Each vertex appears degree + 1 times.
    let mut pool: Vec<Vertex> = vec![0];
    let mut edges = Vec::with_capacity(n.saturating_sub(1) * m);
    let mut targets = Vec::with_capacity(m);
    for v in 1..n {
        targets.clear();
        let wanted = m.min(v);
        while targets.len() < wanted {
            let t = pool[rng.gen_range(0..pool.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            pool.push(t);
        }
        pool.extend(std::iter::repeat_n(v, wanted + 1));
    }
    Graph::from_edges(n, edges)
}

/// How the first vertex of a sampled module is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ModuleSampler {
    /// Uniformly over all vertices.
    Uniform,
    /// Proportionally to `degree^exponent`.
    DegreeBiased { exponent: f64 },
}

impl ModuleSampler {
    pub fn sample<R: Rng + ?Sized>(&self, g: &Graph, k: usize, rng: &mut R) -> Result<VertexSet> {
        match *self {
            ModuleSampler::DegreeBiased { exponent } if exponent != 0.0 => {
                check_size(g, k)?;
                if !(exponent > 0.0 && exponent.is_finite()) {
                    return Err(Error::invalid(format!("bias exponent must be >= 0, got {exponent}")));
                }
                let weights: Vec<f64> = g.vertices().map(|v| (g.degree(v) as f64).powf(exponent)).collect();
                let dist = WeightedIndex::new(&weights)
                    .map_err(|e| Error::invalid(format!("cannot bias by degree: {e}")))?;
                let start = dist.sample(rng);
                grow_module(g, start, k, rng)
            }
            _ => {
                check_size(g, k)?;
                let start = rng.gen_range(0..g.vertex_count());
                grow_module(g, start, k, rng)
            }
        }
    }
}

fn check_size(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.vertex_count() {
        return Err(Error::invalid(format!(
            "module size {k} outside 1..={}",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// Adds uniformly random frontier vertices to `{start}` until it has `k`
/// members.
fn grow_module<R: Rng + ?Sized>(g: &Graph, start: Vertex, k: usize, rng: &mut R) -> Result<VertexSet> {
    let n = g.vertex_count();
    let mut module = VertexSet::new(n);
    let mut on_frontier = vec![false; n];
    let mut frontier: Vec<Vertex> = Vec::new();
    let mut add = |v: Vertex, module: &mut VertexSet, frontier: &mut Vec<Vertex>| {
        module.insert(v);
        for &w in g.neighbors(v) {
            if !module.contains(w) && !on_frontier[w] {
                on_frontier[w] = true;
                frontier.push(w);
            }
        }
    };
    add(start, &mut module, &mut frontier);
    while module.len() < k {
        if frontier.is_empty() {
            return Err(Error::invalid(format!(
                "component of vertex {start} has fewer than {k} vertices"
            )));
        }
        let v = frontier.swap_remove(rng.gen_range(0..frontier.len()));
        add(v, &mut module, &mut frontier);
    }
    Ok(module)
}

/// Connected module of size `k` grown from a uniformly random vertex.
pub fn sample_module(g: &Graph, k: usize, seed: u64) -> Result<VertexSet> {
    ModuleSampler::Uniform.sample(g, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Like [`sample_module`], but the first vertex is drawn proportionally to
/// `degree^bias_exponent`; exponent 0 is exactly [`sample_module`].
pub fn sample_module_nonuniform(g: &Graph, k: usize, bias_exponent: f64, seed: u64) -> Result<VertexSet> {
    if bias_exponent < 0.0 {
        return Err(Error::invalid("bias exponent must be nonnegative"));
    }
    ModuleSampler::DegreeBiased {
        exponent: bias_exponent,
    }
    .sample(g, k, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Prior with mass proportional to how often each module was drawn.
pub fn empirical_prior_from_sampler(
    g: &Graph,
    k: usize,
    sampler: ModuleSampler,
    draws: usize,
    seed: u64,
) -> Result<ModulePrior> {
    if draws == 0 {
        return Err(Error::invalid("need at least one draw"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: HashMap<VertexSet, usize> = HashMap::new();
    for _ in 0..draws {
        *counts.entry(sampler.sample(g, k, &mut rng)?).or_default() += 1;
    }
    let mut entries: Vec<(VertexSet, usize)> = counts.into_iter().collect();
    entries.sort_by(|a, b| a.0.cmp_lex(&b.0));
    ModulePrior::empirical(entries.into_iter().map(|(s, c)| (s, c as f64)))
}
