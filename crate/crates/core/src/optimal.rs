//! Optimal-on-average ranking: dynamic programming over the connected-set
//! family, maximizing expected AUC over connectivity-monotonous rankings.
//!
//! `dp[S]` is the best expected AUC contribution of any connectivity-monotonous
//! ordering of the connected set `S`. Appending `v` to an ordering of
//! `S \ {v}` adds a term that depends only on `S` and `v`, so
//! `dp[S] = max_v dp[S \ {v}] + area(S, v)` over the `v` whose removal keeps
//! `S` connected.
//!
//! `area(S, v) = sum_{M ∋ v} (1 - |S \ M| / |V \ M|) * P(M) / |M|` is
//! evaluated from per-vertex and per-pair aggregates of the posterior:
//! with `a_M = P(M) / |M|` and `b_M = a_M / |V \ M|` (zero for `M = V`),
//! `area(S, v) = A[v] - |S| * B[v][v] + sum_{u ∈ S} B[v][u]` where
//! `A[v] = sum_{M ∋ v} a_M` and `B[v][u] = sum_{M ∋ u, v} b_M`.

use rayon::prelude::*;

use crate::bum::VertexWeights;
use crate::enumerate::enumerate_connected_sets;
use crate::error::{Error, Result};
use crate::eval::Ranking;
use crate::graph::{Graph, Vertex};
use crate::posterior::{compute_posterior, ModulePosterior, ModulePrior};

const NO_PREDECESSOR: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq)]
pub struct OptimalRanking {
    pub ranking: Ranking,
    pub expected_auc: f64,
}

/// Posterior aggregates that make `area(S, v)` an `O(|S|)` computation.
struct AreaTable {
    n: usize,
    single: Vec<f64>,
    pair: Vec<f64>,
}

impl AreaTable {
    fn new(posterior: &ModulePosterior<'_>) -> Self {
        let index = posterior.index();
        let n = index.vertex_count();
        let mut single = vec![0.0; n];
        let mut pair = vec![0.0; n * n];
        let mut members = Vec::with_capacity(n);
        for (i, &p) in posterior.probabilities().iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            members.clear();
            members.extend(index.members(i));
            let size = members.len();
            let a = p / size as f64;
            for &v in &members {
                single[v] += a;
            }
            if size == n {
                continue;
            }
            let b = a / (n - size) as f64;
            for &v in &members {
                let row = &mut pair[v * n..(v + 1) * n];
                for &u in &members {
                    row[u] += b;
                }
            }
        }
        AreaTable { n, single, pair }
    }

    /// `area(S, v)` for the set with members `set` (which contains `v`).
    fn area(&self, set: &[Vertex], v: Vertex) -> f64 {
        let row = &self.pair[v * self.n..(v + 1) * self.n];
        let shared: f64 = set.iter().map(|&u| row[u]).sum();
        self.single[v] - set.len() as f64 * row[v] + shared
    }
}

/// Runs the dynamic program on a precomputed posterior. The graph behind
/// the index must be connected.
pub fn optimal_ranking_from_posterior(posterior: &ModulePosterior<'_>) -> Result<OptimalRanking> {
    let index = posterior.index();
    let n = index.vertex_count();
    if n == 0 {
        return Err(Error::invalid("cannot rank an empty graph"));
    }
    let full = index.layer(n);
    if full.len() != 1 {
        return Err(Error::invalid(
            "graph is disconnected or the enumeration was size-limited",
        ));
    }
    let table = AreaTable::new(posterior);
    let mut best = vec![f64::NEG_INFINITY; index.len()];
    let mut back = vec![(NO_PREDECESSOR, 0u32); index.len()];

    for v in index.layer(1) {
        let u = index.members(v).next().expect("singleton");
        best[v] = table.area(&[u], u);
        back[v] = (NO_PREDECESSOR, u as u32);
    }
    for size in 2..=n {
        let layer = index.layer(size);
        let start = layer.start;
        let results: Vec<(f64, (u32, u32))> = layer
            .into_par_iter()
            .map(|i| {
                let members: Vec<Vertex> = index.members(i).collect();
                let mut blocks = index.blocks_of(i).to_vec();
                let bits = usize::BITS as usize;
                let mut top = (f64::NEG_INFINITY, (NO_PREDECESSOR, 0u32));
                // ascending v, strict improvement: ties keep the smaller vertex
                for &v in &members {
                    blocks[v / bits] &= !(1usize << (v % bits));
                    if let Some(j) = index.position_blocks(&blocks, size - 1) {
                        let value = best[j] + table.area(&members, v);
                        if value > top.0 {
                            top = (value, (j as u32, v as u32));
                        }
                    }
                    blocks[v / bits] |= 1usize << (v % bits);
                }
                top
            })
            .collect();
        for (offset, (value, pointer)) in results.into_iter().enumerate() {
            best[start + offset] = value;
            back[start + offset] = pointer;
        }
    }

    let last = full.start;
    let mut order = Vec::with_capacity(n);
    let mut cursor = last as u32;
    while cursor != NO_PREDECESSOR {
        let (pred, v) = back[cursor as usize];
        order.push(v as Vertex);
        cursor = pred;
    }
    order.reverse();
    Ok(OptimalRanking {
        ranking: Ranking::new(order, n)?,
        expected_auc: best[last],
    })
}

/// Enumerates the connected sets (failing past `cap`), builds the posterior
/// and returns the connectivity-monotonous ranking of maximal expected AUC.
pub fn optimal_ranking(
    g: &Graph,
    weights: &VertexWeights,
    alpha: f64,
    prior: &ModulePrior,
    cap: usize,
) -> Result<OptimalRanking> {
    if !g.is_connected_graph() {
        return Err(Error::invalid("the optimal ranker needs a connected graph"));
    }
    let index = enumerate_connected_sets(g, None, cap)?;
    let posterior = compute_posterior(&index, prior, weights, alpha)?;
    optimal_ranking_from_posterior(&posterior)
}

/// Best expected AUC of every connected set, for inspection in tests.
#[cfg(test)]
fn dp_values(posterior: &ModulePosterior<'_>) -> Vec<f64> {
    let table = AreaTable::new(posterior);
    let index = posterior.index();
    let mut best = vec![f64::NEG_INFINITY; index.len()];
    for i in 0..index.len() {
        let members: Vec<Vertex> = index.members(i).collect();
        if members.len() == 1 {
            best[i] = table.area(&members, members[0]);
            continue;
        }
        for &v in &members {
            let mut rest = index.set(i);
            rest.remove(v);
            if let Some(j) = index.position(&rest) {
                best[i] = best[i].max(best[j] + table.area(&members, v));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::enumerate::DEFAULT_SET_CAP;
    use crate::eval::is_connectivity_monotonous;
    use crate::graph::VertexSet;
    use crate::posterior::{expected_auc, expected_auc_increment};
    use crate::testutil::{monotonous_rankings, random_connected_graph};

    #[test]
    fn single_edge_prefers_low_weight_first() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let w = VertexWeights::new(vec![0.04, 0.25]).unwrap();
        let out = optimal_ranking(&g, &w, 0.5, &ModulePrior::Uniform, DEFAULT_SET_CAP).unwrap();
        assert_eq!(out.ranking.as_slice(), &[0, 1]);
        assert!((out.expected_auc - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn single_vertex() {
        let g = Graph::from_edges(1, []).unwrap();
        let w = VertexWeights::new(vec![0.3]).unwrap();
        let out = optimal_ranking(&g, &w, 0.5, &ModulePrior::Uniform, DEFAULT_SET_CAP).unwrap();
        assert_eq!(out.ranking.as_slice(), &[0]);
        assert!((out.expected_auc - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_graph_rejected() {
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        let w = VertexWeights::new(vec![0.3; 3]).unwrap();
        assert!(optimal_ranking(&g, &w, 0.5, &ModulePrior::Uniform, DEFAULT_SET_CAP).is_err());
    }

    #[test]
    fn cap_propagates() {
        let star = Graph::from_edges(12, (1..12).map(|v| (0, v))).unwrap();
        let w = VertexWeights::new(vec![0.3; 12]).unwrap();
        let err = optimal_ranking(&star, &w, 0.5, &ModulePrior::Uniform, 50).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
    }

    #[test]
    fn area_table_matches_direct_increment() {
        for seed in 0..10 {
            let g = random_connected_graph(7, 4, seed);
            let idx = enumerate_connected_sets(&g, None, DEFAULT_SET_CAP).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let w = VertexWeights::new((0..7).map(|_| 1.0 - rng.gen::<f64>()).collect()).unwrap();
            let post = compute_posterior(&idx, &ModulePrior::Uniform, &w, 0.3).unwrap();
            let table = AreaTable::new(&post);
            for i in 0..idx.len() {
                let set = idx.set(i);
                let members = set.to_vec();
                for &v in &members {
                    let fast = table.area(&members, v);
                    let direct = expected_auc_increment(&set, v, &post);
                    assert!((fast - direct).abs() < 1e-12, "{fast} vs {direct}");
                }
            }
        }
    }

    #[test]
    fn matches_exhaustive_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..12 {
            let n = rng.gen_range(1..=7);
            let g = random_connected_graph(n, rng.gen_range(0..5), rng.gen());
            let w = VertexWeights::new((0..n).map(|_| 1.0 - rng.gen::<f64>()).collect()).unwrap();
            let alpha = rng.gen_range(0.1..0.9);
            let idx = enumerate_connected_sets(&g, None, DEFAULT_SET_CAP).unwrap();
            let post = compute_posterior(&idx, &ModulePrior::Uniform, &w, alpha).unwrap();
            let out = optimal_ranking_from_posterior(&post).unwrap();
            assert!(is_connectivity_monotonous(&g, out.ranking.as_slice()));
            let brute = monotonous_rankings(&g)
                .into_iter()
                .map(|order| expected_auc(&Ranking::new(order, n).unwrap(), &post))
                .fold(f64::NEG_INFINITY, f64::max);
            assert!((out.expected_auc - brute).abs() < 1e-9);
            assert!((expected_auc(&out.ranking, &post) - out.expected_auc).abs() < 1e-9);
        }
    }

    #[test]
    fn dp_values_grow_along_predecessors() {
        let g = random_connected_graph(7, 3, 5);
        let idx = enumerate_connected_sets(&g, None, DEFAULT_SET_CAP).unwrap();
        let w = VertexWeights::new(vec![0.02, 0.5, 0.3, 0.9, 0.04, 0.7, 0.1]).unwrap();
        let post = compute_posterior(&idx, &ModulePrior::Uniform, &w, 0.4).unwrap();
        let dp = dp_values(&post);
        for i in 0..idx.len() {
            let set = idx.set(i);
            for v in set.iter() {
                let mut rest = set.clone();
                rest.remove(v);
                if let Some(j) = idx.position(&rest) {
                    assert!(dp[i] >= dp[j] - 1e-15);
                }
            }
        }
        let full = idx.position(&VertexSet::full(7)).unwrap();
        let out = optimal_ranking_from_posterior(&post).unwrap();
        assert!((dp[full] - out.expected_auc).abs() < 1e-12);
    }

    #[test]
    fn empirical_point_mass_puts_module_first() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let w = VertexWeights::new(vec![0.5; 5]).unwrap();
        let module = VertexSet::from_vertices(5, [2, 3]);
        let prior = ModulePrior::point_mass(module.clone()).unwrap();
        let out = optimal_ranking(&g, &w, 0.5, &prior, DEFAULT_SET_CAP).unwrap();
        let head: VertexSet = VertexSet::from_vertices(5, out.ranking.as_slice()[..2].iter().copied());
        assert_eq!(head, module);
        assert!((out.expected_auc - 1.0).abs() < 1e-12);
    }
}
