//! Baseline rankers: plain weight order and combined multi-threshold MWCS
//! modules.

use rayon::prelude::*;

use crate::bum::{ScoreVector, VertexWeights};
use crate::error::{Error, Result};
use crate::eval::Ranking;
use crate::graph::{Graph, Vertex, VertexSet};
use crate::mwcs::{solve, MwcsInstance, SearchBudget};
use crate::semiheuristic::SolveStats;

pub const DEFAULT_THRESHOLDS: usize = 10;

/// Ascending weight, ties by vertex id. Not connectivity-monotonous in
/// general.
pub fn weight_order_ranking(weights: &VertexWeights) -> Ranking {
    let w = weights.as_slice();
    let mut order: Vec<Vertex> = (0..w.len()).collect();
    order.sort_by(|&a, &b| w[a].total_cmp(&w[b]).then(a.cmp(&b)));
    Ranking::new(order, w.len()).expect("sorted ids form a permutation")
}

#[derive(Clone, Debug, PartialEq)]
pub struct BionetLikeRanking {
    pub ranking: Ranking,
    /// Module found at each threshold, most stringent first.
    pub modules: Vec<VertexSet>,
    pub stats: SolveStats,
}

/// Solves plain MWCS on `score - tau` for `thresholds` values of `tau`
/// spaced evenly from the maximum score down to the minimum, then ranks
/// the first module, then what the second adds, and so on. Vertices in no
/// module come last. Within a chunk, higher score first.
pub fn bionet_like_ranking(
    g: &Graph,
    scores: &ScoreVector,
    thresholds: usize,
    budget: SearchBudget,
) -> Result<BionetLikeRanking> {
    let n = g.vertex_count();
    if n == 0 || thresholds == 0 {
        return Err(Error::invalid("need a nonempty graph and at least one threshold"));
    }
    if scores.len() != n {
        return Err(Error::invalid("score vector does not match the graph"));
    }
    let (hi, lo) = (scores.max(), scores.min());
    let taus: Vec<f64> = (0..thresholds)
        .map(|j| {
            if thresholds == 1 {
                hi
            } else {
                hi - (hi - lo) * j as f64 / (thresholds - 1) as f64
            }
        })
        .collect();
    let solutions = taus
        .par_iter()
        .map(|&tau| {
            let shifted = scores.shifted(tau);
            solve(&MwcsInstance::new(g, &shifted).with_budget(budget))
        })
        .collect::<Result<Vec<_>>>()?;

    let by_score = |a: &Vertex, b: &Vertex| {
        scores.get(*b).total_cmp(&scores.get(*a)).then(a.cmp(b))
    };
    let mut stats = SolveStats::default();
    let mut placed = VertexSet::new(n);
    let mut order = Vec::with_capacity(n);
    let mut modules = Vec::with_capacity(thresholds);
    for solution in solutions {
        stats.record(solution.proven_optimal, solution.nodes);
        let mut chunk = solution.vertices.difference(&placed).to_vec();
        chunk.sort_by(by_score);
        placed.union_with(&solution.vertices);
        order.extend(chunk);
        modules.push(solution.vertices);
    }
    let mut rest = g.full_set().difference(&placed).to_vec();
    rest.sort_by(by_score);
    order.extend(rest);
    Ok(BionetLikeRanking {
        ranking: Ranking::new(order, n)?,
        modules,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::testutil::random_connected_graph;

    #[test]
    fn weight_order_examples() {
        let w = VertexWeights::new(vec![0.5, 0.1, 0.9]).unwrap();
        assert_eq!(weight_order_ranking(&w).as_slice(), &[1, 0, 2]);
        let flat = VertexWeights::new(vec![0.3; 4]).unwrap();
        assert_eq!(weight_order_ranking(&flat).as_slice(), &[0, 1, 2, 3]);
        let rising = VertexWeights::new(vec![0.1, 0.2, 0.3]).unwrap();
        assert_eq!(weight_order_ranking(&rising).as_slice(), &[0, 1, 2]);
    }

    #[test]
    fn equal_scores_degenerate_to_id_order() {
        let g = random_connected_graph(6, 3, 1);
        let scores = ScoreVector::new(vec![-0.7; 6]).unwrap();
        let out = bionet_like_ranking(&g, &scores, 10, SearchBudget::default()).unwrap();
        assert!(out.modules.windows(2).all(|w| w[0] == w[1]));
        assert_eq!(out.modules[0], VertexSet::from_vertices(6, [0]));
        assert_eq!(out.ranking.as_slice(), &[0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn single_edge_trace() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let scores = ScoreVector::new(vec![2.0, -1.0]).unwrap();
        let out = bionet_like_ranking(&g, &scores, 10, SearchBudget::default()).unwrap();
        assert_eq!(out.modules[0], VertexSet::from_vertices(2, [0]));
        assert_eq!(out.ranking.as_slice(), &[0, 1]);
    }

    #[test]
    fn chunks_respect_module_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let n = rng.gen_range(2..30);
            let g = random_connected_graph(n, rng.gen_range(0..n), rng.gen());
            let scores = ScoreVector::new((0..n).map(|_| rng.gen_range(-2.0..2.0)).collect()).unwrap();
            let out = bionet_like_ranking(&g, &scores, 10, SearchBudget::default()).unwrap();
            let position: Vec<usize> = {
                let mut p = vec![0; n];
                for (i, &v) in out.ranking.as_slice().iter().enumerate() {
                    p[v] = i;
                }
                p
            };
            // first module index for each vertex (usize::MAX when never chosen)
            let first = |v: Vertex| out.modules.iter().position(|m| m.contains(v)).unwrap_or(usize::MAX);
            for a in 0..n {
                for b in 0..n {
                    if first(a) < first(b) {
                        assert!(position[a] < position[b]);
                    }
                }
            }
        }
    }
}
