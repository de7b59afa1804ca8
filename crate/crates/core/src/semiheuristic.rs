//! Semi-heuristic ranking: recursive refinement by anchored MWCS solves.
//!
//! Starting from no anchors and every vertex as a candidate, the best
//! connected chunk `X` of candidates attached to the anchors is cut off,
//! ordered recursively against the same anchors, appended to the ranking and
//! turned into anchors itself, until no candidate is left.

use crate::bum::{ScoreVector, VertexWeights};
use crate::error::{Error, Result};
use crate::eval::Ranking;
use crate::graph::{is_connected, Graph, Vertex, VertexSet};
use crate::mwcs::{solve_constrained, MwcsInstance, SearchBudget};

/// Solver bookkeeping accumulated over one ranking.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub solves: usize,
    pub unproven: usize,
    pub nodes: u64,
}

impl SolveStats {
    pub fn all_proven(&self) -> bool {
        self.unproven == 0
    }

    pub(crate) fn record(&mut self, proven: bool, nodes: u64) {
        self.solves += 1;
        self.unproven += (!proven) as usize;
        self.nodes += nodes;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SemiheuristicRanking {
    pub ranking: Ranking,
    pub stats: SolveStats,
}

/// Orders `candidates` so that the anchors plus any prefix of the output
/// stay connected. Each constrained solve gets the full `budget`.
pub fn refine_ranking(
    g: &Graph,
    scores: &ScoreVector,
    anchors: &VertexSet,
    candidates: &VertexSet,
    budget: SearchBudget,
) -> Result<(Vec<Vertex>, SolveStats)> {
    if !anchors.is_disjoint(candidates) {
        return Err(Error::invalid("anchor and candidate sets overlap"));
    }
    if !is_connected(g, anchors) || !is_connected(g, &anchors.union(candidates)) {
        return Err(Error::invalid(
            "anchors and anchors plus candidates must both be connected",
        ));
    }
    let mut stats = SolveStats::default();
    let order = refine(g, scores, anchors.clone(), candidates.clone(), budget, &mut stats)?;
    Ok((order, stats))
}

fn refine(
    g: &Graph,
    scores: &ScoreVector,
    mut anchors: VertexSet,
    mut candidates: VertexSet,
    budget: SearchBudget,
    stats: &mut SolveStats,
) -> Result<Vec<Vertex>> {
    let mut order = Vec::with_capacity(candidates.len());
    while !candidates.is_empty() {
        debug_assert!(is_connected(g, &anchors));
        debug_assert!(is_connected(g, &anchors.union(&candidates)));
        let inst = MwcsInstance::new(g, scores)
            .with_anchors(anchors.clone())
            .with_candidates(candidates.clone())
            .with_budget(budget);
        let solution = solve_constrained(&inst)?;
        stats.record(solution.proven_optimal, solution.nodes);
        let chunk = solution.chosen;
        let ordered = if chunk.len() > 1 {
            refine(g, scores, anchors.clone(), chunk.clone(), budget, stats)?
        } else {
            chunk.to_vec()
        };
        order.extend(ordered);
        anchors.union_with(&chunk);
        candidates.difference_with(&chunk);
    }
    Ok(order)
}

/// Connectivity-monotonous ranking of every vertex of a connected graph.
pub fn semiheuristic_ranking(
    g: &Graph,
    weights: &VertexWeights,
    alpha: f64,
    budget: SearchBudget,
) -> Result<SemiheuristicRanking> {
    let scores = ScoreVector::from_weights(weights, alpha)?;
    semiheuristic_ranking_from_scores(g, &scores, budget)
}

pub fn semiheuristic_ranking_from_scores(
    g: &Graph,
    scores: &ScoreVector,
    budget: SearchBudget,
) -> Result<SemiheuristicRanking> {
    if g.vertex_count() == 0 {
        return Err(Error::invalid("cannot rank an empty graph"));
    }
    if !g.is_connected_graph() {
        return Err(Error::invalid("the semi-heuristic ranker needs a connected graph"));
    }
    let (order, stats) = refine_ranking(g, scores, &g.empty_set(), &g.full_set(), budget)?;
    Ok(SemiheuristicRanking {
        ranking: Ranking::new(order, g.vertex_count())?,
        stats,
    })
}
