//! Rankings and the metrics used to judge them.

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// A permutation of the vertices; earlier positions rank higher.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ranking(Vec<Vertex>);

impl Ranking {
    /// Checks that `order` is a permutation of `0..n`.
    pub fn new(order: Vec<Vertex>, n: usize) -> Result<Self> {
        if order.len() != n {
            return Err(Error::invalid(format!(
                "ranking has {} entries for {n} vertices",
                order.len()
            )));
        }
        let mut seen = vec![false; n];
        for &v in &order {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("ranking is not a permutation (vertex {v})")));
            }
        }
        Ok(Ranking(order))
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<Vertex> {
        self.0
    }
}

/// AUC of a ranking for a module of `size` members among `n` vertices. When
/// the module is the whole vertex set no false positive can occur and every
/// member contributes 1.
pub(crate) fn auc_of_members(
    order: &[Vertex],
    n: usize,
    is_member: impl Fn(Vertex) -> bool,
    size: usize,
) -> f64 {
    let outside = n - size;
    if outside == 0 {
        return 1.0;
    }
    // Integer numerator, one division: the result is correctly rounded.
    let mut false_positives = 0u64;
    let mut sum = 0u64;
    for &v in order {
        if is_member(v) {
            sum += outside as u64 - false_positives;
        } else {
            false_positives += 1;
        }
    }
    sum as f64 / (outside as u64 * size as u64) as f64
}

/// Average over module members of one minus the fraction of non-module
/// vertices ranked above them.
pub fn auc(ranking: &Ranking, module: &VertexSet, g: &Graph) -> Result<f64> {
    let n = g.vertex_count();
    if module.is_empty() {
        return Err(Error::invalid("AUC is undefined for an empty module"));
    }
    if module.universe() != n || ranking.len() != n {
        return Err(Error::invalid("module or ranking does not match the graph"));
    }
    Ok(auc_of_members(ranking.as_slice(), n, |v| module.contains(v), module.len()))
}

/// Whether every prefix of `order` induces a connected subgraph.
pub fn is_connectivity_monotonous(g: &Graph, order: &[Vertex]) -> bool {
    let mut placed = VertexSet::new(g.vertex_count());
    for (k, &v) in order.iter().enumerate() {
        if k > 0 && !g.neighbors(v).iter().any(|&u| placed.contains(u)) {
            return false;
        }
        placed.insert(v);
    }
    true
}
