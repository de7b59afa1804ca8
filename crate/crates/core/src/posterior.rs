//! Module priors, Bayesian posteriors over the connected-set family and the
//! expected AUC of a ranking under such a posterior.

use std::collections::HashMap;

use crate::bum::{check_alpha, VertexWeights};
use crate::enumerate::ConnectedSetIndex;
use crate::error::{Error, Result};
use crate::eval::{auc_of_members, Ranking};
use crate::graph::{Vertex, VertexSet};

/// Prior probability over candidate modules.
#[derive(Clone, Debug, PartialEq)]
pub enum ModulePrior {
    /// Equal mass on every connected vertex set.
    Uniform,
    /// Explicit masses on listed sets; all other sets get zero.
    Empirical(Vec<(VertexSet, f64)>),
}

impl ModulePrior {
    /// Builds an empirical prior, merging repeated sets and normalizing the
    /// masses to sum to one.
    pub fn empirical(entries: impl IntoIterator<Item = (VertexSet, f64)>) -> Result<Self> {
        let mut merged: Vec<(VertexSet, f64)> = Vec::new();
        let mut slot: HashMap<VertexSet, usize> = HashMap::new();
        for (set, mass) in entries {
            if !(mass >= 0.0 && mass.is_finite()) {
                return Err(Error::invalid(format!("prior mass {mass} is not a nonnegative number")));
            }
            if set.is_empty() {
                return Err(Error::invalid("prior assigns mass to the empty set"));
            }
            match slot.get(&set) {
                Some(&i) => merged[i].1 += mass,
                None => {
                    slot.insert(set.clone(), merged.len());
                    merged.push((set, mass));
                }
            }
        }
        let total: f64 = merged.iter().map(|(_, m)| m).sum();
        if total.is_nan() || total <= 0.0 {
            return Err(Error::invalid("prior masses sum to zero"));
        }
        for entry in &mut merged {
            entry.1 /= total;
        }
        Ok(ModulePrior::Empirical(merged))
    }

    pub fn point_mass(set: VertexSet) -> Result<Self> {
        Self::empirical([(set, 1.0)])
    }

    /// Equal mass on every connected set with exactly `size` members.
    pub fn uniform_over_size(index: &ConnectedSetIndex, size: usize) -> Result<Self> {
        let layer = index.layer(size);
        if layer.is_empty() {
            return Err(Error::invalid(format!("no connected set of size {size}")));
        }
        Self::empirical(layer.map(|i| (index.set(i), 1.0)))
    }
}

/// Normalized posterior `P(M | w)` over every set of a [`ConnectedSetIndex`].
#[derive(Clone, Debug)]
pub struct ModulePosterior<'a> {
    index: &'a ConnectedSetIndex,
    log_post: Vec<f64>,
    post: Vec<f64>,
}

impl<'a> ModulePosterior<'a> {
    pub fn index(&self) -> &'a ConnectedSetIndex {
        self.index
    }

    /// Posterior masses aligned with the index.
    pub fn probabilities(&self) -> &[f64] {
        &self.post
    }

    /// Log posterior, `-inf` for sets outside the prior support.
    pub fn log_probabilities(&self) -> &[f64] {
        &self.log_post
    }

    pub fn probability_of(&self, set: &VertexSet) -> Option<f64> {
        self.index.position(set).map(|i| self.post[i])
    }
}

/// Bayes update of `prior` by the weights: each set's likelihood is the
/// product of Beta(alpha, 1) densities over its members, the uniform noise
/// density being one. Normalization is done in log space.
pub fn compute_posterior<'a>(
    index: &'a ConnectedSetIndex,
    prior: &ModulePrior,
    weights: &VertexWeights,
    alpha: f64,
) -> Result<ModulePosterior<'a>> {
    check_alpha(alpha)?;
    if weights.len() != index.vertex_count() {
        return Err(Error::invalid(format!(
            "{} weights for {} vertices",
            weights.len(),
            index.vertex_count()
        )));
    }
    let scores: Vec<f64> = weights
        .as_slice()
        .iter()
        .map(|&w| alpha.ln() + (alpha - 1.0) * w.ln())
        .collect();
    let log_likelihood = |i: usize| index.members(i).map(|v| scores[v]).sum::<f64>();

    let mut log_post = vec![f64::NEG_INFINITY; index.len()];
    match prior {
        ModulePrior::Uniform => {
            for (i, lp) in log_post.iter_mut().enumerate() {
                *lp = log_likelihood(i);
            }
        }
        ModulePrior::Empirical(entries) => {
            for (set, mass) in entries {
                let i = index.position(set).ok_or_else(|| {
                    Error::invalid(format!(
                        "prior set {set:?} is not a connected set of the graph"
                    ))
                })?;
                if *mass > 0.0 {
                    log_post[i] = mass.ln() + log_likelihood(i);
                }
            }
        }
    }

    let shift = log_post.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !shift.is_finite() {
        return Err(Error::invalid("posterior has no support"));
    }
    let mut post: Vec<f64> = log_post.iter().map(|lp| (lp - shift).exp()).collect();
    let total: f64 = post.iter().sum();
    let log_total = total.ln() + shift;
    for (p, lp) in post.iter_mut().zip(log_post.iter_mut()) {
        *p /= total;
        *lp -= log_total;
    }
    Ok(ModulePosterior {
        index,
        log_post,
        post,
    })
}

/// `sum_M P(M | w) * AUC(r | M)`.
pub fn expected_auc(ranking: &Ranking, posterior: &ModulePosterior<'_>) -> f64 {
    let index = posterior.index;
    let n = index.vertex_count();
    let order = ranking.as_slice();
    posterior
        .post
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(i, &p)| p * auc_of_members(order, n, |v| index.contains_vertex(i, v), index.size_of(i)))
        .sum()
}

/// Contribution of appending `v` as the last element of `prefix` (which
/// already contains `v`) to the expected AUC. Summing this along the
/// prefixes of a ranking telescopes to [`expected_auc`].
pub fn expected_auc_increment(prefix: &VertexSet, v: Vertex, posterior: &ModulePosterior<'_>) -> f64 {
    debug_assert!(prefix.contains(v));
    let index = posterior.index;
    let n = index.vertex_count();
    let prefix_len = prefix.len();
    let prefix_blocks = prefix.blocks();
    let mut total = 0.0;
    for (i, &p) in posterior.post.iter().enumerate() {
        if p == 0.0 || !index.contains_vertex(i, v) {
            continue;
        }
        let size = index.size_of(i);
        let outside = n - size;
        let bracket = if outside == 0 {
            1.0
        } else {
            let shared: usize = index
                .blocks_of(i)
                .iter()
                .zip(prefix_blocks)
                .map(|(a, b)| (a & b).count_ones() as usize)
                .sum();
            1.0 - (prefix_len - shared) as f64 / outside as f64
        };
        total += bracket * p / size as f64;
    }
    total
}
