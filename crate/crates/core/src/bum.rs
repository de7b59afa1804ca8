//! Beta-uniform mixture weight model.
//!
//! Noise vertices carry weights drawn from U(0,1), module vertices from
//! Beta(alpha, 1). Scores are the per-vertex log-likelihood of the signal
//! component, `log(alpha * w^(alpha - 1))`.

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};

/// Weights below this value are clamped on construction.
pub const MIN_WEIGHT: f64 = 1e-12;

/// Per-vertex p-value-like weights in `(0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexWeights(Vec<f64>);

impl VertexWeights {
    /// Validates that every weight lies in `[0, 1]`; zeros (and subnormal
    /// underflow) are clamped to [`MIN_WEIGHT`].
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        let mut clamped = 0;
        for (v, w) in values.iter_mut().enumerate() {
            if !(0.0..=1.0).contains(w) {
                return Err(Error::invalid(format!(
                    "weight of vertex {v} is {w}, expected a value in [0, 1]"
                )));
            }
            if *w < MIN_WEIGHT {
                *w = MIN_WEIGHT;
                clamped += 1;
            }
        }
        if clamped > 0 {
            warn!("clamped {clamped} weight(s) below {MIN_WEIGHT:e}");
        }
        Ok(VertexWeights(values))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Vertex) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Per-vertex real scores, possibly negative.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().position(|s| !s.is_finite()) {
            return Err(Error::invalid(format!("score of vertex {v} is not finite")));
        }
        Ok(ScoreVector(values))
    }

    /// Log-likelihood scores of `weights` under Beta(alpha, 1).
    pub fn from_weights(weights: &VertexWeights, alpha: f64) -> Result<Self> {
        weights
            .as_slice()
            .iter()
            .map(|&w| vertex_score(w, alpha))
            .collect::<Result<Vec<_>>>()
            .map(ScoreVector)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: Vertex) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Scores shifted down by `tau`.
    pub fn shifted(&self, tau: f64) -> ScoreVector {
        ScoreVector(self.0.iter().map(|s| s - tau).collect())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// `log(alpha) + (alpha - 1) * log(w)`.
pub fn vertex_score(w: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(w > 0.0 && w <= 1.0) {
        return Err(Error::invalid(format!(
            "weight {w} outside (0, 1]; zero weights must be clamped first"
        )));
    }
    Ok(alpha.ln() + (alpha - 1.0) * w.ln())
}

/// Mixture parameters: `alpha` of the Beta(alpha, 1) signal component and
/// the uniform mixing proportion `lambda`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BumParams {
    pub alpha: f64,
    pub lambda: f64,
}

impl BumParams {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("lambda must lie in [0, 1], got {lambda}")));
        }
        Ok(BumParams { alpha, lambda })
    }

    /// Mixture log-likelihood of `weights`.
    pub fn log_likelihood(&self, weights: &[f64]) -> f64 {
        let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
        mixture_log_likelihood(&log_w, self.alpha, self.lambda)
    }
}

/// Draws one Beta(alpha, 1) variate by inverse transform.
pub fn sample_beta<R: Rng + ?Sized>(rng: &mut R, alpha: f64) -> f64 {
    let u = 1.0 - rng.gen::<f64>();
    u.powf(1.0 / alpha)
}

pub fn sample_weights_with<R: Rng + ?Sized>(
    n: usize,
    module: &VertexSet,
    alpha: f64,
    rng: &mut R,
) -> Result<VertexWeights> {
    check_alpha(alpha)?;
    let values = (0..n)
        .map(|v| {
            if module.contains(v) {
                sample_beta(rng, alpha)
            } else {
                1.0 - rng.gen::<f64>()
            }
        })
        .collect();
    VertexWeights::new(values)
}

/// Module weights from Beta(alpha, 1), everything else from U(0,1).
pub fn sample_weights(g: &Graph, module: &VertexSet, alpha: f64, seed: u64) -> Result<VertexWeights> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_weights_with(g.vertex_count(), module, alpha, &mut rng)
}

fn mixture_log_likelihood(log_w: &[f64], alpha: f64, lambda: f64) -> f64 {
    let scale = (1.0 - lambda) * alpha;
    log_w
        .iter()
        .map(|lw| (lambda + scale * ((alpha - 1.0) * lw).exp()).ln())
        .sum()
}

const ALPHA_FLOOR: f64 = 1e-4;
const FIT_TOLERANCE: f64 = 1e-4;
const UNIFORM_LR_THRESHOLD: f64 = 3.841 / 2.0;

fn golden_section_max(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - ratio * (hi - lo);
    let mut b = lo + ratio * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > FIT_TOLERANCE * 0.1 {
        if fa >= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - ratio * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + ratio * (hi - lo);
            fb = f(b);
        }
    }
    let mid = 0.5 * (lo + hi);
    // The interval endpoints matter when the optimum sits on the boundary.
    [lo, mid, hi]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold((mid, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// Maximum-likelihood fit of the beta-uniform mixture
/// `lambda + (1 - lambda) * alpha * w^(alpha - 1)`.
///
/// A coarse grid seeds alternating golden-section searches over each
/// coordinate, which run until neither coordinate moves by more than 1e-4.
pub fn fit_bum(weights: &VertexWeights) -> Result<BumParams> {
    let w = weights.as_slice();
    if w.len() < 10 {
        return Err(Error::DegenerateWeights(format!(
            "need at least 10 weights, got {}",
            w.len()
        )));
    }
    if w.iter().all(|&x| x == w[0]) {
        return Err(Error::DegenerateWeights("all weights are identical".into()));
    }
    let log_w: Vec<f64> = w.iter().map(|x| x.ln()).collect();
    let ll = |a: f64, l: f64| mixture_log_likelihood(&log_w, a, l);

    let mut best = (1.0, 1.0, ll(1.0, 1.0));
    for i in 1..=40 {
        let a = i as f64 / 40.0;
        for j in 0..=40 {
            let l = j as f64 / 40.0;
            let value = ll(a, l);
            if value > best.2 {
                best = (a, l, value);
            }
        }
    }
    let (mut alpha, mut lambda, mut value) = best;
    for _ in 0..500 {
        let next_alpha = golden_section_max(ALPHA_FLOOR, 1.0, |a| ll(a, lambda));
        let next_lambda = golden_section_max(0.0, 1.0, |l| ll(next_alpha, l));
        let next_value = ll(next_alpha, next_lambda);
        if next_value < value {
            break;
        }
        let moved = (next_alpha - alpha).abs().max((next_lambda - lambda).abs());
        alpha = next_alpha;
        lambda = next_lambda;
        value = next_value;
        if moved < FIT_TOLERANCE {
            break;
        }
    }
    // On the alpha = 1 / lambda = 1 ridge the mixture is plain uniform, and
    // pure noise drifts to arbitrary points along it. Fall back to the uniform
    // model unless the mixture wins a likelihood-ratio test (chi^2, 1 df, 5%).
    if value < UNIFORM_LR_THRESHOLD {
        return BumParams::new(1.0, 1.0);
    }
    BumParams::new(alpha.clamp(ALPHA_FLOOR, 1.0), lambda.clamp(0.0, 1.0))
}
