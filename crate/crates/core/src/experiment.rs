//! Batch experiments: generate (or load) instances, run every configured
//! ranking method, and record AUC, runtime and solver status per trial.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::{Duration, Instant};

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baseline::{bionet_like_ranking, weight_order_ranking, DEFAULT_THRESHOLDS};
use crate::benchgen::{empirical_prior_from_sampler, generate_ba_graph, ModuleSampler};
use crate::bum::{fit_bum, sample_weights_with, ScoreVector, VertexWeights};
use crate::enumerate::{enumerate_connected_sets, ConnectedSetIndex, DEFAULT_SET_CAP};
use crate::error::{Error, Result};
use crate::eval::{auc, Ranking};
use crate::graph::{Graph, VertexSet};
use crate::io::read_graph;
use crate::mwcs::SearchBudget;
use crate::optimal::optimal_ranking_from_posterior;
use crate::posterior::{compute_posterior, ModulePrior};
use crate::semiheuristic::semiheuristic_ranking_from_scores;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Optimal,
    /// Optimal ranker with the prior estimated from the module sampler.
    OptimalEmpirical,
    Semiheuristic,
    Bionet,
    WeightOrder,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Optimal,
        Method::OptimalEmpirical,
        Method::Semiheuristic,
        Method::Bionet,
        Method::WeightOrder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Optimal => "optimal",
            Method::OptimalEmpirical => "optimal-empirical",
            Method::Semiheuristic => "semiheuristic",
            Method::Bionet => "bionet",
            Method::WeightOrder => "weight-order",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum GraphSource {
    /// A fresh preferential-attachment graph per trial.
    Generated { n: usize, m: usize },
    /// The same graph in every trial.
    File(PathBuf),
}

/// Which alpha the rankers see.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaSource {
    /// The value the weights were drawn with.
    Truth,
    /// A beta-uniform mixture fit to the observed weights.
    Fit,
}

/// Prior over modules for the `optimal` method.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PriorChoice {
    /// Uniform over all connected sets.
    Uniform,
    /// Uniform over connected sets of the true module size.
    ModuleSize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub graph: GraphSource,
    pub module_size: (usize, usize),
    /// Module weights use alpha drawn uniformly from this range.
    pub alpha_range: (f64, f64),
    pub alpha_source: AlphaSource,
    pub methods: Vec<Method>,
    pub prior: PriorChoice,
    pub sampler: ModuleSampler,
    pub empirical_draws: usize,
    pub budget: SearchBudget,
    pub cap: usize,
    pub thresholds: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            trials: 32,
            graph: GraphSource::Generated { n: 18, m: 1 },
            module_size: (4, 4),
            alpha_range: (0.0, 0.5),
            alpha_source: AlphaSource::Truth,
            methods: vec![
                Method::Optimal,
                Method::Semiheuristic,
                Method::Bionet,
                Method::WeightOrder,
            ],
            prior: PriorChoice::Uniform,
            sampler: ModuleSampler::Uniform,
            empirical_draws: 10_000,
            budget: SearchBudget::default(),
            cap: DEFAULT_SET_CAP,
            thresholds: DEFAULT_THRESHOLDS,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad value `{value}` for `{key}`"),
    })
}

impl ExperimentConfig {
    /// Reads `key = value` lines; `#` starts a comment. Unset keys keep their
    /// defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let (mut n, mut m, mut file) = (18usize, 1usize, None::<PathBuf>);
        let mut sampler = "uniform".to_owned();
        let mut bias = 1.0f64;
        let mut time_limit = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(Error::Parse {
                    line,
                    message: "expected `key = value`".into(),
                });
            };
            let (key, value) = (key.trim(), value.trim());
            match key {
                "trials" => cfg.trials = parse_value(key, value, line)?,
                "n" => n = parse_value(key, value, line)?,
                "m" => m = parse_value(key, value, line)?,
                "graph_file" => file = Some(PathBuf::from(value)),
                "module_size" => {
                    let k = parse_value(key, value, line)?;
                    cfg.module_size = (k, k);
                }
                "module_size_min" => cfg.module_size.0 = parse_value(key, value, line)?,
                "module_size_max" => cfg.module_size.1 = parse_value(key, value, line)?,
                "alpha" => {
                    let a = parse_value(key, value, line)?;
                    cfg.alpha_range = (a, a);
                }
                "alpha_min" => cfg.alpha_range.0 = parse_value(key, value, line)?,
                "alpha_max" => cfg.alpha_range.1 = parse_value(key, value, line)?,
                "alpha_source" => {
                    cfg.alpha_source = match value {
                        "truth" => AlphaSource::Truth,
                        "fit" => AlphaSource::Fit,
                        _ => return Err(Error::Parse { line, message: format!("unknown alpha source `{value}`") }),
                    }
                }
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?;
                }
                "prior" => {
                    cfg.prior = match value {
                        "uniform" => PriorChoice::Uniform,
                        "module_size" => PriorChoice::ModuleSize,
                        _ => return Err(Error::Parse { line, message: format!("unknown prior `{value}`") }),
                    }
                }
                "module_sampler" => sampler = value.to_owned(),
                "bias_exponent" => bias = parse_value(key, value, line)?,
                "empirical_draws" => cfg.empirical_draws = parse_value(key, value, line)?,
                "budget" => cfg.budget.max_nodes = parse_value(key, value, line)?,
                "time_limit_ms" => time_limit = Some(Duration::from_millis(parse_value(key, value, line)?)),
                "cap" => cfg.cap = parse_value(key, value, line)?,
                "thresholds" => cfg.thresholds = parse_value(key, value, line)?,
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
        }
        cfg.graph = match file {
            Some(path) => GraphSource::File(path),
            None => GraphSource::Generated { n, m },
        };
        cfg.sampler = match sampler.as_str() {
            "uniform" => ModuleSampler::Uniform,
            "degree" => ModuleSampler::DegreeBiased { exponent: bias },
            other => return Err(Error::invalid(format!("unknown module sampler `{other}`"))),
        };
        cfg.budget.time_limit = time_limit;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.module_size;
        if lo == 0 || lo > hi {
            return Err(Error::invalid(format!("bad module size range {lo}..={hi}")));
        }
        let (a, b) = self.alpha_range;
        if !(a >= 0.0 && a <= b && b <= 1.0 && b > 0.0) {
            return Err(Error::invalid(format!("bad alpha range [{a}, {b}]")));
        }
        if self.methods.is_empty() {
            return Err(Error::invalid("no methods configured"));
        }
        if self.thresholds == 0 {
            return Err(Error::invalid("need at least one threshold"));
        }
        if let ModuleSampler::DegreeBiased { exponent } = self.sampler {
            if !(exponent >= 0.0 && exponent.is_finite()) {
                return Err(Error::invalid("bias exponent must be nonnegative"));
            }
        }
        if let GraphSource::Generated { n, m } = self.graph {
            if n < 2 || m == 0 || m >= n {
                return Err(Error::invalid(format!("bad graph size n={n}, m={m}")));
            }
        }
        Ok(())
    }
}

/// One method's outcome on one trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialResult {
    pub trial_id: usize,
    pub n: usize,
    pub m_edges: usize,
    pub module_size: usize,
    pub alpha: f64,
    pub method: Method,
    /// `None` when the method was skipped on this instance.
    pub auc: Option<f64>,
    pub runtime_ms: f64,
    /// Whether every solver call proved optimality; `None` for methods
    /// that make none, or skipped runs.
    pub optimal_flag: Option<bool>,
    /// The ranking produced, if any.
    pub ranking: Option<Ranking>,
}

/// The trial's generated instance.
#[derive(Clone, Debug)]
pub struct TrialInstance {
    pub graph: Graph,
    pub module: VertexSet,
    pub alpha: f64,
    pub weights: VertexWeights,
}

/// Per-trial generator: the master seed picks the key, the trial id the
/// stream, so trials do not depend on each other or on scheduling.
pub fn trial_rng(master_seed: u64, trial_id: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial_id as u64);
    rng
}

pub fn make_instance(
    config: &ExperimentConfig,
    base_graph: Option<&Graph>,
    rng: &mut ChaCha8Rng,
) -> Result<TrialInstance> {
    let graph = match (&config.graph, base_graph) {
        (_, Some(g)) => g.clone(),
        (GraphSource::Generated { n, m }, None) => generate_ba_graph(*n, *m, rng.gen())?,
        (GraphSource::File(path), None) => read_graph(path)?,
    };
    let n = graph.vertex_count();
    let (lo, hi) = config.module_size;
    if lo > n {
        return Err(Error::invalid(format!("module size {lo} exceeds graph size {n}")));
    }
    let k = rng.gen_range(lo..=hi.min(n));
    let module = config.sampler.sample(&graph, k, rng)?;
    let (a, b) = config.alpha_range;
    // Redraw the measure-zero alpha = 0.
    let alpha = loop {
        let x = if a == b { a } else { rng.gen_range(a..b) };
        if x > 0.0 {
            break x;
        }
    };
    let weights = sample_weights_with(n, &module, alpha, rng)?;
    Ok(TrialInstance {
        graph,
        module,
        alpha,
        weights,
    })
}

struct MethodOutcome {
    ranking: Ranking,
    optimal_flag: Option<bool>,
}

fn run_method(
    method: Method,
    config: &ExperimentConfig,
    inst: &TrialInstance,
    alpha: f64,
    index: &mut Option<Result<ConnectedSetIndex>>,
    seed: u64,
) -> Result<MethodOutcome> {
    let g = &inst.graph;
    let k = inst.module.len();
    let scores = || ScoreVector::from_weights(&inst.weights, alpha);
    match method {
        Method::Optimal | Method::OptimalEmpirical => {
            if !g.is_connected_graph() {
                return Err(Error::invalid("the optimal ranker needs a connected graph"));
            }
            let index = match index.get_or_insert_with(|| enumerate_connected_sets(g, None, config.cap)) {
                Ok(index) => index,
                Err(Error::BudgetExceeded { count, cap }) => {
                    return Err(Error::BudgetExceeded { count: *count, cap: *cap })
                }
                Err(e) => return Err(Error::invalid(e.to_string())),
            };
            let prior = match (method, config.prior) {
                (Method::OptimalEmpirical, _) => {
                    empirical_prior_from_sampler(g, k, config.sampler, config.empirical_draws, seed)?
                }
                (_, PriorChoice::Uniform) => ModulePrior::Uniform,
                (_, PriorChoice::ModuleSize) => ModulePrior::uniform_over_size(index, k)?,
            };
            let posterior = compute_posterior(index, &prior, &inst.weights, alpha)?;
            Ok(MethodOutcome {
                ranking: optimal_ranking_from_posterior(&posterior)?.ranking,
                optimal_flag: Some(true),
            })
        }
        Method::Semiheuristic => {
            let result = semiheuristic_ranking_from_scores(g, &scores()?, config.budget)?;
            Ok(MethodOutcome {
                ranking: result.ranking,
                optimal_flag: Some(result.stats.all_proven()),
            })
        }
        Method::Bionet => {
            let result = bionet_like_ranking(g, &scores()?, config.thresholds, config.budget)?;
            Ok(MethodOutcome {
                ranking: result.ranking,
                optimal_flag: Some(result.stats.all_proven()),
            })
        }
        Method::WeightOrder => Ok(MethodOutcome {
            ranking: weight_order_ranking(&inst.weights),
            optimal_flag: None,
        }),
    }
}

/// Runs every configured method on trial `trial_id`. Method failures (for
/// example an enumeration over the cap) become skipped rows.
pub fn run_trial(
    config: &ExperimentConfig,
    base_graph: Option<&Graph>,
    master_seed: u64,
    trial_id: usize,
) -> Result<Vec<TrialResult>> {
    let mut rng = trial_rng(master_seed, trial_id);
    let inst = make_instance(config, base_graph, &mut rng)?;
    let prior_seed: u64 = rng.gen();
    let alpha = match config.alpha_source {
        AlphaSource::Truth => inst.alpha,
        AlphaSource::Fit => fit_bum(&inst.weights)?.alpha,
    };
    let mut index = None;
    let mut rows = Vec::with_capacity(config.methods.len());
    for &method in &config.methods {
        let start = Instant::now();
        let outcome = run_method(method, config, &inst, alpha, &mut index, prior_seed);
        let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
        let (value, flag, ranking) = match outcome {
            Ok(out) => (Some(auc(&out.ranking, &inst.module, &inst.graph)?), out.optimal_flag, Some(out.ranking)),
            Err(e) => {
                warn!("trial {trial_id}: {method} skipped: {e}");
                (None, None, None)
            }
        };
        rows.push(TrialResult {
            trial_id,
            n: inst.graph.vertex_count(),
            m_edges: inst.graph.edge_count(),
            module_size: inst.module.len(),
            alpha: inst.alpha,
            method,
            auc: value,
            runtime_ms,
            optimal_flag: flag,
            ranking,
        });
    }
    info!("trial {trial_id} done");
    Ok(rows)
}

/// All trials, ordered by trial id. Trials run on the current rayon pool.
pub fn run_trials(config: &ExperimentConfig, master_seed: u64) -> Result<Vec<TrialResult>> {
    config.validate()?;
    let base_graph = match &config.graph {
        GraphSource::File(path) => Some(read_graph(path)?),
        GraphSource::Generated { .. } => None,
    };
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, base_graph.as_ref(), master_seed, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

pub const CSV_HEADER: [&str; 9] = [
    "trial_id",
    "n",
    "m_edges",
    "module_size",
    "alpha",
    "method",
    "auc",
    "runtime_ms",
    "optimal_flag",
];

/// Writes the results table. With `include_runtime` off the runtime column
/// holds 0, making the output a pure function of config and seed.
pub fn write_results_csv<W: Write>(out: W, results: &[TrialResult], include_runtime: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in results {
        let runtime = if include_runtime { format!("{:.3}", r.runtime_ms) } else { "0".to_owned() };
        w.write_record([
            r.trial_id.to_string(),
            r.n.to_string(),
            r.m_edges.to_string(),
            r.module_size.to_string(),
            r.alpha.to_string(),
            r.method.name().to_owned(),
            r.auc.map_or_else(|| "NA".to_owned(), |a| a.to_string()),
            runtime,
            r.optimal_flag.map_or_else(|| "NA".to_owned(), |f| f.to_string()),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<results>", e))?;
    Ok(())
}
