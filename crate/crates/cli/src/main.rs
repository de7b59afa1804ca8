use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use log::{info, warn};

use modrank::baseline::{bionet_like_ranking, weight_order_ranking, DEFAULT_THRESHOLDS};
use modrank::benchgen::ModuleSampler;
use modrank::enumerate::DEFAULT_SET_CAP;
use modrank::experiment::{self, ExperimentConfig, GraphSource};
use modrank::io;
use modrank::mwcs::{self, MwcsInstance, SearchBudget, DEFAULT_NODE_BUDGET};
use modrank::optimal::optimal_ranking;
use modrank::semiheuristic::semiheuristic_ranking;
use modrank::{auc, fit_bum, is_connectivity_monotonous, Error, Graph, ModulePrior, Ranking, ScoreVector};

/// Rank graph vertices by how likely they belong to an active connected module.
#[derive(Parser)]
#[command(name = "modrank", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum RankMethod {
    Optimal,
    Semiheuristic,
    Bionet,
    WeightOrder,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scale-free graph, a hidden module and vertex weights.
    Generate {
        #[arg(long)]
        n: usize,
        /// Edges added per new vertex.
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[arg(long)]
        module_size: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bias the module's first vertex by degree^exponent.
        #[arg(long)]
        bias_exponent: Option<f64>,
        /// Directory (existing, or ending in `/`) or file-name prefix.
        #[arg(long)]
        out_prefix: String,
    },
    /// Rank the vertices of a graph given vertex weights.
    Rank {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weights: PathBuf,
        #[arg(long, value_enum)]
        method: RankMethod,
        #[arg(long, conflicts_with = "fit_alpha")]
        alpha: Option<f64>,
        /// Estimate alpha from the weights.
        #[arg(long)]
        fit_alpha: bool,
        /// Empirical module prior for the optimal method.
        #[arg(long)]
        prior: Option<PathBuf>,
        /// Search nodes per MWCS solve.
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        /// Wall-clock limit per MWCS solve, in milliseconds.
        #[arg(long)]
        time_limit_ms: Option<u64>,
        /// Maximum number of connected sets the optimal method may enumerate.
        #[arg(long, default_value_t = DEFAULT_SET_CAP)]
        cap: usize,
        #[arg(long, default_value_t = DEFAULT_THRESHOLDS)]
        thresholds: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a maximum-weight connected subgraph instance.
    Mwcs {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        scores: PathBuf,
        /// Anchor vertices, one label per line.
        #[arg(long)]
        anchors: Option<PathBuf>,
        /// Candidate vertices, one label per line (default: all non-anchors).
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Allow vertices outside anchors and candidates as connectors.
        #[arg(long)]
        unrestricted: bool,
        #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
        budget: u64,
        #[arg(long)]
        time_limit_ms: Option<u64>,
    },
    /// Fit the beta-uniform mixture to a weight file.
    FitBum {
        #[arg(long)]
        weights: PathBuf,
    },
    /// Score a ranking against a known module.
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long)]
        module: PathBuf,
    },
    /// Run a batch experiment described by a `key = value` config file.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Concurrent trials (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Write 0 in the runtime column so output depends only on the seed.
        #[arg(long)]
        no_runtime: bool,
    },
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn budget(nodes: u64, time_limit_ms: Option<u64>) -> SearchBudget {
    let b = SearchBudget::nodes(nodes);
    match time_limit_ms {
        Some(ms) => b.with_time_limit(Duration::from_millis(ms)),
        None => b,
    }
}

fn out_path(prefix: &str, name: &str) -> PathBuf {
    if prefix.ends_with('/') || Path::new(prefix).is_dir() {
        Path::new(prefix).join(name)
    } else {
        PathBuf::from(format!("{prefix}_{name}"))
    }
}

fn generate(
    n: usize,
    m: usize,
    module_size: usize,
    alpha: f64,
    seed: u64,
    bias_exponent: Option<f64>,
    out_prefix: &str,
) -> CliResult {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Failure::Usage(format!("--alpha must lie in (0, 1], got {alpha}")));
    }
    let config = ExperimentConfig {
        trials: 1,
        graph: GraphSource::Generated { n, m },
        module_size: (module_size, module_size),
        alpha_range: (alpha, alpha),
        sampler: match bias_exponent {
            Some(exponent) => ModuleSampler::DegreeBiased { exponent },
            None => ModuleSampler::Uniform,
        },
        ..ExperimentConfig::default()
    };
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let inst = experiment::make_instance(&config, None, &mut experiment::trial_rng(seed, 0))?;
    if out_prefix.ends_with('/') {
        std::fs::create_dir_all(out_prefix).map_err(|e| Error::Io {
            path: out_prefix.into(),
            source: e,
        })?;
    }
    let g = &inst.graph;
    io::write_text(out_path(out_prefix, "graph.tsv"), &g.to_edge_list())?;
    io::write_text(out_path(out_prefix, "weights.tsv"), &io::format_weights(g, &inst.weights))?;
    io::write_text(out_path(out_prefix, "module.txt"), &io::format_vertex_list(g, inst.module.iter()))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn rank(
    graph: &Path,
    weights: &Path,
    method: RankMethod,
    alpha: Option<f64>,
    fit_alpha: bool,
    prior: Option<&Path>,
    search: SearchBudget,
    cap: usize,
    thresholds: usize,
    out: &Path,
) -> CliResult {
    let g = io::read_graph(graph)?;
    let w = io::parse_weights(&io::read_text(weights)?, &g)?;
    if prior.is_some() && !matches!(method, RankMethod::Optimal) {
        return Err(Failure::Usage("--prior only applies to --method optimal".into()));
    }
    let alpha = || -> CliResult<f64> {
        match (alpha, fit_alpha) {
            (Some(a), _) => Ok(a),
            (None, true) => {
                let fit = fit_bum(&w)?;
                info!("fitted alpha={} lambda={}", fit.alpha, fit.lambda);
                Ok(fit.alpha)
            }
            (None, false) => Err(Failure::Usage("this method needs --alpha or --fit-alpha".into())),
        }
    };
    let ranking: Ranking = match method {
        RankMethod::Optimal => {
            let prior = match prior {
                Some(path) => io::parse_prior(&io::read_text(path)?, &g)?,
                None => ModulePrior::Uniform,
            };
            let result = optimal_ranking(&g, &w, alpha()?, &prior, cap)?;
            info!("expected auc {}", result.expected_auc);
            result.ranking
        }
        RankMethod::Semiheuristic => {
            let result = semiheuristic_ranking(&g, &w, alpha()?, search)?;
            if !result.stats.all_proven() {
                warn!(
                    "{} of {} MWCS solves stopped at the budget; ranking uses their best incumbents",
                    result.stats.unproven, result.stats.solves
                );
            }
            result.ranking
        }
        RankMethod::Bionet => {
            let scores = ScoreVector::from_weights(&w, alpha()?)?;
            let result = bionet_like_ranking(&g, &scores, thresholds, search)?;
            if !result.stats.all_proven() {
                warn!("{} MWCS solves stopped at the budget", result.stats.unproven);
            }
            result.ranking
        }
        RankMethod::WeightOrder => weight_order_ranking(&w),
    };
    io::write_text(out, &io::format_vertex_list(&g, ranking.into_vec()))?;
    Ok(())
}

fn run_mwcs(
    graph: &Path,
    scores: &Path,
    anchors: Option<&Path>,
    candidates: Option<&Path>,
    unrestricted: bool,
    search: SearchBudget,
) -> CliResult {
    let g = io::read_graph(graph)?;
    let s = io::parse_scores(&io::read_text(scores)?, &g)?;
    let anchor_set = match anchors {
        Some(p) => io::parse_vertex_set(&io::read_text(p)?, &g)?,
        None => g.empty_set(),
    };
    let candidate_set = match candidates {
        Some(p) => io::parse_vertex_set(&io::read_text(p)?, &g)?,
        None => g.full_set().difference(&anchor_set),
    };
    let inst = MwcsInstance::new(&g, &s)
        .with_anchors(anchor_set)
        .with_candidates(candidate_set)
        .restrict_to_union(!unrestricted)
        .with_budget(search);
    let sol = if anchors.is_none() && candidates.is_none() {
        mwcs::solve(&inst)?
    } else {
        mwcs::solve_constrained(&inst)?
    };
    let labels: Vec<&str> = sol.vertices.iter().map(|v| g.label(v)).collect();
    println!("vertices={}", labels.join(","));
    println!("score={:?}", sol.total_score);
    println!("proven_optimal={}", sol.proven_optimal);
    Ok(())
}

fn evaluate(graph: &Path, ranking: &Path, module: &Path) -> CliResult {
    let g: Graph = io::read_graph(graph)?;
    let order = io::parse_vertex_list(&io::read_text(ranking)?, &g)?;
    let ranking = Ranking::new(order, g.vertex_count())?;
    let module = io::parse_vertex_set(&io::read_text(module)?, &g)?;
    let value = auc(&ranking, &module, &g)?;
    println!(
        "auc={value:?} monotonous={}",
        is_connectivity_monotonous(&g, ranking.as_slice())
    );
    Ok(())
}

fn run_experiment(config: &Path, seed: u64, out: &Path, no_runtime: bool) -> CliResult {
    let cfg = ExperimentConfig::parse(&io::read_text(config)?)?;
    let results = experiment::run_trials(&cfg, seed)?;
    let file = File::create(out).map_err(|e| Error::io(out, e))?;
    experiment::write_results_csv(BufWriter::new(file), &results, !no_runtime)?;
    let skipped = results.iter().filter(|r| r.auc.is_none()).count();
    if skipped > 0 {
        warn!("{skipped} method runs were skipped; their rows have auc=NA");
    }
    Ok(())
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Generate {
            n,
            m,
            module_size,
            alpha,
            seed,
            bias_exponent,
            out_prefix,
        } => generate(n, m, module_size, alpha, seed, bias_exponent, &out_prefix),
        Command::Rank {
            graph,
            weights,
            method,
            alpha,
            fit_alpha,
            prior,
            budget: nodes,
            time_limit_ms,
            cap,
            thresholds,
            out,
        } => rank(
            &graph,
            &weights,
            method,
            alpha,
            fit_alpha,
            prior.as_deref(),
            budget(nodes, time_limit_ms),
            cap,
            thresholds,
            &out,
        ),
        Command::Mwcs {
            graph,
            scores,
            anchors,
            candidates,
            unrestricted,
            budget: nodes,
            time_limit_ms,
        } => run_mwcs(
            &graph,
            &scores,
            anchors.as_deref(),
            candidates.as_deref(),
            unrestricted,
            budget(nodes, time_limit_ms),
        ),
        Command::FitBum { weights } => {
            let fit = fit_bum(&io::parse_weight_values(&io::read_text(&weights)?)?)?;
            println!("alpha={} lambda={}", fit.alpha, fit.lambda);
            Ok(())
        }
        Command::Evaluate {
            graph,
            ranking,
            module,
        } => evaluate(&graph, &ranking, &module),
        Command::Experiment {
            config,
            seed,
            out,
            jobs: _,
            no_runtime,
        } => run_experiment(&config, seed, &out, no_runtime),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::Csv(inner) if inner.is_io_error() => 3,
        Error::BudgetExceeded { .. } | Error::Infeasible(_) => 2,
        _ => 1,
    }
}

// Ranking refinement and the MWCS search recurse once per ranked chunk and
// per branching decision, so worker stacks are sized for large graphs.
const STACK_SIZE: usize = 512 << 20;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let jobs = match &cli.command {
        Command::Experiment { jobs, .. } => jobs.unwrap_or(0),
        _ => 0,
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .stack_size(STACK_SIZE)
        .build_global()
    {
        eprintln!("error: cannot start worker threads: {e}");
        return ExitCode::from(1);
    }
    let worker = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || dispatch(cli.command))
        .expect("spawn main worker");
    match worker.join() {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(Failure::Usage(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Ok(Err(Failure::Lib(e))) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(101),
    }
}
