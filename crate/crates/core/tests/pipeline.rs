use modrank::baseline::{bionet_like_ranking, weight_order_ranking};
use modrank::benchgen::{generate_ba_graph, sample_module};
use modrank::bum::{sample_weights, ScoreVector};
use modrank::enumerate::enumerate_connected_sets;
use modrank::io;
use modrank::mwcs::SearchBudget;
use modrank::optimal::optimal_ranking;
use modrank::posterior::{compute_posterior, expected_auc};
use modrank::semiheuristic::semiheuristic_ranking;
use modrank::{auc, is_connectivity_monotonous, load_graph, ModulePrior};

#[test]
fn optimal_beats_every_other_ranking_in_expectation() {
    for seed in 0..10 {
        let g = generate_ba_graph(12, 1, seed).unwrap();
        let module = sample_module(&g, 3, seed + 100).unwrap();
        let alpha = 0.2;
        let w = sample_weights(&g, &module, alpha, seed + 200).unwrap();
        let index = enumerate_connected_sets(&g, None, 1 << 20).unwrap();
        let posterior = compute_posterior(&index, &ModulePrior::Uniform, &w, alpha).unwrap();

        let best = optimal_ranking(&g, &w, alpha, &ModulePrior::Uniform, 1 << 20).unwrap();
        assert!((expected_auc(&best.ranking, &posterior) - best.expected_auc).abs() < 1e-9);
        let semi = semiheuristic_ranking(&g, &w, alpha, SearchBudget::default()).unwrap();
        assert!(is_connectivity_monotonous(&g, semi.ranking.as_slice()));
        assert!(expected_auc(&semi.ranking, &posterior) <= best.expected_auc + 1e-9);
    }
}

#[test]
fn strong_signal_is_recovered() {
    // With a tiny alpha the module weights are near zero and every method
    // should put the module first.
    let g = generate_ba_graph(40, 2, 3).unwrap();
    let module = sample_module(&g, 6, 4).unwrap();
    let alpha = 0.002;
    let w = sample_weights(&g, &module, alpha, 5).unwrap();
    let scores = ScoreVector::from_weights(&w, alpha).unwrap();
    let semi = semiheuristic_ranking(&g, &w, alpha, SearchBudget::default()).unwrap();
    let bionet = bionet_like_ranking(&g, &scores, 10, SearchBudget::default()).unwrap();
    let order = weight_order_ranking(&w);
    for r in [&semi.ranking, &bionet.ranking, &order] {
        assert_eq!(auc(r, &module, &g).unwrap(), 1.0);
    }
}

#[test]
fn files_round_trip() {
    let g = generate_ba_graph(25, 2, 8).unwrap();
    let module = sample_module(&g, 5, 1).unwrap();
    let w = sample_weights(&g, &module, 0.3, 2).unwrap();
    let reloaded = load_graph(&g.to_edge_list()).unwrap();
    assert_eq!(reloaded, g);
    assert_eq!(io::parse_weights(&io::format_weights(&g, &w), &g).unwrap(), w);
    let listed = io::format_vertex_list(&g, module.iter());
    assert_eq!(io::parse_vertex_set(&listed, &g).unwrap(), module);
}
