use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

/// Random spanning tree plus up to `extra` additional edges.
pub fn random_connected_graph(n: usize, extra: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(Vertex, Vertex)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    if n >= 2 {
        for _ in 0..extra {
            let u = rng.gen_range(0..n);
            let v = rng.gen_range(0..n);
            if u != v {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Every ordering whose prefixes all induce connected subgraphs.
pub fn monotonous_rankings(g: &Graph) -> Vec<Vec<Vertex>> {
    fn go(g: &Graph, order: &mut Vec<Vertex>, used: &mut Vec<bool>, out: &mut Vec<Vec<Vertex>>) {
        if order.len() == g.vertex_count() {
            out.push(order.clone());
            return;
        }
        for v in g.vertices() {
            let attachable = order.is_empty() || g.neighbors(v).iter().any(|&u| used[u]);
            if !used[v] && attachable {
                used[v] = true;
                order.push(v);
                go(g, order, used, out);
                order.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(g, &mut Vec::new(), &mut vec![false; g.vertex_count()], &mut out);
    out
}
