#![allow(dead_code)]

use std::collections::BTreeSet;

use mscs_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random simple digraph on `n` nodes; each ordered pair is an edge with probability `p`.
pub fn random_digraph(n: u64, p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = GraphBuilder::new();
    for v in 0..n {
        b.add_node(NodeId(v));
    }
    for s in 0..n {
        for t in 0..n {
            if s != t && rng.gen_bool(p) {
                b.add_edge(NodeId(s), NodeId(t));
            }
        }
    }
    b.build()
}

fn linked(g: &Graph, a: NodeId, b: NodeId) -> bool {
    g.has_edge(a, b) || g.has_edge(b, a)
}

/// Clustering by enumerating every node triple.
pub fn brute_force_clustering(g: &Graph, v: NodeId) -> f64 {
    let ids = g.node_ids();
    let k = ids.iter().filter(|&&u| u != v && linked(g, u, v)).count();
    if k < 2 {
        return 0.0;
    }
    let mut triangles = 0usize;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            if a != v && b != v && linked(g, v, a) && linked(g, v, b) && linked(g, a, b) {
                triangles += 1;
            }
        }
    }
    2.0 * triangles as f64 / (k * (k - 1)) as f64
}

pub fn histogram_ev(
    profile: &NetworkProfile,
    nodes: &BTreeSet<NodeId>,
    config: &ControllerConfig,
) -> f64 {
    let values = profile.sample_values(nodes).unwrap();
    evaluate_sample(
        profile.reference(),
        &values,
        &config.weights,
        config.epsilon,
    )
    .unwrap()
    .ev
}

/// Greedy pruning re-derived from scratch: try every single removal,
/// evaluate each candidate with full histograms.
pub fn brute_force_prune(
    profile: &NetworkProfile,
    start: &BTreeSet<NodeId>,
    config: &ControllerConfig,
    min_size: usize,
) -> (BTreeSet<NodeId>, f64) {
    let mut current = start.clone();
    let mut ev = histogram_ev(profile, &current, config);
    while current.len() > min_size {
        let mut candidates: Vec<(f64, NodeId)> = current
            .iter()
            .map(|&id| {
                let mut rest = current.clone();
                rest.remove(&id);
                (histogram_ev(profile, &rest, config), id)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (best_ev, best_id) = candidates[0];
        if best_ev >= ev {
            break;
        }
        current.remove(&best_id);
        ev = best_ev;
    }
    (current, ev)
}

pub fn pa_graph(seed: u64) -> Graph {
    GeneratorSpec::preferential_attachment(10_000, 5, 0.75, seed)
        .generate()
        .unwrap()
}
