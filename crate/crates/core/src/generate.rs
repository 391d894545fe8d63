//! Seeded generators for colourings with no blue triangle.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::ColouredGraph;

/// `ceil((1 + epsilon) * 2^(n+1))`.
pub fn target_order(n: u32, epsilon: f64) -> usize {
    ((1.0 + epsilon) * (1u64 << (n + 1)) as f64).ceil() as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlueModel {
    /// Random bipartition, each cross pair blue with probability `p`.
    Bipartite,
    /// Pairs considered in random order, each with probability `p`, added
    /// unless it would close a blue triangle.
    TriangleFreeGreedy,
}

/// A random colouring with a bipartite blue graph.
pub fn random_bipartite(order: usize, p: f64, seed: u64) -> ColouredGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side: Vec<bool> = (0..order).map(|_| rng.random_bool(0.5)).collect();
    let mut g = ColouredGraph::all_red(order);
    for u in 0..order {
        for v in u + 1..order {
            if side[u] != side[v] && rng.random_bool(p) {
                g.set_blue(u, v).expect("distinct in-range vertices");
            }
        }
    }
    g
}

/// A random triangle-free blue graph grown greedily; no vertex exceeds
/// blue degree `max_degree`.
pub fn random_triangle_free(order: usize, p: f64, max_degree: usize, seed: u64) -> ColouredGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for u in 0..order as u32 {
        for v in u + 1..order as u32 {
            if rng.random_bool(p) {
                pairs.push((u, v));
            }
        }
    }
    pairs.shuffle(&mut rng);
    let mut g = ColouredGraph::all_red(order);
    for (u, v) in pairs {
        let (u, v) = (u as usize, v as usize);
        if g.blue_degree(u) >= max_degree || g.blue_degree(v) >= max_degree {
            continue;
        }
        if g.blue_neighbours(u).is_disjoint(g.blue_neighbours(v)) {
            g.set_blue(u, v).expect("distinct in-range vertices");
        }
    }
    g
}

/// Either model, with no degree cap.
pub fn random_model(model: BlueModel, order: usize, p: f64, seed: u64) -> ColouredGraph {
    match model {
        BlueModel::Bipartite => random_bipartite(order, p, seed),
        BlueModel::TriangleFreeGreedy => random_triangle_free(order, p, usize::MAX, seed),
    }
}

/// Two red cliques of `side` vertices each, every cross edge blue except a
/// red `K_{s,s}` between the first `s` vertices of each clique.
pub fn two_cliques_linked(side: usize, s: usize) -> ColouredGraph {
    assert!(s <= side, "witness larger than a clique");
    let mut g = ColouredGraph::all_red(2 * side);
    for u in 0..side {
        for v in side..2 * side {
            if !(u < s && v < side + s) {
                g.set_blue(u, v).expect("distinct in-range vertices");
            }
        }
    }
    g
}
