//! Seeded random networks standing in for measured connectomes in tests and
//! benchmarks.

use std::collections::BTreeSet;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::network::{StructuralNetwork, WeightedAdjacency};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each undirected link present independently with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> StructuralNetwork {
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(p) {
                edges.push((i, j));
            }
        }
    }
    StructuralNetwork::from_edges(n, edges).expect("generated links are in range")
}

/// Each ordered pair linked independently with probability `p`.
pub fn random_digraph(n: usize, p: f64, seed: u64) -> StructuralNetwork {
    let mut rng = rng(seed);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                arcs.push((i, j));
            }
        }
    }
    StructuralNetwork::from_arcs(n, arcs).expect("generated links are in range")
}

/// Preferential attachment: a clique on `m + 1` seed nodes, then every new
/// node links to `m` distinct existing nodes chosen proportionally to
/// degree. Mean degree approaches `2m`; the result is connected.
pub fn preferential_attachment(n: usize, m: usize, seed: u64) -> StructuralNetwork {
    assert!(m >= 1 && n > m, "need n > m >= 1");
    let mut rng = rng(seed);
    let mut edges = Vec::new();
    // node v appears once per incident link
    let mut ends: Vec<usize> = Vec::new();
    for i in 0..=m {
        for j in (i + 1)..=m {
            edges.push((i, j));
            ends.extend([i, j]);
        }
    }
    for v in (m + 1)..n {
        let mut targets = BTreeSet::new();
        while targets.len() < m {
            targets.insert(ends[rng.random_range(0..ends.len())]);
        }
        for &t in &targets {
            edges.push((t, v));
            ends.extend([t, v]);
        }
    }
    StructuralNetwork::from_edges(n, edges).expect("generated links are in range")
}

/// Symmetric fiber-count-like weights: zero with probability `1 - density`,
/// otherwise uniform on `1..=max_weight`.
pub fn random_weights(n: usize, density: f64, max_weight: u32, seed: u64) -> WeightedAdjacency {
    let mut rng = rng(seed);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(density) {
                let x = rng.random_range(1..=max_weight) as f64;
                w[(i, j)] = x;
                w[(j, i)] = x;
            }
        }
    }
    WeightedAdjacency::new(w).expect("generated weights are nonnegative")
}
