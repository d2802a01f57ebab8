//! Longest control chains and input placement.
//!
//! The LCC of an input set `S` is `max_w min_{v ∈ S} d(v, w)`: the number of
//! hops the farthest node sits from its nearest input. An input set with
//! LCC ≤ k is exactly a distance-k dominating set along directed links,
//! which [`min_inputs_for_lcc`] searches for with randomized greedy cover.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::StructuralNetwork;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LccReport {
    #[serde(serialize_with = "crate::ids::serialize")]
    pub inputs: Vec<usize>,
    /// Hops to the nearest input; `None` when no input reaches the node.
    pub dist: Vec<Option<u32>>,
    /// `None` when some node is unreachable.
    pub lcc: Option<u32>,
}

fn check_inputs(g: &StructuralNetwork, s: &[usize]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptyInputSet);
    }
    if let Some(&bad) = s.iter().find(|&&v| v >= g.n()) {
        return Err(Error::NodeOutOfRange {
            id: bad + 1,
            n: g.n(),
        });
    }
    Ok(())
}

/// Multi-source BFS from every node of `s`.
pub fn input_distances(g: &StructuralNetwork, s: &[usize]) -> Result<Vec<Option<u32>>> {
    check_inputs(g, s)?;
    Ok(g.distances_from(s))
}

fn chain_length(dist: &[Option<u32>]) -> Option<u32> {
    dist.iter()
        .try_fold(0, |acc, d| d.map(|d| acc.max(d)))
}

pub fn lcc(g: &StructuralNetwork, s: &[usize]) -> Result<Option<u32>> {
    Ok(chain_length(&input_distances(g, s)?))
}

pub fn lcc_report(g: &StructuralNetwork, s: &[usize]) -> Result<LccReport> {
    let dist = input_distances(g, s)?;
    let mut inputs = s.to_vec();
    inputs.sort_unstable();
    inputs.dedup();
    Ok(LccReport {
        inputs,
        lcc: chain_length(&dist),
        dist,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LccSpectrum {
    /// Directed eccentricity of each node as a single input.
    pub per_node: Vec<Option<u32>>,
    pub lcc_min: Option<u32>,
    pub lcc_max: Option<u32>,
}

/// LCC of every single-node input set.
pub fn single_input_lcc_spectrum(g: &StructuralNetwork) -> LccSpectrum {
    let per_node: Vec<Option<u32>> = (0..g.n())
        .into_par_iter()
        .map(|v| chain_length(&g.distances_from(&[v])))
        .collect();
    let finite = || per_node.iter().flatten().copied();
    LccSpectrum {
        lcc_min: finite().min(),
        lcc_max: finite().max(),
        per_node,
    }
}

/// A sampled input set achieving `LCC ≤ target_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlacementSolution {
    pub target_k: u32,
    #[serde(serialize_with = "crate::ids::serialize")]
    pub input_set: Vec<usize>,
    pub size: usize,
    pub sample_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlacementReport {
    pub target_k: u32,
    pub samples: usize,
    pub seed: u64,
    pub best_size: usize,
    /// Distinct minimum-size solutions in lexicographic order; each carries
    /// the first sample seed that produced it.
    pub solutions: Vec<PlacementSolution>,
    /// Per node, the fraction of `solutions` containing it.
    pub participation: Vec<f64>,
}

impl PlacementReport {
    /// Nodes present in every minimum-size solution.
    pub fn core_nodes(&self) -> Vec<usize> {
        (0..self.participation.len())
            .filter(|&v| self.participation[v] == 1.0)
            .collect()
    }
}

/// Fixed-width bit set over node indices.
#[derive(Clone)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn count_and_not(&self, covered: &Bits) -> u32 {
        self.0
            .iter()
            .zip(&covered.0)
            .map(|(a, c)| (a & !c).count_ones())
            .sum()
    }

    fn union_with(&mut self, other: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= b;
        }
    }
}

/// Nodes within `k` directed hops of each node, itself included.
fn coverage(g: &StructuralNetwork, k: u32) -> Vec<Bits> {
    (0..g.n())
        .map(|v| {
            let mut bits = Bits::new(g.n());
            for (w, d) in g.distances_from(&[v]).into_iter().enumerate() {
                if d.is_some_and(|d| d <= k) {
                    bits.insert(w);
                }
            }
            bits
        })
        .collect()
}

fn greedy_cover(g: &StructuralNetwork, k: u32, cover: &[Bits], seed: u64) -> Vec<usize> {
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = vec![false; n];
    let mut covered = Bits::new(n);
    let mut n_covered = 0;
    let pick = |v: usize, chosen: &mut Vec<bool>, covered: &mut Bits| {
        chosen[v] = true;
        covered.union_with(&cover[v]);
    };

    // nothing else can reach a node without in-links
    if k > 0 {
        for v in (0..n).filter(|&v| g.in_degree(v) == 0) {
            pick(v, &mut chosen, &mut covered);
        }
    }
    n_covered += (0..n).filter(|&v| covered.contains(v)).count();

    let mut ties = Vec::new();
    while n_covered < n {
        let mut best = 0;
        ties.clear();
        for v in (0..n).filter(|&v| !chosen[v]) {
            let gain = cover[v].count_and_not(&covered);
            if gain > best {
                best = gain;
                ties.clear();
            }
            if gain == best && gain > 0 {
                ties.push(v);
            }
        }
        let v = ties[rng.random_range(0..ties.len())];
        n_covered += best as usize;
        pick(v, &mut chosen, &mut covered);
    }

    // drop inputs whose whole ball is covered by the others, in random order
    let mut hits = vec![0u32; n];
    for v in (0..n).filter(|&v| chosen[v]) {
        (0..n).filter(|&w| cover[v].contains(w)).for_each(|w| hits[w] += 1);
    }
    let mut order: Vec<usize> = (0..n).filter(|&v| chosen[v]).collect();
    order.shuffle(&mut rng);
    for v in order {
        let ball: Vec<usize> = (0..n).filter(|&w| cover[v].contains(w)).collect();
        if ball.iter().all(|&w| hits[w] >= 2) {
            ball.iter().for_each(|&w| hits[w] -= 1);
            chosen[v] = false;
        }
    }
    (0..n).filter(|&v| chosen[v]).collect()
}

/// Smallest input sets with LCC ≤ `k` found by `samples` randomized greedy
/// runs. Sample `i` is seeded with `seed + i`.
pub fn min_inputs_for_lcc(
    g: &StructuralNetwork,
    k: u32,
    samples: usize,
    seed: u64,
) -> Result<PlacementReport> {
    if samples == 0 {
        return Err(Error::invalid("samples", "at least one sample is required"));
    }
    if g.n() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let cover = coverage(g, k);
    let runs: Vec<(u64, Vec<usize>)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let sample_seed = seed.wrapping_add(i);
            (sample_seed, greedy_cover(g, k, &cover, sample_seed))
        })
        .collect();

    let best_size = runs.iter().map(|(_, s)| s.len()).min().unwrap();
    let mut solutions: Vec<PlacementSolution> = Vec::new();
    for (sample_seed, set) in runs.into_iter().filter(|(_, s)| s.len() == best_size) {
        if solutions.iter().any(|s| s.input_set == set) {
            continue;
        }
        let reached = lcc(g, &set)?;
        assert!(
            reached.is_some_and(|l| l <= k),
            "greedy cover produced an input set with LCC {reached:?} > {k}"
        );
        solutions.push(PlacementSolution {
            target_k: k,
            size: set.len(),
            input_set: set,
            sample_seed,
        });
    }
    solutions.sort_by(|a, b| a.input_set.cmp(&b.input_set));

    let mut participation = vec![0.0; g.n()];
    for s in &solutions {
        for &v in &s.input_set {
            participation[v] += 1.0;
        }
    }
    let total = solutions.len() as f64;
    participation.iter_mut().for_each(|p| *p /= total);

    Ok(PlacementReport {
        target_k: k,
        samples,
        seed,
        best_size,
        solutions,
        participation,
    })
}
