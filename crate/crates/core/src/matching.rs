//! Bipartite representation and maximum matching.
//!
//! Every node `v` is split into an out-copy `v+` and an in-copy `v-`; a
//! directed link `v -> w` becomes the bipartite edge `(v+, w-)`. In-copies
//! left unmatched by a maximum matching are the nodes that need their own
//! external signal.

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::network::StructuralNetwork;

const FREE: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    /// `adj[v]` lists the in-copies `w-` joined to `v+`, ascending.
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(v, ws)| ws.iter().map(move |&w| (v, w)))
    }

    pub fn n_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum()
    }

    pub fn has_edge(&self, plus: usize, minus: usize) -> bool {
        self.adj[plus].binary_search(&minus).is_ok()
    }
}

pub fn bipartite_representation(g: &StructuralNetwork) -> BipartiteGraph {
    BipartiteGraph {
        adj: (0..g.n()).map(|v| g.out_neighbors(v).to_vec()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatchingResult {
    /// Matched `(v+, w-)` pairs, sorted.
    #[serde(skip)]
    pub matched_edges: Vec<(usize, usize)>,
    /// In-copies without a matched incoming edge, ascending.
    #[serde(rename = "unmatched", serialize_with = "crate::ids::serialize")]
    pub unmatched_minus: Vec<usize>,
    pub n_u: usize,
    /// Minimum number of independent signals, `max(1, n_u)`.
    pub n_i: usize,
}

/// Hopcroft-Karp maximum matching.
///
/// The seed shuffles the vertex and adjacency order before matching, which
/// selects among the (generally many) maximum matchings.
pub fn maximum_matching(b: &BipartiteGraph, seed: u64) -> MatchingResult {
    let n = b.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adj = b.adj.clone();
    for list in &mut adj {
        list.shuffle(&mut rng);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);

    let mut hk = HopcroftKarp {
        adj: &adj,
        order: &order,
        mate_plus: vec![FREE; n],
        mate_minus: vec![FREE; n],
        layer: vec![0; n],
        cursor: vec![0; n],
    };
    hk.run();

    let mut matched_edges: Vec<(usize, usize)> = hk
        .mate_plus
        .iter()
        .enumerate()
        .filter(|&(_, &w)| w != FREE)
        .map(|(v, &w)| (v, w))
        .collect();
    matched_edges.sort_unstable();
    let unmatched_minus: Vec<usize> = (0..n).filter(|&w| hk.mate_minus[w] == FREE).collect();
    let n_u = unmatched_minus.len();
    MatchingResult {
        matched_edges,
        unmatched_minus,
        n_u,
        n_i: n_u.max(1),
    }
}

/// Unmatched nodes receive the inputs. A perfect matching still needs one
/// signal; the lowest id stands in for it.
pub fn driver_nodes(m: &MatchingResult) -> Vec<usize> {
    if m.unmatched_minus.is_empty() {
        vec![0]
    } else {
        m.unmatched_minus.clone()
    }
}

struct HopcroftKarp<'a> {
    adj: &'a [Vec<usize>],
    order: &'a [usize],
    mate_plus: Vec<usize>,
    mate_minus: Vec<usize>,
    layer: Vec<usize>,
    cursor: Vec<usize>,
}

impl HopcroftKarp<'_> {
    fn run(&mut self) {
        while self.build_layers() {
            self.cursor.fill(0);
            for i in 0..self.order.len() {
                let v = self.order[i];
                if self.mate_plus[v] == FREE {
                    self.augment(v);
                }
            }
        }
    }

    /// BFS from free out-copies; true if some augmenting path exists.
    fn build_layers(&mut self) -> bool {
        let mut queue = VecDeque::new();
        for &v in self.order {
            if self.mate_plus[v] == FREE {
                self.layer[v] = 0;
                queue.push_back(v);
            } else {
                self.layer[v] = FREE;
            }
        }
        let mut found = false;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                let u = self.mate_minus[w];
                if u == FREE {
                    found = true;
                } else if self.layer[u] == FREE {
                    self.layer[u] = self.layer[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        found
    }

    fn augment(&mut self, v: usize) -> bool {
        while self.cursor[v] < self.adj[v].len() {
            let w = self.adj[v][self.cursor[v]];
            self.cursor[v] += 1;
            let u = self.mate_minus[w];
            let next = u == FREE || (self.layer[u] == self.layer[v] + 1 && self.augment(u));
            if next {
                self.mate_plus[v] = w;
                self.mate_minus[w] = v;
                return true;
            }
        }
        self.layer[v] = FREE;
        false
    }
}
