//! Three-node motif census.
//!
//! A connected node triple is identified by its induced directed subgraph.
//! The class id is the smallest 9-bit code `Σ 2^(8 - 3i - j)` over arcs
//! `i -> j` across all six relabelings of the triple, i.e. the adjacency
//! matrix read row by row as a binary number. This yields the 13 ids
//!
//! | id  | code      | arcs of the canonical labeling          |
//! |-----|-----------|-----------------------------------------|
//! | 6   | 000000110 | c→a, c→b                                |
//! | 12  | 000001100 | b→c, c→a                                |
//! | 14  | 000001110 | b→c, c→a, c→b                           |
//! | 36  | 000100100 | b→a, c→a                                |
//! | 38  | 000100110 | b→a, c→a, c→b                           |
//! | 46  | 000101110 | b→a, b→c, c→a, c→b                      |
//! | 74  | 001001010 | a→c, b→c, c→b                           |
//! | 78  | 001001110 | a→c, b→c, c→a, c→b (reciprocal wedge)   |
//! | 98  | 001100010 | a→c, b→a, c→b (cycle)                   |
//! | 102 | 001100110 | a→c, b→a, c→a, c→b                      |
//! | 108 | 001101100 | a→c, b→a, b→c, c→a                      |
//! | 110 | 001101110 | a→c, b→a, b→c, c→a, c→b                 |
//! | 238 | 011101110 | all six arcs (reciprocal triangle)      |
//!
//! On symmetric networks every link is reciprocated, so only 78 and 238
//! occur.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::StructuralNetwork;
use crate::sweep::RegionSweepRecord;

/// Reciprocal open wedge.
pub const WEDGE: u16 = 78;
/// Fully reciprocal triangle.
pub const TRIANGLE: u16 = 238;

/// Ids of the 13 weakly connected classes, ascending.
pub const CONNECTED_TRIAD_IDS: [u16; 13] =
    [6, 12, 14, 36, 38, 46, 74, 78, 98, 102, 108, 110, 238];

/// Off-diagonal arc slots of a triple in bit order of the 6-bit pattern.
const SLOTS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)];

const PERMS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

const fn build_table() -> [u16; 64] {
    let mut table = [0u16; 64];
    let mut pattern = 0;
    while pattern < 64 {
        let mut best = u16::MAX;
        let mut p = 0;
        while p < 6 {
            let perm = PERMS[p];
            let mut code = 0u16;
            let mut s = 0;
            while s < 6 {
                if pattern >> s & 1 == 1 {
                    let (i, j) = SLOTS[s];
                    code |= 1 << (8 - (3 * perm[i] + perm[j]));
                }
                s += 1;
            }
            if code < best {
                best = code;
            }
            p += 1;
        }
        table[pattern] = best;
        pattern += 1;
    }
    table
}

static TRIAD_TABLE: [u16; 64] = build_table();

/// Class id of the subgraph induced on `(a, b, c)`, or `None` when it is not
/// weakly connected.
pub fn triad_id(g: &StructuralNetwork, a: usize, b: usize, c: usize) -> Option<u16> {
    let nodes = [a, b, c];
    let mut pattern = 0usize;
    let mut touched = [false; 3];
    let mut pairs = 0;
    for (s, &(i, j)) in SLOTS.iter().enumerate() {
        if g.has_arc(nodes[i], nodes[j]) {
            pattern |= 1 << s;
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if g.has_arc(nodes[i], nodes[j]) || g.has_arc(nodes[j], nodes[i]) {
            touched[i] = true;
            touched[j] = true;
            pairs += 1;
        }
    }
    // two linked pairs among three nodes always connect all three
    (pairs >= 2 && touched.iter().all(|&t| t)).then(|| TRIAD_TABLE[pattern])
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MotifCensus {
    /// Class id to number of induced occurrences; zero counts omitted.
    pub counts: BTreeMap<u16, u64>,
    /// Occurrences of ids 78 and 238 together.
    pub n_m: u64,
}

impl MotifCensus {
    pub fn from_counts(mut counts: BTreeMap<u16, u64>) -> Self {
        counts.retain(|_, c| *c > 0);
        let n_m = counts.get(&WEDGE).copied().unwrap_or(0) + counts.get(&TRIANGLE).copied().unwrap_or(0);
        Self { counts, n_m }
    }

    pub fn count(&self, id: u16) -> u64 {
        self.counts.get(&id).copied().unwrap_or(0)
    }

    /// Number of connected triples.
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Induced connected-triad census.
///
/// Symmetric networks use triangle and wedge counting over neighbor lists;
/// others enumerate connected triples around each center node.
pub fn triad_census(g: &StructuralNetwork) -> MotifCensus {
    if g.is_symmetric() {
        symmetric_census(g)
    } else {
        directed_census(g)
    }
}

fn symmetric_census(g: &StructuralNetwork) -> MotifCensus {
    let mut triangles = 0u64;
    let mut wedges = 0u64;
    for v in 0..g.n() {
        let nb = g.out_neighbors(v);
        let d = nb.len() as u64;
        wedges += d * d.saturating_sub(1) / 2;
        // count each triangle once, at its smallest node
        for (x, &u) in nb.iter().enumerate() {
            if u < v {
                continue;
            }
            triangles += sorted_intersection_above(g.out_neighbors(u), &nb[x + 1..], u);
        }
    }
    let mut counts = BTreeMap::new();
    counts.insert(TRIANGLE, triangles);
    counts.insert(WEDGE, wedges - 3 * triangles);
    MotifCensus::from_counts(counts)
}

/// `|{w ∈ a ∩ b : w > floor}|` for ascending slices.
fn sorted_intersection_above(a: &[usize], b: &[usize], floor: usize) -> u64 {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] > floor {
                    n += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    n
}

fn directed_census(g: &StructuralNetwork) -> MotifCensus {
    let neighbors: Vec<Vec<usize>> = (0..g.n()).map(|v| g.neighbors(v)).collect();
    let linked = |x: usize, y: usize| neighbors[x].binary_search(&y).is_ok();
    let mut counts = BTreeMap::new();
    for (v, nb) in neighbors.iter().enumerate() {
        for (x, &u) in nb.iter().enumerate() {
            for &w in &nb[x + 1..] {
                // a closed triangle has three centers; keep the smallest
                if linked(u, w) && (u < v || w < v) {
                    continue;
                }
                let id = triad_id(g, v, u, w).expect("two links around a center connect the triple");
                *counts.entry(id).or_insert(0) += 1;
            }
        }
    }
    MotifCensus::from_counts(counts)
}

/// One row of the motif/energy comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotifEnergyRow {
    pub network: String,
    pub n_m: u64,
    /// Mean trace over regions with LCC = level, per requested level; `None`
    /// when no region attains it.
    pub mean_trace_at_lcc: BTreeMap<u32, Option<f64>>,
    pub mean_trace: f64,
}

/// Networks ordered by motif count (descending) with mean energies of
/// regions at each LCC level.
pub fn motif_energy_table(
    censuses: &BTreeMap<String, MotifCensus>,
    sweeps: &BTreeMap<String, Vec<RegionSweepRecord>>,
    levels: &[u32],
) -> Result<Vec<MotifEnergyRow>> {
    if censuses.keys().ne(sweeps.keys()) {
        let a: Vec<_> = censuses.keys().collect();
        let b: Vec<_> = sweeps.keys().collect();
        return Err(Error::MismatchedIds(format!("censuses {a:?} vs sweeps {b:?}")));
    }
    let mut rows: Vec<MotifEnergyRow> = censuses
        .iter()
        .map(|(id, census)| {
            let records = &sweeps[id];
            let max_lcc = records.iter().filter_map(|r| r.lcc).max();
            let mean_trace_at_lcc = levels
                .iter()
                .map(|&level| {
                    let mean = if max_lcc.is_some_and(|m| m >= level) {
                        mean(records.iter().filter(|r| r.lcc == Some(level)).map(|r| r.trace))
                    } else {
                        None
                    };
                    (level, mean)
                })
                .collect();
            MotifEnergyRow {
                network: id.clone(),
                n_m: census.n_m,
                mean_trace_at_lcc,
                mean_trace: mean(records.iter().map(|r| r.trace)).unwrap_or(f64::NAN),
            }
        })
        .collect();
    rows.sort_by(|a, b| b.n_m.cmp(&a.n_m).then_with(|| a.network.cmp(&b.network)));
    Ok(rows)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = values.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(g: &StructuralNetwork) -> MotifCensus {
        let mut counts = BTreeMap::new();
        let n = g.n();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    if let Some(id) = triad_id(g, a, b, c) {
                        *counts.entry(id).or_insert(0) += 1;
                    }
                }
            }
        }
        MotifCensus::from_counts(counts)
    }

    fn complete(n: usize) -> StructuralNetwork {
        StructuralNetwork::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).unwrap()
    }

    #[test]
    fn table_covers_the_thirteen_classes() {
        let mut ids: Vec<u16> = TRIAD_TABLE.to_vec();
        ids.sort_unstable();
        ids.dedup();
        // disconnected patterns also map to small codes; keep the connected ones
        let connected: Vec<u16> = ids
            .into_iter()
            .filter(|id| CONNECTED_TRIAD_IDS.contains(id))
            .collect();
        assert_eq!(connected, CONNECTED_TRIAD_IDS);
    }

    #[test]
    fn named_classes() {
        let wedge = StructuralNetwork::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(triad_id(&wedge, 0, 1, 2), Some(WEDGE));
        assert_eq!(triad_id(&complete(3), 2, 0, 1), Some(TRIANGLE));
        let cycle = StructuralNetwork::from_arcs(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(triad_id(&cycle, 0, 1, 2), Some(98));
        let out_star = StructuralNetwork::from_arcs(3, [(0, 1), (0, 2)]).unwrap();
        assert_eq!(triad_id(&out_star, 0, 1, 2), Some(6));
        let in_star = StructuralNetwork::from_arcs(3, [(1, 0), (2, 0)]).unwrap();
        assert_eq!(triad_id(&in_star, 0, 1, 2), Some(36));
        let chain = StructuralNetwork::from_arcs(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(triad_id(&chain, 0, 1, 2), Some(12));
        let single = StructuralNetwork::from_arcs(3, [(0, 1)]).unwrap();
        assert_eq!(triad_id(&single, 0, 1, 2), None);
    }

    #[test]
    fn small_symmetric_censuses() {
        let tri = triad_census(&complete(3));
        assert_eq!(tri.counts, BTreeMap::from([(TRIANGLE, 1)]));
        assert_eq!(tri.n_m, 1);

        let wedge = triad_census(&StructuralNetwork::from_edges(3, [(0, 1), (1, 2)]).unwrap());
        assert_eq!(wedge.counts, BTreeMap::from([(WEDGE, 1)]));
        assert_eq!(wedge.n_m, 1);

        let k4 = triad_census(&complete(4));
        assert_eq!(k4.counts, BTreeMap::from([(TRIANGLE, 4)]));
        assert_eq!(k4.n_m, 4);
    }

    #[test]
    fn directed_path_matches_brute_force() {
        let g = StructuralNetwork::from_arcs(
            6,
            [(0, 1), (1, 2), (2, 0), (2, 3), (3, 2), (3, 4), (4, 5), (5, 3), (1, 4)],
        )
        .unwrap();
        assert!(!g.is_symmetric());
        assert_eq!(triad_census(&g), brute_force(&g));
    }

    #[test]
    fn symmetric_path_matches_brute_force() {
        let g = StructuralNetwork::from_edges(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 3), (1, 6)])
            .unwrap();
        assert_eq!(triad_census(&g), brute_force(&g));
    }
}
