//! Matrix ingest, thresholding and structural-network statistics.
//!
//! A [`WeightedAdjacency`] holds raw fiber-count weights. Thresholding it with
//! [`threshold_binarize`] yields a [`StructuralNetwork`], the binary directed
//! graph every other module works on. Node indices are 0-based in the API and
//! 1-based in every file format.

use std::collections::{BTreeSet, VecDeque};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const AAL90: &str = include_str!("../data/aal90.txt");

/// Square matrix of nonnegative connection weights with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency {
    w: DMatrix<f64>,
}

impl WeightedAdjacency {
    /// Validates shape and sign, then zeroes the diagonal.
    pub fn new(mut w: DMatrix<f64>) -> Result<Self> {
        if w.nrows() != w.ncols() {
            return Err(Error::NonSquare {
                rows: w.nrows(),
                cols: w.ncols(),
            });
        }
        if w.nrows() == 0 {
            return Err(Error::EmptyMatrix);
        }
        for i in 0..w.nrows() {
            for j in 0..w.ncols() {
                let value = w[(i, j)];
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::NegativeEntry {
                        row: i + 1,
                        col: j + 1,
                        value,
                    });
                }
            }
        }
        w.fill_diagonal(0.0);
        Ok(Self { w })
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.w[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.w
    }
}

/// Parses a header-less CSV of decimal weights.
pub fn load_matrix<R: Read>(reader: R) -> Result<WeightedAdjacency> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (r, record) in csv.records().enumerate() {
        let record = record?;
        // a lone empty field is a blank line
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let mut row = Vec::with_capacity(record.len());
        for (c, cell) in record.iter().enumerate() {
            let value: f64 = cell.parse().map_err(|_| Error::Unparsable {
                row: r + 1,
                col: c + 1,
                text: cell.to_string(),
            })?;
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeEntry {
                    row: r + 1,
                    col: c + 1,
                    value,
                });
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::RaggedRow {
                    row: r + 1,
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }

    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows == 0 {
        return Err(Error::EmptyMatrix);
    }
    if n_rows != n_cols {
        return Err(Error::NonSquare {
            rows: n_rows,
            cols: n_cols,
        });
    }
    let w = DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]);
    WeightedAdjacency::new(w)
}

pub fn load_matrix_path(path: impl AsRef<Path>) -> Result<WeightedAdjacency> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_matrix(BufReader::new(file))
}

/// One region name per line; line k names node k.
pub fn read_labels<R: Read>(reader: R) -> Result<Vec<String>> {
    let mut labels = Vec::new();
    for line in BufReader::new(reader).lines() {
        let line = line.map_err(|e| Error::io("<labels>", e))?;
        labels.push(line.trim().to_string());
    }
    while labels.last().is_some_and(|l| l.is_empty()) {
        labels.pop();
    }
    Ok(labels)
}

pub fn read_labels_path(path: impl AsRef<Path>) -> Result<Vec<String>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_labels(file).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// The bundled 90-region AAL atlas labels in standard order.
pub fn aal90_labels() -> Vec<String> {
    AAL90.lines().map(|l| l.trim().to_string()).collect()
}

/// Binary directed graph without self-loops.
///
/// Networks built from a thresholded matrix are always symmetric, but the
/// type also admits one-way links so small directed examples can be studied.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralNetwork {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
    threshold: Option<f64>,
    source: String,
}

impl StructuralNetwork {
    /// Builds a network from directed links `(from, to)`. Duplicates collapse.
    pub fn from_arcs<I>(n: usize, arcs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in arcs {
            for id in [u, v] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id: id + 1, n });
                }
            }
            if u == v {
                return Err(Error::invalid("links", format!("self-loop at node {}", u + 1)));
            }
            set.insert((u, v));
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for &(u, v) in &set {
            out_adj[u].push(v);
            in_adj[v].push(u);
        }
        for list in &mut in_adj {
            list.sort_unstable();
        }
        Ok(Self {
            out_adj,
            in_adj,
            labels: None,
            threshold: None,
            source: String::new(),
        })
    }

    /// Builds a symmetric network: each undirected link becomes two arcs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let arcs: Vec<_> = edges
            .into_iter()
            .flat_map(|(u, v)| [(u, v), (v, u)])
            .collect();
        Self::from_arcs(n, arcs)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::LabelCount {
                expected: self.n(),
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_provenance(mut self, threshold: Option<f64>, source: impl Into<String>) -> Self {
        self.threshold = threshold;
        self.source = source.into();
        self
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out_adj[u].binary_search(&v).is_ok()
    }

    /// Directed links in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u, v)))
    }

    pub fn n_arcs(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    pub fn is_symmetric(&self) -> bool {
        self.arcs().all(|(u, v)| self.has_arc(v, u))
    }

    /// Unordered pairs `i < j` joined by a link in either direction.
    pub fn undirected_edges(&self) -> Vec<(usize, usize)> {
        let set: BTreeSet<_> = self.arcs().map(|(u, v)| (u.min(v), u.max(v))).collect();
        set.into_iter().collect()
    }

    /// Neighbors ignoring direction, ascending.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut all: Vec<usize> = self.out_adj[v]
            .iter()
            .chain(&self.in_adj[v])
            .copied()
            .collect();
        all.sort_unstable();
        all.dedup();
        all
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Region name, or `node k` (1-based) when the network is unlabeled.
    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(labels) => labels[v].clone(),
            None => format!("node {}", v + 1),
        }
    }

    pub fn threshold(&self) -> Option<f64> {
        self.threshold
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Structural adjacency in the dynamics convention: entry `(j, i)` is 1
    /// for a link `i -> j`, so a signal injected at `i` drives `j`.
    pub fn dynamics_matrix(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut a = DMatrix::zeros(n, n);
        for (u, v) in self.arcs() {
            a[(v, u)] = 1.0;
        }
        a
    }

    /// Multi-source BFS along directed links; `None` marks unreachable nodes.
    pub fn distances_from(&self, sources: &[usize]) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let next = dist[u].map(|d| d + 1);
            for &v in &self.out_adj[u] {
                if dist[v].is_none() {
                    dist[v] = next;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Weakly connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(u) = stack.pop() {
                for &v in self.out_adj[u].iter().chain(&self.in_adj[u]) {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&NetworkFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: NetworkFile = serde_json::from_str(text)?;
        file.try_into()
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = self.to_json()?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// On-disk network record. Links are 1-based undirected pairs `i < j`; a
/// network with one-way links is written with `"directed": true` and ordered
/// pairs instead.
#[derive(Debug, Serialize, Deserialize)]
struct NetworkFile {
    n: usize,
    links: Vec<[usize; 2]>,
    #[serde(default)]
    labels: Vec<String>,
    #[serde(default)]
    threshold: Option<f64>,
    #[serde(default)]
    source: String,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    directed: bool,
}

impl From<&StructuralNetwork> for NetworkFile {
    fn from(g: &StructuralNetwork) -> Self {
        let directed = !g.is_symmetric();
        let links = if directed {
            g.arcs().map(|(u, v)| [u + 1, v + 1]).collect()
        } else {
            g.undirected_edges()
                .into_iter()
                .map(|(u, v)| [u + 1, v + 1])
                .collect()
        };
        NetworkFile {
            n: g.n(),
            links,
            labels: g.labels.clone().unwrap_or_default(),
            threshold: g.threshold,
            source: g.source.clone(),
            directed,
        }
    }
}

impl TryFrom<NetworkFile> for StructuralNetwork {
    type Error = Error;

    fn try_from(file: NetworkFile) -> Result<Self> {
        let mut pairs = Vec::with_capacity(file.links.len());
        for [u, v] in file.links {
            if u == 0 || v == 0 {
                return Err(Error::Format("node ids are 1-based".into()));
            }
            pairs.push((u - 1, v - 1));
        }
        let g = if file.directed {
            StructuralNetwork::from_arcs(file.n, pairs)?
        } else {
            StructuralNetwork::from_edges(file.n, pairs)?
        };
        let g = g.with_provenance(file.threshold, file.source);
        if file.labels.is_empty() {
            Ok(g)
        } else {
            g.with_labels(file.labels)
        }
    }
}

/// Keeps the undirected link `{i, j}` iff `max(w_ij, w_ji) > theta`.
pub fn threshold_binarize(w: &WeightedAdjacency, theta: f64) -> Result<StructuralNetwork> {
    if !theta.is_finite() || theta < 0.0 {
        return Err(Error::invalid("threshold", format!("{theta} is not a finite nonnegative value")));
    }
    let n = w.n();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if w.weight(i, j).max(w.weight(j, i)) > theta {
                edges.push((i, j));
            }
        }
    }
    Ok(StructuralNetwork::from_edges(n, edges)?.with_provenance(Some(theta), ""))
}

/// Nodes with no links in either direction, ascending.
pub fn isolated_regions(g: &StructuralNetwork) -> Vec<usize> {
    (0..g.n())
        .filter(|&v| g.out_degree(v) == 0 && g.in_degree(v) == 0)
        .collect()
}

/// Old-to-new index map produced by [`remove_isolated`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeRemap {
    old_to_new: Vec<Option<usize>>,
    new_to_old: Vec<usize>,
}

impl NodeRemap {
    pub fn new_index(&self, old: usize) -> Option<usize> {
        self.old_to_new.get(old).copied().flatten()
    }

    pub fn old_index(&self, new: usize) -> usize {
        self.new_to_old[new]
    }

    pub fn is_identity(&self) -> bool {
        self.old_to_new.len() == self.new_to_old.len()
    }

    pub fn kept(&self) -> &[usize] {
        &self.new_to_old
    }
}

/// Drops isolated nodes and compacts indices, carrying labels over.
pub fn remove_isolated(g: &StructuralNetwork) -> Result<(StructuralNetwork, NodeRemap)> {
    let isolated = isolated_regions(g);
    if isolated.len() == g.n() {
        return Err(Error::EmptyNetwork);
    }
    let mut old_to_new = vec![None; g.n()];
    let mut new_to_old = Vec::with_capacity(g.n() - isolated.len());
    for (v, slot) in old_to_new.iter_mut().enumerate() {
        if isolated.binary_search(&v).is_err() {
            *slot = Some(new_to_old.len());
            new_to_old.push(v);
        }
    }
    let arcs = g
        .arcs()
        .map(|(u, v)| (old_to_new[u].unwrap(), old_to_new[v].unwrap()));
    let mut out = StructuralNetwork::from_arcs(new_to_old.len(), arcs)?
        .with_provenance(g.threshold, g.source.clone());
    if let Some(labels) = &g.labels {
        out = out.with_labels(new_to_old.iter().map(|&v| labels[v].clone()).collect())?;
    }
    Ok((
        out,
        NodeRemap {
            old_to_new,
            new_to_old,
        },
    ))
}

/// Summary statistics of a structural network.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkStats {
    pub n_nodes: usize,
    pub n_links_undirected: usize,
    #[serde(serialize_with = "crate::ids::serialize")]
    pub isolated: Vec<usize>,
    pub isolated_labels: Vec<String>,
    /// Degree heterogeneity, `max(H_in, H_out)`.
    pub heterogeneity: f64,
    /// Normalising constant used for the heterogeneity.
    pub r: f64,
    /// Undirected links per node.
    pub average_degree: f64,
    pub k_min: usize,
    pub k_max: usize,
    /// Mean hop distance over mutually reachable ordered pairs of the
    /// largest component.
    pub average_distance: f64,
}

/// Computes node/link counts, heterogeneity, degree range and mean distance.
///
/// `r` defaults to the average degree `c`. Degree extremes are taken over
/// non-isolated nodes.
pub fn network_stats(g: &StructuralNetwork, r: Option<f64>) -> Result<NetworkStats> {
    let n = g.n();
    if n == 0 {
        return Err(Error::EmptyNetwork);
    }
    let n_links = g.undirected_edges().len();
    let c = n_links as f64 / n as f64;
    let r = match r {
        Some(r) if r > 0.0 && r.is_finite() => r,
        Some(r) => return Err(Error::invalid("r", format!("{r} must be positive"))),
        None => c,
    };

    let out_deg: Vec<usize> = (0..n).map(|v| g.out_degree(v)).collect();
    let in_deg: Vec<usize> = (0..n).map(|v| g.in_degree(v)).collect();
    let heterogeneity = if n_links == 0 {
        0.0
    } else {
        heterogeneity(&in_deg, r).max(heterogeneity(&out_deg, r))
    };

    let isolated = isolated_regions(g);
    let connected: Vec<usize> = (0..n)
        .filter(|v| isolated.binary_search(v).is_err())
        .map(|v| out_deg[v])
        .collect();
    let k_min = connected.iter().copied().min().unwrap_or(0);
    let k_max = connected.iter().copied().max().unwrap_or(0);

    Ok(NetworkStats {
        n_nodes: n,
        n_links_undirected: n_links,
        isolated_labels: isolated.iter().map(|&v| g.label(v)).collect(),
        isolated,
        heterogeneity,
        r,
        average_degree: c,
        k_min,
        k_max,
        average_distance: average_distance(g),
    })
}

/// `(1 / (r N^2)) * sum_i sum_j |k_i - k_j|`
fn heterogeneity(degrees: &[usize], r: f64) -> f64 {
    let n = degrees.len() as f64;
    let total: u64 = degrees
        .iter()
        .map(|&a| degrees.iter().map(|&b| a.abs_diff(b) as u64).sum::<u64>())
        .sum();
    total as f64 / (r * n * n)
}

fn average_distance(g: &StructuralNetwork) -> f64 {
    let Some(largest) = g
        .components()
        .into_iter()
        .max_by(|a, b| a.len().cmp(&b.len()).then(b[0].cmp(&a[0])))
    else {
        return 0.0;
    };
    let dists: Vec<Vec<Option<u32>>> = largest
        .par_iter()
        .map(|&s| g.distances_from(&[s]))
        .collect();
    let mut total = 0u64;
    let mut pairs = 0u64;
    for (a, &u) in largest.iter().enumerate() {
        for (b, &v) in largest.iter().enumerate() {
            if u == v {
                continue;
            }
            if let (Some(d), Some(_)) = (dists[a][v], dists[b][u]) {
                total += d as u64;
                pairs += 1;
            }
        }
    }
    if pairs == 0 {
        0.0
    } else {
        total as f64 / pairs as f64
    }
}
