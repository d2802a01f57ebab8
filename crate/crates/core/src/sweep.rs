//! Single-input sweeps: every region in turn drives the network alone.
//!
//! Each [`RegionSweepRecord`] pairs the Gramian energy of one input region
//! with its longest control chain, which is what the histogram and
//! cognitive-system breakdowns aggregate.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gramian::{controllability_check, gramian, ControlSystem, DEFAULT_TOLERANCE};
use crate::lcc::single_input_lcc_spectrum;
use crate::network::StructuralNetwork;

const BUNDLED_ATLAS: &str = include_str!("../data/atlas_dmn_auditory.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyClass {
    LowEnergy,
    HighEnergy,
    Unclassified,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSweepRecord {
    #[serde(with = "crate::ids::one")]
    pub node: usize,
    pub label: String,
    #[serde(rename = "K")]
    pub degree: usize,
    pub trace: f64,
    pub log10_trace: f64,
    pub lambda_min: f64,
    pub controllable: bool,
    /// `None` when the region cannot reach every other node.
    pub lcc: Option<u32>,
    #[serde(rename = "class")]
    pub energy_class: EnergyClass,
}

/// `floor(log10 x)`, exact at powers of ten.
pub fn order_of_magnitude(x: f64) -> i32 {
    let mut order = x.log10().floor() as i32;
    // log10 rounds near powers of ten; settle against exact powers
    while pow10(order) > x {
        order -= 1;
    }
    while pow10(order + 1) <= x {
        order += 1;
    }
    order
}

fn pow10(k: i32) -> f64 {
    // exact for |k| <= 22, which covers every band edge
    if k >= 0 {
        10f64.powi(k)
    } else {
        1.0 / 10f64.powi(-k)
    }
}

/// Orders 9 through 11 are low-energy regions, 6 through 8 high-energy.
pub fn classify_trace(trace: f64) -> Result<EnergyClass> {
    if trace.is_nan() || trace <= 0.0 {
        return Err(Error::NonPositiveTrace(trace));
    }
    Ok(match order_of_magnitude(trace) {
        9..=11 => EnergyClass::LowEnergy,
        6..=8 => EnergyClass::HighEnergy,
        _ => EnergyClass::Unclassified,
    })
}

pub fn classify_energy(record: &RegionSweepRecord) -> Result<EnergyClass> {
    classify_trace(record.trace)
}

/// One single-input Gramian per node, in node order.
pub fn region_sweep(g: &StructuralNetwork, t_f: f64) -> Result<Vec<RegionSweepRecord>> {
    let spectrum = single_input_lcc_spectrum(g);
    let a = g.dynamics_matrix();
    let results: Vec<Result<RegionSweepRecord>> = (0..g.n())
        .into_par_iter()
        .map(|v| {
            let region = |source: Error| Error::Region {
                id: v + 1,
                label: g.label(v),
                source: Box::new(source),
            };
            let sys = ControlSystem::new(a.clone(), vec![v], t_f).map_err(region)?;
            let res = gramian(&sys).map_err(region)?;
            Ok(RegionSweepRecord {
                node: v,
                label: g.label(v),
                degree: g.out_degree(v),
                trace: res.trace,
                log10_trace: res.trace.log10(),
                lambda_min: res.lambda_min,
                controllable: controllability_check(&res, DEFAULT_TOLERANCE),
                lcc: spectrum.per_node[v],
                energy_class: classify_trace(res.trace).map_err(region)?,
            })
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepExtremes {
    /// Region with the largest trace: the cheapest single input.
    #[serde(with = "crate::ids::one")]
    pub max_trace: usize,
    /// Region with the smallest trace: the most expensive single input.
    #[serde(with = "crate::ids::one")]
    pub min_trace: usize,
}

/// Ties go to the lowest node id.
pub fn sweep_extremes(records: &[RegionSweepRecord]) -> Option<SweepExtremes> {
    let first = records.first()?;
    let (mut hi, mut lo) = (first, first);
    for r in records {
        if r.trace > hi.trace {
            hi = r;
        }
        if r.trace < lo.trace {
            lo = r;
        }
    }
    Some(SweepExtremes {
        max_trace: hi.node,
        min_trace: lo.node,
    })
}

/// Which regions a histogram counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Class(EnergyClass),
    /// Regions whose trace has this order of magnitude.
    Order(i32),
}

impl Selection {
    fn accepts(&self, r: &RegionSweepRecord) -> bool {
        match *self {
            Selection::Class(c) => r.energy_class == c,
            Selection::Order(k) => r.trace > 0.0 && order_of_magnitude(r.trace) == k,
        }
    }
}

/// LCC value to number of selected regions. Regions without a finite LCC
/// are skipped.
pub fn lcc_energy_histogram(records: &[RegionSweepRecord], selection: Selection) -> BTreeMap<u32, usize> {
    let mut hist = BTreeMap::new();
    for r in records.iter().filter(|r| selection.accepts(r)) {
        if let Some(l) = r.lcc {
            *hist.entry(l).or_insert(0) += 1;
        }
    }
    hist
}

pub fn histogram_csv(hist: &BTreeMap<u32, usize>) -> String {
    let mut out = String::from("lcc,count\n");
    for (lcc, count) in hist {
        out.push_str(&format!("{lcc},{count}\n"));
    }
    out
}

/// Cognitive systems as lists of region labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AtlasMapping {
    pub systems: BTreeMap<String, Vec<String>>,
}

impl AtlasMapping {
    /// Default Mode and Auditory systems over AAL90 labels.
    pub fn bundled() -> Self {
        Self::from_json(BUNDLED_ATLAS).expect("bundled atlas is valid JSON")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Case, underscores and repeated spaces are ignored when matching labels.
fn normalize_label(label: &str) -> String {
    label
        .replace('_', " ")
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SystemBreakdown {
    pub histogram: BTreeMap<u32, usize>,
    #[serde(serialize_with = "crate::ids::serialize")]
    pub members: Vec<usize>,
    /// Labels with no matching region, e.g. regions removed as isolated.
    pub unresolved: Vec<String>,
}

pub fn system_lcc_breakdown(
    records: &[RegionSweepRecord],
    atlas: &AtlasMapping,
) -> BTreeMap<String, SystemBreakdown> {
    let by_label: BTreeMap<String, &RegionSweepRecord> = records
        .iter()
        .map(|r| (normalize_label(&r.label), r))
        .collect();
    atlas
        .systems
        .iter()
        .map(|(name, labels)| {
            let mut members = Vec::new();
            let mut unresolved = Vec::new();
            let mut histogram = BTreeMap::new();
            for label in labels {
                match by_label.get(&normalize_label(label)) {
                    Some(r) => {
                        members.push(r.node);
                        if let Some(l) = r.lcc {
                            *histogram.entry(l).or_insert(0) += 1;
                        }
                    }
                    None => unresolved.push(label.clone()),
                }
            }
            members.sort_unstable();
            (
                name.clone(),
                SystemBreakdown {
                    histogram,
                    members,
                    unresolved,
                },
            )
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(records: &[RegionSweepRecord], writer: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(writer);
    for r in records {
        csv.serialize(r)?;
    }
    if records.is_empty() {
        csv.write_record(["node", "label", "K", "trace", "log10_trace", "lambda_min", "controllable", "lcc", "class"])?;
    }
    csv.flush().map_err(|e| Error::io("<sweep.csv>", e))?;
    Ok(())
}

pub fn read_sweep_csv<R: Read>(reader: R) -> Result<Vec<RegionSweepRecord>> {
    let mut csv = csv::Reader::from_reader(reader);
    let records = csv.deserialize().collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(records)
}

pub fn write_sweep_csv_path(records: &[RegionSweepRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_sweep_csv(records, file).map_err(|e| with_path(e, path))
}

pub fn read_sweep_csv_path(path: impl AsRef<Path>) -> Result<Vec<RegionSweepRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_sweep_csv(file)
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    }
}
