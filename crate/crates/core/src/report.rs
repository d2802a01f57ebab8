//! Aggregated JSON report and file export.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lcc::PlacementReport;
use crate::motif::{motif_energy_table, MotifCensus, MotifEnergyRow};
use crate::network::{NetworkStats, StructuralNetwork};
use crate::sweep::{
    lcc_energy_histogram, order_of_magnitude, sweep_extremes, system_lcc_breakdown,
    write_sweep_csv_path, AtlasMapping, EnergyClass, RegionSweepRecord, Selection,
    SystemBreakdown,
};

/// LCC levels whose mean energies the report compares across networks.
pub const REPORT_LCC_LEVELS: [u32; 2] = [3, 5];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipationEntry {
    pub node: usize,
    pub label: String,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionEntry {
    pub input_set: Vec<usize>,
    pub labels: Vec<String>,
    pub sample_seed: u64,
}

/// Serialized placement result; node ids are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementSummary {
    pub target_lcc: u32,
    pub samples: usize,
    pub seed: u64,
    pub best_size: usize,
    pub solutions: Vec<SolutionEntry>,
    /// Nodes with nonzero participation, ascending.
    pub participation: Vec<ParticipationEntry>,
    /// Nodes present in every minimum-size solution.
    pub core: Vec<usize>,
}

impl PlacementSummary {
    pub fn new(g: &StructuralNetwork, p: &PlacementReport) -> Self {
        PlacementSummary {
            target_lcc: p.target_k,
            samples: p.samples,
            seed: p.seed,
            best_size: p.best_size,
            solutions: p
                .solutions
                .iter()
                .map(|s| SolutionEntry {
                    input_set: s.input_set.iter().map(|v| v + 1).collect(),
                    labels: s.input_set.iter().map(|&v| g.label(v)).collect(),
                    sample_seed: s.sample_seed,
                })
                .collect(),
            participation: p
                .participation
                .iter()
                .enumerate()
                .filter(|(_, f)| **f > 0.0)
                .map(|(v, &fraction)| ParticipationEntry {
                    node: v + 1,
                    label: g.label(v),
                    fraction,
                })
                .collect(),
            core: p.core_nodes().into_iter().map(|v| v + 1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkInfo {
    pub n: usize,
    pub source: String,
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub node: usize,
    pub label: String,
    #[serde(rename = "K")]
    pub degree: usize,
    pub trace: f64,
    pub lcc: Option<u32>,
}

impl From<&RegionSweepRecord> for RegionSummary {
    fn from(r: &RegionSweepRecord) -> Self {
        RegionSummary {
            node: r.node + 1,
            label: r.label.clone(),
            degree: r.degree,
            trace: r.trace,
            lcc: r.lcc,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extremes {
    pub min_energy: RegionSummary,
    pub max_energy: RegionSummary,
    pub lcc_min: Option<u32>,
    pub lcc_max: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Histograms {
    pub low_energy: BTreeMap<u32, usize>,
    pub high_energy: BTreeMap<u32, usize>,
    /// Regions sharing the order of magnitude of the largest trace.
    pub min_energy_order: BTreeMap<u32, usize>,
    /// Regions sharing the order of magnitude of the smallest trace.
    pub max_energy_order: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub network: NetworkInfo,
    pub stats: NetworkStats,
    pub extremes: Option<Extremes>,
    pub energy_classes: BTreeMap<EnergyClass, usize>,
    pub histograms: Histograms,
    pub systems: BTreeMap<String, SystemBreakdown>,
    pub census: MotifCensus,
    pub motif_energy: MotifEnergyRow,
    pub placements: Vec<PlacementSummary>,
}

pub fn build_report(
    g: &StructuralNetwork,
    records: &[RegionSweepRecord],
    stats: &NetworkStats,
    census: &MotifCensus,
    placements: &[PlacementSummary],
    atlas: &AtlasMapping,
) -> Result<Report> {
    if records.len() != g.n() {
        return Err(Error::Format(format!(
            "sweep has {} rows but the network has {} nodes",
            records.len(),
            g.n()
        )));
    }
    let extremes = sweep_extremes(records).map(|e| {
        let finite = || records.iter().filter_map(|r| r.lcc);
        Extremes {
            min_energy: (&records[e.max_trace]).into(),
            max_energy: (&records[e.min_trace]).into(),
            lcc_min: finite().min(),
            lcc_max: finite().max(),
        }
    });

    let mut energy_classes = BTreeMap::new();
    for r in records {
        *energy_classes.entry(r.energy_class).or_insert(0) += 1;
    }

    let order_histogram = |trace: Option<f64>| match trace {
        Some(t) if t > 0.0 => lcc_energy_histogram(records, Selection::Order(order_of_magnitude(t))),
        _ => BTreeMap::new(),
    };
    let histograms = Histograms {
        low_energy: lcc_energy_histogram(records, Selection::Class(EnergyClass::LowEnergy)),
        high_energy: lcc_energy_histogram(records, Selection::Class(EnergyClass::HighEnergy)),
        min_energy_order: order_histogram(extremes.as_ref().map(|e| e.min_energy.trace)),
        max_energy_order: order_histogram(extremes.as_ref().map(|e| e.max_energy.trace)),
    };

    let id = if g.source().is_empty() { "network".to_string() } else { g.source().to_string() };
    let motif_energy = motif_energy_table(
        &BTreeMap::from([(id.clone(), census.clone())]),
        &BTreeMap::from([(id, records.to_vec())]),
        &REPORT_LCC_LEVELS,
    )?
    .remove(0);

    Ok(Report {
        network: NetworkInfo {
            n: g.n(),
            source: g.source().to_string(),
            threshold: g.threshold(),
        },
        stats: stats.clone(),
        extremes,
        energy_classes,
        histograms,
        systems: system_lcc_breakdown(records, atlas),
        census: census.clone(),
        motif_energy,
        placements: placements.to_vec(),
    })
}

pub fn report_json(report: &Report) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    Ok(text)
}

/// Writes `sweep.csv` and `report.json` into `dir`.
pub fn export_report(
    g: &StructuralNetwork,
    records: &[RegionSweepRecord],
    stats: &NetworkStats,
    census: &MotifCensus,
    placements: &[PlacementSummary],
    atlas: &AtlasMapping,
    dir: impl AsRef<Path>,
) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_sweep_csv_path(records, dir.join("sweep.csv"))?;
    let report = build_report(g, records, stats, census, placements, atlas)?;
    let path = dir.join("report.json");
    std::fs::write(&path, report_json(&report)?).map_err(|e| Error::io(path, e))
}
