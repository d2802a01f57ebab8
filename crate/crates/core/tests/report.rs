use std::collections::BTreeMap;

use ctrlchain::motif::{motif_energy_table, triad_census, MotifCensus};
use ctrlchain::network::{aal90_labels, network_stats, remove_isolated, StructuralNetwork};
use ctrlchain::report::{build_report, export_report, PlacementSummary};
use ctrlchain::sweep::{read_sweep_csv_path, region_sweep, system_lcc_breakdown, AtlasMapping, RegionSweepRecord};
use ctrlchain::{lcc::min_inputs_for_lcc, synth};

fn labeled_pa(seed: u64) -> StructuralNetwork {
    synth::preferential_attachment(90, 6, seed).with_labels(aal90_labels()).unwrap()
}

fn record(node: usize, trace: f64, lcc: u32) -> RegionSweepRecord {
    RegionSweepRecord {
        node,
        label: format!("r{node}"),
        degree: 1,
        trace,
        log10_trace: trace.log10(),
        lambda_min: 1.0,
        controllable: true,
        lcc: Some(lcc),
        energy_class: ctrlchain::sweep::classify_trace(trace).unwrap(),
    }
}

#[test]
fn bundled_atlas_partitions_twenty_regions() {
    let g = labeled_pa(3);
    let records = region_sweep(&g, 1.0).unwrap();
    let systems = system_lcc_breakdown(&records, &AtlasMapping::bundled());
    let dmn = &systems["Default Mode"];
    let aud = &systems["Auditory"];
    assert_eq!(dmn.members.len(), 14);
    assert_eq!(aud.members.len(), 6);
    assert!(dmn.members.iter().all(|m| !aud.members.contains(m)));
    assert!(dmn.unresolved.is_empty() && aud.unresolved.is_empty());
    assert_eq!(dmn.histogram.values().sum::<usize>(), 14);
    // Heschl L and R
    assert!(aud.members.contains(&78) && aud.members.contains(&79));
}

#[test]
fn removed_region_is_unresolved() {
    let base = labeled_pa(4);
    // detach Heschl L (index 78) and drop it
    let edges: Vec<_> = base.undirected_edges().into_iter().filter(|&(u, v)| u != 78 && v != 78).collect();
    let g = StructuralNetwork::from_edges(90, edges).unwrap().with_labels(aal90_labels()).unwrap();
    let (h, remap) = remove_isolated(&g).unwrap();
    assert_eq!(remap.new_index(78), None);
    assert_eq!(h.n(), 89);
    let records = region_sweep(&h, 1.0).unwrap();
    let systems = system_lcc_breakdown(&records, &AtlasMapping::bundled());
    assert_eq!(systems["Auditory"].unresolved, vec!["Heschl L".to_string()]);
    assert_eq!(systems["Auditory"].members.len(), 5);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let g = labeled_pa(5);
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let wide = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
    let a = serial.install(|| region_sweep(&g, 1.0).unwrap());
    let b = wide.install(|| region_sweep(&g, 1.0).unwrap());
    assert_eq!(a, b);
}

#[test]
fn export_round_trips_the_sweep() {
    let g = labeled_pa(6);
    let records = region_sweep(&g, 1.0).unwrap();
    let stats = network_stats(&g, None).unwrap();
    let census = triad_census(&g);
    let placement = PlacementSummary::new(&g, &min_inputs_for_lcc(&g, 2, 20, 1).unwrap());
    let dir = tempfile::tempdir().unwrap();
    export_report(&g, &records, &stats, &census, &[placement], &AtlasMapping::bundled(), dir.path()).unwrap();
    assert_eq!(read_sweep_csv_path(dir.path().join("sweep.csv")).unwrap(), records);

    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["placements"].as_array().unwrap().len(), 1);
    assert_eq!(report["census"]["n_m"], census.n_m);
    let total: u64 = report["energy_classes"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 90);
}

#[test]
fn report_rejects_a_mismatched_sweep() {
    let g = labeled_pa(7);
    let records = region_sweep(&g, 1.0).unwrap();
    let stats = network_stats(&g, None).unwrap();
    let err = build_report(&g, &records[..10], &stats, &triad_census(&g), &[], &AtlasMapping::bundled());
    assert!(err.is_err());
}

#[test]
fn motif_table_orders_by_motif_count() {
    // same link count; the path has two open wedges, the triangle one closed triple
    let a = StructuralNetwork::from_edges(4, [(0, 1), (1, 2), (0, 2)]).unwrap();
    let b = StructuralNetwork::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
    let (ca, cb) = (triad_census(&a), triad_census(&b));
    assert!(ca.count(238) > cb.count(238));
    let censuses = BTreeMap::from([("b".to_string(), cb), ("a".to_string(), ca.clone())]);
    let sweeps = BTreeMap::from([
        ("a".to_string(), vec![record(0, 1e10, 3), record(1, 3e10, 3)]),
        ("b".to_string(), vec![record(0, 1e7, 5), record(1, 1e9, 2)]),
    ]);
    let rows = motif_energy_table(&censuses, &sweeps, &[3, 5]).unwrap();
    let order: Vec<_> = rows.iter().map(|r| (r.network.as_str(), r.n_m)).collect();
    assert_eq!(order, vec![("b", 2), ("a", 1)]);

    let a_row = &rows[1];
    assert_eq!(a_row.mean_trace_at_lcc[&3], Some(2e10));
    assert_eq!(a_row.mean_trace_at_lcc[&5], None);
    assert_eq!(a_row.mean_trace, 2e10);
    assert_eq!(rows[0].mean_trace_at_lcc[&3], None);
    assert_eq!(rows[0].mean_trace_at_lcc[&5], Some(1e7));

    let single = motif_energy_table(
        &BTreeMap::from([("a".to_string(), ca)]),
        &BTreeMap::from([("a".to_string(), sweeps["a"].clone())]),
        &[3, 5],
    )
    .unwrap();
    assert_eq!(single.len(), 1);
    assert_eq!(single[0].mean_trace, 2e10);

    let missing = motif_energy_table(&BTreeMap::from([("x".to_string(), MotifCensus::default())]), &sweeps, &[3]);
    assert!(missing.is_err());
}
