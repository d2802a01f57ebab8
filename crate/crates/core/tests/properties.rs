use approx::assert_relative_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;

use ctrlchain::gramian::{gramian, ControlSystem};
use ctrlchain::lcc::{lcc, min_inputs_for_lcc};
use ctrlchain::matching::{bipartite_representation, driver_nodes, maximum_matching};
use ctrlchain::motif::{triad_census, TRIANGLE, WEDGE};
use ctrlchain::network::{
    network_stats, remove_isolated, threshold_binarize, StructuralNetwork, WeightedAdjacency,
};

fn weights() -> impl Strategy<Value = WeightedAdjacency> {
    (2usize..14).prop_flat_map(|n| {
        prop::collection::vec(prop_oneof![3 => Just(0.0), 2 => 0.0f64..10.0], n * n).prop_map(move |v| {
            WeightedAdjacency::new(DMatrix::from_vec(n, n, v)).unwrap()
        })
    })
}

fn digraph(max_n: usize) -> impl Strategy<Value = StructuralNetwork> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let arcs = (0..n * n)
                .filter(|&k| bits[k] && k / n != k % n)
                .map(|k| (k / n, k % n));
            StructuralNetwork::from_arcs(n, arcs).unwrap()
        })
    })
}

fn undirected(max_n: usize) -> impl Strategy<Value = StructuralNetwork> {
    (2..=max_n).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::weighted(0.3), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            StructuralNetwork::from_edges(n, edges).unwrap()
        })
    })
}

fn degree_multiset(g: &StructuralNetwork) -> Vec<usize> {
    let mut d: Vec<usize> = (0..g.n()).map(|v| g.out_degree(v)).filter(|&d| d > 0).collect();
    d.sort_unstable();
    d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn thresholding_is_symmetric_and_monotone(w in weights(), lo in 0.0f64..5.0, step in 0.0f64..5.0) {
        let g_lo = threshold_binarize(&w, lo).unwrap();
        let g_hi = threshold_binarize(&w, lo + step).unwrap();
        prop_assert!(g_lo.is_symmetric());
        for (u, v) in g_hi.arcs() {
            prop_assert!(g_lo.has_arc(u, v));
        }
    }

    #[test]
    fn dropping_isolated_keeps_degrees(g in undirected(16)) {
        prop_assume!(g.n_arcs() > 0);
        let (h, remap) = remove_isolated(&g).unwrap();
        prop_assert_eq!(degree_multiset(&g), degree_multiset(&h));
        for (u, v) in h.arcs() {
            prop_assert!(g.has_arc(remap.old_index(u), remap.old_index(v)));
        }
    }

    #[test]
    fn average_degree_and_heterogeneity(g in undirected(16)) {
        let s = network_stats(&g, None).unwrap();
        let total: usize = (0..g.n()).map(|v| g.out_degree(v)).sum();
        assert_relative_eq!(s.average_degree, total as f64 / (2.0 * g.n() as f64), epsilon = 1e-12);
        let regular = (0..g.n()).all(|v| g.out_degree(v) == g.out_degree(0));
        prop_assert_eq!(s.heterogeneity == 0.0, regular || g.n_arcs() == 0);
    }

    #[test]
    fn matching_is_valid(g in digraph(10), seed in any::<u64>()) {
        let m = maximum_matching(&bipartite_representation(&g), seed);
        let mut plus = vec![false; g.n()];
        let mut minus = vec![false; g.n()];
        for &(u, v) in &m.matched_edges {
            prop_assert!(g.has_arc(u, v));
            prop_assert!(!plus[u] && !minus[v]);
            plus[u] = true;
            minus[v] = true;
        }
        prop_assert_eq!(m.n_u, g.n() - m.matched_edges.len());
        prop_assert_eq!(driver_nodes(&m).len(), m.n_u.max(1));
    }

    #[test]
    fn adding_inputs_never_lengthens_chains(g in digraph(12), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let (a, b) = (a.index(g.n()), b.index(g.n()));
        let one = lcc(&g, &[a]).unwrap();
        let mut both = vec![a, b];
        both.dedup();
        let two = lcc(&g, &both).unwrap();
        match (one, two) {
            (Some(x), Some(y)) => prop_assert!(y <= x),
            (Some(_), None) => prop_assert!(false, "reachability lost"),
            _ => {}
        }
    }

    #[test]
    fn placement_meets_target(g in undirected(12), k in 1u32..3, seed in any::<u64>()) {
        let report = min_inputs_for_lcc(&g, k, 8, seed).unwrap();
        for s in &report.solutions {
            prop_assert!(lcc(&g, &s.input_set).unwrap().is_some_and(|l| l <= k));
            prop_assert_eq!(s.input_set.len(), report.best_size);
        }
        prop_assert_eq!(report, min_inputs_for_lcc(&g, k, 8, seed).unwrap());
    }

    #[test]
    fn gramian_is_additive(g in undirected(10), split in any::<prop::sample::Index>()) {
        let n = g.n();
        let cut = 1 + split.index(n - 1);
        let a = g.dynamics_matrix();
        let w = |s: Vec<usize>| gramian(&ControlSystem::new(a.clone(), s, 1.0).unwrap()).unwrap();
        let (w1, w2, w12) = (w((0..cut).collect()), w((cut..n).collect()), w((0..n).collect()));
        assert_relative_eq!(&w1.w + &w2.w, w12.w, max_relative = 1e-10);
        prop_assert!(w1.trace <= w12.trace * (1.0 + 1e-12));
    }

    #[test]
    fn symmetric_census_uses_two_ids(g in undirected(14)) {
        let c = triad_census(&g);
        prop_assert!(c.counts.keys().all(|&id| id == WEDGE || id == TRIANGLE));
        let wedges: u64 = (0..g.n()).map(|v| {
            let d = g.out_degree(v) as u64;
            d * d.saturating_sub(1) / 2
        }).sum();
        prop_assert_eq!(c.count(WEDGE) + 3 * c.count(TRIANGLE), wedges);
    }

    #[test]
    fn closing_a_wedge_adds_a_triangle(g in undirected(12)) {
        let n = g.n();
        let open = (0..n).flat_map(|v| {
            let nb = g.neighbors(v);
            nb.iter().flat_map(|&x| nb.iter().map(move |&y| (x, y))).collect::<Vec<_>>()
        }).find(|&(x, y)| x < y && !g.has_arc(x, y));
        prop_assume!(open.is_some());
        let (x, y) = open.unwrap();
        let mut edges = g.undirected_edges();
        edges.push((x, y));
        let closed = StructuralNetwork::from_edges(n, edges).unwrap();
        prop_assert!(triad_census(&closed).count(TRIANGLE) > triad_census(&g).count(TRIANGLE));
    }
}

proptest! {
    #[test]
    fn adding_a_link_never_loses_wedges(g in undirected(12), pick in any::<prop::sample::Index>()) {
        let n = g.n();
        let missing: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !g.has_arc(i, j))
            .collect();
        prop_assume!(!missing.is_empty());
        let mut edges = g.undirected_edges();
        edges.push(missing[pick.index(missing.len())]);
        let h = StructuralNetwork::from_edges(n, edges).unwrap();
        let weight = |c: &ctrlchain::motif::MotifCensus| c.count(WEDGE) + 3 * c.count(TRIANGLE);
        prop_assert!(weight(&triad_census(&h)) >= weight(&triad_census(&g)));
    }
}
