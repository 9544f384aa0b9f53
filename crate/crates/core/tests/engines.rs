//! Cross-engine properties on small random graphs: every exact engine agrees
//! with the brute-force oracle, and the structural guarantees behind the
//! priority ordering hold.

use bfly_core::edge::{brute_force_per_edge, count_per_edge_evpp, per_vertex_from_edges};
use bfly_core::exact::{
    brute_force_count, count_caterpillars, count_ibs, count_per_vertex, count_vp, count_vpp,
    prepare_vpp,
};
use bfly_core::gen;
use bfly_core::priority::is_priority_sorted;
use bfly_core::{BipartiteGraph, Layer, RankedGraph};
use proptest::prelude::*;

fn small_graph() -> impl Strategy<Value = BipartiteGraph> {
    (
        1usize..=14,
        1usize..=14,
        prop::sample::select(vec![0.05, 0.1, 0.25, 0.5, 0.8]),
        any::<u64>(),
    )
        .prop_map(|(r, l, p, seed)| gen::random(r, l, p, seed))
}

/// Three-paths enumerated from one end, each seen once per direction.
fn three_paths(g: &BipartiteGraph) -> u128 {
    let mut total = 0u128;
    for a in g.vertices() {
        for &b in g.neighbors(a) {
            for &c in g.neighbors(b) {
                if c == a {
                    continue;
                }
                total += g.neighbors(c).iter().filter(|&&d| d != b).count() as u128;
            }
        }
    }
    total / 2
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn engines_match_oracle(g in small_graph()) {
        let truth = brute_force_count(&g).unwrap();
        let ibs = count_ibs(&g).unwrap();
        let vp = count_vp(&RankedGraph::new(&g)).unwrap();
        let vpp = count_vpp(&prepare_vpp(&g).0).unwrap();
        prop_assert_eq!(ibs.butterflies, truth);
        prop_assert_eq!(vp.butterflies, truth);
        prop_assert_eq!(vpp.butterflies, truth);
        prop_assert_eq!(vp.wedges_processed, vpp.wedges_processed);
        let bound = g.sum_squared_degrees(Layer::Upper).min(g.sum_squared_degrees(Layer::Lower));
        prop_assert!(u128::from(vp.wedges_processed) <= bound);
        prop_assert!(u128::from(vp.wedges_processed) <= g.sum_min_degree());
    }

    #[test]
    fn priorities_are_a_total_order(g in small_graph()) {
        let rg = RankedGraph::new(&g);
        let mut seen: Vec<u32> = rg.priority().as_slice().to_vec();
        seen.sort_unstable();
        prop_assert_eq!(seen, (1..=g.n() as u32).collect::<Vec<_>>());
        for a in g.vertices() {
            for b in g.vertices() {
                if g.degree(a) > g.degree(b) {
                    prop_assert!(rg.priority().of(a) > rg.priority().of(b));
                }
            }
        }
        prop_assert!(is_priority_sorted(rg.graph(), rg.priority()));
    }

    #[test]
    fn projection_preserves_structure(g in small_graph()) {
        let rg = RankedGraph::new(&g);
        let (pg, map) = prepare_vpp(&g);
        prop_assert_eq!(pg.graph().labeled_edges(), g.labeled_edges());
        for v in g.vertices() {
            let image = map.forward(v);
            prop_assert_eq!(map.inverse(image), v);
            prop_assert_eq!(g.layer(v), pg.graph().layer(image));
            prop_assert_eq!(rg.priority().of(v), pg.priority().of(image));
        }
        // Within each layer, higher priority means a smaller ID.
        for layer in [pg.graph().lower_ids(), pg.graph().upper_ids()] {
            let ps: Vec<u32> = layer.map(|v| pg.priority().of(v)).collect();
            prop_assert!(ps.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn per_edge_conservation(g in small_graph()) {
        let (rg, _) = prepare_vpp(&g);
        let ec = count_per_edge_evpp(&rg).unwrap();
        prop_assert_eq!(&ec, &brute_force_per_edge(&g).unwrap());
        prop_assert_eq!(ec.sum(), 4 * ec.butterflies);
        let per_vertex = count_per_vertex(&g).unwrap();
        prop_assert_eq!(&per_vertex_from_edges(&ec, &g).unwrap(), &per_vertex);
        let upper: u128 = g.upper_ids().map(|u| per_vertex[u as usize]).sum();
        prop_assert_eq!(upper, 2 * ec.butterflies);
    }

    #[test]
    fn swapping_layers_changes_nothing(g in small_graph()) {
        let s = g.swap_layers();
        let a = count_vpp(&prepare_vpp(&g).0).unwrap();
        let b = count_vpp(&prepare_vpp(&s).0).unwrap();
        prop_assert_eq!(a.butterflies, b.butterflies);
        prop_assert_eq!(count_ibs(&g).unwrap().butterflies, count_ibs(&s).unwrap().butterflies);
    }

    #[test]
    fn caterpillars_match_enumeration(g in small_graph()) {
        prop_assert_eq!(count_caterpillars(&g).unwrap(), three_paths(&g));
    }
}
