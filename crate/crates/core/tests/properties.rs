use proptest::prelude::*;

use graphcode::graph::sorted_matrix;
use graphcode::partition::CoderId;
use graphcode::{CoderConfig, Graph, SortedGraph};

fn graph() -> impl Strategy<Value = Graph> {
    (1usize..14).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 1..n {
                for j in 0..i {
                    if bits[k] {
                        edges.push((i, j));
                    }
                    k += 1;
                }
            }
            Graph::from_edges(n, edges).unwrap()
        })
    })
}

fn relabeled(g: Graph) -> impl Strategy<Value = (Graph, Vec<usize>)> {
    let n = g.node_count();
    Just((0..n).collect::<Vec<_>>()).prop_shuffle().prop_map(move |perm| (g.clone(), perm))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn universal_coders_round_trip(g in graph()) {
        let sorted = SortedGraph::new(&g);
        for id in CoderId::ALL {
            let cfg = CoderConfig::universal(id);
            let (len, stream) = cfg.encode(&sorted).unwrap();
            prop_assert!(len.actual_bits.unwrap() as f64 >= len.ideal_bits.floor() - 32.0);
            let back = cfg.decode(g.node_count(), &stream).unwrap();
            prop_assert_eq!(sorted_matrix(&back), sorted_matrix(&g));
        }
    }

    #[test]
    fn structure_lengths_ignore_labels((g, perm) in graph().prop_flat_map(relabeled)) {
        let h = g.permuted(&perm);
        prop_assert_eq!(sorted_matrix(&g), sorted_matrix(&h));
        for id in CoderId::ALL {
            let cfg = CoderConfig::universal(id);
            let a = cfg.measure(&SortedGraph::new(&g)).unwrap().ideal_bits;
            let b = cfg.measure(&SortedGraph::new(&h)).unwrap().ideal_bits;
            prop_assert!((a - b).abs() <= 1e-9 * a.max(1.0), "{} {} vs {}", id, a, b);
        }
    }
}
