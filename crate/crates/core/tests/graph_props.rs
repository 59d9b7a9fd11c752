mod common;

use std::collections::{HashMap, HashSet};

use infodiff::exec::Execution;
use infodiff::graph::{
    hop_distances, partition_by_hops, partition_by_interest, partition_sizes,
    shared_interest_distance, GraphBuilder, SocialGraph, VoteHistory,
};
use proptest::prelude::*;

fn build(n: usize, edges: &[(usize, usize)]) -> SocialGraph {
    let mut b = GraphBuilder::new();
    for i in 0..n {
        b.add_user(&format!("v{i}"));
    }
    for &(f, e) in edges {
        b.add_follow(&format!("v{f}"), &format!("v{e}"));
    }
    b.build().0
}

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize)>)> {
    (1usize..30).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..n * 3)))
}

proptest! {
    #[test]
    fn bfs_matches_floyd_warshall((n, edges) in graph_strategy(), src in 0usize..30) {
        let src = src % n;
        let g = build(n, &edges);
        let got = hop_distances(&g, &format!("v{src}")).unwrap();
        let want = common::brute_force_hops(n, &edges, src);
        for (i, d) in want.iter().enumerate() {
            prop_assert_eq!(got.get(&format!("v{i}")).copied(), *d);
        }
    }

    #[test]
    fn partition_groups_are_disjoint_and_exact((n, edges) in graph_strategy(), max in 1u32..5) {
        let g = build(n, &edges);
        let part = partition_by_hops(&g, "v0", max).unwrap();
        let hops = hop_distances(&g, "v0").unwrap();
        let mut seen = HashSet::new();
        for (&x, users) in &part.groups {
            for u in users {
                prop_assert!(seen.insert(u.clone()), "{} in two groups", u);
                prop_assert_eq!(hops[u], x);
            }
        }
        let expected = hops.values().filter(|&&d| (1..=max).contains(&d)).count();
        prop_assert_eq!(part.classified_count(), expected);
        prop_assert!(!seen.contains("v0"));
    }

    #[test]
    fn jaccard_distance_is_symmetric_and_bounded(
        a in prop::collection::hash_set(0u32..20, 0..15),
        b in prop::collection::hash_set(0u32..20, 1..15),
    ) {
        let ab = shared_interest_distance(&a, &b).unwrap();
        let ba = shared_interest_distance(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert_eq!(ab, common::enumerated_jaccard_distance(&a, &b));
        if !a.is_empty() {
            prop_assert_eq!(shared_interest_distance(&a, &a).unwrap(), 0.0);
        }
    }

    #[test]
    fn interest_partition_sequential_matches_parallel(
        hist in prop::collection::vec(prop::collection::hash_set(0u32..12, 0..6), 2..40),
        buckets in 2u32..8,
    ) {
        let histories: VoteHistory = hist
            .iter()
            .enumerate()
            .map(|(i, s)| (format!("v{i}"), s.iter().map(|x| format!("s{x}")).collect()))
            .collect();
        let seq = partition_by_interest(&histories, "v0", buckets, Execution::Sequential);
        let par = partition_by_interest(&histories, "v0", buckets, Execution::Parallel);
        match (seq, par) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "strategies disagree on success"),
        }
    }
}

#[test]
fn interest_buckets_put_edge_distances_in_upper_bin() {
    // distances 0, 1/4, 1/2, 3/4 and 1 with four buckets
    let sets: [&[&str]; 6] = [
        &["a", "b", "c", "d"],
        &["a", "b", "c", "d"],
        &["a", "b", "c"],
        &["a", "b"],
        &["a"],
        &["z"],
    ];
    let histories: VoteHistory = sets
        .iter()
        .enumerate()
        .map(|(i, s)| (format!("v{i}"), s.iter().map(|x| x.to_string()).collect()))
        .collect();
    let part = partition_by_interest(&histories, "v0", 4, Execution::Sequential).unwrap();
    let membership: HashMap<&str, u32> = part.membership();
    assert_eq!(membership["v1"], 1);
    assert_eq!(membership["v2"], 2);
    assert_eq!(membership["v3"], 3);
    assert_eq!(membership["v4"], 4);
    assert_eq!(membership["v5"], 4);
    let sizes = partition_sizes(&part);
    assert_eq!(sizes.values().sum::<usize>(), 5);
}

#[test]
fn graph_csv_round_trip_preserves_edges() {
    let g = build(5, &[(1, 0), (2, 1), (3, 1), (4, 3), (0, 4)]);
    let mut buf = Vec::new();
    g.write_csv(&mut buf).unwrap();
    let (back, stats) = SocialGraph::read_csv(buf.as_slice()).unwrap();
    let mut a: Vec<(String, String)> =
        g.edges().map(|(x, y)| (x.to_owned(), y.to_owned())).collect();
    let mut b: Vec<(String, String)> =
        back.edges().map(|(x, y)| (x.to_owned(), y.to_owned())).collect();
    a.sort();
    b.sort();
    assert_eq!(a, b);
    assert_eq!(stats.self_loops + stats.duplicates, 0);
}
