use std::collections::BTreeSet;

use infodiff::events::{empirical_density, DensitySurface, VoteLog, VoteTable, SECONDS_PER_HOUR};
use infodiff::graph::{partition_by_hops, GraphBuilder};
use infodiff::Error;
use proptest::prelude::*;

/// Star around `u0` plus a second ring `w{i}` following `u{i}`.
fn two_ring_graph(n: usize) -> infodiff::graph::SocialGraph {
    let mut b = GraphBuilder::new();
    b.add_user("u0");
    for i in 1..=n {
        b.add_follow(&format!("u{i}"), "u0");
        b.add_follow(&format!("w{i}"), &format!("u{i}"));
    }
    b.build().0
}

proptest! {
    #[test]
    fn density_is_cumulative_and_reconstructs_counts(
        n in 2usize..12,
        votes in prop::collection::vec((0usize..24, 1i64..(20 * SECONDS_PER_HOUR)), 0..40),
        horizon in 1u32..20,
    ) {
        let g = two_ring_graph(n);
        let users: Vec<String> = (1..=n)
            .flat_map(|i| [format!("u{i}"), format!("w{i}")])
            .collect();
        let mut records = vec![("u0".to_owned(), 0i64)];
        records.extend(votes.iter().map(|&(u, t)| (users[u % users.len()].clone(), t)));
        let (log, _) = VoteLog::ingest("s", records).unwrap();
        let part = partition_by_hops(&g, "u0", 2).unwrap();
        let (surface, diag) = empirical_density(&log, &part, horizon).unwrap();

        for row in surface.rows() {
            for w in row.windows(2) {
                prop_assert!(w[1] >= w[0]);
            }
            prop_assert!(row.iter().all(|v| (0.0..=100.0).contains(v)));
        }
        let sizes = surface.group_sizes().unwrap();
        let end = horizon as i64 * SECONDS_PER_HOUR;
        let mut total = 0;
        for (k, &x) in surface.distances().iter().enumerate() {
            let group = part.group(x).unwrap();
            let count = log
                .votes()
                .iter()
                .filter(|v| group.contains(&v.user) && v.timestamp <= end)
                .count();
            let last = *surface.row(x).unwrap().last().unwrap();
            prop_assert_eq!((last * sizes[k] as f64 / 100.0).round() as usize, count);
            total += count;
        }
        prop_assert_eq!(total + diag.after_horizon, diag.classified);
    }

    #[test]
    fn ingest_keeps_earliest_vote_per_user(
        votes in prop::collection::vec((0u8..6, 0i64..10_000), 1..30),
    ) {
        let records: Vec<(String, i64)> =
            votes.iter().map(|&(u, t)| (format!("u{u}"), t)).collect();
        let (log, dropped) = VoteLog::ingest("s", records.clone()).unwrap();
        let distinct: BTreeSet<&String> = records.iter().map(|r| &r.0).collect();
        prop_assert_eq!(log.len(), distinct.len());
        prop_assert_eq!(dropped, records.len() - distinct.len());
        for v in log.votes() {
            let earliest = records.iter().filter(|r| r.0 == v.user).map(|r| r.1).min().unwrap();
            prop_assert_eq!(v.timestamp, earliest);
        }
        prop_assert!(log.votes().windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
    }

    #[test]
    fn surface_csv_round_trip_is_lossless(
        rows in prop::collection::vec(prop::collection::vec(0.0f64..100.0, 4), 1..6),
    ) {
        let distances: Vec<u32> = (1..=rows.len() as u32).collect();
        let s = DensitySurface::new(distances, rows).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let back = DensitySurface::read_csv(buf.as_slice()).unwrap();
        prop_assert_eq!(back.rows(), s.rows());
        prop_assert_eq!(back.distances(), s.distances());
    }
}

#[test]
fn chain_cascade_has_expected_surface() {
    let mut b = GraphBuilder::new();
    b.add_follow("b", "a").add_follow("c", "b");
    let g = b.build().0;
    let (log, _) = VoteLog::ingest("s", [("a", 0), ("b", 1800), ("c", 5400)]).unwrap();
    let part = partition_by_hops(&g, "a", 2).unwrap();
    let (s, diag) = empirical_density(&log, &part, 2).unwrap();
    assert_eq!(s.row(1).unwrap(), &[100.0, 100.0]);
    assert_eq!(s.row(2).unwrap(), &[0.0, 100.0]);
    assert_eq!(diag.voters, 2);
}

#[test]
fn vote_table_reports_line_of_bad_timestamp() {
    let csv = "story_id,user_id,timestamp\ns,a,0\ns,b,oops\n";
    match VoteTable::read_csv(csv.as_bytes()) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn unknown_story_and_source_mismatch_are_errors() {
    let csv = "story_id,user_id,timestamp\ns,a,0\ns,b,10\n";
    let table = VoteTable::read_csv(csv.as_bytes()).unwrap();
    assert!(table.story("missing").is_err());
    let (log, _) = table.story("s").unwrap();
    let mut gb = GraphBuilder::new();
    gb.add_follow("b", "a");
    let part = partition_by_hops(&gb.build().0, "b", 1).unwrap();
    assert!(matches!(
        empirical_density(&log, &part, 3),
        Err(Error::SourceMismatch { .. })
    ));
}
