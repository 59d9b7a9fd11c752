//! Seeded synthetic follow graphs and vote cascades.
//!
//! A cascade spreads through two channels, stepped hourly:
//!
//! * follow links: a non-voter following `k` earlier voters votes with
//!   probability `1 - (1 - p_follow)^k`;
//! * after promotion (hours `> t_promote`) any non-voter additionally votes
//!   with probability `q_random`.
//!
//! Each user owns a ChaCha stream that yields exactly one decision uniform
//! and one timestamp offset per hour, whatever happens. Runs that differ
//! only in probabilities therefore share their random numbers, which makes
//! the final voter set monotone in `p_follow` and `q_random`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::events::{VoteLog, SECONDS_PER_HOUR};
use crate::exec::Execution;
use crate::graph::{GraphBuilder, SocialGraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GraphKind {
    /// `u{i}` follows `u{i-1}`.
    Chain,
    /// Every `u{i}`, `i >= 1`, follows the hub `u0`.
    Star,
    /// Ring lattice where each user follows its `k` nearest neighbours,
    /// each follow rewired to a random target with probability `beta`.
    WattsStrogatz { k: usize, beta: f64 },
    /// Each new user follows `m` existing users picked proportionally to
    /// their follower count plus one.
    BarabasiAlbert { m: usize },
}

pub fn user_id(i: usize) -> String {
    format!("u{i}")
}

pub fn generate_graph(kind: &GraphKind, n: usize, seed: u64) -> Result<SocialGraph> {
    if n < 2 {
        return Err(Error::invalid("graph needs at least 2 users"));
    }
    let ids: Vec<String> = (0..n).map(user_id).collect();
    let mut b = GraphBuilder::new();
    for id in &ids {
        b.add_user(id);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        GraphKind::Chain => {
            for i in 1..n {
                b.add_follow(&ids[i], &ids[i - 1]);
            }
        }
        GraphKind::Star => {
            for id in &ids[1..] {
                b.add_follow(id, &ids[0]);
            }
        }
        GraphKind::WattsStrogatz { k, beta } => {
            if k < 2 || k % 2 != 0 || k >= n {
                return Err(Error::invalid(format!(
                    "watts-strogatz needs an even k with 2 <= k < n, got k = {k}"
                )));
            }
            if !(0.0..=1.0).contains(&beta) {
                return Err(Error::invalid("beta must lie in [0, 1]"));
            }
            let mut follows: Vec<BTreeSet<usize>> = (0..n)
                .map(|i| {
                    (1..=k / 2)
                        .flat_map(|j| [(i + j) % n, (i + n - j) % n])
                        .collect()
                })
                .collect();
            for i in 0..n {
                let targets: Vec<usize> = follows[i].iter().copied().collect();
                for t in targets {
                    if rng.gen::<f64>() >= beta || follows[i].len() >= n - 1 {
                        continue;
                    }
                    let new = loop {
                        let c = rng.gen_range(0..n);
                        if c != i && !follows[i].contains(&c) {
                            break c;
                        }
                    };
                    follows[i].remove(&t);
                    follows[i].insert(new);
                }
            }
            for (i, fs) in follows.iter().enumerate() {
                for &j in fs {
                    b.add_follow(&ids[i], &ids[j]);
                }
            }
        }
        GraphKind::BarabasiAlbert { m } => {
            if m < 1 || m >= n {
                return Err(Error::invalid(format!(
                    "barabasi-albert needs 1 <= m < n, got m = {m}"
                )));
            }
            // one ticket per user plus one per follower
            let mut tickets: Vec<usize> = Vec::new();
            for i in 0..=m {
                tickets.push(i);
                for j in 0..i {
                    b.add_follow(&ids[i], &ids[j]);
                    tickets.push(j);
                }
            }
            for v in m + 1..n {
                let mut chosen = BTreeSet::new();
                while chosen.len() < m {
                    chosen.insert(tickets[rng.gen_range(0..tickets.len())]);
                }
                for &t in &chosen {
                    b.add_follow(&ids[v], &ids[t]);
                    tickets.push(t);
                }
                tickets.push(v);
            }
        }
    }
    Ok(b.build().0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Per-exposure hourly vote probability along follow links.
    pub p_follow: f64,
    /// Last hour before the story reaches the front page.
    pub t_promote: u32,
    /// Hourly vote probability for any non-voter after promotion.
    pub q_random: f64,
    pub horizon: u32,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        // The front-page rate is not calibrated to anything; it is a
        // placeholder small enough for follow links to dominate.
        SimConfig {
            p_follow: 0.1,
            t_promote: 3,
            q_random: 0.001,
            horizon: 50,
            seed: 42,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_follow", self.p_follow), ("q_random", self.q_random)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if self.horizon < 1 {
            return Err(Error::invalid("horizon must be at least 1"));
        }
        Ok(())
    }
}

/// Simulates one story started by `initiator` at timestamp 0.
pub fn generate_cascade(
    graph: &SocialGraph,
    config: &SimConfig,
    initiator: &str,
    story_id: &str,
) -> Result<VoteLog> {
    config.validate()?;
    let src = graph
        .index_of(initiator)
        .ok_or_else(|| Error::UnknownUser(initiator.to_owned()))?;
    let n = graph.len();
    let mut streams: Vec<ChaCha8Rng> = (0..n)
        .map(|i| {
            let mut r = ChaCha8Rng::seed_from_u64(config.seed);
            r.set_stream(i as u64);
            r
        })
        .collect();

    // vote hour per user; the initiator votes at hour 0
    let mut voted_at: Vec<Option<u32>> = vec![None; n];
    voted_at[src] = Some(0);
    let mut records: Vec<(String, i64)> = vec![(initiator.to_owned(), 0)];
    let mut new_voters = Vec::new();

    for hour in 1..=config.horizon {
        let promoted = hour > config.t_promote;
        for (u, rng) in streams.iter_mut().enumerate() {
            let draw: f64 = rng.gen();
            let offset: i64 = rng.gen_range(1..=SECONDS_PER_HOUR);
            if voted_at[u].is_some() {
                continue;
            }
            let exposures = graph
                .followees_idx(u)
                .iter()
                .filter(|&&f| voted_at[f].is_some_and(|h| h < hour))
                .count();
            let mut stay = (1.0 - config.p_follow).powi(exposures as i32);
            if promoted {
                stay *= 1.0 - config.q_random;
            }
            if draw < 1.0 - stay {
                new_voters.push((u, offset));
            }
        }
        for (u, offset) in new_voters.drain(..) {
            voted_at[u] = Some(hour);
            let ts = (hour as i64 - 1) * SECONDS_PER_HOUR + offset;
            records.push((graph.id(u).to_owned(), ts));
        }
    }
    Ok(VoteLog::ingest(story_id, records)?.0)
}

/// One cascade per seed, story ids `"{story_prefix}-{seed}"`.
pub fn generate_batch(
    graph: &SocialGraph,
    base: &SimConfig,
    seeds: &[u64],
    initiator: &str,
    story_prefix: &str,
    exec: Execution,
) -> Vec<Result<VoteLog>> {
    exec.map(seeds, |&seed| {
        let cfg = SimConfig { seed, ..*base };
        generate_cascade(graph, &cfg, initiator, &format!("{story_prefix}-{seed}"))
    })
}
