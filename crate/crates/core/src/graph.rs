//! Follow graph, distance metrics and distance-group partitioning.
//!
//! Edges are stored as `follower -> followee`. Information travels the other
//! way: once a user votes, their followers can see the story. Hop distances
//! therefore expand from a followee to its followers, so the direct followers
//! of the source sit at distance 1.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::Hash;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::{Error, Result};

pub type UserId = String;

/// Content ids (story ids) each user has interacted with.
pub type VoteHistory = HashMap<UserId, HashSet<String>>;

/// Directed follow graph with both adjacency directions indexed.
///
/// Immutable once built; vertices are addressed by opaque string ids
/// externally and by dense indices internally.
#[derive(Debug, Clone, Default)]
pub struct SocialGraph {
    ids: Vec<UserId>,
    index: HashMap<UserId, usize>,
    /// followee -> sorted followers
    followers: Vec<Vec<usize>>,
    /// follower -> sorted followees
    followees: Vec<Vec<usize>>,
    edge_count: usize,
}

/// Counts of edges dropped while building a graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

#[derive(Debug, Default)]
pub struct GraphBuilder {
    ids: Vec<UserId>,
    index: HashMap<UserId, usize>,
    edges: BTreeSet<(usize, usize)>,
    stats: IngestStats,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a user, returning its dense index. Idempotent.
    pub fn add_user(&mut self, id: &str) -> usize {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len();
        self.ids.push(id.to_owned());
        self.index.insert(id.to_owned(), i);
        i
    }

    /// Adds `follower -> followee`. Self-loops and repeats are dropped and counted.
    pub fn add_follow(&mut self, follower: &str, followee: &str) -> &mut Self {
        let f = self.add_user(follower);
        let g = self.add_user(followee);
        if f == g {
            self.stats.self_loops += 1;
        } else if !self.edges.insert((f, g)) {
            self.stats.duplicates += 1;
        }
        self
    }

    pub fn build(self) -> (SocialGraph, IngestStats) {
        let n = self.ids.len();
        let mut followers = vec![Vec::new(); n];
        let mut followees = vec![Vec::new(); n];
        // BTreeSet iteration keeps both lists sorted.
        for &(f, g) in &self.edges {
            followees[f].push(g);
            followers[g].push(f);
        }
        for v in &mut followers {
            v.sort_unstable();
        }
        if self.stats.self_loops + self.stats.duplicates > 0 {
            log::warn!(
                "dropped {} self-loop and {} duplicate follow edges",
                self.stats.self_loops,
                self.stats.duplicates
            );
        }
        let graph = SocialGraph {
            ids: self.ids,
            index: self.index,
            followers,
            followees,
            edge_count: self.edges.len(),
        };
        (graph, self.stats)
    }
}

impl SocialGraph {
    /// Builds a graph from `(follower, followee)` pairs.
    pub fn from_edges<'a, I>(edges: I) -> (Self, IngestStats)
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut b = GraphBuilder::new();
        for (f, g) in edges {
            b.add_follow(f, g);
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: usize) -> &str {
        &self.ids[index]
    }

    /// User ids in insertion order.
    pub fn users(&self) -> impl Iterator<Item = &str> {
        self.ids.iter().map(String::as_str)
    }

    pub fn followers_idx(&self, index: usize) -> &[usize] {
        &self.followers[index]
    }

    pub fn followees_idx(&self, index: usize) -> &[usize] {
        &self.followees[index]
    }

    pub fn followers_of(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.require(id)?;
        Ok(self.followers[i].iter().map(|&j| self.id(j)).collect())
    }

    pub fn followees_of(&self, id: &str) -> Result<Vec<&str>> {
        let i = self.require(id)?;
        Ok(self.followees[i].iter().map(|&j| self.id(j)).collect())
    }

    /// All edges as `(follower, followee)`, ordered by follower index.
    pub fn edges(&self) -> impl Iterator<Item = (&str, &str)> {
        self.followees
            .iter()
            .enumerate()
            .flat_map(move |(f, gs)| gs.iter().map(move |&g| (self.id(f), self.id(g))))
    }

    fn require(&self, id: &str) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownUser(id.to_owned()))
    }

    /// BFS over dense indices, expanding followee -> follower.
    pub fn hop_distances_idx(&self, source: usize) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let next = dist[u].unwrap() + 1;
            for &v in &self.followers[u] {
                if dist[v].is_none() {
                    dist[v] = Some(next);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Reads a `follower,followee` CSV.
    pub fn read_csv<R: Read>(reader: R) -> Result<(Self, IngestStats)> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "follower" || &headers[1] != "followee" {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `follower,followee`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
        let mut b = GraphBuilder::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let (f, g) = (&rec[0], &rec[1]);
            if f.is_empty() || g.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: "empty user id".into(),
                });
            }
            b.add_follow(f, g);
        }
        Ok(b.build())
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["follower", "followee"])?;
        for (f, g) in self.edges() {
            w.write_record([f, g])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Hop counts from `source`; unreachable users are absent, the source maps to 0.
pub fn hop_distances(graph: &SocialGraph, source: &str) -> Result<BTreeMap<UserId, u32>> {
    let s = graph.require(source)?;
    Ok(graph
        .hop_distances_idx(s)
        .into_iter()
        .enumerate()
        .filter_map(|(i, d)| d.map(|d| (graph.id(i).to_owned(), d)))
        .collect())
}

/// `(|a ∩ b|, |a ∪ b|)`.
fn overlap_counts<T: Eq + Hash, S: std::hash::BuildHasher>(
    a: &HashSet<T, S>,
    b: &HashSet<T, S>,
) -> (usize, usize) {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let inter = small.iter().filter(|x| large.contains(*x)).count();
    (inter, a.len() + b.len() - inter)
}

/// One minus the Jaccard similarity of two content sets, in `[0, 1]`.
pub fn shared_interest_distance<T: Eq + Hash, S: std::hash::BuildHasher>(
    a: &HashSet<T, S>,
    b: &HashSet<T, S>,
) -> Result<f64> {
    let (inter, union) = overlap_counts(a, b);
    if union == 0 {
        return Err(Error::EmptyContentSets);
    }
    Ok(1.0 - inter as f64 / union as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    FriendshipHops,
    SharedInterests,
}

/// Users grouped by their distance `1..=max_distance` to a source.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistancePartition {
    pub source: UserId,
    pub metric: Metric,
    pub max_distance: u32,
    /// Every key in `1..=max_distance` is present, possibly with an empty set.
    pub groups: BTreeMap<u32, BTreeSet<UserId>>,
}

impl DistancePartition {
    fn new(source: &str, metric: Metric, max_distance: u32) -> Self {
        DistancePartition {
            source: source.to_owned(),
            metric,
            max_distance,
            groups: (1..=max_distance).map(|x| (x, BTreeSet::new())).collect(),
        }
    }

    pub fn group(&self, distance: u32) -> Option<&BTreeSet<UserId>> {
        self.groups.get(&distance)
    }

    /// Reverse lookup: user -> distance.
    pub fn membership(&self) -> HashMap<&str, u32> {
        self.groups
            .iter()
            .flat_map(|(&x, us)| us.iter().map(move |u| (u.as_str(), x)))
            .collect()
    }

    pub fn classified_count(&self) -> usize {
        self.groups.values().map(BTreeSet::len).sum()
    }

    fn debug_check(&self) {
        debug_assert!(self.groups.values().all(|g| !g.contains(&self.source)));
        debug_assert_eq!(self.membership().len(), self.classified_count());
    }
}

/// Groups users reachable within `max_distance` hops of `source`.
pub fn partition_by_hops(
    graph: &SocialGraph,
    source: &str,
    max_distance: u32,
) -> Result<DistancePartition> {
    if max_distance < 1 {
        return Err(Error::invalid("max_distance must be at least 1"));
    }
    let s = graph.require(source)?;
    let mut part = DistancePartition::new(source, Metric::FriendshipHops, max_distance);
    for (i, d) in graph.hop_distances_idx(s).into_iter().enumerate() {
        if let Some(d @ 1..) = d {
            if d <= max_distance {
                part.groups.get_mut(&d).unwrap().insert(graph.id(i).to_owned());
            }
        }
    }
    part.debug_check();
    Ok(part)
}

/// Equal-width bucket `1..=buckets` for distance `(union - inter) / union`.
///
/// Integer arithmetic keeps bin edges exact: a distance of exactly `i/b`
/// lands in bucket `i + 1`, and 1.0 lands in the top bucket.
fn interest_bucket(inter: usize, union: usize, buckets: u32) -> u32 {
    let num = (union - inter) as u128 * buckets as u128;
    let b = (num / union as u128) as u32 + 1;
    b.min(buckets)
}

/// Groups every user with a non-empty history into `bucket_count`
/// equal-width shared-interest distance buckets relative to `source`.
pub fn partition_by_interest(
    histories: &VoteHistory,
    source: &str,
    bucket_count: u32,
    exec: Execution,
) -> Result<DistancePartition> {
    if bucket_count < 2 {
        return Err(Error::invalid("bucket_count must be at least 2"));
    }
    let src = match histories.get(source) {
        Some(h) if !h.is_empty() => h,
        _ => {
            return Err(Error::invalid(format!(
                "source `{source}` has no vote history"
            )))
        }
    };
    let mut others: Vec<(&String, &HashSet<String>)> = histories
        .iter()
        .filter(|(u, h)| u.as_str() != source && !h.is_empty())
        .collect();
    others.sort_unstable_by(|a, b| a.0.cmp(b.0));

    let buckets = exec.map(&others, |(_, h)| {
        let (inter, union) = overlap_counts(src, h);
        interest_bucket(inter, union, bucket_count)
    });

    let mut part = DistancePartition::new(source, Metric::SharedInterests, bucket_count);
    for ((user, _), b) in others.iter().zip(buckets) {
        part.groups.get_mut(&b).unwrap().insert((*user).clone());
    }
    part.debug_check();
    Ok(part)
}

/// `|U_x|` for every distance of the partition.
pub fn partition_sizes(partition: &DistancePartition) -> BTreeMap<u32, usize> {
    partition
        .groups
        .iter()
        .map(|(&x, g)| (x, g.len()))
        .collect()
}

/// Writes `distance,count`.
pub fn write_sizes_csv<W: Write>(sizes: &BTreeMap<u32, usize>, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["distance", "count"])?;
    for (x, n) in sizes {
        w.write_record([x.to_string(), n.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
