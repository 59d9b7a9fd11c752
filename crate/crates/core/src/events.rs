//! Vote logs and the empirical influenced-user density surface.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};

use serde::Serialize;

use crate::graph::{DistancePartition, UserId, VoteHistory};
use crate::{Error, Result};

pub const SECONDS_PER_HOUR: i64 = 3600;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vote {
    pub user: UserId,
    pub timestamp: i64,
}

/// Votes on one story, sorted by time, one vote per user.
///
/// The first vote defines the initiator and the time origin.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VoteLog {
    story_id: String,
    votes: Vec<Vote>,
}

impl VoteLog {
    /// Sorts records by timestamp (stable for ties) and keeps each user's
    /// earliest vote. Returns the log and the number of dropped duplicates.
    pub fn ingest<I, U>(story_id: &str, records: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (U, i64)>,
        U: Into<UserId>,
    {
        let mut votes: Vec<Vote> = records
            .into_iter()
            .map(|(u, t)| Vote {
                user: u.into(),
                timestamp: t,
            })
            .collect();
        if votes.is_empty() {
            return Err(Error::invalid(format!("story `{story_id}` has no votes")));
        }
        votes.sort_by_key(|v| v.timestamp);
        let before = votes.len();
        let mut seen = HashSet::with_capacity(before);
        votes.retain(|v| seen.insert(v.user.clone()));
        let dropped = before - votes.len();
        if dropped > 0 {
            log::info!("story `{story_id}`: dropped {dropped} duplicate votes");
        }
        Ok((
            VoteLog {
                story_id: story_id.to_owned(),
                votes,
            },
            dropped,
        ))
    }

    pub fn story_id(&self) -> &str {
        &self.story_id
    }

    pub fn votes(&self) -> &[Vote] {
        &self.votes
    }

    pub fn initiator(&self) -> &str {
        &self.votes[0].user
    }

    pub fn origin(&self) -> i64 {
        self.votes[0].timestamp
    }

    pub fn len(&self) -> usize {
        self.votes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.votes.is_empty()
    }
}

/// Raw `story_id,user_id,timestamp` records grouped by story.
#[derive(Debug, Clone, Default)]
pub struct VoteTable {
    stories: BTreeMap<String, Vec<(UserId, i64)>>,
}

impl VoteTable {
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.iter().collect::<Vec<_>>() != ["story_id", "user_id", "timestamp"] {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `story_id,user_id,timestamp`".into(),
            });
        }
        let mut stories: BTreeMap<String, Vec<(UserId, i64)>> = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let ts: i64 = rec[2].parse().map_err(|_| Error::Parse {
                line,
                message: format!("malformed timestamp `{}`", &rec[2]),
            })?;
            stories
                .entry(rec[0].to_owned())
                .or_default()
                .push((rec[1].to_owned(), ts));
        }
        if stories.is_empty() {
            return Err(Error::Parse {
                line: 1,
                message: "vote file contains no records".into(),
            });
        }
        Ok(VoteTable { stories })
    }

    pub fn story_ids(&self) -> impl Iterator<Item = &str> {
        self.stories.keys().map(String::as_str)
    }

    pub fn story(&self, story_id: &str) -> Result<(VoteLog, usize)> {
        let recs = self
            .stories
            .get(story_id)
            .ok_or_else(|| Error::invalid(format!("unknown story `{story_id}`")))?;
        VoteLog::ingest(story_id, recs.iter().cloned())
    }

    /// Stories each user voted on, across the whole table.
    pub fn histories(&self) -> VoteHistory {
        let mut h: VoteHistory = HashMap::new();
        for (story, recs) in &self.stories {
            for (u, _) in recs {
                h.entry(u.clone()).or_default().insert(story.clone());
            }
        }
        h
    }
}

pub fn write_votes_csv<W: Write>(logs: &[VoteLog], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["story_id", "user_id", "timestamp"])?;
    for log in logs {
        for v in &log.votes {
            w.write_record([log.story_id.as_str(), v.user.as_str(), &v.timestamp.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Discrete density `I[x][t]` in percent, one row per distance, one column
/// per whole hour `1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensitySurface {
    distances: Vec<u32>,
    horizon: u32,
    values: Vec<Vec<f64>>,
    group_sizes: Option<Vec<usize>>,
}

impl DensitySurface {
    pub fn new(distances: Vec<u32>, values: Vec<Vec<f64>>) -> Result<Self> {
        if distances.len() != values.len() {
            return Err(Error::invalid("one row of values per distance required"));
        }
        if distances.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("distances must be strictly increasing"));
        }
        let horizon = values.first().map_or(0, Vec::len);
        if values.iter().any(|r| r.len() != horizon) {
            return Err(Error::invalid("ragged density matrix"));
        }
        if let Some(v) = values.iter().flatten().find(|v| !(0.0..=100.0).contains(*v)) {
            return Err(Error::OutOfRange {
                what: "density",
                value: *v,
                range: "[0, 100]".into(),
            });
        }
        Ok(DensitySurface {
            distances,
            horizon: horizon as u32,
            values,
            group_sizes: None,
        })
    }

    pub fn with_group_sizes(mut self, sizes: Vec<usize>) -> Self {
        assert_eq!(sizes.len(), self.distances.len());
        self.group_sizes = Some(sizes);
        self
    }

    pub fn distances(&self) -> &[u32] {
        &self.distances
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }

    pub fn group_sizes(&self) -> Option<&[usize]> {
        self.group_sizes.as_deref()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, distance: u32) -> Option<&[f64]> {
        let i = self.distances.binary_search(&distance).ok()?;
        Some(&self.values[i])
    }

    /// `I[x][t]` for hour `t >= 1`.
    pub fn value(&self, distance: u32, t: u32) -> Option<f64> {
        if t == 0 {
            return None;
        }
        self.row(distance)?.get(t as usize - 1).copied()
    }

    /// Column `I[.][t]`.
    pub fn slice_at(&self, t: u32) -> Result<BTreeMap<u32, f64>> {
        if t < 1 || t > self.horizon {
            return Err(Error::OutOfRange {
                what: "time bin",
                value: t as f64,
                range: format!("[1, {}]", self.horizon),
            });
        }
        Ok(self
            .distances
            .iter()
            .zip(&self.values)
            .map(|(&x, row)| (x, row[t as usize - 1]))
            .collect())
    }

    /// Writes the `distance,t1,...,tT` matrix.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_matrix(
            writer,
            "distance",
            self.distances.iter().map(|x| x.to_string()),
            self.horizon,
            &self.values,
        )
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.is_empty() || &headers[0] != "distance" {
            return Err(Error::Parse {
                line: 1,
                message: "first column must be `distance`".into(),
            });
        }
        for (k, h) in headers.iter().enumerate().skip(1) {
            if h != format!("t{k}") {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("expected column `t{k}`, got `{h}`"),
                });
            }
        }
        let mut distances = Vec::new();
        let mut values = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |what: &str, s: &str| Error::Parse {
                line,
                message: format!("malformed {what} `{s}`"),
            };
            distances.push(rec[0].parse::<u32>().map_err(|_| bad("distance", &rec[0]))?);
            let row = rec
                .iter()
                .skip(1)
                .map(|s| s.parse::<f64>().map_err(|_| bad("density", s)))
                .collect::<Result<Vec<_>>>()?;
            values.push(row);
        }
        Self::new(distances, values)
    }
}

pub(crate) fn write_matrix<W: Write>(
    writer: W,
    first: &str,
    labels: impl Iterator<Item = String>,
    horizon: u32,
    rows: &[Vec<f64>],
) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![first.to_owned()];
    header.extend((1..=horizon).map(|t| format!("t{t}")));
    w.write_record(&header)?;
    for (label, row) in labels.zip(rows) {
        let mut rec = vec![label];
        rec.extend(row.iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Bookkeeping for voters that do not enter the surface.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DensityDiagnostics {
    /// Voters other than the initiator.
    pub voters: usize,
    pub classified: usize,
    /// Voters in no distance group (unreachable or without shared history).
    pub unclassified: usize,
    /// Classified voters whose vote falls after the horizon.
    pub after_horizon: usize,
    /// Distances dropped because `|U_x| = 0`.
    pub empty_groups: Vec<u32>,
}

/// Cumulative density of influenced users per distance group and hour.
///
/// A voter counts at hour `t` when their vote time is at most
/// `origin + t * 3600`. Distances with an empty group are omitted.
pub fn empirical_density(
    log: &VoteLog,
    partition: &DistancePartition,
    horizon_hours: u32,
) -> Result<(DensitySurface, DensityDiagnostics)> {
    if partition.source != log.initiator() {
        return Err(Error::SourceMismatch {
            partition: partition.source.clone(),
            initiator: log.initiator().to_owned(),
        });
    }
    if horizon_hours < 1 {
        return Err(Error::invalid("horizon must be at least one hour"));
    }
    let membership = partition.membership();
    let horizon = horizon_hours as usize;
    // new_votes[x][h-1]: voters at distance x first counted in hour h
    let mut new_votes: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    let mut diag = DensityDiagnostics::default();

    for v in &log.votes()[1..] {
        diag.voters += 1;
        let Some(&x) = membership.get(v.user.as_str()) else {
            diag.unclassified += 1;
            continue;
        };
        diag.classified += 1;
        let elapsed = v.timestamp - log.origin();
        let hour = ((elapsed + SECONDS_PER_HOUR - 1) / SECONDS_PER_HOUR).max(1) as usize;
        if hour > horizon {
            diag.after_horizon += 1;
            continue;
        }
        new_votes.entry(x).or_insert_with(|| vec![0; horizon])[hour - 1] += 1;
    }

    let mut distances = Vec::new();
    let mut rows = Vec::new();
    let mut sizes = Vec::new();
    for (&x, group) in &partition.groups {
        if group.is_empty() {
            diag.empty_groups.push(x);
            continue;
        }
        let n = group.len();
        let mut cum = 0usize;
        let row = match new_votes.get(&x) {
            Some(counts) => counts
                .iter()
                .map(|c| {
                    cum += c;
                    100.0 * cum as f64 / n as f64
                })
                .collect(),
            None => vec![0.0; horizon],
        };
        distances.push(x);
        rows.push(row);
        sizes.push(n);
    }
    let surface = DensitySurface::new(distances, rows)?.with_group_sizes(sizes);
    Ok((surface, diag))
}
