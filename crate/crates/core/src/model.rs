//! Shared domain types: location ids, grid geometry, trajectories and
//! per-agent visitation statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque location identifier. Grid cells use the form `"x,y"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(String);

impl LocationId {
    /// Build an id, trimming surrounding whitespace.
    pub fn new(id: impl AsRef<str>) -> Self {
        LocationId(id.as_ref().trim().to_owned())
    }

    pub fn grid(x: i64, y: i64) -> Self {
        LocationId(format!("{x},{y}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Parse a grid-form id into integer coordinates.
    pub fn parse_grid(&self) -> Result<GridPoint> {
        let (xs, ys) = self
            .0
            .split_once(',')
            .ok_or_else(|| Error::NotGridId(self.0.clone()))?;
        let x = xs.trim().parse::<i64>();
        let y = ys.trim().parse::<i64>();
        match (x, y) {
            (Ok(x), Ok(y)) => Ok(GridPoint { x, y }),
            _ => Err(Error::NotGridId(self.0.clone())),
        }
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for LocationId {
    fn from(s: &str) -> Self {
        LocationId::new(s)
    }
}

impl From<String> for LocationId {
    fn from(s: String) -> Self {
        LocationId::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridPoint {
    pub x: i64,
    pub y: i64,
}

impl GridPoint {
    pub fn manhattan(self, other: GridPoint) -> u64 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }
}

/// Rectangular lattice of land parcels, bounds inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: i64,
    pub x_max: i64,
    pub y_min: i64,
    pub y_max: i64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            x_min: -150,
            x_max: 150,
            y_min: -150,
            y_max: 150,
        }
    }
}

impl GridSpec {
    pub fn new(x_min: i64, x_max: i64, y_min: i64, y_max: i64) -> Result<Self> {
        if x_min > x_max {
            return Err(Error::config("grid", format!("x_min {x_min} > x_max {x_max}")));
        }
        if y_min > y_max {
            return Err(Error::config("grid", format!("y_min {y_min} > y_max {y_max}")));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            y_min,
            y_max,
        })
    }

    /// Parse `"xmin:xmax,ymin:ymax"`, e.g. `-150:150,-150:150`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::config("grid", format!("expected xmin:xmax,ymin:ymax, got `{s}`"));
        let (xs, ys) = s.split_once(',').ok_or_else(bad)?;
        let range = |r: &str| -> Result<(i64, i64)> {
            // the minimum may itself be negative, so split on the last ':'
            let (lo, hi) = r.trim().rsplit_once(':').ok_or_else(bad)?;
            Ok((
                lo.trim().parse().map_err(|_| bad())?,
                hi.trim().parse().map_err(|_| bad())?,
            ))
        };
        let (x_min, x_max) = range(xs)?;
        let (y_min, y_max) = range(ys)?;
        GridSpec::new(x_min, x_max, y_min, y_max)
    }

    pub fn width(&self) -> u64 {
        (self.x_max - self.x_min + 1) as u64
    }

    pub fn height(&self) -> u64 {
        (self.y_max - self.y_min + 1) as u64
    }

    pub fn cells(&self) -> u64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        (self.x_min..=self.x_max).contains(&p.x) && (self.y_min..=self.y_max).contains(&p.y)
    }

    pub fn clamp(&self, p: GridPoint) -> GridPoint {
        GridPoint {
            x: p.x.clamp(self.x_min, self.x_max),
            y: p.y.clamp(self.y_min, self.y_max),
        }
    }

    /// Row-major cell index.
    pub fn index_of(&self, p: GridPoint) -> usize {
        debug_assert!(self.contains(p));
        ((p.y - self.y_min) as u64 * self.width() + (p.x - self.x_min) as u64) as usize
    }

    pub fn point_at(&self, index: usize) -> GridPoint {
        let w = self.width() as usize;
        GridPoint {
            x: self.x_min + (index % w) as i64,
            y: self.y_min + (index / w) as i64,
        }
    }

    /// Parse `id` and check it against the bounds.
    pub fn locate(&self, id: &LocationId) -> Result<GridPoint> {
        let p = id.parse_grid()?;
        if !self.contains(p) {
            return Err(Error::OutsideGrid {
                id: id.to_string(),
                grid: self.to_string(),
            });
        }
        Ok(p)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{},{}:{}",
            self.x_min, self.x_max, self.y_min, self.y_max
        )
    }
}

/// L1 distance between two grid-form ids.
pub fn manhattan_distance(a: &LocationId, b: &LocationId) -> Result<u64> {
    Ok(a.parse_grid()?.manhattan(b.parse_grid()?))
}

/// One observed (or simulated) presence of an agent at a location.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MovementEvent {
    pub agent: String,
    pub t: u64,
    pub loc: LocationId,
}

impl MovementEvent {
    pub fn new(agent: impl Into<String>, t: u64, loc: impl Into<LocationId>) -> Self {
        MovementEvent {
            agent: agent.into(),
            t,
            loc: loc.into(),
        }
    }
}

/// Interned location universe of a trajectory set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocationTable {
    ids: Vec<LocationId>,
    index: HashMap<LocationId, u32>,
}

impl LocationTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, id: &LocationId) -> u32 {
        if let Some(&i) = self.index.get(id) {
            return i;
        }
        let i = self.ids.len() as u32;
        self.ids.push(id.clone());
        self.index.insert(id.clone(), i);
        i
    }

    pub fn get(&self, id: &LocationId) -> Option<u32> {
        self.index.get(id).copied()
    }

    pub fn id(&self, index: u32) -> &LocationId {
        &self.ids[index as usize]
    }

    pub fn ids(&self) -> &[LocationId] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// A single event inside a [`Trajectory`]; `loc` indexes the owning
/// [`TrajectorySet`]'s location table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Visit {
    pub t: u64,
    pub loc: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trajectory {
    pub agent: String,
    pub visits: Vec<Visit>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.visits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visits.is_empty()
    }

    pub fn locs(&self) -> impl Iterator<Item = u32> + '_ {
        self.visits.iter().map(|v| v.loc)
    }

    /// Number of distinct locations.
    pub fn distinct(&self) -> usize {
        let mut seen: Vec<u32> = self.locs().collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }
}

/// Canonical per-agent trajectories, agents in lexicographic order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrajectorySet {
    pub locations: LocationTable,
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trajectory> {
        self.trajectories.iter()
    }

    pub fn get(&self, agent: &str) -> Option<&Trajectory> {
        self.trajectories
            .binary_search_by(|t| t.agent.as_str().cmp(agent))
            .ok()
            .map(|i| &self.trajectories[i])
    }

    pub fn event_count(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }

    pub fn loc_id(&self, index: u32) -> &LocationId {
        self.locations.id(index)
    }

    /// Flatten back into events, agent by agent.
    pub fn to_events(&self) -> Vec<MovementEvent> {
        self.trajectories
            .iter()
            .flat_map(|tr| {
                tr.visits.iter().map(move |v| MovementEvent {
                    agent: tr.agent.clone(),
                    t: v.t,
                    loc: self.locations.id(v.loc).clone(),
                })
            })
            .collect()
    }

    /// Grid coordinates for every interned location.
    pub fn grid_points(&self, grid: &GridSpec) -> Result<Vec<GridPoint>> {
        self.locations.ids().iter().map(|id| grid.locate(id)).collect()
    }
}

/// Group events by agent and sort each agent's events by time, keeping
/// input order among equal times.
pub fn canonicalize_trajectories<I>(events: I) -> TrajectorySet
where
    I: IntoIterator<Item = MovementEvent>,
{
    let mut by_agent: BTreeMap<String, Vec<(u64, LocationId)>> = BTreeMap::new();
    for ev in events {
        by_agent.entry(ev.agent).or_default().push((ev.t, ev.loc));
    }
    let mut locations = LocationTable::new();
    let mut trajectories = Vec::with_capacity(by_agent.len());
    for (agent, mut evs) in by_agent {
        // stable: ties keep input order
        evs.sort_by_key(|(t, _)| *t);
        let visits = evs
            .iter()
            .map(|(t, loc)| Visit {
                t: *t,
                loc: locations.intern(loc),
            })
            .collect();
        trajectories.push(Trajectory { agent, visits });
    }
    TrajectorySet {
        locations,
        trajectories,
    }
}

/// Per-agent visitation summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentStats {
    pub agent: String,
    pub n: u64,
    #[serde(rename = "S")]
    pub distinct: u64,
    pub f_mean: f64,
    pub sigma_f: f64,
    pub visit_counts: BTreeMap<LocationId, u64>,
}

pub fn agent_stats(set: &TrajectorySet, traj: &Trajectory) -> AgentStats {
    let mut visit_counts: BTreeMap<LocationId, u64> = BTreeMap::new();
    for loc in traj.locs() {
        *visit_counts.entry(set.loc_id(loc).clone()).or_default() += 1;
    }
    let n = traj.len() as u64;
    let distinct = visit_counts.len() as u64;
    let counts: Vec<u64> = visit_counts.values().copied().collect();
    let (f_mean, sigma_f) = mean_and_population_std(&counts);
    AgentStats {
        agent: traj.agent.clone(),
        n,
        distinct,
        f_mean,
        sigma_f,
        visit_counts,
    }
}

pub(crate) fn mean_and_population_std(counts: &[u64]) -> (f64, f64) {
    if counts.is_empty() {
        return (0.0, 0.0);
    }
    let k = counts.len() as f64;
    let total: u64 = counts.iter().sum();
    let mean = total as f64 / k;
    // exact zero when all counts agree
    if counts.iter().all(|&c| c == counts[0]) {
        return (mean, 0.0);
    }
    let var = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / k;
    (mean, var.sqrt())
}

/// What a fitted exponent describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    VisitorCount,
    ExplorationCurve,
    RankFrequency,
    FluctuationScaling,
    ExplorationDecay,
    PreferentialMovement,
    Degree,
    LinkWeight,
    VisitorsVsDegree,
    NeighborhoodVisitors,
    RankedDistance,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mle,
    Ols,
}

/// An estimated scaling exponent.
///
/// For distribution fits `exponent` is the positive tail exponent of
/// `P(x) ~ x^-exponent`; for regressions it is the signed log-log slope
/// unless the quantity is defined as a decay (rank-frequency, exploration
/// decay), in which case the sign is flipped so the reported value is the
/// conventional positive exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub quantity: Quantity,
    pub estimator: Estimator,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub exponent: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub stderr: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub xmin: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_opt_real")]
    pub ks_stat: Option<f64>,
    #[serde(serialize_with = "crate::io::fmt::ser_opt_real")]
    pub r_squared: Option<f64>,
    pub n_samples: usize,
}

impl FitResult {
    pub fn with_quantity(mut self, quantity: Quantity) -> Self {
        self.quantity = quantity;
        self
    }

    /// Flip the sign of a slope-type exponent.
    pub(crate) fn negated(mut self) -> Self {
        self.exponent = -self.exponent;
        self
    }

    /// `exponent ± 2·stderr`.
    pub fn interval(&self) -> (f64, f64) {
        (
            self.exponent - 2.0 * self.stderr,
            self.exponent + 2.0 * self.stderr,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set_of(locs: &[&str]) -> TrajectorySet {
        canonicalize_trajectories(
            locs.iter()
                .enumerate()
                .map(|(t, l)| MovementEvent::new("a", t as u64, *l)),
        )
    }

    #[test]
    fn manhattan_examples() {
        let d = |a: &str, b: &str| manhattan_distance(&a.into(), &b.into()).unwrap();
        assert_eq!(d("118,-10", "120,-12"), 4);
        assert_eq!(d("0,0", "0,0"), 0);
        assert_eq!(d("-150,-150", "150,150"), 600);
    }

    #[test]
    fn manhattan_rejects_non_grid_id() {
        let err = manhattan_distance(&"L17".into(), &"0,0".into()).unwrap_err();
        assert!(err.to_string().contains("L17"), "{err}");
        assert!(manhattan_distance(&"1,x".into(), &"0,0".into()).is_err());
    }

    #[test]
    fn ids_are_trimmed_not_normalized() {
        assert_eq!(LocationId::new("  3,4 "), LocationId::new("3,4"));
        assert_ne!(LocationId::new("3, 4"), LocationId::new("3,4"));
        assert_eq!(LocationId::new("3, 4").parse_grid().unwrap(), GridPoint { x: 3, y: 4 });
    }

    #[test]
    fn grid_spec_defaults_and_parse() {
        let g = GridSpec::default();
        assert_eq!(g.cells(), 301 * 301);
        assert_eq!(GridSpec::parse("-150:150,-150:150").unwrap(), g);
        assert!(GridSpec::parse("5:1,0:0").is_err());
        assert!(GridSpec::parse("nonsense").is_err());
        for i in [0usize, 1, 300, 301, 90_600] {
            assert_eq!(g.index_of(g.point_at(i)), i);
        }
        assert!(g.locate(&"151,0".into()).is_err());
    }

    #[test]
    fn canonicalize_sorts_by_time() {
        let set = canonicalize_trajectories(vec![
            MovementEvent::new("a", 5, "C"),
            MovementEvent::new("a", 1, "A"),
            MovementEvent::new("a", 3, "B"),
        ]);
        let ts: Vec<u64> = set.trajectories[0].visits.iter().map(|v| v.t).collect();
        assert_eq!(ts, vec![1, 3, 5]);
    }

    #[test]
    fn canonicalize_splits_interleaved_agents() {
        let set = canonicalize_trajectories(vec![
            MovementEvent::new("b", 2, "X"),
            MovementEvent::new("a", 9, "Y"),
            MovementEvent::new("b", 1, "Y"),
            MovementEvent::new("a", 4, "X"),
        ]);
        assert_eq!(set.len(), 2);
        assert_eq!(set.trajectories[0].agent, "a");
        assert_eq!(set.trajectories[1].agent, "b");
        for tr in &set.trajectories {
            assert!(tr.visits.windows(2).all(|w| w[0].t <= w[1].t));
        }
    }

    #[test]
    fn canonicalize_keeps_file_order_on_ties_and_duplicates() {
        let set = canonicalize_trajectories(vec![
            MovementEvent::new("a", 1, "B"),
            MovementEvent::new("a", 1, "A"),
            MovementEvent::new("a", 1, "A"),
        ]);
        let locs: Vec<&str> = set.trajectories[0]
            .locs()
            .map(|l| set.loc_id(l).as_str())
            .collect();
        assert_eq!(locs, vec!["B", "A", "A"]);
    }

    #[test]
    fn canonicalize_empty() {
        assert!(canonicalize_trajectories(Vec::new()).is_empty());
    }

    #[test]
    fn stats_examples() {
        let s = set_of(&["A", "A", "A", "B"]);
        let st = agent_stats(&s, &s.trajectories[0]);
        assert_eq!((st.n, st.distinct), (4, 2));
        assert_eq!(st.f_mean, 2.0);
        // population std of {3, 1}
        assert_eq!(st.sigma_f, 1.0);

        let s = set_of(&["A", "B", "C", "D"]);
        let st = agent_stats(&s, &s.trajectories[0]);
        assert_eq!((st.f_mean, st.sigma_f), (1.0, 0.0));

        let s = set_of(&["A"]);
        let st = agent_stats(&s, &s.trajectories[0]);
        assert_eq!((st.n, st.distinct, st.f_mean, st.sigma_f), (1, 1, 1.0, 0.0));
        assert_eq!(st.visit_counts.values().sum::<u64>(), st.n);
    }
}
