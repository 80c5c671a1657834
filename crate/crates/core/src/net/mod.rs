//! Mobility networks induced by consecutive moves.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    canonicalize_trajectories, GridPoint, GridSpec, LocationId, LocationTable, MovementEvent,
    TrajectorySet,
};
use crate::par::{self, Exec};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NodeStats {
    /// Distinct agents seen at the node.
    pub visitors: u64,
    /// Visit events at the node.
    pub events: u64,
    /// Consecutive events that stayed on the node.
    pub self_transitions: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EdgeWeight {
    /// Movement events along the edge.
    pub events: u64,
    /// Distinct agents that used the edge.
    pub agents: u64,
}

/// Which edge weight a fit or export should use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Events,
    #[default]
    Agents,
}

impl std::str::FromStr for WeightKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "events" => Ok(WeightKind::Events),
            "agents" => Ok(WeightKind::Agents),
            other => Err(Error::config("weight", format!("expected events|agents, got `{other}`"))),
        }
    }
}

impl EdgeWeight {
    pub fn get(&self, kind: WeightKind) -> u64 {
        match kind {
            WeightKind::Events => self.events,
            WeightKind::Agents => self.agents,
        }
    }
}

/// Weighted location graph. Self-transitions are node attributes, never edges.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityNetwork {
    locations: LocationTable,
    nodes: Vec<NodeStats>,
    edges: HashMap<(u32, u32), EdgeWeight>,
    directed: bool,
}

impl MobilityNetwork {
    /// Assemble a network from parts, e.g. when reading tables back.
    pub fn from_parts(
        locations: LocationTable,
        nodes: Vec<NodeStats>,
        edges: HashMap<(u32, u32), EdgeWeight>,
        directed: bool,
    ) -> Self {
        MobilityNetwork {
            locations,
            nodes,
            edges,
            directed,
        }
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn locations(&self) -> &LocationTable {
        &self.locations
    }

    pub fn node_index(&self, id: &LocationId) -> Option<u32> {
        self.locations.get(id)
    }

    pub fn node(&self, index: u32) -> &NodeStats {
        &self.nodes[index as usize]
    }

    pub fn nodes(&self) -> &[NodeStats] {
        &self.nodes
    }

    pub fn node_by_id(&self, id: &LocationId) -> Option<&NodeStats> {
        self.node_index(id).map(|i| self.node(i))
    }

    fn key(&self, a: u32, b: u32) -> (u32, u32) {
        if self.directed {
            (a, b)
        } else {
            (a.min(b), a.max(b))
        }
    }

    pub fn edge(&self, src: &LocationId, dst: &LocationId) -> Option<&EdgeWeight> {
        let (a, b) = (self.node_index(src)?, self.node_index(dst)?);
        self.edges.get(&self.key(a, b))
    }

    /// Edges ordered by `(src, dst)` node index.
    pub fn sorted_edges(&self) -> Vec<((u32, u32), EdgeWeight)> {
        let mut v: Vec<_> = self.edges.iter().map(|(&k, &w)| (k, w)).collect();
        v.sort_unstable_by_key(|(k, _)| *k);
        v
    }

    pub fn total_transitions(&self) -> u64 {
        self.edges.values().map(|w| w.events).sum::<u64>()
            + self.nodes.iter().map(|n| n.self_transitions).sum::<u64>()
    }

    pub fn max_edge_events(&self) -> u64 {
        self.edges.values().map(|w| w.events).max().unwrap_or(0)
    }

    pub fn visitor_counts(&self) -> Vec<u64> {
        self.nodes.iter().map(|n| n.visitors).collect()
    }

    pub fn edge_weights(&self, kind: WeightKind) -> Vec<u64> {
        self.sorted_edges().iter().map(|(_, w)| w.get(kind)).collect()
    }

    /// Neighbour lists of the undirected projection.
    pub fn adjacency(&self) -> Adjacency {
        let n = self.nodes.len();
        let mut deg = vec![0usize; n];
        let mut pairs: Vec<(u32, u32)> = self
            .edges
            .keys()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        for &(a, b) in &pairs {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0u32; offsets[n]];
        for &(a, b) in &pairs {
            neighbors[fill[a as usize]] = b;
            fill[a as usize] += 1;
            neighbors[fill[b as usize]] = a;
            fill[b as usize] += 1;
        }
        for i in 0..n {
            neighbors[offsets[i]..offsets[i + 1]].sort_unstable();
        }
        Adjacency { offsets, neighbors }
    }

    /// Undirected-projection degree per node.
    pub fn degrees(&self) -> Vec<u64> {
        let adj = self.adjacency();
        (0..self.nodes.len() as u32).map(|i| adj.degree(i) as u64).collect()
    }
}

/// Compressed undirected adjacency.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl Adjacency {
    pub fn neighbors(&self, node: u32) -> &[u32] {
        &self.neighbors[self.offsets[node as usize]..self.offsets[node as usize + 1]]
    }

    pub fn degree(&self, node: u32) -> usize {
        self.neighbors(node).len()
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn are_adjacent(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Hop counts from `src`; `None` for unreachable nodes.
    pub fn bfs(&self, src: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.node_count()];
        dist[src as usize] = Some(0);
        let mut queue = VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].expect("queued nodes are reached");
            for &v in self.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn distance(&self, a: u32, b: u32) -> Distance {
        if a == b {
            return Distance::Hops(0);
        }
        if self.are_adjacent(a, b) {
            return Distance::Hops(1);
        }
        match self.bfs(a)[b as usize] {
            Some(d) => Distance::Hops(d),
            None => Distance::Unreachable,
        }
    }
}

/// Result of a shortest-path query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Distance {
    Hops(u32),
    Unreachable,
}

#[derive(Default)]
struct AgentPartial {
    locs: Vec<u32>,
    loc_events: Vec<(u32, u64)>,
    self_transitions: Vec<(u32, u64)>,
    edges: HashMap<(u32, u32), u64>,
}

/// Build the mobility network of `trajs`.
pub fn build_network(trajs: &TrajectorySet, directed: bool) -> MobilityNetwork {
    build_network_with(trajs, directed, Exec::default())
}

pub fn build_network_with(trajs: &TrajectorySet, directed: bool, exec: Exec) -> MobilityNetwork {
    let partials = par::map_slice(exec, &trajs.trajectories, |tr| {
        let mut p = AgentPartial::default();
        let mut events: HashMap<u32, u64> = HashMap::new();
        let mut selfs: HashMap<u32, u64> = HashMap::new();
        for loc in tr.locs() {
            *events.entry(loc).or_default() += 1;
        }
        for w in tr.visits.windows(2) {
            let (a, b) = (w[0].loc, w[1].loc);
            if a == b {
                *selfs.entry(a).or_default() += 1;
            } else {
                let key = if directed { (a, b) } else { (a.min(b), a.max(b)) };
                *p.edges.entry(key).or_default() += 1;
            }
        }
        p.locs = events.keys().copied().collect();
        p.loc_events = events.into_iter().collect();
        p.self_transitions = selfs.into_iter().collect();
        p
    });

    let mut nodes = vec![NodeStats::default(); trajs.locations.len()];
    let mut edges: HashMap<(u32, u32), EdgeWeight> = HashMap::new();
    for p in partials {
        for loc in p.locs {
            nodes[loc as usize].visitors += 1;
        }
        for (loc, c) in p.loc_events {
            nodes[loc as usize].events += c;
        }
        for (loc, c) in p.self_transitions {
            nodes[loc as usize].self_transitions += c;
        }
        for (key, c) in p.edges {
            let e = edges.entry(key).or_default();
            e.events += c;
            e.agents += 1;
        }
    }
    MobilityNetwork {
        locations: trajs.locations.clone(),
        nodes,
        edges,
        directed,
    }
}

/// Hop distance between two nodes on the undirected projection.
pub fn shortest_path_distance(
    net: &MobilityNetwork,
    a: &LocationId,
    b: &LocationId,
) -> Result<Distance> {
    let ia = net
        .node_index(a)
        .ok_or_else(|| Error::UnknownNode(a.to_string()))?;
    let ib = net
        .node_index(b)
        .ok_or_else(|| Error::UnknownNode(b.to_string()))?;
    Ok(net.adjacency().distance(ia, ib))
}

/// Histogram of consecutive-pair hop distances.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JumpHistogram {
    pub hops: BTreeMap<u32, u64>,
    pub unreachable: u64,
    /// Pairs whose endpoints are missing from the network.
    pub unknown: u64,
}

impl JumpHistogram {
    pub fn total(&self) -> u64 {
        self.hops.values().sum::<u64>() + self.unreachable
    }
}

/// Network distance between each pair of consecutive events.
pub fn contract_jump_distances(trajs: &TrajectorySet, net: &MobilityNetwork) -> JumpHistogram {
    let adj = net.adjacency();
    let to_node: Vec<Option<u32>> = trajs
        .locations
        .ids()
        .iter()
        .map(|id| net.node_index(id))
        .collect();
    let mut hist = JumpHistogram::default();
    let mut cache: HashMap<u32, Vec<Option<u32>>> = HashMap::new();
    for tr in trajs.iter() {
        for w in tr.visits.windows(2) {
            let (Some(a), Some(b)) = (to_node[w[0].loc as usize], to_node[w[1].loc as usize]) else {
                hist.unknown += 1;
                continue;
            };
            let d = if a == b {
                Distance::Hops(0)
            } else if adj.are_adjacent(a, b) {
                Distance::Hops(1)
            } else {
                let dist = cache.entry(a).or_insert_with(|| adj.bfs(a));
                dist[b as usize].map_or(Distance::Unreachable, Distance::Hops)
            };
            match d {
                Distance::Hops(h) => *hist.hops.entry(h).or_default() += 1,
                Distance::Unreachable => hist.unreachable += 1,
            }
        }
    }
    hist
}

/// Replace every event's location with an i.i.d. uniform draw from `world`,
/// keeping agents, event counts and timestamps.
pub fn randomize_trajectories(
    trajs: &TrajectorySet,
    world: &[LocationId],
    seed: u64,
) -> Result<TrajectorySet> {
    if world.is_empty() && trajs.event_count() > 0 {
        return Err(Error::InsufficientData("empty location universe".into()));
    }
    let per_agent: Vec<Vec<MovementEvent>> = par::map_range(Exec::default(), trajs.len(), |i| {
        let tr = &trajs.trajectories[i];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        tr.visits
            .iter()
            .map(|v| MovementEvent {
                agent: tr.agent.clone(),
                t: v.t,
                loc: world[rng.random_range(0..world.len())].clone(),
            })
            .collect()
    });
    Ok(canonicalize_trajectories(per_agent.into_iter().flatten()))
}

/// Neighbourhood shape for spatial visitor clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Neighborhood {
    /// 4 edge-sharing cells.
    VonNeumann,
    /// 8 surrounding cells.
    #[default]
    Moore,
}

impl Neighborhood {
    fn offsets(self) -> &'static [(i64, i64)] {
        const MOORE: [(i64, i64); 8] = [
            (-1, -1),
            (0, -1),
            (1, -1),
            (-1, 0),
            (1, 0),
            (-1, 1),
            (0, 1),
            (1, 1),
        ];
        const VON_NEUMANN: [(i64, i64); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
        match self {
            Neighborhood::Moore => &MOORE,
            Neighborhood::VonNeumann => &VON_NEUMANN,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborPair {
    pub land: LocationId,
    pub visitors: u64,
    pub neighbor_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NeighborhoodVisitors {
    pub pairs: Vec<NeighborPair>,
    /// Visited lands with no visited neighbour.
    pub omitted: usize,
}

/// Visitor count of each land against the mean over its visited neighbours.
pub fn neighborhood_visitor_average(
    trajs: &TrajectorySet,
    grid: &GridSpec,
    shape: Neighborhood,
) -> Result<NeighborhoodVisitors> {
    let points = trajs.grid_points(grid)?;
    let mut visitors: HashMap<GridPoint, u64> = HashMap::new();
    for tr in trajs.iter() {
        let seen: HashSet<u32> = tr.locs().collect();
        for loc in seen {
            *visitors.entry(points[loc as usize]).or_default() += 1;
        }
    }
    let mut out = NeighborhoodVisitors::default();
    for (i, id) in trajs.locations.ids().iter().enumerate() {
        let p = points[i];
        let Some(&n) = visitors.get(&p) else { continue };
        let around: Vec<u64> = shape
            .offsets()
            .iter()
            .filter_map(|&(dx, dy)| {
                visitors
                    .get(&GridPoint {
                        x: p.x + dx,
                        y: p.y + dy,
                    })
                    .copied()
            })
            .collect();
        if around.is_empty() {
            out.omitted += 1;
            continue;
        }
        out.pairs.push(NeighborPair {
            land: id.clone(),
            visitors: n,
            neighbor_mean: around.iter().sum::<u64>() as f64 / around.len() as f64,
        });
    }
    Ok(out)
}
