//! Agent state, the three mobility step rules, and the synchronous
//! step-by-step driver.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Activation, ModelKind, SimConfig};
use super::popularity::PopularityTable;
use crate::error::Result;
use crate::model::{canonicalize_trajectories, GridPoint, GridSpec, LocationId, MovementEvent, TrajectorySet};
use crate::par::{self, Exec};

/// Probability of exploring a new location after visiting `distinct` places.
pub fn p_new(distinct: usize, rho: f64, gamma: f64) -> f64 {
    let s = distinct.max(1) as f64;
    (rho * s.powf(-gamma)).min(1.0)
}

/// The location universe: either `L0..L{n-1}` or the cells of a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    size: usize,
    grid: Option<GridSpec>,
}

impl World {
    pub fn abstract_world(size: usize) -> Self {
        World { size, grid: None }
    }

    pub fn grid_world(grid: GridSpec) -> Self {
        World {
            size: grid.cells() as usize,
            grid: Some(grid),
        }
    }

    pub fn from_config(cfg: &SimConfig) -> Self {
        match cfg.grid {
            Some(g) => World::grid_world(g),
            None => World::abstract_world(cfg.locations),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn grid(&self) -> Option<&GridSpec> {
        self.grid.as_ref()
    }

    pub fn location_id(&self, index: u32) -> LocationId {
        match &self.grid {
            Some(g) => {
                let p = g.point_at(index as usize);
                LocationId::grid(p.x, p.y)
            }
            None => LocationId::new(format!("L{index}")),
        }
    }

    pub fn all_ids(&self) -> Vec<LocationId> {
        (0..self.size as u32).map(|i| self.location_id(i)).collect()
    }
}

/// One agent's personal history.
#[derive(Debug, Clone)]
pub struct AgentState {
    /// Locations in first-visit order.
    visited: Vec<u32>,
    /// Personal visit counts, parallel to `visited`.
    counts: Vec<u64>,
    slot: HashMap<u32, usize>,
    /// `visited`, kept sorted for the uniform-over-unvisited fallback.
    sorted: Vec<u32>,
    current: u32,
    activity: f64,
    fall_through: u64,
}

impl AgentState {
    /// A fresh agent placed at `start` (the placement counts as one visit).
    pub fn new(start: u32, activity: f64) -> Self {
        let mut a = AgentState {
            visited: Vec::new(),
            counts: Vec::new(),
            slot: HashMap::new(),
            sorted: Vec::new(),
            current: start,
            activity,
            fall_through: 0,
        };
        a.record(start);
        a
    }

    /// Build a state from explicit personal counts; `current` is the first entry.
    pub fn with_history(history: &[(u32, u64)], activity: f64) -> Self {
        let mut a = AgentState::new(history[0].0, activity);
        a.counts[0] = history[0].1;
        for &(loc, c) in &history[1..] {
            a.record(loc);
            let s = a.slot[&loc];
            a.counts[s] = c;
        }
        a.current = history[0].0;
        a
    }

    pub fn record(&mut self, loc: u32) {
        match self.slot.get(&loc) {
            Some(&s) => self.counts[s] += 1,
            None => {
                self.slot.insert(loc, self.visited.len());
                self.visited.push(loc);
                self.counts.push(1);
                let at = self.sorted.partition_point(|&x| x < loc);
                self.sorted.insert(at, loc);
            }
        }
        self.current = loc;
    }

    pub fn distinct(&self) -> usize {
        self.visited.len()
    }

    pub fn has_visited(&self, loc: u32) -> bool {
        self.slot.contains_key(&loc)
    }

    pub fn personal_count(&self, loc: u32) -> u64 {
        self.slot.get(&loc).map_or(0, |&s| self.counts[s])
    }

    pub fn total_visits(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn current(&self) -> u32 {
        self.current
    }

    pub fn activity(&self) -> f64 {
        self.activity
    }

    /// Explore draws that found every location already visited.
    pub fn fall_through(&self) -> u64 {
        self.fall_through
    }

    /// Uniform draw over locations this agent has not visited.
    fn uniform_unvisited<R: Rng + ?Sized>(&self, world_size: usize, rng: &mut R) -> Option<u32> {
        let free = world_size.checked_sub(self.sorted.len()).filter(|&f| f > 0)?;
        let mut idx = rng.random_range(0..free) as u32;
        for &v in &self.sorted {
            if v <= idx {
                idx += 1;
            } else {
                break;
            }
        }
        Some(idx)
    }

    /// Revisit proportional to `weight(loc)` over the visited set.
    fn revisit_by<R, W>(&self, rng: &mut R, weight: W) -> u32
    where
        R: Rng + ?Sized,
        W: Fn(usize) -> f64,
    {
        let total: f64 = (0..self.visited.len()).map(&weight).sum();
        let mut target = rng.random::<f64>() * total;
        for s in 0..self.visited.len() {
            let w = weight(s);
            if target < w {
                return self.visited[s];
            }
            target -= w;
        }
        // float residue: fall back to the last positive-weight slot
        (0..self.visited.len())
            .rev()
            .find(|&s| weight(s) > 0.0)
            .map_or(self.visited[0], |s| self.visited[s])
    }
}

/// Parameters the step rules read.
#[derive(Debug, Clone)]
pub struct StepParams {
    pub rho: f64,
    pub gamma: f64,
    pub rejection_cap: u32,
    pub world_size: usize,
    pub grid: Option<GridSpec>,
    jump_cdf: Vec<f64>,
}

impl StepParams {
    pub fn from_config(cfg: &SimConfig) -> Self {
        let grid = cfg.grid;
        let jump_cdf = grid
            .map(|g| jump_cdf(g, cfg.jump_exponent))
            .unwrap_or_default();
        StepParams {
            rho: cfg.rho,
            gamma: cfg.gamma,
            rejection_cap: cfg.rejection_cap,
            world_size: cfg.world_size(),
            grid,
            jump_cdf,
        }
    }

    /// Draw a displacement length in `1..=diameter`.
    fn jump_length<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u = rng.random::<f64>() * self.jump_cdf.last().copied().unwrap_or(1.0);
        self.jump_cdf.partition_point(|&c| c <= u).min(self.jump_cdf.len() - 1) as u64 + 1
    }
}

/// Cumulative weights of `d^-exponent` for `d = 1..=diameter`.
fn jump_cdf(grid: GridSpec, exponent: f64) -> Vec<f64> {
    let diameter = (grid.width() - 1 + grid.height() - 1).max(1);
    let mut acc = 0.0;
    (1..=diameter)
        .map(|d| {
            acc += (d as f64).powf(-exponent);
            acc
        })
        .collect()
}

/// Offset `k` (in `0..4d`) on the L1 sphere of radius `d`.
fn l1_offset(d: i64, k: i64) -> (i64, i64) {
    let (q, j) = (k / d, k % d);
    match q {
        0 => (d - j, j),
        1 => (-j, d - j),
        2 => (-(d - j), -j),
        _ => (j, -(d - j)),
    }
}

/// m-EPR move: explore or return, both weighted by global popularity.
///
/// Exploration rejects already-visited draws up to `rejection_cap` times and
/// then falls back to a uniform draw over unvisited locations. If the agent
/// has seen every location, the move becomes a return and the agent's
/// fall-through counter is bumped.
pub fn step_mepr<R: Rng + ?Sized>(
    agent: &mut AgentState,
    table: &PopularityTable,
    params: &StepParams,
    rng: &mut R,
) -> u32 {
    let explore = rng.random::<f64>() < p_new(agent.distinct(), params.rho, params.gamma);
    let loc = if explore && agent.distinct() < params.world_size {
        let mut pick = None;
        for _ in 0..params.rejection_cap {
            let i = table
                .sample(rng)
                .expect("popularity table has positive weight") as u32;
            if !agent.has_visited(i) {
                pick = Some(i);
                break;
            }
        }
        match pick {
            Some(i) => i,
            None => agent
                .uniform_unvisited(params.world_size, rng)
                .expect("unvisited location exists"),
        }
    } else {
        if explore {
            agent.fall_through += 1;
        }
        agent.revisit_by(rng, |s| table.weight(agent.visited[s] as usize))
    };
    agent.record(loc);
    loc
}

/// EPR move: explore by jump kernel (grid) or uniformly (abstract world);
/// return proportionally to personal visit counts.
pub fn step_epr<R: Rng + ?Sized>(agent: &mut AgentState, params: &StepParams, rng: &mut R) -> u32 {
    let explore = rng.random::<f64>() < p_new(agent.distinct(), params.rho, params.gamma);
    let loc = if explore && agent.distinct() < params.world_size {
        match &params.grid {
            Some(grid) => explore_grid(agent, grid, params, rng),
            None => agent
                .uniform_unvisited(params.world_size, rng)
                .expect("unvisited location exists"),
        }
    } else {
        if explore {
            agent.fall_through += 1;
        }
        agent.revisit_by(rng, |s| agent.counts[s] as f64)
    };
    agent.record(loc);
    loc
}

fn explore_grid<R: Rng + ?Sized>(
    agent: &AgentState,
    grid: &GridSpec,
    params: &StepParams,
    rng: &mut R,
) -> u32 {
    let here = grid.point_at(agent.current as usize);
    let mut last = here;
    for _ in 0..params.rejection_cap.max(1) {
        let d = params.jump_length(rng) as i64;
        let (dx, dy) = l1_offset(d, rng.random_range(0..4 * d));
        let cand = GridPoint {
            x: here.x + dx,
            y: here.y + dy,
        };
        last = cand;
        if grid.contains(cand) && !agent.has_visited(grid.index_of(cand) as u32) {
            return grid.index_of(cand) as u32;
        }
    }
    grid.index_of(grid.clamp(last)) as u32
}

/// Uniform over the whole world, history ignored.
pub fn step_random<R: Rng + ?Sized>(agent: &mut AgentState, params: &StepParams, rng: &mut R) -> u32 {
    let loc = rng.random_range(0..params.world_size) as u32;
    agent.record(loc);
    loc
}

/// One emitted move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SimEvent {
    pub agent: u32,
    pub t: u64,
    pub loc: u32,
}

struct Walker {
    state: AgentState,
    rng: ChaCha8Rng,
}

/// Stepwise simulation driver.
///
/// Every agent owns a ChaCha stream keyed by `(seed, agent index)`, and each
/// global step reads a popularity table frozen at the end of the previous
/// step. The emitted moves for a step therefore do not depend on the order
/// (or thread) in which agents are processed.
pub struct Simulation {
    cfg: SimConfig,
    params: StepParams,
    world: World,
    table: PopularityTable,
    walkers: Vec<Walker>,
    t: u64,
    exec: Exec,
}

impl Simulation {
    pub fn new(cfg: SimConfig) -> Result<Self> {
        cfg.validate()?;
        let activity_file = cfg.load_activity_file()?;
        let world = World::from_config(&cfg);
        let params = StepParams::from_config(&cfg);
        let mut table = PopularityTable::new(world.size(), cfg.epsilon);
        let walkers: Vec<Walker> = (0..cfg.agents)
            .map(|i| {
                let mut rng = agent_rng(cfg.seed, i as u64);
                let start = rng.random_range(0..world.size()) as u32;
                let activity = match (&cfg.activation, &activity_file) {
                    (Activation::Always, _) => 1.0,
                    (Activation::PerAgentUniform { lo, hi }, _) => {
                        lo + (hi - lo) * rng.random::<f64>()
                    }
                    (Activation::File { .. }, Some(probs)) => probs[i],
                    (Activation::File { .. }, None) => unreachable!("activity file loaded"),
                };
                Walker {
                    state: AgentState::new(start, activity),
                    rng,
                }
            })
            .collect();
        for w in &walkers {
            table.increment(w.state.current as usize, 1);
        }
        Ok(Simulation {
            cfg,
            params,
            world,
            table,
            walkers,
            t: 0,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.cfg
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn table(&self) -> &PopularityTable {
        &self.table
    }

    pub fn agent(&self, index: usize) -> &AgentState {
        &self.walkers[index].state
    }

    pub fn time(&self) -> u64 {
        self.t
    }

    pub fn fall_through(&self) -> u64 {
        self.walkers.iter().map(|w| w.state.fall_through).sum()
    }

    /// Advance one global step and return its moves in agent order.
    pub fn step(&mut self) -> Vec<SimEvent> {
        self.t += 1;
        let t = self.t;
        let moves = self.cfg.moves_per_activation;
        let model = self.cfg.model;
        let table = &self.table;
        let params = &self.params;
        let per_agent: Vec<Vec<u32>> = par::map_slice_mut(self.exec, &mut self.walkers, |_, w| {
            if w.rng.random::<f64>() >= w.state.activity {
                return Vec::new();
            }
            (0..moves)
                .map(|_| match model {
                    ModelKind::Mepr => step_mepr(&mut w.state, table, params, &mut w.rng),
                    ModelKind::Epr => step_epr(&mut w.state, params, &mut w.rng),
                    ModelKind::Random => step_random(&mut w.state, params, &mut w.rng),
                })
                .collect()
        });
        let mut events = Vec::new();
        for (agent, locs) in per_agent.into_iter().enumerate() {
            for loc in locs {
                self.table.increment(loc as usize, 1);
                events.push(SimEvent {
                    agent: agent as u32,
                    t,
                    loc,
                });
            }
        }
        events
    }

    pub fn run(mut self) -> SimOutput {
        let mut events = Vec::new();
        for _ in 0..self.cfg.steps {
            events.extend(self.step());
        }
        SimOutput {
            fall_through: self.fall_through(),
            cfg: self.cfg,
            world: self.world,
            popularity: self.table.counts().to_vec(),
            events,
        }
    }
}

fn agent_rng(seed: u64, agent: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(agent);
    rng
}

/// A completed run.
#[derive(Debug, Clone)]
pub struct SimOutput {
    pub cfg: SimConfig,
    pub world: World,
    pub fall_through: u64,
    /// Final global visit counts, placements included.
    pub popularity: Vec<u64>,
    pub events: Vec<SimEvent>,
}

impl SimOutput {
    pub fn agent_id(index: u32) -> String {
        format!("a{index}")
    }

    pub fn movement_events(&self) -> impl Iterator<Item = MovementEvent> + '_ {
        self.events.iter().map(|e| MovementEvent {
            agent: Self::agent_id(e.agent),
            t: e.t,
            loc: self.world.location_id(e.loc),
        })
    }

    pub fn trajectories(&self) -> TrajectorySet {
        canonicalize_trajectories(self.movement_events())
    }
}

/// Validate `cfg` and run it to completion.
pub fn run_simulation(cfg: SimConfig) -> Result<SimOutput> {
    Ok(Simulation::new(cfg)?.run())
}
