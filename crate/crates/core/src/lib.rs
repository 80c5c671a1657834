//! Simulation and scaling-law analysis of mobility in virtual worlds.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`]: location ids, grid geometry, trajectories, per-agent stats.
//! * [`sim`]: random, EPR and popularity-driven m-EPR agent simulations.
//! * [`net`]: mobility networks built from trajectories, graph distances and
//!   randomized null trajectories.
//! * [`analysis`]: power-law and log-log estimators plus every mobility metric.
//! * [`io`]: NDJSON/CSV readers and writers with byte-stable number formatting.
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is on (the default) and plain iterators otherwise.

pub mod analysis;
pub mod error;
pub mod io;
pub mod model;
pub mod net;
pub mod par;
pub mod sim;

pub use error::{Error, Result};
pub use model::{
    agent_stats, canonicalize_trajectories, manhattan_distance, AgentStats, Estimator, FitResult,
    GridPoint, GridSpec, LocationId, MovementEvent, Quantity, Trajectory, TrajectorySet,
};
pub use par::Exec;
