//! Synthetic trajectory generation under the random, EPR and m-EPR models.

mod config;
mod engine;
mod popularity;

pub use config::{Activation, ModelKind, SimConfig};
pub use engine::{
    p_new, run_simulation, step_epr, step_mepr, step_random, AgentState, SimEvent, SimOutput,
    Simulation, StepParams, World,
};
pub use popularity::{FenwickTree, PopularityTable};
