//! File formats: NDJSON trajectories, network and curve CSV tables.
//!
//! Reals are always written with 17 significant digits so output bytes do
//! not depend on platform or locale.

pub mod fmt;
pub mod table;
pub mod traj;

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::sim::{SimConfig, SimOutput};

pub use table::{read_network, write_curve_csv, write_edges_csv, write_nodes_csv};
pub use traj::{read_events_path, read_events_str, write_ndjson, ColumnMap, Format, Ingested};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Header object of generated trajectory files.
#[derive(Debug, Serialize)]
pub struct SimMeta<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: &'a SimConfig,
    pub world_size: usize,
    /// Explore draws that found nothing left to discover and revisited.
    pub fall_through: u64,
}

impl<'a> SimMeta<'a> {
    pub fn of(out: &'a SimOutput) -> Self {
        SimMeta {
            tool: "metamob",
            version: VERSION,
            config: &out.cfg,
            world_size: out.cfg.world_size(),
            fall_through: out.fall_through,
        }
    }
}

/// Write a simulation as NDJSON in emission order (step, then agent).
pub fn write_simulation<W: Write>(writer: W, out: &SimOutput) -> Result<()> {
    let mut w = std::io::BufWriter::new(writer);
    #[derive(Serialize)]
    struct Header<'a> {
        meta: SimMeta<'a>,
    }
    serde_json::to_writer(&mut w, &Header { meta: SimMeta::of(out) })?;
    w.write_all(b"\n")?;
    for e in out.movement_events() {
        traj::write_event(&mut w, &e)?;
    }
    w.flush()?;
    Ok(())
}
