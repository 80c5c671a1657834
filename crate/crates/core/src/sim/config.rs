use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Uniform over all locations, history ignored.
    Random,
    /// Exploration with preferential return to the agent's own history.
    Epr,
    /// Exploration and return both biased by global popularity.
    Mepr,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(ModelKind::Random),
            "epr" => Ok(ModelKind::Epr),
            "mepr" | "m-epr" => Ok(ModelKind::Mepr),
            other => Err(Error::config("model", format!("unknown model `{other}`"))),
        }
    }
}

/// How often an agent takes part in a global step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Activation {
    /// Every agent moves every step.
    Always,
    /// Each agent draws a fixed activity probability from `U(lo, hi)` once.
    PerAgentUniform {
        #[serde(serialize_with = "crate::io::fmt::ser_real")]
        lo: f64,
        #[serde(serialize_with = "crate::io::fmt::ser_real")]
        hi: f64,
    },
    /// One activity probability per line, assigned to agents in order.
    File { path: PathBuf },
}

impl Default for Activation {
    fn default() -> Self {
        Activation::PerAgentUniform { lo: 0.05, hi: 1.0 }
    }
}

/// Model parameters for one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub model: ModelKind,
    pub agents: usize,
    /// Size of the location universe. Ignored when `grid` is set.
    pub locations: usize,
    pub steps: u64,
    pub moves_per_activation: u32,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub rho: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub gamma: f64,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub epsilon: f64,
    pub activation: Activation,
    pub grid: Option<GridSpec>,
    #[serde(serialize_with = "crate::io::fmt::ser_real")]
    pub jump_exponent: f64,
    pub seed: u64,
    pub rejection_cap: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            model: ModelKind::Mepr,
            agents: 5000,
            locations: 20_000,
            steps: 400,
            moves_per_activation: 4,
            rho: 0.6,
            gamma: 0.41,
            epsilon: 1.0,
            activation: Activation::default(),
            grid: None,
            jump_exponent: 1.55,
            seed: 0,
            rejection_cap: 32,
        }
    }
}

impl SimConfig {
    /// Number of locations in the world.
    pub fn world_size(&self) -> usize {
        match &self.grid {
            Some(g) => g.cells() as usize,
            None => self.locations,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.agents == 0 {
            return Err(Error::config("agents", "must be at least 1"));
        }
        if self.grid.is_none() && self.locations < 2 {
            return Err(Error::config("locations", "must be at least 2"));
        }
        if let Some(g) = &self.grid {
            GridSpec::new(g.x_min, g.x_max, g.y_min, g.y_max)?;
            if g.cells() < 2 {
                return Err(Error::config("grid", "needs at least 2 cells"));
            }
            if g.cells() > u32::MAX as u64 {
                return Err(Error::config("grid", "too many cells"));
            }
        }
        if self.locations > u32::MAX as usize {
            return Err(Error::config("locations", "too many locations"));
        }
        if self.moves_per_activation == 0 {
            return Err(Error::config("moves_per_activation", "must be at least 1"));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::config("rho", format!("{} not in (0, 1]", self.rho)));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return Err(Error::config("gamma", format!("{} must be >= 0", self.gamma)));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::config("epsilon", format!("{} must be >= 0", self.epsilon)));
        }
        if !(self.jump_exponent > 0.0 && self.jump_exponent.is_finite()) {
            return Err(Error::config("jump_exponent", "must be positive"));
        }
        if let Activation::PerAgentUniform { lo, hi } = self.activation {
            let ok = lo > 0.0 && lo <= hi && hi <= 1.0;
            if !ok {
                return Err(Error::config(
                    "activation",
                    format!("need 0 < lo <= hi <= 1, got lo={lo} hi={hi}"),
                ));
            }
        }
        Ok(())
    }

    /// Per-agent activity probabilities for `Activation::File`.
    pub(crate) fn load_activity_file(&self) -> Result<Option<Vec<f64>>> {
        let Activation::File { path } = &self.activation else {
            return Ok(None);
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config("activation", format!("cannot read {}: {e}", path.display()))
        })?;
        let mut probs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let p: f64 = line.parse().map_err(|_| {
                Error::config("activation", format!("line {}: `{line}` is not a number", i + 1))
            })?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::config(
                    "activation",
                    format!("line {}: probability {p} not in (0, 1]", i + 1),
                ));
            }
            probs.push(p);
        }
        if probs.len() < self.agents {
            return Err(Error::config(
                "activation",
                format!("file has {} probabilities, need {}", probs.len(), self.agents),
            ));
        }
        probs.truncate(self.agents);
        Ok(Some(probs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(cfg: SimConfig) -> &'static str {
        match cfg.validate() {
            Err(Error::Config { field, .. }) => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults_validate() {
        SimConfig::default().validate().unwrap();
    }

    #[test]
    fn errors_name_the_field() {
        let base = SimConfig::default();
        assert_eq!(field_of(SimConfig { agents: 0, ..base.clone() }), "agents");
        assert_eq!(field_of(SimConfig { locations: 1, ..base.clone() }), "locations");
        assert_eq!(field_of(SimConfig { rho: 1.5, ..base.clone() }), "rho");
        assert_eq!(field_of(SimConfig { gamma: -0.1, ..base.clone() }), "gamma");
        assert_eq!(
            field_of(SimConfig { moves_per_activation: 0, ..base.clone() }),
            "moves_per_activation"
        );
        assert_eq!(
            field_of(SimConfig {
                activation: Activation::PerAgentUniform { lo: 0.5, hi: 0.2 },
                ..base
            }),
            "activation"
        );
    }

    #[test]
    fn json_rejects_unknown_keys() {
        let err = serde_json::from_str::<SimConfig>(r#"{"agents": 3, "agnets": 4}"#).unwrap_err();
        assert!(err.to_string().contains("agnets"), "{err}");
        let cfg: SimConfig =
            serde_json::from_str(r#"{"model": "epr", "activation": {"kind": "always"}}"#).unwrap();
        assert_eq!(cfg.model, ModelKind::Epr);
        assert_eq!(cfg.activation, Activation::Always);
    }

    #[test]
    fn activity_file_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("act.txt");
        std::fs::write(&path, "0.5\n1.0\n\n0.25\n").unwrap();
        let cfg = SimConfig {
            agents: 3,
            activation: Activation::File { path: path.clone() },
            ..SimConfig::default()
        };
        assert_eq!(cfg.load_activity_file().unwrap().unwrap(), vec![0.5, 1.0, 0.25]);
        let too_many = SimConfig { agents: 4, ..cfg.clone() };
        assert!(too_many.load_activity_file().is_err());
        std::fs::write(&path, "0.5\n2.0\n0.1\n").unwrap();
        assert!(cfg.load_activity_file().is_err());
    }
}
