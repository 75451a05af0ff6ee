//! Per-algorithm overrides read from a TOML document:
//!
//! ```toml
//! [pso]
//! swarm_size = 30
//! w = 0.6
//!
//! [abc]
//! limit = 50
//!
//! [bfo]
//! p_ed = 0.1
//! penalty = 1e4   # switch this algorithm to penalty constraint handling
//! ```

use std::path::Path;

use eld_core::{AbcConfig, BfoConfig, ConstraintHandling, PsoConfig};
use serde::Deserialize;

use crate::error::BenchError;

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PsoOverrides {
    pub swarm_size: Option<usize>,
    pub w: Option<f64>,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub v_max_fraction: Option<f64>,
    pub max_iterations: Option<usize>,
    pub stagnation_window: Option<usize>,
    pub seed: Option<u64>,
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AbcOverrides {
    pub colony_size: Option<usize>,
    pub limit: Option<usize>,
    pub max_iterations: Option<usize>,
    pub stagnation_window: Option<usize>,
    pub seed: Option<u64>,
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BfoOverrides {
    pub n_bacteria: Option<usize>,
    pub n_chemotactic: Option<usize>,
    pub n_swim: Option<usize>,
    pub n_reproduction: Option<usize>,
    pub n_elimination: Option<usize>,
    pub p_ed: Option<f64>,
    pub step_size: Option<f64>,
    pub seed: Option<u64>,
    pub penalty: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    #[serde(default)]
    pub pso: PsoOverrides,
    #[serde(default)]
    pub abc: AbcOverrides,
    #[serde(default)]
    pub bfo: BfoOverrides,
}

fn handling(penalty: Option<f64>) -> ConstraintHandling<f64> {
    penalty.map_or(ConstraintHandling::Repair, |coefficient| ConstraintHandling::Penalty {
        coefficient,
    })
}

impl BenchConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = std::fs::read_to_string(path).map_err(|e| BenchError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::from_toml_str(&text).map_err(|e| BenchError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }

    pub fn pso(&self) -> PsoConfig {
        let o = &self.pso;
        let mut c = PsoConfig::default();
        c.swarm_size = o.swarm_size.unwrap_or(c.swarm_size);
        c.w = o.w.unwrap_or(c.w);
        c.c1 = o.c1.unwrap_or(c.c1);
        c.c2 = o.c2.unwrap_or(c.c2);
        c.v_max_fraction = o.v_max_fraction.unwrap_or(c.v_max_fraction);
        c.stop.max_iterations = o.max_iterations.unwrap_or(c.stop.max_iterations);
        c.stop.stagnation_window = o.stagnation_window.unwrap_or(c.stop.stagnation_window);
        c.constraints = handling(o.penalty);
        c
    }

    pub fn abc(&self) -> AbcConfig {
        let o = &self.abc;
        let mut c = AbcConfig::default();
        c.colony_size = o.colony_size.unwrap_or(c.colony_size);
        c.limit = o.limit.or(c.limit);
        c.stop.max_iterations = o.max_iterations.unwrap_or(c.stop.max_iterations);
        c.stop.stagnation_window = o.stagnation_window.unwrap_or(c.stop.stagnation_window);
        c.constraints = handling(o.penalty);
        c
    }

    pub fn bfo(&self) -> BfoConfig {
        let o = &self.bfo;
        let mut c = BfoConfig::default();
        c.n_bacteria = o.n_bacteria.unwrap_or(c.n_bacteria);
        c.n_chemotactic = o.n_chemotactic.unwrap_or(c.n_chemotactic);
        c.n_swim = o.n_swim.unwrap_or(c.n_swim);
        c.n_reproduction = o.n_reproduction.unwrap_or(c.n_reproduction);
        c.n_elimination = o.n_elimination.unwrap_or(c.n_elimination);
        c.p_ed = o.p_ed.unwrap_or(c.p_ed);
        c.step_size = o.step_size.or(c.step_size);
        c.constraints = handling(o.penalty);
        c
    }
}
