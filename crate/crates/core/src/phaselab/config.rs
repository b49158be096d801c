use serde::{Deserialize, Serialize};

use crate::bigraph::BipartiteGraph;
use crate::error::{Error, Result};
use crate::solver::{Pruning, SearchBudget};

use super::generate::{gen_powerlaw_log, gen_uniform_instance};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Generator {
    Uniform {
        u_n: usize,
        v_n: usize,
        edge_prob: f64,
    },
    #[serde(rename = "powerlaw")]
    PowerLaw {
        u_pool: usize,
        v_pool: usize,
        w_observations: usize,
        exponent: f64,
    },
}

fn default_bin_width() -> f64 {
    0.25
}

/// A seeded ensemble and what to run on it. Serialized as JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub generator: Generator,
    pub instance_count: usize,
    pub seed: u64,
    #[serde(default)]
    pub z_values: Vec<usize>,
    #[serde(default)]
    pub budget: SearchBudget,
    /// Width of π̂ bins in sweeps.
    #[serde(default = "default_bin_width")]
    pub bin_width: f64,
    #[serde(default)]
    pub pruning: Pruning,
    /// Skip the search when `z > z_max` in `run_sweep`. The distance sweep
    /// always applies it.
    #[serde(default)]
    pub guarantee_check: bool,
}

/// One generated graph with its observation count.
#[derive(Clone, Debug)]
pub struct Instance {
    pub index: usize,
    pub graph: BipartiteGraph,
    pub w: usize,
    /// Raw observation log for power-law instances.
    pub log: Option<crate::bigraph::ObservationLog>,
}

impl EnsembleConfig {
    pub fn new(generator: Generator, instance_count: usize, seed: u64) -> Self {
        Self {
            generator,
            instance_count,
            seed,
            z_values: Vec::new(),
            budget: SearchBudget::unlimited(),
            bin_width: default_bin_width(),
            pruning: Pruning::Subset,
            guarantee_check: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.instance_count == 0 {
            return bad("instance_count must be at least 1".into());
        }
        if !(self.bin_width > 0.0 && self.bin_width.is_finite()) {
            return bad(format!(
                "bin_width must be positive, got {}",
                self.bin_width
            ));
        }
        if let Some(z) = self.z_values.iter().find(|&&z| z < 2) {
            return bad(format!("z values must be at least 2, got {z}"));
        }
        if self.budget.max_combinations == Some(0) {
            return bad("budget must be positive".into());
        }
        match self.generator {
            Generator::Uniform {
                u_n,
                v_n,
                edge_prob,
            } => {
                if u_n == 0 || v_n == 0 {
                    return bad("u_n and v_n must be positive".into());
                }
                if !(edge_prob > 0.0 && edge_prob < 1.0) {
                    return bad(format!("edge_prob must lie in (0, 1), got {edge_prob}"));
                }
            }
            Generator::PowerLaw {
                u_pool,
                v_pool,
                w_observations,
                exponent,
            } => {
                if u_pool < 2 || v_pool < 2 || w_observations == 0 {
                    return bad("power-law pools need >= 2 vertices and w >= 1".into());
                }
                if !(exponent > 1.0 && exponent.is_finite()) {
                    return bad(format!("exponent must exceed 1, got {exponent}"));
                }
            }
        }
        Ok(())
    }

    pub fn instance(&self, index: usize) -> Result<Instance> {
        match self.generator {
            Generator::Uniform {
                u_n,
                v_n,
                edge_prob,
            } => {
                let graph = gen_uniform_instance(u_n, v_n, edge_prob, self.seed, index as u64)?;
                let w = graph.edge_count();
                Ok(Instance {
                    index,
                    graph,
                    w,
                    log: None,
                })
            }
            Generator::PowerLaw {
                u_pool,
                v_pool,
                w_observations,
                exponent,
            } => {
                let log = gen_powerlaw_log(
                    u_pool,
                    v_pool,
                    w_observations,
                    exponent,
                    self.seed,
                    index as u64,
                )?;
                Ok(Instance {
                    index,
                    graph: log.to_graph()?,
                    w: log.w(),
                    log: Some(log),
                })
            }
        }
    }
}
