//! Pieces shared by several subcommands: objective construction and the
//! serializable view of a resolved run configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;

use origami::ccp::CcpConfig;
use origami::{Objective, SetExtension, SurrogateModel};

use crate::{CliError, CliResult};

/// Objective name plus its parameters, resolved from flags and config.
#[derive(Debug, Clone, Serialize)]
pub struct ObjectiveSpec {
    pub kind: String,
    pub mc_samples: usize,
    pub ccp_restarts: usize,
    pub ccp_tolerance: f64,
    pub surrogate_model: Option<PathBuf>,
}

impl ObjectiveSpec {
    pub fn build(&self) -> CliResult<Objective> {
        match self.kind.as_str() {
            "vertex" => Ok(Objective::Vertex),
            "integral" => Ok(Objective::Integral {
                samples: self.mc_samples,
            }),
            "max-increase" => Ok(Objective::MaxIncrease(CcpConfig {
                restarts: self.ccp_restarts,
                tolerance: self.ccp_tolerance,
                ..CcpConfig::default()
            })),
            "surrogate" => {
                let path = self.surrogate_model.as_ref().ok_or_else(|| {
                    CliError::Config(
                        "--objective surrogate needs --surrogate-model PATH".into(),
                    )
                })?;
                Ok(Objective::Surrogate(Arc::new(SurrogateModel::load(path)?)))
            }
            other => Err(CliError::Config(format!(
                "unknown objective {other:?} (expected vertex | integral | max-increase | surrogate)"
            ))),
        }
    }
}

pub fn parse_extension(name: &str) -> CliResult<SetExtension> {
    match name {
        "worst-case" => Ok(SetExtension::WorstCase),
        "weighted-sum" => Ok(SetExtension::WeightedSum),
        "sum" => Ok(SetExtension::Sum),
        other => Err(CliError::Config(format!(
            "unknown extension {other:?} (expected worst-case | weighted-sum | sum)"
        ))),
    }
}

pub fn load_probe(
    probe_file: Option<&Path>,
    probe_samples: usize,
    dim: usize,
    seed: u64,
) -> CliResult<Vec<origami::ProbVector>> {
    match probe_file {
        Some(path) => {
            let file = std::fs::File::open(path)?;
            Ok(origami::io::read_prob_vectors_csv(file)?)
        }
        None => Ok(origami::sample_simplex(probe_samples, dim, seed)?),
    }
}
