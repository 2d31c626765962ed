//! JSON checkpoints.
//!
//! Floats are written in their shortest round-trip decimal form and parsed
//! back exactly, so a loaded model reproduces the saved one bit for bit.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::data::FEATURE_DIM;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::model::{Model, NUM_CLASSES};
use crate::vqc::NUM_QUBITS;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dimensions {
    pub input: usize,
    pub qubits: usize,
    pub classes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format_version: u32,
    pub dimensions: Dimensions,
    /// Circuit depth; 0 for the classical model.
    pub depth: usize,
    pub model: Model,
    pub config: RunConfig,
}

impl Checkpoint {
    pub fn new(model: Model, config: RunConfig) -> Self {
        let depth = match &model {
            Model::Hybrid(m) => m.depth(),
            Model::Classical(_) => 0,
        };
        Self {
            format_version: FORMAT_VERSION,
            dimensions: Dimensions {
                input: FEATURE_DIM,
                qubits: NUM_QUBITS,
                classes: NUM_CLASSES,
            },
            depth,
            model,
            config,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.format_version != FORMAT_VERSION {
            return Err(Error::invalid(format!(
                "unsupported checkpoint version {}",
                ck.format_version
            )));
        }
        let expected = Checkpoint::new(ck.model.clone(), ck.config.clone());
        if ck.dimensions != expected.dimensions || ck.depth != expected.depth {
            return Err(Error::invalid(format!(
                "checkpoint header {:?} depth {} does not match its parameters",
                ck.dimensions, ck.depth
            )));
        }
        Ok(ck)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
