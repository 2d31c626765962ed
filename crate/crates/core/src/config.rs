//! Run configuration, read from JSON and overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::data::{
    gen_synthetic, load_labeled_root, read_features, resize_bilinear, split, RandomProjection,
    Sample, DEFAULT_TRAIN_FRAC, DEFAULT_VAL_FRAC, IMAGE_SIDE,
};
use crate::error::{Error, Result};
use crate::model::{ModelKind, TrainConfig};

/// Where samples come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DataSource {
    /// `<root>/normal` and `<root>/demented` image folders.
    Images { root: PathBuf },
    /// A binary or CSV feature file.
    Features { path: PathBuf },
    /// Generated Gaussian clouds; `seed` defaults to the run seed.
    Synthetic {
        n_per_class: usize,
        separation: f64,
        noise_sigma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractorMode {
    #[default]
    Precomputed,
    RandomProjection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    #[serde(flatten)]
    pub train: TrainConfig,
    pub data: Option<DataSource>,
    pub extractor: ExtractorMode,
    pub projection_seed: u64,
    pub out_dir: PathBuf,
    pub model: ModelKind,
    pub train_frac: f64,
    pub val_frac: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            data: None,
            extractor: ExtractorMode::Precomputed,
            projection_seed: crate::rng::DEFAULT_SEED,
            out_dir: PathBuf::from("out"),
            model: ModelKind::Hybrid,
            train_frac: DEFAULT_TRAIN_FRAC,
            val_frac: DEFAULT_VAL_FRAC,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Checks everything that does not need the filesystem.
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        if self.out_dir.as_os_str().is_empty() {
            return Err(Error::invalid("out_dir must not be empty"));
        }
        match &self.data {
            Some(DataSource::Images { root }) if root.as_os_str().is_empty() => {
                return Err(Error::invalid("image root must not be empty"))
            }
            Some(DataSource::Features { path }) if path.as_os_str().is_empty() => {
                return Err(Error::invalid("feature path must not be empty"))
            }
            Some(DataSource::Images { .. })
                if self.extractor != ExtractorMode::RandomProjection =>
            {
                return Err(Error::invalid(
                    "image data needs the random_projection extractor",
                ))
            }
            _ => {}
        }
        let ok = |f: f64| f.is_finite() && f > 0.0 && f < 1.0;
        if !ok(self.train_frac) || !ok(self.val_frac) || self.train_frac + self.val_frac >= 1.0 {
            return Err(Error::invalid(
                "train_frac and val_frac must be positive and sum below 1",
            ));
        }
        Ok(())
    }

    /// Loads every sample of the configured source.
    pub fn load_samples(&self) -> Result<Vec<Sample>> {
        match &self.data {
            None => Err(Error::invalid("no data source configured")),
            Some(DataSource::Features { path }) => read_features(path),
            Some(DataSource::Images { root }) => {
                let images = load_labeled_root(root)?
                    .iter()
                    .map(|img| resize_bilinear(img, IMAGE_SIDE, IMAGE_SIDE))
                    .collect::<Result<Vec<_>>>()?;
                RandomProjection::new(self.projection_seed).project(&images)
            }
            Some(DataSource::Synthetic {
                n_per_class,
                separation,
                noise_sigma,
                seed,
            }) => gen_synthetic(
                *n_per_class,
                *separation,
                *noise_sigma,
                seed.unwrap_or(self.train.seed),
            ),
        }
    }

    pub fn split(&self, samples: &[Sample]) -> Result<crate::data::DatasetSplit> {
        split(samples, self.train_frac, self.val_frac, self.train.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = RunConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.train.epochs, 20);
        assert_eq!(back.train.learning_rate, 1e-4);
        assert_eq!(back.train.batch_size, 32);
    }

    #[test]
    fn partial_json_fills_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"epochs": 5, "data": {"type": "synthetic", "n_per_class": 3, "separation": 2.0, "noise_sigma": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.train.epochs, 5);
        assert_eq!(cfg.train.batch_size, 32);
        assert_eq!(cfg.load_samples().unwrap().len(), 6);
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.data = Some(DataSource::Features {
            path: PathBuf::new(),
        });
        assert!(cfg.validate().is_err());
        cfg.data = Some(DataSource::Images { root: "x".into() });
        assert!(cfg.validate().is_err());
        cfg.extractor = ExtractorMode::RandomProjection;
        assert!(cfg.validate().is_ok());
        cfg.val_frac = 0.3;
        cfg.train_frac = 0.7;
        assert!(cfg.validate().is_err());
        assert!(RunConfig::default().load_samples().is_err());
    }
}
