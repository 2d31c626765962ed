//! Samples, images and the dataset pipeline: image ingestion and resizing,
//! random-projection features, synthetic data, stratified splits and
//! feature-file I/O.

mod features;
mod image;
mod split;
mod synthetic;

pub use self::features::{read_features, write_features, FeatureFormat};
pub use self::image::{
    load_image_dir, load_labeled_root, project_features, resize_bilinear, ImageRecord,
    RandomProjection, DEMENTED_DIR, IMAGE_SIDE, NORMAL_DIR,
};
pub use self::split::{split, DatasetSplit, DEFAULT_TRAIN_FRAC, DEFAULT_VAL_FRAC};
pub use self::synthetic::gen_synthetic;

use crate::error::{Error, Result};

/// Width of every feature vector.
pub const FEATURE_DIM: usize = 512;

/// A 512-dimensional feature vector with a binary label
/// (0 = normal, 1 = demented, the positive class).
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    features: Vec<f32>,
    label: u8,
}

impl Sample {
    pub fn new(features: Vec<f32>, label: u8) -> Result<Self> {
        if features.len() != FEATURE_DIM {
            return Err(Error::invalid(format!(
                "sample has {} features, expected {FEATURE_DIM}",
                features.len()
            )));
        }
        if features.iter().any(|f| !f.is_finite()) {
            return Err(Error::invalid("sample features must be finite"));
        }
        if label > 1 {
            return Err(Error::invalid(format!("label must be 0 or 1, got {label}")));
        }
        Ok(Self { features, label })
    }

    pub fn features(&self) -> &[f32] {
        &self.features
    }

    pub fn features_f64(&self) -> Vec<f64> {
        self.features.iter().map(|&f| f as f64).collect()
    }

    pub fn label(&self) -> u8 {
        self.label
    }
}
