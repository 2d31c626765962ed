use rand::seq::SliceRandom;

use super::Sample;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

pub const DEFAULT_TRAIN_FRAC: f64 = 0.7;
pub const DEFAULT_VAL_FRAC: f64 = 0.15;

/// Disjoint train/validation/test partition of a dataset.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DatasetSplit {
    pub train: Vec<Sample>,
    pub validation: Vec<Sample>,
    pub test: Vec<Sample>,
}

/// Stratified split. Within each label a seeded permutation assigns
/// `round(n * train_frac)` samples to train, `round(n * val_frac)` to
/// validation and the rest to test. Each part keeps the input order.
pub fn split(
    samples: &[Sample],
    train_frac: f64,
    val_frac: f64,
    seed: u64,
) -> Result<DatasetSplit> {
    let ok = |f: f64| f.is_finite() && f > 0.0 && f < 1.0;
    if !ok(train_frac) || !ok(val_frac) || train_frac + val_frac >= 1.0 {
        return Err(Error::invalid(format!(
            "split fractions train={train_frac} val={val_frac} must be positive and sum below 1"
        )));
    }
    // 0 = train, 1 = validation, 2 = test
    let mut part = vec![0u8; samples.len()];
    for label in 0..=1u8 {
        let mut idx: Vec<usize> = samples
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label() == label)
            .map(|(i, _)| i)
            .collect();
        idx.shuffle(&mut stream_rng(seed, Stream::Split { label }));
        let n = idx.len();
        let n_train = ((n as f64 * train_frac).round() as usize).min(n);
        let n_val = ((n as f64 * val_frac).round() as usize).min(n - n_train);
        for (rank, &i) in idx.iter().enumerate() {
            part[i] = if rank < n_train {
                0
            } else if rank < n_train + n_val {
                1
            } else {
                2
            };
        }
    }
    let mut out = DatasetSplit::default();
    for (s, p) in samples.iter().zip(part) {
        match p {
            0 => out.train.push(s.clone()),
            1 => out.validation.push(s.clone()),
            _ => out.test.push(s.clone()),
        }
    }
    Ok(out)
}
