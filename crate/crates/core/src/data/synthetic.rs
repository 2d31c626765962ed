use rand_distr::{Distribution, Normal, StandardNormal};

use super::{Sample, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

/// Two Gaussian clouds in 512-d.
///
/// A seeded random unit direction `u` fixes the class means
/// `mu_0 = -(separation / 2) u` and `mu_1 = +(separation / 2) u`, so
/// `|mu_1 - mu_0| = separation`. Each coordinate gets independent
/// `N(0, noise_sigma)` noise. Samples are interleaved by label: 0, 1, 0, 1, ...
pub fn gen_synthetic(
    n_per_class: usize,
    separation: f64,
    noise_sigma: f64,
    seed: u64,
) -> Result<Vec<Sample>> {
    if n_per_class == 0 {
        return Err(Error::invalid("n_per_class must be at least 1"));
    }
    if !(separation.is_finite() && separation >= 0.0) {
        return Err(Error::invalid(format!(
            "separation {separation} must be >= 0"
        )));
    }
    if !(noise_sigma.is_finite() && noise_sigma >= 0.0) {
        return Err(Error::invalid(format!(
            "noise_sigma {noise_sigma} must be >= 0"
        )));
    }

    let mut rng = stream_rng(seed, Stream::SyntheticMeans);
    let mut dir: Vec<f64> = (0..FEATURE_DIM)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    dir.iter_mut().for_each(|v| *v /= norm);
    let half = separation / 2.0;
    let means = [
        dir.iter().map(|v| -half * v).collect::<Vec<_>>(),
        dir.iter().map(|v| half * v).collect::<Vec<_>>(),
    ];

    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::SyntheticNoise);
    let mut out = Vec::with_capacity(2 * n_per_class);
    for _ in 0..n_per_class {
        for (label, mean) in means.iter().enumerate() {
            let features = mean
                .iter()
                .map(|m| (m + noise.sample(&mut rng)) as f32)
                .collect();
            out.push(Sample::new(features, label as u8)?);
        }
    }
    Ok(out)
}
