//! Finite-difference checks of every analytic gradient in the model.
//!
//! The error of one component is `|analytic - numeric| / max(1, |analytic|, |numeric|)`,
//! i.e. absolute below magnitude 1 and relative above it.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::FEATURE_DIM;
use crate::error::Result;
use crate::model::{Classifier, HybridModel};
use crate::nn::{softmax_cross_entropy, LinearLayer};
use crate::rng::{stream_rng, Stream};
use crate::vqc::{vqc_forward, vqc_gradient, VariationalParams, NUM_QUBITS};

pub const FD_STEP: f64 = 1e-5;
pub const INSTANCES: usize = 10;

pub const CIRCUIT_TOL: f64 = 1e-5;
pub const DENSE_TOL: f64 = 1e-6;
pub const FULL_MODEL_TOL: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    Circuit,
    Dense,
    FullModel,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Circuit, Block::Dense, Block::FullModel];

    pub fn name(self) -> &'static str {
        match self {
            Block::Circuit => "circuit",
            Block::Dense => "dense",
            Block::FullModel => "full_model",
        }
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Block::Circuit => CIRCUIT_TOL,
            Block::Dense => DENSE_TOL,
            Block::FullModel => FULL_MODEL_TOL,
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub block: Block,
    pub max_error: f64,
    pub checked: usize,
}

impl BlockResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.block.tolerance()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub blocks: Vec<BlockResult>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.blocks.iter().all(BlockResult::passed)
    }
}

impl fmt::Display for GradCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.blocks {
            writeln!(
                f,
                "{:<10} max_rel_error={:.3e} tolerance={:.0e} checked={} {}",
                b.block.name(),
                b.max_error,
                b.block.tolerance(),
                b.checked,
                if b.passed() { "PASS" } else { "FAIL" }
            )?;
        }
        write!(
            f,
            "{}",
            if self.passed() {
                "gradcheck PASS"
            } else {
                "gradcheck FAIL"
            }
        )
    }
}

pub fn component_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / 1f64.max(analytic.abs()).max(numeric.abs())
}

fn central_difference(mut f: impl FnMut(&[f64]) -> f64, at: &[f64]) -> Vec<f64> {
    let mut x = at.to_vec();
    (0..at.len())
        .map(|i| {
            let v = x[i];
            x[i] = v + FD_STEP;
            let plus = f(&x);
            x[i] = v - FD_STEP;
            let minus = f(&x);
            x[i] = v;
            (plus - minus) / (2.0 * FD_STEP)
        })
        .collect()
}

fn max_error(analytic: &[f64], numeric: &[f64]) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| component_error(a, n))
        .fold(0.0, f64::max)
}

fn normal_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            scale * z
        })
        .collect()
}

fn corrupt(grad: &mut [f64], on: bool) {
    if on {
        grad[0] += 1e-2;
    }
}

fn check_circuit(rng: &mut ChaCha8Rng, corrupted: bool) -> Result<BlockResult> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..INSTANCES {
        let depth = rng.random_range(1..=4);
        let features: [f64; NUM_QUBITS] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        let upstream: [f64; NUM_QUBITS] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let weights: Vec<f64> = (0..depth * NUM_QUBITS)
            .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let rows = |w: &[f64]| {
            VariationalParams::new(
                w.chunks(NUM_QUBITS)
                    .map(|c| [c[0], c[1], c[2], c[3]])
                    .collect(),
            )
            .expect("finite weights")
        };
        let objective = |f: &[f64; NUM_QUBITS], w: &[f64]| {
            let out = vqc_forward(f, &rows(w)).expect("valid circuit input");
            out.iter().zip(&upstream).map(|(o, u)| o * u).sum::<f64>()
        };

        let g = vqc_gradient(&features, &rows(&weights), &upstream)?;
        let mut analytic: Vec<f64> = g.params.into_iter().flatten().collect();
        analytic.extend(g.features);
        corrupt(&mut analytic, corrupted);

        let mut numeric = central_difference(|w| objective(&features, w), &weights);
        numeric.extend(central_difference(
            |f| objective(&[f[0], f[1], f[2], f[3]], &weights),
            &features,
        ));
        worst = worst.max(max_error(&analytic, &numeric));
        checked += analytic.len();
    }
    Ok(BlockResult {
        block: Block::Circuit,
        max_error: worst,
        checked,
    })
}

fn check_dense(rng: &mut ChaCha8Rng, corrupted: bool) -> Result<BlockResult> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..INSTANCES {
        let (in_dim, out_dim) = (rng.random_range(1..=8), rng.random_range(1..=5));
        let layer = LinearLayer::new(
            in_dim,
            out_dim,
            normal_vec(rng, in_dim * out_dim, 1.0),
            normal_vec(rng, out_dim, 1.0),
        )?;
        let x = normal_vec(rng, in_dim, 1.0);
        let upstream = normal_vec(rng, out_dim, 1.0);
        let dot = |y: Vec<f64>| y.iter().zip(&upstream).map(|(a, b)| a * b).sum::<f64>();

        let g = layer.backward(&x, &upstream)?;
        let mut analytic = g.weights.clone();
        analytic.extend(&g.bias);
        analytic.extend(&g.input);
        corrupt(&mut analytic, corrupted);

        let mut params = layer.weights().to_vec();
        params.extend_from_slice(layer.bias());
        let mut numeric = central_difference(
            |p| {
                let l = LinearLayer::new(
                    in_dim,
                    out_dim,
                    p[..in_dim * out_dim].to_vec(),
                    p[in_dim * out_dim..].to_vec(),
                )
                .expect("finite params");
                dot(l.forward(&x).expect("shape"))
            },
            &params,
        );
        numeric.extend(central_difference(
            |xs| dot(layer.forward(xs).expect("shape")),
            &x,
        ));

        // softmax cross-entropy with respect to its logits
        let logits = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        let label = rng.random_range(0..=1u8);
        analytic.extend(softmax_cross_entropy(&logits, label)?.grad_logits);
        numeric.extend(central_difference(
            |l| {
                softmax_cross_entropy(&[l[0], l[1]], label)
                    .expect("finite")
                    .value
            },
            &logits,
        ));

        worst = worst.max(max_error(&analytic, &numeric));
        checked += analytic.len();
    }
    Ok(BlockResult {
        block: Block::Dense,
        max_error: worst,
        checked,
    })
}

fn check_full_model(rng: &mut ChaCha8Rng, corrupted: bool) -> Result<BlockResult> {
    let mut worst = 0.0f64;
    let mut checked = 0;
    for i in 0..INSTANCES {
        let depth = 1 + i % 3;
        let mut model = HybridModel::init(depth, rng.random());
        // small random weights everywhere, including the circuit
        let params: Vec<f64> = normal_vec(rng, model.num_params(), 0.1);
        model.set_flat_params(&params)?;
        let features = normal_vec(rng, FEATURE_DIM, 0.5);
        let label = rng.random_range(0..=1u8);

        let (_, mut analytic) = model.loss_and_grad(&features, label)?;
        corrupt(&mut analytic, corrupted);
        let mut probe = model.clone();
        let numeric = central_difference(
            |p| {
                probe.set_flat_params(p).expect("finite params");
                probe.loss(&features, label).expect("valid sample")
            },
            &params,
        );
        worst = worst.max(max_error(&analytic, &numeric));
        checked += analytic.len();
    }
    Ok(BlockResult {
        block: Block::FullModel,
        max_error: worst,
        checked,
    })
}

/// Runs all three blocks. `corrupt` perturbs the first analytic component of
/// the named block, which must then fail.
pub fn gradcheck(seed: u64, corrupt: Option<Block>) -> Result<GradCheckReport> {
    let mut rng = stream_rng(seed, Stream::GradCheck);
    let blocks = vec![
        check_circuit(&mut rng, corrupt == Some(Block::Circuit))?,
        check_dense(&mut rng, corrupt == Some(Block::Dense))?,
        check_full_model(&mut rng, corrupt == Some(Block::FullModel))?,
    ];
    Ok(GradCheckReport { blocks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_seed_passes() {
        let r = gradcheck(crate::rng::DEFAULT_SEED, None).unwrap();
        assert_eq!(r.blocks.len(), 3);
        assert!(r.passed(), "{r}");
        let text = r.to_string();
        for b in Block::ALL {
            assert!(text.contains(b.name()));
        }
    }

    #[test]
    fn corrupted_gradient_fails() {
        for b in Block::ALL {
            let r = gradcheck(1, Some(b)).unwrap();
            assert!(!r.passed());
            assert!(r
                .blocks
                .iter()
                .filter(|x| !x.passed())
                .all(|x| x.block == b));
        }
    }
}
