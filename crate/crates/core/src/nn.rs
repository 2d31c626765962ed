//! Dense layers, ReLU, softmax cross-entropy and Adam.
//!
//! Backward passes are written by hand for the fixed architectures in
//! [`crate::model`]; there is no autodiff graph.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Affine map `y = W x + b` with `W` stored row-major (`out_dim x in_dim`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawLinear")]
pub struct LinearLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

#[derive(Deserialize)]
struct RawLinear {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
}

impl TryFrom<RawLinear> for LinearLayer {
    type Error = Error;

    fn try_from(r: RawLinear) -> Result<Self> {
        LinearLayer::new(r.in_dim, r.out_dim, r.weights, r.bias)
    }
}

/// Gradients of a scalar loss through one [`LinearLayer`].
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGrad {
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub input: Vec<f64>,
}

impl LinearLayer {
    pub fn new(in_dim: usize, out_dim: usize, weights: Vec<f64>, bias: Vec<f64>) -> Result<Self> {
        if in_dim == 0 || out_dim == 0 {
            return Err(Error::invalid("layer dimensions must be positive"));
        }
        if weights.len() != in_dim * out_dim || bias.len() != out_dim {
            return Err(Error::invalid(format!(
                "{out_dim}x{in_dim} layer needs {} weights and {out_dim} biases, got {} and {}",
                in_dim * out_dim,
                weights.len(),
                bias.len()
            )));
        }
        if weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::invalid("layer parameters must be finite"));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            bias,
        })
    }

    pub fn zeros(in_dim: usize, out_dim: usize) -> Result<Self> {
        Self::new(
            in_dim,
            out_dim,
            vec![0.0; in_dim * out_dim],
            vec![0.0; out_dim],
        )
    }

    /// Glorot-uniform weights in `±sqrt(6 / (in + out))`, zero bias.
    pub fn glorot<R: Rng + ?Sized>(in_dim: usize, out_dim: usize, rng: &mut R) -> Result<Self> {
        let limit = (6.0 / (in_dim + out_dim) as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.random_range(-limit..=limit))
            .collect();
        Self::new(in_dim, out_dim, weights, vec![0.0; out_dim])
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn bias_mut(&mut self) -> &mut [f64] {
        &mut self.bias
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }

    fn row(&self, o: usize) -> &[f64] {
        &self.weights[o * self.in_dim..(o + 1) * self.in_dim]
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.in_dim {
            return Err(Error::invalid(format!(
                "layer expects {} inputs, got {}",
                self.in_dim,
                x.len()
            )));
        }
        Ok((0..self.out_dim)
            .map(|o| self.row(o).iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + self.bias[o])
            .collect())
    }

    /// `grad_w = upstream ⊗ x`, `grad_b = upstream`, `grad_x = Wᵀ upstream`.
    pub fn backward(&self, x: &[f64], upstream: &[f64]) -> Result<LinearGrad> {
        if x.len() != self.in_dim || upstream.len() != self.out_dim {
            return Err(Error::invalid(format!(
                "backward through {}x{} layer got input {} and upstream {}",
                self.out_dim,
                self.in_dim,
                x.len(),
                upstream.len()
            )));
        }
        let mut weights = Vec::with_capacity(self.weights.len());
        for &u in upstream {
            weights.extend(x.iter().map(|v| u * v));
        }
        let mut input = vec![0.0; self.in_dim];
        for (o, &u) in upstream.iter().enumerate() {
            for (g, w) in input.iter_mut().zip(self.row(o)) {
                *g += w * u;
            }
        }
        Ok(LinearGrad {
            weights,
            bias: upstream.to_vec(),
            input,
        })
    }
}

pub fn relu(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| v.max(0.0)).collect()
}

/// Backward pass of [`relu`]; the subgradient at exactly zero is zero.
pub fn relu_backward(x: &[f64], upstream: &[f64]) -> Result<Vec<f64>> {
    if x.len() != upstream.len() {
        return Err(Error::invalid("relu backward length mismatch"));
    }
    Ok(x.iter()
        .zip(upstream)
        .map(|(&v, &u)| if v > 0.0 { u } else { 0.0 })
        .collect())
}

/// Numerically stable two-class softmax.
pub fn softmax2(logits: &[f64; 2]) -> [f64; 2] {
    let m = logits[0].max(logits[1]);
    let e = logits.map(|l| (l - m).exp());
    let z = e[0] + e[1];
    e.map(|v| v / z)
}

/// Cross-entropy of two logits against a 0/1 label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    pub value: f64,
    pub grad_logits: [f64; 2],
}

pub fn softmax_cross_entropy(logits: &[f64; 2], label: u8) -> Result<LossValue> {
    if logits.iter().any(|l| !l.is_finite()) {
        return Err(Error::invalid(format!("logits must be finite: {logits:?}")));
    }
    if label > 1 {
        return Err(Error::invalid(format!("label must be 0 or 1, got {label}")));
    }
    let y = label as usize;
    let m = logits[0].max(logits[1]);
    let log_z = m + logits.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
    let p = softmax2(logits);
    let mut grad_logits = p;
    grad_logits[y] -= 1.0;
    Ok(LossValue {
        value: (log_z - logits[y]).max(0.0),
        grad_logits,
    })
}

/// Adam moment estimates for a flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl AdamState {
    /// Fresh state with `beta1 = 0.9`, `beta2 = 0.999`, `epsilon = 1e-8`.
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }

    /// One bias-corrected Adam update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64], lr: f64) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::invalid(format!(
                "Adam state holds {} entries, got {} params and {} grads",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if !(lr >= 0.0 && lr.is_finite()) {
            return Err(Error::invalid(format!(
                "learning rate {lr} must be finite and >= 0"
            )));
        }
        self.t += 1;
        let t = self.t as i32;
        let c1 = 1.0 - self.beta1.powi(t);
        let c2 = 1.0 - self.beta2.powi(t);
        for i in 0..params.len() {
            let g = grads[i];
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * g;
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * g * g;
            let m_hat = self.m[i] / c1;
            let v_hat = self.v[i] / c2;
            params[i] -= lr * m_hat / (v_hat.sqrt() + self.epsilon);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn linear_forward_examples() {
        let id = LinearLayer::new(2, 2, vec![1.0, 0.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(id.forward(&[3.0, -2.0]).unwrap(), vec![3.0, -2.0]);
        let l = LinearLayer::new(2, 2, vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 1.0]).unwrap();
        assert_eq!(l.forward(&[1.0, 1.0]).unwrap(), vec![4.0, 8.0]);
        assert!(l.forward(&[1.0]).is_err());
    }

    #[test]
    fn linear_backward_examples() {
        let l = LinearLayer::new(1, 1, vec![2.0], vec![0.5]).unwrap();
        let g = l.backward(&[3.0], &[1.0]).unwrap();
        assert_eq!((g.weights[0], g.bias[0], g.input[0]), (3.0, 1.0, 2.0));

        let l = LinearLayer::new(3, 2, vec![1.0; 6], vec![0.0; 2]).unwrap();
        let g = l.backward(&[1.0, 2.0, 3.0], &[0.0, 0.0]).unwrap();
        assert!(g
            .weights
            .iter()
            .chain(&g.bias)
            .chain(&g.input)
            .all(|&v| v == 0.0));
        assert!(l.backward(&[1.0], &[0.0, 0.0]).is_err());
    }

    #[test]
    fn layer_shape_validation() {
        assert!(LinearLayer::new(2, 2, vec![0.0; 3], vec![0.0; 2]).is_err());
        assert!(LinearLayer::new(0, 2, vec![], vec![0.0; 2]).is_err());
        assert!(LinearLayer::new(1, 1, vec![f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn glorot_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = LinearLayer::glorot(512, 4, &mut rng).unwrap();
        let limit = (6.0f64 / 516.0).sqrt();
        assert!(l.weights().iter().all(|w| w.abs() <= limit));
        assert!(l.bias().iter().all(|&b| b == 0.0));
    }

    #[test]
    fn relu_examples() {
        assert_eq!(relu(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(relu(&[-3.0, -0.5]), vec![0.0, 0.0]);
        let x = [-1.5, 0.2, 7.0, 0.0];
        assert_eq!(relu(&relu(&x)), relu(&x));
        assert_eq!(
            relu_backward(&[0.0, 1.0, -1.0], &[5.0, 5.0, 5.0]).unwrap(),
            vec![0.0, 5.0, 0.0]
        );
    }

    #[test]
    fn cross_entropy_examples() {
        let l = softmax_cross_entropy(&[0.0, 0.0], 0).unwrap();
        assert!((l.value - std::f64::consts::LN_2).abs() < 1e-12);
        assert_eq!(l.grad_logits, [-0.5, 0.5]);

        let l = softmax_cross_entropy(&[100.0, -100.0], 0).unwrap();
        assert!(l.value.is_finite() && l.value < 1e-80);
        let l = softmax_cross_entropy(&[100.0, -100.0], 1).unwrap();
        assert!((l.value - 200.0).abs() < 1e-9);

        assert!(softmax_cross_entropy(&[f64::INFINITY, 0.0], 0).is_err());
        assert!(softmax_cross_entropy(&[0.0, 0.0], 2).is_err());
    }

    #[test]
    fn adam_first_step() {
        let mut p = [0.0];
        let mut s = AdamState::new(1);
        s.step(&mut p, &[1.0], 1e-4).unwrap();
        assert!((p[0] + 1e-4).abs() < 1e-12);
        assert_eq!(s.t, 1);

        let mut p = [0.7];
        let mut s = AdamState::new(1);
        s.step(&mut p, &[0.0], 1e-4).unwrap();
        assert_eq!(p[0], 0.7);
    }

    #[test]
    fn adam_constant_gradient_step_bound() {
        let lr = 1e-3;
        let mut p = [0.0];
        let mut s = AdamState::new(1);
        let mut prev = p[0];
        for _ in 0..2 {
            s.step(&mut p, &[1.0], lr).unwrap();
            assert!((p[0] - prev).abs() <= lr * (1.0 + 1e-6));
            prev = p[0];
        }
        assert!(s.step(&mut p, &[1.0, 2.0], lr).is_err());
    }
}
