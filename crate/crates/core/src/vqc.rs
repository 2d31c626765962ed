//! The 4-qubit variational circuit: tanh angle encoding, an H + RY embedding,
//! `depth` variational blocks (RY on every qubit, then a fixed CNOT entangler)
//! and a per-qubit Pauli-Z readout.
//!
//! Conventions:
//! - entangler `T` is applied in circuit order CNOT(1,2), CNOT(3,4), CNOT(2,3);
//! - inside a block the rotations come before the entangler;
//! - weight row 0 is the first block applied to the embedded state.
//!
//! Gradients use the parameter-shift rule on every RY angle. Embedding angle
//! gradients are chained through the tanh encoding to give feature gradients.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statevector::StateVector;

pub const NUM_QUBITS: usize = 4;

/// Entangler pairs `(control, target)` in application order.
pub const ENTANGLER: [(usize, usize); 3] = [(1, 2), (3, 4), (2, 3)];

/// Embedding angles, each strictly inside `(-pi/2, pi/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingAngles([f64; NUM_QUBITS]);

impl EmbeddingAngles {
    pub fn new(angles: [f64; NUM_QUBITS]) -> Result<Self> {
        if angles
            .iter()
            .any(|a| !a.is_finite() || a.abs() >= FRAC_PI_2)
        {
            return Err(Error::invalid(format!(
                "embedding angles must lie strictly inside (-pi/2, pi/2): {angles:?}"
            )));
        }
        Ok(Self(angles))
    }

    pub fn as_array(&self) -> &[f64; NUM_QUBITS] {
        &self.0
    }
}

/// `depth x 4` matrix of variational rotation angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; NUM_QUBITS]>", into = "Vec<[f64; NUM_QUBITS]>")]
pub struct VariationalParams {
    weights: Vec<[f64; NUM_QUBITS]>,
}

impl VariationalParams {
    pub fn new(weights: Vec<[f64; NUM_QUBITS]>) -> Result<Self> {
        if weights.iter().flatten().any(|w| !w.is_finite()) {
            return Err(Error::invalid("variational weights must be finite"));
        }
        Ok(Self { weights })
    }

    pub fn zeros(depth: usize) -> Self {
        Self {
            weights: vec![[0.0; NUM_QUBITS]; depth],
        }
    }

    pub fn depth(&self) -> usize {
        self.weights.len()
    }

    pub fn rows(&self) -> &[[f64; NUM_QUBITS]] {
        &self.weights
    }

    pub fn rows_mut(&mut self) -> &mut [[f64; NUM_QUBITS]] {
        &mut self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len() * NUM_QUBITS
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

impl TryFrom<Vec<[f64; NUM_QUBITS]>> for VariationalParams {
    type Error = Error;

    fn try_from(rows: Vec<[f64; NUM_QUBITS]>) -> Result<Self> {
        Self::new(rows)
    }
}

impl From<VariationalParams> for Vec<[f64; NUM_QUBITS]> {
    fn from(p: VariationalParams) -> Self {
        p.weights
    }
}

/// Per-qubit Z expectations, each in `[-1, 1]`.
pub type VqcOutput = [f64; NUM_QUBITS];

/// Gradients of `upstream . vqc_forward(..)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcGradient {
    pub params: Vec<[f64; NUM_QUBITS]>,
    pub features: [f64; NUM_QUBITS],
}

/// `angle_k = tanh(feature_k) * pi/2`.
pub fn encode_angles(features: &[f64; NUM_QUBITS]) -> Result<EmbeddingAngles> {
    if features.iter().any(|f| !f.is_finite()) {
        return Err(Error::invalid(format!(
            "features must be finite: {features:?}"
        )));
    }
    let mut angles = features.map(|f| f.tanh() * FRAC_PI_2);
    // tanh saturates to exactly 1.0 in f64 for |f| > ~19; keep the range open
    for a in &mut angles {
        if a.abs() >= FRAC_PI_2 {
            *a = f64::from_bits(FRAC_PI_2.to_bits() - 1).copysign(*a);
        }
    }
    EmbeddingAngles::new(angles)
}

fn embed_raw(angles: &[f64; NUM_QUBITS]) -> StateVector {
    let mut state = StateVector::new(NUM_QUBITS).expect("4 qubits is a valid register");
    for (k, &theta) in angles.iter().enumerate() {
        state.apply_hadamard(k + 1).expect("qubit in range");
        state
            .apply_ry(k + 1, theta)
            .expect("qubit in range, finite angle");
    }
    state
}

/// `RY(angle_k) H |0>` on every qubit.
pub fn embed(angles: &EmbeddingAngles) -> StateVector {
    embed_raw(angles.as_array())
}

fn check_register(state: &StateVector) -> Result<()> {
    if state.num_qubits() != NUM_QUBITS {
        return Err(Error::invalid(format!(
            "expected a {NUM_QUBITS}-qubit state, got {} qubits",
            state.num_qubits()
        )));
    }
    Ok(())
}

/// Fixed CNOT entangler.
pub fn entangle(state: &mut StateVector) -> Result<()> {
    check_register(state)?;
    for (control, target) in ENTANGLER {
        state.apply_cnot(control, target)?;
    }
    Ok(())
}

/// One variational block: `RY(w_k)` on qubit k, then the entangler.
pub fn variational_layer(state: &mut StateVector, weights: &[f64; NUM_QUBITS]) -> Result<()> {
    check_register(state)?;
    for (k, &w) in weights.iter().enumerate() {
        state.apply_ry(k + 1, w)?;
    }
    entangle(state)
}

fn readout(state: &StateVector) -> VqcOutput {
    std::array::from_fn(|k| state.expect_z(k + 1).expect("qubit in range"))
}

/// Circuit evaluated on raw embedding angles (no range check, so shifted
/// angles are allowed).
fn run_circuit(angles: &[f64; NUM_QUBITS], weights: &[[f64; NUM_QUBITS]]) -> VqcOutput {
    let mut state = embed_raw(angles);
    for row in weights {
        variational_layer(&mut state, row).expect("4-qubit register, finite weights");
    }
    readout(&state)
}

/// Full circuit forward pass on the four pre-layer features.
pub fn vqc_forward(features: &[f64; NUM_QUBITS], params: &VariationalParams) -> Result<VqcOutput> {
    let angles = encode_angles(features)?;
    Ok(run_circuit(angles.as_array(), params.rows()))
}

fn dot(a: &[f64; NUM_QUBITS], b: &[f64; NUM_QUBITS]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameter-shift gradient of `L = upstream . vqc_forward(features, params)`
/// with respect to the variational weights and the input features.
pub fn vqc_gradient(
    features: &[f64; NUM_QUBITS],
    params: &VariationalParams,
    upstream: &[f64; NUM_QUBITS],
) -> Result<VqcGradient> {
    if upstream.iter().any(|u| !u.is_finite()) {
        return Err(Error::invalid("upstream gradient must be finite"));
    }
    let angles = *encode_angles(features)?.as_array();
    let weights = params.rows();

    let shifted = |angles: &[f64; NUM_QUBITS], weights: &[[f64; NUM_QUBITS]]| {
        dot(upstream, &run_circuit(angles, weights))
    };

    let mut grad_features = [0.0; NUM_QUBITS];
    for k in 0..NUM_QUBITS {
        let mut plus = angles;
        let mut minus = angles;
        plus[k] += FRAC_PI_2;
        minus[k] -= FRAC_PI_2;
        let d_angle = (shifted(&plus, weights) - shifted(&minus, weights)) / 2.0;
        let t = features[k].tanh();
        grad_features[k] = d_angle * FRAC_PI_2 * (1.0 - t * t);
    }

    let mut grad_params = vec![[0.0; NUM_QUBITS]; weights.len()];
    let mut work = weights.to_vec();
    for layer in 0..weights.len() {
        for k in 0..NUM_QUBITS {
            let w = weights[layer][k];
            work[layer][k] = w + FRAC_PI_2;
            let f_plus = shifted(&angles, &work);
            work[layer][k] = w - FRAC_PI_2;
            let f_minus = shifted(&angles, &work);
            work[layer][k] = w;
            grad_params[layer][k] = (f_plus - f_minus) / 2.0;
        }
    }

    Ok(VqcGradient {
        params: grad_params,
        features: grad_features,
    })
}
