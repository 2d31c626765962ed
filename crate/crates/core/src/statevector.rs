//! Dense statevector simulation of an n-qubit register.
//!
//! # Bit ordering
//!
//! Qubits are addressed with 1-based indices. Qubit 1 is the **most
//! significant** bit of the amplitude index: the basis state `|b1 b2 ... bn>`
//! is stored at index `b1 * 2^(n-1) + ... + bn * 2^0`. Every gate kernel,
//! expectation value and test in this crate depends on that convention.
//!
//! Gates are applied in place with strided kernels over the amplitude array;
//! no `2^n x 2^n` matrix is ever built here.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;

/// A probability amplitude.
pub type Amplitude = Complex64;

/// Pure state of `num_qubits` qubits, stored as `2^num_qubits` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Amplitude>,
}

impl StateVector {
    /// The all-zero register `|0...0>`.
    pub fn new(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::invalid("a register needs at least one qubit"));
        }
        if num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        let mut amplitudes = vec![Amplitude::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Amplitude::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps explicit amplitudes. The length must be a power of two and the
    /// vector must be normalized to within `1e-10`.
    pub fn from_amplitudes(amplitudes: Vec<Amplitude>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!(
                "{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit"
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        let state = Self {
            num_qubits,
            amplitudes,
        };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "state is not normalized (norm^2 = {})",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amplitudes
    }

    /// Sum of squared amplitude magnitudes.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Bit mask of qubit `q` within an amplitude index.
    fn mask(&self, q: usize) -> Result<usize> {
        if q == 0 || q > self.num_qubits {
            return Err(Error::invalid(format!(
                "qubit {q} out of range 1..={}",
                self.num_qubits
            )));
        }
        Ok(1 << (self.num_qubits - q))
    }

    /// Applies a real 2x2 matrix `[[m00, m01], [m10, m11]]` to qubit `q`.
    fn apply_real_1q(&mut self, q: usize, m: [[f64; 2]; 2]) -> Result<()> {
        let stride = self.mask(q)?;
        let dim = self.amplitudes.len();
        let mut block = 0;
        while block < dim {
            for i0 in block..block + stride {
                let i1 = i0 + stride;
                let a0 = self.amplitudes[i0];
                let a1 = self.amplitudes[i1];
                self.amplitudes[i0] = a0 * m[0][0] + a1 * m[0][1];
                self.amplitudes[i1] = a0 * m[1][0] + a1 * m[1][1];
            }
            block += 2 * stride;
        }
        Ok(())
    }

    /// Hadamard on qubit `q`.
    pub fn apply_hadamard(&mut self, q: usize) -> Result<()> {
        let h = FRAC_1_SQRT_2;
        self.apply_real_1q(q, [[h, h], [h, -h]])
    }

    /// Rotation about the Y axis by `theta` radians on qubit `q`:
    /// `[[cos(t/2), -sin(t/2)], [sin(t/2), cos(t/2)]]`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) -> Result<()> {
        if !theta.is_finite() {
            return Err(Error::invalid(format!(
                "rotation angle {theta} is not finite"
            )));
        }
        let (s, c) = (theta / 2.0).sin_cos();
        self.apply_real_1q(q, [[c, -s], [s, c]])
    }

    /// Controlled-NOT: flips `target` on every basis state where `control` is 1.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        let cmask = self.mask(control)?;
        let tmask = self.mask(target)?;
        if control == target {
            return Err(Error::invalid(format!(
                "CNOT control and target are both qubit {control}"
            )));
        }
        for i in 0..self.amplitudes.len() {
            // visit each swapped pair once, from its target-bit-0 member
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// Probability of measuring qubit `q` as 1.
    pub fn prob_one(&self, q: usize) -> Result<f64> {
        let mask = self.mask(q)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Pauli-Z expectation of qubit `q`: `P(0) - P(1)`.
    pub fn expect_z(&self, q: usize) -> Result<f64> {
        let mask = self.mask(q)?;
        let (mut p0, mut p1) = (0.0, 0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            if i & mask == 0 {
                p0 += a.norm_sqr();
            } else {
                p1 += a.norm_sqr();
            }
        }
        Ok(p0 - p1)
    }
}
