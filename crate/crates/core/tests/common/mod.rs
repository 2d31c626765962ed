//! Dense-matrix reference simulator used as an oracle in the tests.
//!
//! Everything here is real-valued: the circuits only use H, RY and CNOT.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::FRAC_PI_2;

pub type Mat = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![0.0; n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0.0 {
                for j in 0..n {
                    out[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    out
}

pub fn apply(m: &Mat, v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn hadamard() -> Mat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![vec![s, s], vec![s, -s]]
}

pub fn ry(theta: f64) -> Mat {
    let (s, c) = (theta / 2.0).sin_cos();
    vec![vec![c, -s], vec![s, c]]
}

/// `gate` on 1-based qubit `q` of `n`; qubit 1 is the leftmost Kronecker factor.
pub fn single(n: usize, q: usize, gate: &Mat) -> Mat {
    let mut m = vec![vec![1.0]];
    for k in 1..=n {
        let factor = if k == q { gate.clone() } else { identity(2) };
        m = kron(&m, &factor);
    }
    m
}

/// CNOT as a permutation matrix over basis states.
pub fn cnot(n: usize, control: usize, target: usize) -> Mat {
    let dim = 1 << n;
    let bit = |q: usize| 1usize << (n - q);
    let mut m = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        let j = if i & bit(control) != 0 {
            i ^ bit(target)
        } else {
            i
        };
        m[j][i] = 1.0;
    }
    m
}

pub fn expect_z(n: usize, state: &[f64], q: usize) -> f64 {
    let bit = 1usize << (n - q);
    state
        .iter()
        .enumerate()
        .map(|(i, a)| if i & bit != 0 { -a * a } else { a * a })
        .sum()
}

/// Full circuit unitary: embedding, then each layer's RYs and the entangler.
pub fn circuit_matrix(features: &[f64; 4], weights: &[[f64; 4]]) -> Mat {
    let n = 4;
    let mut u = identity(16);
    let mut push = |g: Mat| u = matmul(&g, &u);
    for (q, f) in features.iter().enumerate() {
        push(single(n, q + 1, &hadamard()));
        push(single(n, q + 1, &ry(f.tanh() * FRAC_PI_2)));
    }
    for row in weights {
        for (q, w) in row.iter().enumerate() {
            push(single(n, q + 1, &ry(*w)));
        }
        push(cnot(n, 1, 2));
        push(cnot(n, 3, 4));
        push(cnot(n, 2, 3));
    }
    u
}

pub fn oracle_forward(features: &[f64; 4], weights: &[[f64; 4]]) -> [f64; 4] {
    let mut zero = vec![0.0; 16];
    zero[0] = 1.0;
    let state = apply(&circuit_matrix(features, weights), &zero);
    [1, 2, 3, 4].map(|q| expect_z(4, &state, q))
}

/// Central difference of a scalar function at `x` along coordinate `i`.
pub fn central(f: impl Fn(&[f64]) -> f64, x: &[f64], i: usize, h: f64) -> f64 {
    let mut p = x.to_vec();
    p[i] += h;
    let up = f(&p);
    p[i] -= 2.0 * h;
    let down = f(&p);
    (up - down) / (2.0 * h)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / 1f64.max(a.abs()).max(b.abs())
}
