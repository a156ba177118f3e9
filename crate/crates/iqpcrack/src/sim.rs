//! Brute-force state-vector simulator for small IQP circuits.
//!
//! Each tableau row applies a relative phase of ω = e^{iπ/4} between the
//! ±1 eigenspaces of its X-monomial X_S, i.e. the gate ω^{(1−X_S)/2},
//! which is exp(−iπ/8 · X_S) up to global phase. All gates commute; the
//! Born probabilities of the final state certify the hyperplane bias of
//! generated instances exactly, independent of the linear-algebra path.
//! (A π/4 rotation angle instead would wash the bias of every valid
//! secret out to 1/2: the ω in ω^H is the eigenspace phase ratio, not the
//! rotation angle.)

use crate::f2la::{BitMatrix, BitVector};
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("{0} qubits exceed the {MAX_QUBITS}-qubit brute-force cap")]
    TooLarge(usize),
}

/// Exact output distribution of an IQP circuit on n ≤ 16 qubits.
#[derive(Clone, Debug)]
pub struct IqpDistribution {
    n: usize,
    probs: Vec<f64>,
}

impl IqpDistribution {
    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

/// Apply ω^H to |0…0⟩ and return the Born probabilities. Each row's gate
/// acts as cos(π/8)·I + i·sin(π/8)·X_S, mixing amplitude pairs (x, x⊕mask);
/// rows with empty support only contribute a global phase and are skipped.
pub fn simulate(h: &BitMatrix) -> Result<IqpDistribution, SimError> {
    let n = h.cols();
    if n > MAX_QUBITS {
        return Err(SimError::TooLarge(n));
    }
    let size = 1usize << n;
    let mut state = vec![Complex64::new(0.0, 0.0); size];
    state[0] = Complex64::new(1.0, 0.0);
    let theta = std::f64::consts::FRAC_PI_8;
    let (c, s) = (theta.cos(), theta.sin());

    for row in 0..h.rows() {
        let mask = row_mask(h, row);
        if mask == 0 {
            continue;
        }
        for x in 0..size {
            let y = x ^ mask;
            if x < y {
                let ax = state[x];
                let ay = state[y];
                state[x] = c * ax + Complex64::i() * s * ay;
                state[y] = c * ay + Complex64::i() * s * ax;
            }
        }
    }
    let probs: Vec<f64> = state.iter().map(|a| a.norm_sqr()).collect();
    debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    Ok(IqpDistribution { n, probs })
}

fn row_mask(h: &BitMatrix, row: usize) -> usize {
    let mut mask = 0usize;
    for j in 0..h.cols() {
        if h.get(row, j) {
            mask |= 1 << j;
        }
    }
    mask
}

fn vector_mask(v: &BitVector) -> usize {
    let mut mask = 0usize;
    for i in v.iter_ones() {
        mask |= 1 << i;
    }
    mask
}

/// Σ over x with ⟨x,s⟩ = 0 of D_H(x): the fraction of the output
/// distribution lying in the hyperplane orthogonal to s.
pub fn bias_of(dist: &IqpDistribution, s: &BitVector) -> f64 {
    assert_eq!(s.len(), dist.n, "secret length mismatch");
    let mask = vector_mask(s);
    dist.probs
        .iter()
        .enumerate()
        .filter(|(x, _)| (x & mask).count_ones() % 2 == 0)
        .map(|(_, p)| p)
        .sum()
}

/// i.i.d. draws from the distribution.
pub fn sample<R: Rng + ?Sized>(
    dist: &IqpDistribution,
    count: usize,
    rng: &mut R,
) -> Vec<BitVector> {
    let mut cdf = Vec::with_capacity(dist.probs.len());
    let mut acc = 0.0;
    for p in &dist.probs {
        acc += p;
        cdf.push(acc);
    }
    (0..count)
        .map(|_| {
            let u: f64 = rng.gen_range(0.0..1.0);
            let idx = cdf.partition_point(|&c| c < u).min(dist.probs.len() - 1);
            index_to_vector(idx, dist.n)
        })
        .collect()
}

fn index_to_vector(x: usize, n: usize) -> BitVector {
    let mut v = BitVector::zeros(n);
    for i in 0..n {
        if (x >> i) & 1 == 1 {
            v.set(i, true);
        }
    }
    v
}
