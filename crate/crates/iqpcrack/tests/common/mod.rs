//! Naive bit-by-bit GF(2) reference implementations: the universal oracle
//! for the packed-word linear algebra. Everything here works on Vec<Vec<u8>>
//! with schoolbook loops and shares no code with the implementation under
//! test.

#![allow(dead_code)]

use iqpcrack::f2la::{BitMatrix, BitVector};
use std::collections::HashSet;

pub type NMat = Vec<Vec<u8>>;
pub type NVec = Vec<u8>;

pub fn to_naive(m: &BitMatrix) -> NMat {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j) as u8).collect())
        .collect()
}

pub fn to_naive_vec(v: &BitVector) -> NVec {
    (0..v.len()).map(|i| v.get(i) as u8).collect()
}

pub fn from_naive(m: &NMat, cols: usize) -> BitMatrix {
    let mut out = BitMatrix::zeros(m.len(), cols);
    for (i, row) in m.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            if b == 1 {
                out.set(i, j, true);
            }
        }
    }
    out
}

pub fn from_naive_vec(v: &NVec) -> BitVector {
    BitVector::from_bools(&v.iter().map(|&b| b == 1).collect::<Vec<_>>())
}

pub fn naive_mul(a: &NMat, b: &NMat) -> NMat {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![0u8; cols]; rows];
    for i in 0..rows {
        for j in 0..cols {
            let mut acc = 0u8;
            for k in 0..inner {
                acc ^= a[i][k] & b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn naive_transpose(a: &NMat) -> NMat {
    let rows = a.len();
    let cols = a[0].len();
    (0..cols)
        .map(|j| (0..rows).map(|i| a[i][j]).collect())
        .collect()
}

pub fn naive_gram(a: &NMat) -> NMat {
    naive_mul(&naive_transpose(a), a)
}

pub fn naive_mat_vec(a: &NMat, v: &NVec) -> NVec {
    a.iter()
        .map(|row| row.iter().zip(v).fold(0u8, |acc, (r, x)| acc ^ (r & x)))
        .collect()
}

pub fn naive_dot(a: &NVec, b: &NVec) -> u8 {
    a.iter().zip(b).fold(0u8, |acc, (x, y)| acc ^ (x & y))
}

pub fn naive_weight(v: &NVec) -> usize {
    v.iter().filter(|&&b| b == 1).count()
}

/// Row echelon over u8; returns (echelon rows, pivot columns).
fn naive_echelon(a: &NMat) -> (NMat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| m[i][c] == 1) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..rows {
            if i != r && m[i][c] == 1 {
                let (head, tail) = m.split_at_mut(std::cmp::max(i, r));
                let (src, dst) = if i < r {
                    (&tail[0], &mut head[i])
                } else {
                    (&head[r], &mut tail[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d ^= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn naive_rank(a: &NMat) -> usize {
    if a.is_empty() {
        return 0;
    }
    naive_echelon(a).1.len()
}

/// Any solution of a·x = b, free variables zero.
pub fn naive_solve(a: &NMat, b: &NVec) -> Option<NVec> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let augmented: NMat = a
        .iter()
        .zip(b)
        .map(|(row, &bit)| {
            let mut r = row.clone();
            r.push(bit);
            r
        })
        .collect();
    let (ech, pivots) = naive_echelon(&augmented);
    if pivots.contains(&cols) {
        return None; // pivot in the RHS column: inconsistent
    }
    let mut x = vec![0u8; cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = ech[r][cols];
    }
    Some(x)
}

/// Basis of {v : a·v = 0}.
pub fn naive_kernel(a: &NMat) -> Vec<NVec> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let (ech, pivots) = naive_echelon(a);
    let pivot_set: HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![0u8; cols];
        v[free] = 1;
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = ech[r][free];
        }
        basis.push(v);
    }
    basis
}

pub fn naive_in_span(basis: &[NVec], v: &NVec) -> bool {
    if basis.is_empty() {
        return naive_weight(v) == 0;
    }
    let with: NMat = basis.iter().chain(std::iter::once(v)).cloned().collect();
    naive_rank(&basis.to_vec()) == naive_rank(&with)
}

/// Every element of the span of the generators (2^k combinations).
pub fn enumerate_span(gens: &[NVec], ambient: usize) -> HashSet<NVec> {
    assert!(gens.len() <= 20, "span too large to enumerate");
    let mut out = HashSet::new();
    for mask in 0..(1usize << gens.len()) {
        let mut v = vec![0u8; ambient];
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (d, s) in v.iter_mut().zip(g) {
                    *d ^= s;
                }
            }
        }
        out.insert(v);
    }
    out
}

pub fn random_naive<R: rand::Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> NMat {
    (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen_range(0..=1u8)).collect())
        .collect()
}

pub fn random_naive_vec<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> NVec {
    (0..len).map(|_| rng.gen_range(0..=1u8)).collect()
}
