//! The (Extended) Quadratic-Residue-Code construction.
//!
//! The code block of the tableau is the binary QR code of prime length q
//! with q+1 ≡ 0 mod 8, spanned by the cyclic shifts of the quadratic-residue
//! indicator vector. The all-ones vector is a codeword and becomes the first
//! column, planting the secret at e¹; q uniformly random redundant rows
//! (first entry zero) and, in the extended variant, random redundant columns
//! widen the tableau to n ∈ [r, q+r].

use crate::f2la::{BitMatrix, BitVector, Subspace};
use crate::rng::rng_from_seed;
use crate::scheme::{Family, InstanceParams, IqpInstance, SchemeError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QrcParams {
    pub q: usize,
    /// Code dimension r = (q+1)/2.
    pub r: usize,
    /// Tableau width, r ≤ n ≤ q + r.
    pub n: usize,
    /// Row count m = 2q.
    pub m: usize,
}

#[derive(Debug, Error)]
pub enum QrcError {
    #[error("{0} is not a prime with q + 1 ≡ 0 mod 8")]
    InvalidPrime(usize),
    #[error("width {n} outside [{lo}, {hi}]")]
    InvalidWidth { n: usize, lo: usize, hi: usize },
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

impl QrcParams {
    pub fn new(q: usize, n: usize) -> Result<Self, QrcError> {
        if !is_prime(q) || (q + 1) % 8 != 0 {
            return Err(QrcError::InvalidPrime(q));
        }
        let r = (q + 1) / 2;
        if n < r || n > q + r {
            return Err(QrcError::InvalidWidth { n, lo: r, hi: q + r });
        }
        Ok(Self { q, r, n, m: 2 * q })
    }
}

fn is_prime(x: usize) -> bool {
    if x < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= x {
        if x % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// q×r generator matrix of the binary quadratic-residue code of length q:
/// a column basis of the span of all cyclic shifts of the residue indicator.
/// The all-ones vector lies in the span.
pub fn qrc_generator(q: usize) -> Result<BitMatrix, QrcError> {
    if !is_prime(q) || (q + 1) % 8 != 0 {
        return Err(QrcError::InvalidPrime(q));
    }
    let r = (q + 1) / 2;
    let mut residue = BitVector::zeros(q);
    for x in 1..q {
        residue.set(x * x % q, true);
    }
    let mut span = Subspace::empty(q);
    for shift in 0..q {
        let mut v = BitVector::zeros(q);
        for i in residue.iter_ones() {
            v.set((i + shift) % q, true);
        }
        span.insert(&v);
    }
    assert_eq!(span.dim(), r, "QR code of length {q} must have dimension {r}");
    assert!(
        span.contains(&BitVector::ones(q)),
        "all-ones must be a codeword"
    );
    Ok(span.basis_matrix())
}

/// Split the code into the blockmat shape (F|D): F is the all-ones column,
/// D a basis of the even-weight subcode, which is the radical.
fn code_blocks(code: &BitMatrix) -> (BitMatrix, BitMatrix) {
    let q = code.rows();
    let mut even: Vec<BitVector> = Vec::new();
    let mut odd_pivot: Option<BitVector> = None;
    for j in 0..code.cols() {
        let c = code.col_vec(j);
        if c.weight() % 2 == 0 {
            even.push(c);
        } else if let Some(p) = &odd_pivot {
            even.push(c.xor(p));
        } else {
            odd_pivot = Some(c);
        }
    }
    let f = BitMatrix::from_columns(&[BitVector::ones(q)], q);
    let d = BitMatrix::from_columns(&even, q);
    (f, d)
}

/// Build an (Extended) QRC instance of width n: code block with the all-ones
/// first column on top, q random rows with first entry zero below, random
/// redundant columns supported on the bottom rows widening the tableau to n
/// with rank(H) = n, then obfuscation.
pub fn build_qrc_instance(params: QrcParams, seed: u64) -> Result<IqpInstance, QrcError> {
    let QrcParams { q, r, n, m } = params;
    let mut rng = rng_from_seed(seed);
    let code = qrc_generator(q)?;
    let (f_block, d_block) = code_blocks(&code);
    debug_assert_eq!(d_block.cols(), r - 1);

    let zero = BitMatrix::zeros(q, n - r);
    let top = BitMatrix::hstack(&[&f_block, &d_block, &zero]);

    // Bottom rows: uniformly random over the first r columns except the
    // leading zero; the n−r redundant columns are accumulated so that each
    // increases the rank, which forces rank(H) = n.
    let mut bottom_left_cols: Vec<BitVector> = vec![BitVector::zeros(q)];
    for _ in 1..r {
        bottom_left_cols.push(BitVector::random(q, &mut rng));
    }
    let mut col_span = Subspace::empty(q);
    let mut c_cols: Vec<BitVector> = Vec::with_capacity(n - r);
    let mut draws = 0;
    while c_cols.len() < n - r {
        if draws > 1000 * (n - r + 1) {
            return Err(SchemeError::SamplingExhaustion("QRC redundant columns").into());
        }
        draws += 1;
        let c = BitVector::random(q, &mut rng);
        if col_span.insert(&c) {
            c_cols.push(c);
        }
    }
    let bottom_cols: Vec<BitVector> = bottom_left_cols.into_iter().chain(c_cols).collect();
    let bottom = BitMatrix::from_columns(&bottom_cols, q);
    debug_assert_eq!((bottom.rows(), bottom.cols()), (q, n));

    let pre_h = BitMatrix::vstack(&[&top, &bottom]);
    debug_assert_eq!(pre_h.rank(), n);
    let pre_secret = BitVector::unit(n, 0);

    let q_mix = BitMatrix::random_invertible(n, &mut rng);
    let q_inv = q_mix.inverse().expect("invertible by construction");
    let perm = crate::f2la::random_permutation(m, &mut rng);
    let h = pre_h.mat_mul(&q_mix).permute_rows(&perm);
    let secret = q_inv.mat_vec(&pre_secret);

    let witness = crate::scheme::ConstructionWitness {
        pre_h: pre_h.clone(),
        pre_secret,
        f_block,
        d_block,
        redundant: bottom,
        row_perm: perm,
        mixer: q_mix,
        mixer_inv: q_inv,
    };
    let family = if n == r { Family::Qrc } else { Family::ExtendedQrc };
    Ok(IqpInstance {
        h,
        secret: Some(secret),
        params: InstanceParams::new(n, m, 1, q, r - 1),
        family,
        seed,
        witness: Some(witness),
    })
}
