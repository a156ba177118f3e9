use super::bitvec::{words_for, BitVector, WORD_BITS};
use super::subspace::Subspace;
use rand::Rng;
use std::fmt;

/// Dense matrix over GF(2), bit-packed row-major: each row occupies
/// `words_per_row` consecutive 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = words_for(cols);
        Self {
            rows,
            cols,
            words_per_row,
            data: vec![0u64; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: &[BitVector]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            m.row_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn from_columns(cols: &[BitVector], ambient_rows: usize) -> Self {
        let mut m = Self::zeros(ambient_rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), ambient_rows, "column length mismatch");
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    /// Parse from rows of '0'/'1' characters; test convenience.
    pub fn from_dense_str(rows: &[&str]) -> Self {
        let vecs: Vec<BitVector> = rows
            .iter()
            .map(|s| BitVector::from_bools(&s.chars().map(|c| c == '1').collect::<Vec<_>>()))
            .collect();
        Self::from_rows(&vecs)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            let row = BitVector::random(cols, rng);
            m.row_mut(i).copy_from_slice(row.words());
        }
        m
    }

    /// Uniformly random invertible n×n matrix, by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 1);
        loop {
            let m = Self::random(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    /// Permutation matrix P with P[i][perm[i]] = 1, i.e. (P·M).row(i) = M.row(perm[i]).
    pub fn permutation_from(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Self::zeros(n, n);
        for (i, &j) in perm.iter().enumerate() {
            m.set(i, j, true);
        }
        m
    }

    pub fn random_permutation_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self::permutation_from(&random_permutation(n, rng))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn row_vec(&self, i: usize) -> BitVector {
        BitVector::from_words(self.cols, self.row(i).to_vec())
    }

    pub fn col_vec(&self, j: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.row(i)[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = j / WORD_BITS;
        let mask = 1u64 << (j % WORD_BITS);
        let row = self.row_mut(i);
        if value {
            row[w] |= mask;
        } else {
            row[w] &= !mask;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn row_is_zero(&self, i: usize) -> bool {
        self.row(i).iter().all(|&w| w == 0)
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let wpr = self.words_per_row;
        let (a, b) = (a.min(b), a.max(b));
        let (lo, hi) = self.data.split_at_mut(b * wpr);
        lo[a * wpr..(a + 1) * wpr].swap_with_slice(&mut hi[..wpr]);
    }

    /// row(to) ^= row(from).
    pub fn xor_row_into(&mut self, from: usize, to: usize) {
        assert_ne!(from, to);
        let wpr = self.words_per_row;
        let (fa, fb) = (from * wpr, (from + 1) * wpr);
        let (ta, _tb) = (to * wpr, (to + 1) * wpr);
        if from < to {
            let (lo, hi) = self.data.split_at_mut(ta);
            let src = &lo[fa..fb];
            for (d, s) in hi[..wpr].iter_mut().zip(src) {
                *d ^= s;
            }
        } else {
            let (lo, hi) = self.data.split_at_mut(fa);
            let dst = &mut lo[ta..ta + wpr];
            for (d, s) in dst.iter_mut().zip(&hi[..wpr]) {
                *d ^= s;
            }
        }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            let row = self.row(i);
            for wi in 0..self.words_per_row {
                let mut w = row[wi];
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    t.set(wi * WORD_BITS + b, i, true);
                }
            }
        }
        t
    }

    /// GF(2) product self · other.
    pub fn mat_mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in mat_mul");
        let mut out = Self::zeros(self.rows, other.cols);
        let wpr = out.words_per_row;
        for i in 0..self.rows {
            let mut acc = vec![0u64; wpr];
            let row = self.row(i);
            for wi in 0..self.words_per_row {
                let mut w = row[wi];
                while w != 0 {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    let k = wi * WORD_BITS + b;
                    for (a, s) in acc.iter_mut().zip(other.row(k)) {
                        *a ^= s;
                    }
                }
            }
            out.row_mut(i).copy_from_slice(&acc);
        }
        out
    }

    /// Matrix–vector product self · v.
    pub fn mat_vec(&self, v: &BitVector) -> BitVector {
        assert_eq!(self.cols, v.len(), "shape mismatch in mat_vec");
        let mut out = BitVector::zeros(self.rows);
        for i in 0..self.rows {
            let mut acc = 0u32;
            for (a, b) in self.row(i).iter().zip(v.words()) {
                acc ^= (a & b).count_ones() & 1;
            }
            if acc & 1 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    /// Row-combination u^T · self: XOR of the rows selected by u.
    pub fn left_mul(&self, u: &BitVector) -> BitVector {
        assert_eq!(self.rows, u.len(), "shape mismatch in left_mul");
        let mut acc = vec![0u64; self.words_per_row];
        for i in u.iter_ones() {
            for (a, s) in acc.iter_mut().zip(self.row(i)) {
                *a ^= s;
            }
        }
        BitVector::from_words(self.cols, acc)
    }

    /// Gram matrix G = selfᵀ·self, computed as AND/popcount inner products
    /// of the transposed rows; G is symmetric cols×cols.
    pub fn gram(&self) -> Self {
        let t = self.transpose();
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            let ri = t.row(i).to_vec();
            for j in i..n {
                let mut acc = 0u32;
                for (a, b) in ri.iter().zip(t.row(j)) {
                    acc ^= (a & b).count_ones() & 1;
                }
                if acc & 1 == 1 {
                    g.set(i, j, true);
                    g.set(j, i, true);
                }
            }
        }
        g
    }

    /// Matrices stacked top to bottom; all must share a column count.
    pub fn vstack(parts: &[&Self]) -> Self {
        assert!(!parts.is_empty());
        let cols = parts[0].cols;
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut out = Self::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            assert_eq!(p.cols, cols, "shape mismatch in vstack");
            for i in 0..p.rows {
                out.row_mut(at).copy_from_slice(p.row(i));
                at += 1;
            }
        }
        out
    }

    /// Matrices side by side; all must share a row count.
    pub fn hstack(parts: &[&Self]) -> Self {
        assert!(!parts.is_empty());
        let rows = parts[0].rows;
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut at = 0;
        for p in parts {
            assert_eq!(p.rows, rows, "shape mismatch in hstack");
            for j in 0..p.cols {
                for i in 0..p.rows {
                    if p.get(i, j) {
                        out.set(i, at + j, true);
                    }
                }
            }
            at += p.cols;
        }
        out
    }

    /// New matrix whose row i is self.row(perm[i]).
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rows);
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, &src) in perm.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(src));
        }
        out
    }

    pub fn take_rows(&self, indices: &[usize]) -> Self {
        let mut out = Self::zeros(indices.len(), self.cols);
        for (i, &src) in indices.iter().enumerate() {
            out.row_mut(i).copy_from_slice(self.row(src));
        }
        out
    }

    /// Rows not listed in `drop` (sorted or not), in original order.
    pub fn drop_rows(&self, drop: &[usize]) -> Self {
        let mut keep: Vec<usize> = (0..self.rows).collect();
        let dropset: std::collections::HashSet<usize> = drop.iter().copied().collect();
        keep.retain(|i| !dropset.contains(i));
        self.take_rows(&keep)
    }

    pub fn rank(&self) -> usize {
        Echelon::reduce_copy(self).rank
    }

    /// Basis of the right kernel {v : self·v = 0}.
    pub fn kernel_basis(&self) -> Subspace {
        let ech = Echelon::reduce_copy(self);
        let mut gens = Vec::with_capacity(self.cols - ech.rank);
        let mut pivot_of_col = vec![usize::MAX; self.cols];
        for (r, &c) in ech.pivots.iter().enumerate() {
            pivot_of_col[c] = r;
        }
        for j in 0..self.cols {
            if pivot_of_col[j] != usize::MAX {
                continue;
            }
            let mut v = BitVector::zeros(self.cols);
            v.set(j, true);
            for (r, &c) in ech.pivots.iter().enumerate() {
                if ech.mat.get(r, j) {
                    v.set(c, true);
                }
            }
            gens.push(v);
        }
        Subspace::from_generators(self.cols, gens)
    }

    /// Any solution v of self·v = b, or None when b is outside the column
    /// space. Free variables are set to zero, so the result is the
    /// lexicographically-first solution under the elimination's pivot order.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        Echelon::factor(self).solve(b)
    }

    /// Inverse of a square matrix, or None if singular.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let ech = Echelon::factor(self);
        if ech.rank < self.rows {
            return None;
        }
        // Full-rank square RREF is the identity, so transform·self = I.
        Some(ech.transform)
    }

    /// Indices i such that some column has a nonzero entry at i, i.e. the
    /// nonzero rows. Union of the supports of the column vectors.
    pub fn support_of_columns(&self) -> Vec<usize> {
        (0..self.rows).filter(|&i| !self.row_is_zero(i)).collect()
    }
}

/// Row-reduced echelon form with an optional row transform, produced by
/// plain Gaussian elimination. `transform · original` has `mat`'s pivot rows
/// on top; rows at index ≥ rank reduce to zero.
pub struct Echelon {
    pub mat: BitMatrix,
    pub pivots: Vec<usize>,
    pub rank: usize,
    transform: BitMatrix,
    has_transform: bool,
}

impl Echelon {
    /// RREF without the transform (rank/kernel queries only).
    pub fn reduce_copy(m: &BitMatrix) -> Self {
        Self::run(m.clone(), None)
    }

    /// RREF with the row transform recorded, enabling repeated `solve`.
    pub fn factor(m: &BitMatrix) -> Self {
        let t = BitMatrix::identity(m.rows);
        Self::run(m.clone(), Some(t))
    }

    fn run(mut mat: BitMatrix, mut transform: Option<BitMatrix>) -> Self {
        let rows = mat.rows;
        let cols = mat.cols;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(p) = (r..rows).find(|&i| mat.get(i, c)) else {
                continue;
            };
            mat.swap_rows(r, p);
            if let Some(t) = transform.as_mut() {
                t.swap_rows(r, p);
            }
            for i in 0..rows {
                if i != r && mat.get(i, c) {
                    mat.xor_row_into(r, i);
                    if let Some(t) = transform.as_mut() {
                        t.xor_row_into(r, i);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        let has_transform = transform.is_some();
        Self {
            rank: pivots.len(),
            mat,
            pivots,
            transform: transform.unwrap_or_else(|| BitMatrix::zeros(0, 0)),
            has_transform,
        }
    }

    /// Solve original·v = b for one right-hand side; requires `factor`.
    pub fn solve(&self, b: &BitVector) -> Option<BitVector> {
        assert!(self.has_transform, "Echelon::solve requires factor()");
        assert_eq!(b.len(), self.transform.cols(), "rhs length mismatch");
        let reduced = self.transform.mat_vec(b);
        // Consistency: zero rows of the RREF must map b to zero.
        for i in self.rank..reduced.len() {
            if reduced.get(i) {
                return None;
            }
        }
        let mut x = BitVector::zeros(self.mat.cols());
        for (r, &c) in self.pivots.iter().enumerate() {
            if reduced.get(r) {
                x.set(c, true);
            }
        }
        Some(x)
    }
}

pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.gen_range(0..=i);
        perm.swap(i, j);
    }
    perm
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "{:?}", self.row_vec(i))?;
        }
        Ok(())
    }
}
