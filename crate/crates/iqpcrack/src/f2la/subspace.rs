use super::bitvec::BitVector;
use super::bitmat::BitMatrix;

/// Subspace of F₂^ambient, kept as a fully reduced echelon basis: each
/// generator has a distinct leading (lowest set) index, no generator has a
/// one at another generator's lead, and generators are sorted by lead.
/// This makes the basis canonical, so equality of spans is structural
/// equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    gens: Vec<BitVector>,
    leads: Vec<usize>,
}

impl Subspace {
    pub fn empty(ambient: usize) -> Self {
        Self {
            ambient,
            gens: Vec::new(),
            leads: Vec::new(),
        }
    }

    pub fn from_generators(ambient: usize, gens: Vec<BitVector>) -> Self {
        let mut s = Self::empty(ambient);
        for g in gens {
            s.insert(&g);
        }
        s
    }

    /// Span of the columns of `m`.
    pub fn from_columns(m: &BitMatrix) -> Self {
        let mut s = Self::empty(m.rows());
        for j in 0..m.cols() {
            s.insert(&m.col_vec(j));
        }
        s
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.gens.len()
    }

    pub fn generators(&self) -> &[BitVector] {
        &self.gens
    }

    /// Basis as a matrix whose columns are the generators.
    pub fn basis_matrix(&self) -> BitMatrix {
        BitMatrix::from_columns(&self.gens, self.ambient)
    }

    /// Add a vector to the span; returns true if the dimension grew.
    pub fn insert(&mut self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut v = v.clone();
        for (g, &lead) in self.gens.iter().zip(&self.leads) {
            if v.get(lead) {
                v.xor_assign(g);
            }
        }
        let Some(lead) = v.leading_index() else {
            return false;
        };
        // Back-substitute the new lead out of the existing basis.
        for g in self.gens.iter_mut() {
            if g.get(lead) {
                g.xor_assign(&v);
            }
        }
        let at = self.leads.partition_point(|&l| l < lead);
        self.leads.insert(at, lead);
        self.gens.insert(at, v);
        true
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        assert_eq!(v.len(), self.ambient, "ambient dimension mismatch");
        let mut v = v.clone();
        for (g, &lead) in self.gens.iter().zip(&self.leads) {
            if v.get(lead) {
                v.xor_assign(g);
            }
        }
        v.is_zero()
    }

    pub fn sum(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        let mut s = self.clone();
        for g in &other.gens {
            s.insert(g);
        }
        s
    }

    /// U ∩ V via the kernel of the stacked basis (U | V): a kernel vector
    /// (x; y) encodes an element U·x = V·y of the intersection.
    pub fn intersection(&self, other: &Self) -> Self {
        assert_eq!(self.ambient, other.ambient, "ambient dimension mismatch");
        if self.dim() == 0 || other.dim() == 0 {
            return Self::empty(self.ambient);
        }
        let a = self.basis_matrix();
        let b = other.basis_matrix();
        let stacked = BitMatrix::hstack(&[&a, &b]);
        let kernel = stacked.kernel_basis();
        let mut out = Self::empty(self.ambient);
        for k in kernel.generators() {
            let mut elem = BitVector::zeros(self.ambient);
            for j in 0..self.dim() {
                if k.get(j) {
                    elem.xor_assign(&self.gens[j]);
                }
            }
            out.insert(&elem);
        }
        out
    }

    /// All nonzero span elements in Gray-code order: one generator XOR per
    /// step. Intended for small spans (attack candidate enumeration,
    /// exhaustive test oracles).
    pub fn iter_nonzero(&self) -> SpanIter<'_> {
        SpanIter {
            gens: &self.gens,
            current: BitVector::zeros(self.ambient),
            counter: 0,
            total: if self.gens.len() >= 64 {
                u64::MAX
            } else {
                (1u64 << self.gens.len()) - 1
            },
        }
    }
}

pub struct SpanIter<'a> {
    gens: &'a [BitVector],
    current: BitVector,
    counter: u64,
    total: u64,
}

impl Iterator for SpanIter<'_> {
    type Item = BitVector;

    fn next(&mut self) -> Option<BitVector> {
        if self.counter >= self.total {
            return None;
        }
        self.counter += 1;
        let flip = self.counter.trailing_zeros() as usize;
        self.current.xor_assign(&self.gens[flip]);
        Some(self.current.clone())
    }
}

/// Certificate check that every element of the span has Hamming weight
/// ≡ 0 mod 4: all generators doubly even and pairwise orthogonal. Using
/// |u+v| = |u| + |v| − 2|u∧v|, orthogonality makes weight mod 4 additive,
/// so the certificate is equivalent to the elementwise property.
pub fn is_doubly_even_space(space: &Subspace) -> bool {
    let gens = space.generators();
    for (i, g) in gens.iter().enumerate() {
        if g.weight() % 4 != 0 {
            return false;
        }
        for h in gens.iter().skip(i + 1) {
            if g.dot(h) {
                return false;
            }
        }
    }
    true
}
