//! Bit-packed dense linear algebra over GF(2).
//!
//! Row-major 64-bit packing with plain Gaussian elimination; at the matrix
//! sizes this crate works with (a few hundred rows and columns) the word
//! parallelism of XOR/AND/popcount is what matters, not asymptotics.

mod bitmat;
mod bitvec;
mod subspace;

pub use bitmat::{random_permutation, BitMatrix, Echelon};
pub use bitvec::BitVector;
pub use subspace::{is_doubly_even_space, SpanIter, Subspace};
