//! Cryptanalysis workbench for obfuscated IQP circuits.
//!
//! The crate generates instances of two secret-hiding circuit constructions
//! (the stabilizer scheme and the extended quadratic-residue-code scheme),
//! runs a family of secret-extraction attacks against them, reproduces the
//! associated success-probability statistics at desk scale, and ships a
//! small-qubit brute-force circuit simulator as an independent correctness
//! oracle.

pub mod attacks;
pub mod cli;
pub mod f2la;
pub mod qrc;
pub mod sim;
pub mod scheme;
pub mod stats;

pub mod rng {
    //! Seed derivation for reproducible parallel experiments.

    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// SplitMix64 step; the standard seed-stretching finalizer.
    pub fn splitmix64(mut x: u64) -> u64 {
        x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = x;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Seed for the `index`-th job of a run with the given master seed.
    pub fn derive_seed(master: u64, index: u64) -> u64 {
        splitmix64(master ^ splitmix64(index.wrapping_add(1)))
    }

    /// The workbench's stream RNG: counter-based, portable, seedable.
    pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}
