//! Generation of stabilizer-scheme instances and validation of candidate
//! secrets.
//!
//! A pre-obfuscation tableau has the block form
//!
//! ```text
//!         g     d     n-g-d
//!       ┌────┬─────┬────────┐
//!   m1  │ F  │  D  │   0    │
//!       ├────┼─────┼────────┤
//!   m2  │ A  │  B  │   C    │   rows orthogonal to the secret
//!       └────┴─────┴────────┘
//! ```
//!
//! where range(D) is a doubly-even isotropic subspace (the radical of the
//! code space), F spans a non-degenerate complement, and the bottom rows are
//! redundancy bringing the column rank to n. The planted secret is e¹: F's
//! first column is forced to all-ones and A's first column to zero, so that
//! H·e¹ is the indicator of the first m1 rows. Obfuscation conjugates by a
//! row permutation P and an invertible column mixer Q.

use crate::f2la::{is_doubly_even_space, random_permutation, BitMatrix, BitVector, Subspace};
use crate::rng::rng_from_seed;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Stabilizer,
    Qrc,
    ExtendedQrc,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::Stabilizer => write!(f, "stabilizer"),
            Family::Qrc => write!(f, "qrc"),
            Family::ExtendedQrc => write!(f, "extended-qrc"),
        }
    }
}

/// How the redundant rows R_s are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RedundancyMode {
    /// Uniformly random rows orthogonal to the secret, kept while they
    /// increase the rank until rank(H) = n, then topped up with
    /// unconstrained random orthogonal rows.
    #[default]
    Randomized,
    /// Deterministic completion: the rank-completing rows are taken from the
    /// null-space basis of the secret in fixed enumeration order; top-up rows
    /// are random as in `Randomized`.
    Published,
    /// Plants a single left-dependency among the redundant rows so that
    /// range(B|C) ≠ F₂^m2 while rank(H) = n still holds. The extra kernel
    /// class of the Gram matrix is arranged to have singly-even image, which
    /// defeats the plain radical attack but not its doubly-even variant.
    ChallengeLegacy,
}

impl std::str::FromStr for RedundancyMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "randomized" => Ok(Self::Randomized),
            "published" => Ok(Self::Published),
            "challenge-legacy" => Ok(Self::ChallengeLegacy),
            other => Err(format!("unknown redundancy mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceParams {
    pub n: usize,
    pub m: usize,
    pub g: usize,
    pub m1: usize,
    pub m2: usize,
    pub d: usize,
}

impl InstanceParams {
    pub fn new(n: usize, m: usize, g: usize, m1: usize, d: usize) -> Self {
        assert!(m1 <= m);
        Self {
            n,
            m,
            g,
            m1,
            m2: m - m1,
            d,
        }
    }

    /// Excess width w = n − g − m2. Negative when the redundancy block is
    /// taller than the non-secret column space.
    pub fn excess_width(&self) -> i64 {
        self.n as i64 - self.g as i64 - self.m2 as i64
    }

    /// Imbalance (m2 − m1)/2 between redundant and secret rows.
    pub fn imbalance(&self) -> i64 {
        (self.m2 as i64 - self.m1 as i64) / 2
    }
}

/// Everything the generator knew that an attacker must not: the
/// pre-obfuscation blocks and the obfuscation pair. Kept for test oracles.
#[derive(Clone)]
pub struct ConstructionWitness {
    pub pre_h: BitMatrix,
    pub pre_secret: BitVector,
    pub f_block: BitMatrix,
    pub d_block: BitMatrix,
    pub redundant: BitMatrix,
    /// Row permutation: post-obfuscation row i is pre-obfuscation row perm[i].
    pub row_perm: Vec<usize>,
    pub mixer: BitMatrix,
    pub mixer_inv: BitMatrix,
}

impl ConstructionWitness {
    /// Post-obfuscation indices of the m1 secret rows.
    pub fn secret_rows(&self) -> Vec<usize> {
        let m1 = self.f_block.rows();
        (0..self.row_perm.len())
            .filter(|&i| self.row_perm[i] < m1)
            .collect()
    }

    /// Post-obfuscation indices of the redundant rows.
    pub fn redundant_rows(&self) -> Vec<usize> {
        let m1 = self.f_block.rows();
        (0..self.row_perm.len())
            .filter(|&i| self.row_perm[i] >= m1)
            .collect()
    }
}

#[derive(Clone)]
pub struct IqpInstance {
    pub h: BitMatrix,
    pub secret: Option<BitVector>,
    pub params: InstanceParams,
    pub family: Family,
    pub seed: u64,
    pub witness: Option<ConstructionWitness>,
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("parameter sampling exhausted after {0} draws")]
    ParameterExhaustion(usize),
    #[error("sampling exhausted: {0}")]
    SamplingExhaustion(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Rejection reasons for a candidate secret; the rejection path of the
/// attack candidate loops.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum NotASecret {
    #[error("H·s = 0, the code space is trivial")]
    TrivialCode,
    #[error("the radical of the code space is trivial")]
    TrivialRadical,
    #[error("the radical is not doubly even")]
    NotDoublyEven,
    #[error("codimension {found} exceeds threshold {max}")]
    CodimensionTooLarge { found: usize, max: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SecretCertificate {
    /// Codimension of the radical inside the code space; equals
    /// rank(gram(H_s)).
    pub g_actual: usize,
    pub rad_dim: usize,
    pub rad_doubly_even: bool,
    /// Number of rows of H not orthogonal to the secret, i.e. |H·s|.
    pub m1_observed: usize,
}

const PARAM_RETRY_DEFAULT: usize = 100_000;

/// Sample (m1, d) for given (n, m, g): m1/2 and d are binomial draws,
/// rejection-resampled until the pair is feasible. Feasibility is
/// m1 ≥ max(4, g+2), 1 ≤ d, d ≥ w (forced by rank(H) = n) and g + d ≤ n.
pub fn sample_parameters<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    g: usize,
    rng: &mut R,
) -> Result<(usize, usize), SchemeError> {
    sample_parameters_with_budget(n, m, g, rng, PARAM_RETRY_DEFAULT)
}

pub fn sample_parameters_with_budget<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    g: usize,
    rng: &mut R,
    budget: usize,
) -> Result<(usize, usize), SchemeError> {
    assert!(n > g, "need n > g");
    assert!(m > n, "need m > n");
    for _ in 0..budget {
        let m1 = 2 * binomial((m - g) / 2, 0.3, rng);
        if m1 < g + 2 || m1 < 4 {
            continue;
        }
        let d = binomial((m1 - g) / 2, 0.75, rng);
        if params_feasible(n, m, g, m1, d) {
            return Ok((m1, d));
        }
    }
    Err(SchemeError::ParameterExhaustion(budget))
}

fn params_feasible(n: usize, m: usize, g: usize, m1: usize, d: usize) -> bool {
    if m1 < g + 2 || m1 < 4 || m1 > m || d == 0 || g + d > n {
        return false;
    }
    let w = m1 as i64 + n as i64 - g as i64 - m as i64;
    d as i64 >= w
}

fn binomial<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> usize {
    (0..n).filter(|_| rng.gen_bool(p)).count()
}

/// Sample an m1×d matrix whose range is a d-dimensional doubly-even
/// isotropic subspace: every column weight ≡ 0 mod 4, Dᵀ·D = 0, rank d.
/// Sequential rejection: draw from the orthogonal complement of the columns
/// chosen so far, keep doubly-even rank-increasing draws.
pub fn sample_d<R: Rng + ?Sized>(
    m1: usize,
    d: usize,
    rng: &mut R,
) -> Result<BitMatrix, SchemeError> {
    assert!(m1 >= 4, "isotropic sampling needs m1 >= 4");
    assert!(2 * d <= m1, "isotropic dimension bound d <= m1/2");
    if d == 0 {
        return Ok(BitMatrix::zeros(m1, 0));
    }
    let budget = 100 * d * m1;
    let mut cols: Vec<BitVector> = Vec::with_capacity(d);
    let mut span = Subspace::empty(m1);
    let mut complement = BitMatrix::zeros(0, m1).kernel_basis();
    let mut draws = 0;
    while cols.len() < d {
        if draws >= budget {
            return Err(SchemeError::SamplingExhaustion(
                "doubly-even isotropic extension",
            ));
        }
        draws += 1;
        let v = random_element(&complement, rng);
        if v.is_zero() || v.weight() % 4 != 0 {
            continue;
        }
        if !span.insert(&v) {
            continue;
        }
        cols.push(v);
        let constraints = BitMatrix::from_rows(&cols);
        complement = constraints.kernel_basis();
    }
    Ok(BitMatrix::from_columns(&cols, m1))
}

fn random_element<R: Rng + ?Sized>(space: &Subspace, rng: &mut R) -> BitVector {
    let mut v = BitVector::zeros(space.ambient_dim());
    for g in space.generators() {
        if rng.gen_bool(0.5) {
            v.xor_assign(g);
        }
    }
    v
}

/// Sample an m1×g matrix F with rank(FᵀF) = g and DᵀF = 0, first column
/// forced to all-ones (this is what plants the secret at e¹). Batch
/// rejection on the non-degeneracy condition.
pub fn sample_f<R: Rng + ?Sized>(
    m1: usize,
    g: usize,
    d_block: &BitMatrix,
    rng: &mut R,
) -> Result<BitMatrix, SchemeError> {
    assert!(g >= 1);
    assert_eq!(d_block.rows(), m1);
    let complement = d_block.transpose().kernel_basis();
    let ones = BitVector::ones(m1);
    debug_assert!(complement.contains(&ones) || d_block.cols() == 0 || !ones.is_zero());
    for _ in 0..1000 {
        let mut cols = vec![ones.clone()];
        for _ in 1..g {
            cols.push(random_element(&complement, rng));
        }
        let f = BitMatrix::from_columns(&cols, m1);
        if f.gram().rank() == g {
            return Ok(f);
        }
    }
    Err(SchemeError::SamplingExhaustion("non-degenerate F block"))
}

fn random_orthogonal_row<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitVector {
    // Orthogonal to the pre-obfuscation secret e¹, i.e. first bit clear.
    let mut v = BitVector::random(n, rng);
    v.set(0, false);
    v
}

/// Assemble a full stabilizer instance: sampled parameters, D and F blocks,
/// redundant rows per `mode`, then obfuscation. The returned instance
/// carries the hidden secret and the construction witness.
pub fn assemble_instance(
    n: usize,
    m: usize,
    g: usize,
    mode: RedundancyMode,
    seed: u64,
) -> Result<IqpInstance, SchemeError> {
    if g < 2 || g % 2 != 0 {
        // The all-ones vector lies in the code space (H·s is the indicator
        // of the first m1 rows), which makes it the characteristic vector of
        // the form on C_s/rad; hence m1 ≡ g (mod 2). The binomial sampler
        // always produces even m1, so only even g is constructible here.
        // Odd g lives in the QRC construction, where m1 = q is odd.
        return Err(SchemeError::InvalidParams(
            "stabilizer construction needs even g >= 2".into(),
        ));
    }
    if n <= g || m <= n {
        return Err(SchemeError::InvalidParams(format!(
            "need g < n < m, got (n, m, g) = ({n}, {m}, {g})"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut last_err = SchemeError::SamplingExhaustion("instance assembly");
    for _ in 0..64 {
        let (m1, d) = sample_parameters(n, m, g, &mut rng)?;
        if mode == RedundancyMode::ChallengeLegacy {
            // The planted dependency costs one independent redundant row.
            let w = m1 as i64 + n as i64 - g as i64 - m as i64;
            if (d as i64) < w + 1 {
                continue;
            }
        }
        match build_with_params(n, m, g, m1, d, mode, seed, &mut rng) {
            Ok(inst) => return Ok(inst),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

/// As `assemble_instance` but with (m1, d) pinned by the caller instead of
/// sampled; used to steer generation into specific excess-width regimes.
pub fn assemble_instance_with_params(
    n: usize,
    m: usize,
    g: usize,
    m1: usize,
    d: usize,
    mode: RedundancyMode,
    seed: u64,
) -> Result<IqpInstance, SchemeError> {
    if g < 2 || g % 2 != 0 {
        return Err(SchemeError::InvalidParams(
            "stabilizer construction needs even g >= 2".into(),
        ));
    }
    if !params_feasible(n, m, g, m1, d) {
        return Err(SchemeError::InvalidParams(format!(
            "(m1, d) = ({m1}, {d}) infeasible for (n, m, g) = ({n}, {m}, {g})"
        )));
    }
    let w = m1 as i64 + n as i64 - g as i64 - m as i64;
    if mode == RedundancyMode::ChallengeLegacy && (d as i64) < w + 1 {
        return Err(SchemeError::InvalidParams(
            "challenge-legacy mode needs d >= w + 1".into(),
        ));
    }
    let mut rng = rng_from_seed(seed);
    let mut last_err = SchemeError::SamplingExhaustion("instance assembly");
    for _ in 0..64 {
        match build_with_params(n, m, g, m1, d, mode, seed, &mut rng) {
            Ok(inst) => return Ok(inst),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

#[allow(clippy::too_many_arguments)]
fn build_with_params<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    g: usize,
    m1: usize,
    d: usize,
    mode: RedundancyMode,
    seed: u64,
    rng: &mut R,
) -> Result<IqpInstance, SchemeError> {
    let params = InstanceParams::new(n, m, g, m1, d);
    let d_block = sample_d(m1, d, rng)?;
    let f_block = sample_f(m1, g, &d_block, rng)?;
    let zero = BitMatrix::zeros(m1, n - g - d);
    let top = BitMatrix::hstack(&[&f_block, &d_block, &zero]);
    let redundant = build_redundancy(&top, &f_block, &params, mode, rng)?;
    let pre_h = BitMatrix::vstack(&[&top, &redundant]);
    debug_assert_eq!(pre_h.rank(), n);
    let pre_secret = BitVector::unit(n, 0);
    let (h, secret, witness) =
        obfuscate_with_witness(&pre_h, &pre_secret, f_block, d_block, redundant, rng);
    Ok(IqpInstance {
        h,
        secret: Some(secret),
        params,
        family: Family::Stabilizer,
        seed,
        witness: Some(witness),
    })
}

fn build_redundancy<R: Rng + ?Sized>(
    top: &BitMatrix,
    f_block: &BitMatrix,
    params: &InstanceParams,
    mode: RedundancyMode,
    rng: &mut R,
) -> Result<BitMatrix, SchemeError> {
    let n = params.n;
    let m2 = params.m2;
    let mut row_space = Subspace::empty(n);
    for i in 0..top.rows() {
        row_space.insert(&top.row_vec(i));
    }
    debug_assert_eq!(row_space.dim(), params.g + params.d);

    let mut rows: Vec<BitVector> = Vec::with_capacity(m2);
    match mode {
        RedundancyMode::Randomized | RedundancyMode::ChallengeLegacy => {
            let target = if mode == RedundancyMode::ChallengeLegacy {
                m2 - 1
            } else {
                m2
            };
            let mut draws = 0usize;
            while row_space.dim() < n {
                if draws > 2000 * n {
                    return Err(SchemeError::SamplingExhaustion("rank completion"));
                }
                draws += 1;
                let v = random_orthogonal_row(n, rng);
                if row_space.insert(&v) {
                    rows.push(v);
                }
            }
            if rows.len() > target {
                return Err(SchemeError::SamplingExhaustion(
                    "redundancy row budget exceeded before full rank",
                ));
            }
            while rows.len() < target {
                rows.push(random_orthogonal_row(n, rng));
            }
            if mode == RedundancyMode::ChallengeLegacy {
                let bad = plant_legacy_dependency(top, f_block, params, &rows, rng)?;
                rows.push(bad);
            }
        }
        RedundancyMode::Published => {
            // Deterministic null-space enumeration order of the secret's
            // orthogonal complement: for s = e¹ this is e², e³, ….
            let s_row = BitMatrix::from_rows(&[BitVector::unit(n, 0)]);
            for cand in s_row.kernel_basis().generators() {
                if row_space.dim() == n {
                    break;
                }
                if row_space.insert(cand) {
                    rows.push(cand.clone());
                }
            }
            if row_space.dim() < n {
                return Err(SchemeError::SamplingExhaustion(
                    "null-space completion fell short of full rank",
                ));
            }
            if rows.len() > m2 {
                return Err(SchemeError::SamplingExhaustion(
                    "redundancy row budget exceeded before full rank",
                ));
            }
            while rows.len() < m2 {
                rows.push(random_orthogonal_row(n, rng));
            }
        }
    }
    Ok(BitMatrix::from_rows(&rows))
}

/// Build the one planted dependent row of `ChallengeLegacy` mode.
///
/// The row is (x|0|0) + Σ_{j∈J} goods[j] with x ≠ 0, x₁ = 0. The functional
/// u = e_bad + 1_J then kills (B|C), so range(B|C) ≠ F₂^m2. Existence of the
/// corresponding extra Gram-kernel class requires ⟨u,u⟩ + xᵀ(FᵀF)⁻¹x = 0,
/// arranged through |J|'s parity; the class is redrawn until its image
/// weight is ≡ 2 mod 4, so that the doubly-even filter can remove it.
fn plant_legacy_dependency<R: Rng + ?Sized>(
    top: &BitMatrix,
    f_block: &BitMatrix,
    params: &InstanceParams,
    goods: &[BitVector],
    rng: &mut R,
) -> Result<BitVector, SchemeError> {
    let n = params.n;
    let g = params.g;
    let m1 = params.m1;
    let f_gram_inv = f_block
        .gram()
        .inverse()
        .expect("F block is non-degenerate by construction");
    for _ in 0..400 {
        let mut x = BitVector::zeros(g);
        for i in 1..g {
            if rng.gen_bool(0.5) {
                x.set(i, true);
            }
        }
        if x.is_zero() {
            continue;
        }
        let tau = x.dot(&f_gram_inv.mat_vec(&x));
        let mut members: Vec<bool> = (0..goods.len()).map(|_| rng.gen_bool(0.5)).collect();
        let parity_needed = !tau; // |J| ≡ 1 + tau (mod 2)
        let parity = members.iter().filter(|&&b| b).count() % 2 == 1;
        if parity != parity_needed {
            let flip = rng.gen_range(0..members.len());
            members[flip] = !members[flip];
        }
        let mut bad = BitVector::zeros(n);
        for i in x.iter_ones() {
            bad.set(i, true);
        }
        for (j, &keep) in members.iter().enumerate() {
            if keep {
                bad.xor_assign(&goods[j]);
            }
        }
        if bad.is_zero() {
            continue;
        }
        // Inspect the resulting Gram kernel: there must be exactly one
        // dependency class, and its image weight must be ≡ 2 mod 4.
        let mut all_rows: Vec<BitVector> = (0..top.rows()).map(|i| top.row_vec(i)).collect();
        all_rows.extend(goods.iter().cloned());
        all_rows.push(bad.clone());
        let h = BitMatrix::from_rows(&all_rows);
        let kernel = h.gram().kernel_basis();
        let mut off_support = 0usize;
        let mut filter_ok = true;
        for v in kernel.generators() {
            let image = h.mat_vec(v);
            let outside = image.iter_ones().any(|i| i >= m1);
            if outside {
                off_support += 1;
                if image.weight() % 4 == 0 {
                    filter_ok = false;
                }
            }
        }
        if off_support >= 1 && filter_ok {
            return Ok(bad);
        }
    }
    Err(SchemeError::SamplingExhaustion("legacy dependency planting"))
}

/// H ← P·H·Q, s ← Q⁻¹·s with P a random row permutation and Q a random
/// invertible mixer. The secret certificate is invariant.
pub fn obfuscate<R: Rng + ?Sized>(
    h: &BitMatrix,
    s: &BitVector,
    rng: &mut R,
) -> (BitMatrix, BitVector) {
    let q = BitMatrix::random_invertible(h.cols(), rng);
    let q_inv = q.inverse().expect("invertible by construction");
    let perm = random_permutation(h.rows(), rng);
    (h.mat_mul(&q).permute_rows(&perm), q_inv.mat_vec(s))
}

fn obfuscate_with_witness<R: Rng + ?Sized>(
    pre_h: &BitMatrix,
    pre_secret: &BitVector,
    f_block: BitMatrix,
    d_block: BitMatrix,
    redundant: BitMatrix,
    rng: &mut R,
) -> (BitMatrix, BitVector, ConstructionWitness) {
    let q = BitMatrix::random_invertible(pre_h.cols(), rng);
    let q_inv = q.inverse().expect("invertible by construction");
    let perm = random_permutation(pre_h.rows(), rng);
    let h = pre_h.mat_mul(&q).permute_rows(&perm);
    let secret = q_inv.mat_vec(pre_secret);
    let witness = ConstructionWitness {
        pre_h: pre_h.clone(),
        pre_secret: pre_secret.clone(),
        f_block,
        d_block,
        redundant,
        row_perm: perm,
        mixer: q,
        mixer_inv: q_inv,
    };
    (h, secret, witness)
}

/// H_s: row i of H multiplied by (H·s)_i, keeping exactly the rows not
/// orthogonal to s.
pub fn scale_rows(h: &BitMatrix, s: &BitVector) -> BitMatrix {
    let hs = h.mat_vec(s);
    let mut out = h.clone();
    for i in 0..h.rows() {
        if !hs.get(i) {
            for w in out.row_mut(i) {
                *w = 0;
            }
        }
    }
    out
}

/// Check the secret conditions for s against H: the code space C_s =
/// range(H_s) must have a nontrivial doubly-even radical of codimension
/// at most `g_max`. Returns the certificate or the failed condition.
pub fn validate_secret(
    h: &BitMatrix,
    s: &BitVector,
    g_max: usize,
) -> Result<SecretCertificate, NotASecret> {
    let hs = h.mat_vec(s);
    if hs.is_zero() {
        return Err(NotASecret::TrivialCode);
    }
    let h_s = scale_rows(h, s);
    let gram = h_s.gram();
    let g_actual = gram.rank();
    if g_actual > g_max {
        return Err(NotASecret::CodimensionTooLarge {
            found: g_actual,
            max: g_max,
        });
    }
    let rad_dim = h_s.rank() - g_actual;
    if rad_dim == 0 {
        return Err(NotASecret::TrivialRadical);
    }
    let radical = radical_of_scaled(&h_s, &gram);
    debug_assert_eq!(radical.dim(), rad_dim);
    if !is_doubly_even_space(&radical) {
        return Err(NotASecret::NotDoublyEven);
    }
    Ok(SecretCertificate {
        g_actual,
        rad_dim,
        rad_doubly_even: true,
        m1_observed: hs.weight(),
    })
}

/// rad C_s = H_s(ker gram(H_s)), the kernel/radical correspondence.
pub fn radical_of_scaled(h_s: &BitMatrix, gram: &BitMatrix) -> Subspace {
    let kernel = gram.kernel_basis();
    Subspace::from_generators(
        h_s.rows(),
        kernel
            .generators()
            .iter()
            .map(|v| h_s.mat_vec(v))
            .collect(),
    )
}

/// Acceptance probability of the hyperplane test on honest samples:
/// Pr[⟨x,s⟩ = 0] = ½(2^(−g/2) + 1).
pub fn bias(g: usize) -> f64 {
    0.5 * (2f64.powf(-(g as f64) / 2.0) + 1.0)
}
