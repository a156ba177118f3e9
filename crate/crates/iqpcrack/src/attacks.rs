//! Secret-extraction attacks against an arbitrary tableau H.
//!
//! Four families: the radical attack (instant, reads the secret off the
//! kernel of the Gram matrix), its doubly-even variant (fixes the failure
//! mode of under-spanned redundancy), the lazy-linearity / double-meyer
//! probe attacks (randomized, tunable), and the razors (redundancy
//! identification via low-weight image vectors).

use crate::f2la::{BitMatrix, BitVector, Subspace};
use crate::rng::rng_from_seed;
use crate::scheme::{scale_rows, validate_secret, InstanceParams, SecretCertificate};
use crate::stats::k_infty;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackConfig {
    /// Ambition A: only kernels of dimension < A are searched.
    pub ambition: usize,
    /// Endurance E: outer iteration budget.
    pub endurance: usize,
    /// Significance threshold on rank(H_xᵀH_x) for accepting a candidate.
    pub g_th: usize,
    /// Number of stacked Gram matrices per double-meyer round.
    pub k: usize,
    /// Bernoulli row-drop probability for the razor.
    pub p: f64,
    pub seed: u64,
    /// Safety valve: a single round never tests more candidates than this.
    pub max_candidates_per_round: u64,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            ambition: 8,
            endurance: 1000,
            g_th: 1,
            k: 6,
            p: 0.25,
            seed: 0,
            max_candidates_per_round: 1 << 20,
        }
    }
}

#[derive(Debug, Error)]
pub enum AttackError {
    #[error("invalid attack config: {0}")]
    InvalidConfig(String),
    #[error("p interval is empty: ({lo:.4}, {hi:.4})")]
    EmptyInterval { lo: f64, hi: f64 },
}

impl AttackConfig {
    pub fn validated(self) -> Result<Self, AttackError> {
        if self.endurance < 1 {
            return Err(AttackError::InvalidConfig("endurance must be >= 1".into()));
        }
        if self.g_th < 1 {
            return Err(AttackError::InvalidConfig("g_th must be >= 1".into()));
        }
        if self.k < 1 {
            return Err(AttackError::InvalidConfig("k must be >= 1".into()));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(AttackError::InvalidConfig("p must be in (0, 1)".into()));
        }
        Ok(self)
    }
}

#[derive(Clone, Debug)]
pub enum AttackOutcome {
    Found {
        secret: BitVector,
        certificate: SecretCertificate,
    },
    Failed,
}

#[derive(Clone, Debug)]
pub struct AttackReport {
    pub outcome: AttackOutcome,
    pub iterations_used: usize,
    /// Observed dim ker per probe (first entry is the plain Gram kernel for
    /// the radical attacks).
    pub kernel_dims: Vec<usize>,
    pub candidates_tested: u64,
    pub wall_time: f64,
}

impl AttackReport {
    pub fn found(&self) -> bool {
        matches!(self.outcome, AttackOutcome::Found { .. })
    }

    pub fn secret(&self) -> Option<&BitVector> {
        match &self.outcome {
            AttackOutcome::Found { secret, .. } => Some(secret),
            AttackOutcome::Failed => None,
        }
    }

    pub fn certificate(&self) -> Option<&SecretCertificate> {
        match &self.outcome {
            AttackOutcome::Found { certificate, .. } => Some(certificate),
            AttackOutcome::Failed => None,
        }
    }
}

struct ReportBuilder {
    start: Instant,
    kernel_dims: Vec<usize>,
    candidates: u64,
    iterations: usize,
}

impl ReportBuilder {
    fn new() -> Self {
        Self {
            start: Instant::now(),
            kernel_dims: Vec::new(),
            candidates: 0,
            iterations: 0,
        }
    }

    fn finish(self, outcome: AttackOutcome) -> AttackReport {
        AttackReport {
            outcome,
            iterations_used: self.iterations,
            kernel_dims: self.kernel_dims,
            candidates_tested: self.candidates,
            wall_time: self.start.elapsed().as_secs_f64(),
        }
    }
}

/// Solve H·s = 1_S for the support S of H·(ker Gram(H)) and validate the
/// result. No tuning parameters; succeeds whenever the Gram kernel maps
/// into the radical with full support on the secret rows.
pub fn radical_attack(h: &BitMatrix) -> AttackReport {
    radical_attack_impl(h, false)
}

/// As `radical_attack`, but restricts to the doubly-even part of
/// H·(ker Gram(H)) before reading supports. On tableaus where the
/// redundancy block fails to span (so the kernel picks up classes outside
/// the radical), the extra classes have singly-even image weight whenever
/// the secret is still recoverable this way; removing them repairs the
/// support. A no-op when the kernel image is already doubly even.
pub fn radical_attack_doubly_even(h: &BitMatrix) -> AttackReport {
    radical_attack_impl(h, true)
}

fn radical_attack_impl(h: &BitMatrix, doubly_even_filter: bool) -> AttackReport {
    let mut rb = ReportBuilder::new();
    rb.iterations = 1;
    let gram = h.gram();
    let kernel = gram.kernel_basis();
    rb.kernel_dims.push(kernel.dim());
    if kernel.dim() == 0 {
        return rb.finish(AttackOutcome::Failed);
    }
    let mut images: Vec<BitVector> = kernel
        .generators()
        .iter()
        .map(|v| h.mat_vec(v))
        .collect();
    if doubly_even_filter {
        images = doubly_even_part(images);
    }
    let image_matrix = BitMatrix::from_columns(&images, h.rows());
    let support = image_matrix.support_of_columns();
    let target = BitVector::from_indices(h.rows(), &support);
    rb.candidates = 1;
    let Some(candidate) = h.solve(&target) else {
        return rb.finish(AttackOutcome::Failed);
    };
    match validate_secret(h, &candidate, usize::MAX) {
        Ok(certificate) => rb.finish(AttackOutcome::Found {
            secret: candidate,
            certificate,
        }),
        Err(_) => rb.finish(AttackOutcome::Failed),
    }
}

/// Generating set of the doubly-even subgroup of the span. Weight mod 4 is
/// additive on a self-orthogonal set (|u+v| = |u|+|v|−2|u∧v| with |u∧v|
/// even), so one singly-even pivot absorbs the others and is then dropped.
fn doubly_even_part(mut gens: Vec<BitVector>) -> Vec<BitVector> {
    debug_assert!(gens.iter().all(|g| g.weight() % 2 == 0));
    let pivot = gens.iter().position(|g| g.weight() % 4 != 0);
    let Some(pi) = pivot else {
        return gens;
    };
    let pivot_vec = gens.remove(pi);
    for g in gens.iter_mut() {
        if g.weight() % 4 != 0 {
            g.xor_assign(&pivot_vec);
        }
    }
    debug_assert!(gens.iter().all(|g| g.weight() % 4 == 0));
    gens
}

/// Probe attack: per round draw a uniform d, and if the Gram kernel of the
/// row-scaled tableau H_d is smaller than the ambition, test every nonzero
/// kernel element against the secret conditions at threshold g_th.
pub fn lazy_linearity_attack(h: &BitMatrix, cfg: &AttackConfig) -> AttackReport {
    let mut rb = ReportBuilder::new();
    let mut rng = rng_from_seed(cfg.seed);
    for round in 0..cfg.endurance {
        rb.iterations = round + 1;
        let d = BitVector::random(h.cols(), &mut rng);
        let g_d = scale_rows(h, &d).gram();
        let kernel = g_d.kernel_basis();
        rb.kernel_dims.push(kernel.dim());
        if kernel.dim() >= cfg.ambition {
            continue;
        }
        if let Some(found) = search_kernel(h, &kernel, cfg, &mut rb) {
            return rb.finish(found);
        }
    }
    rb.finish(AttackOutcome::Failed)
}

fn search_kernel(
    h: &BitMatrix,
    kernel: &Subspace,
    cfg: &AttackConfig,
    rb: &mut ReportBuilder,
) -> Option<AttackOutcome> {
    for x in kernel.iter_nonzero().take(cfg.max_candidates_per_round as usize) {
        rb.candidates += 1;
        if let Ok(certificate) = validate_secret(h, &x, cfg.g_th) {
            return Some(AttackOutcome::Found {
                secret: x,
                certificate,
            });
        }
    }
    None
}

/// Elements whose image under H is guaranteed to lie in the radical when
/// the redundancy spans: free probe seeds for `double_meyer`.
pub fn radical_probe_seeds(h: &BitMatrix) -> Vec<BitVector> {
    h.gram().kernel_basis().generators().to_vec()
}

/// Runs k linearity probes at once: the kernels of the per-probe Gram
/// matrices are intersected by stacking, shrinking the search space
/// exponentially in k. Optional seed probes (from `radical_probe_seeds`)
/// are prepended to every round at no cost against k.
pub fn double_meyer(
    h: &BitMatrix,
    cfg: &AttackConfig,
    seeds: Option<&[BitVector]>,
) -> AttackReport {
    let mut rb = ReportBuilder::new();
    let mut rng = rng_from_seed(cfg.seed);
    let seed_grams: Vec<BitMatrix> = seeds
        .unwrap_or(&[])
        .iter()
        .map(|v| {
            assert_eq!(v.len(), h.cols(), "seed probe length mismatch");
            scale_rows(h, v).gram()
        })
        .collect();
    for round in 0..cfg.endurance {
        rb.iterations = round + 1;
        let mut grams: Vec<BitMatrix> = Vec::with_capacity(cfg.k + seed_grams.len());
        grams.extend(seed_grams.iter().cloned());
        for _ in 0..cfg.k {
            let d = BitVector::random(h.cols(), &mut rng);
            grams.push(scale_rows(h, &d).gram());
        }
        let refs: Vec<&BitMatrix> = grams.iter().collect();
        let stacked = BitMatrix::vstack(&refs);
        let kernel = stacked.kernel_basis();
        rb.kernel_dims.push(kernel.dim());
        if kernel.dim() >= cfg.ambition {
            continue;
        }
        if let Some(found) = search_kernel(h, &kernel, cfg, &mut rb) {
            return rb.finish(found);
        }
    }
    rb.finish(AttackOutcome::Failed)
}

/// Escalate g_th from 1 upward and halt at the first validated secret, so
/// that slack between threshold and true codimension cannot misidentify an
/// alternative secret.
pub fn with_gth_escalation(
    h: &BitMatrix,
    cfg: &AttackConfig,
    g_max: usize,
    attack: impl Fn(&BitMatrix, &AttackConfig) -> AttackReport,
) -> AttackReport {
    let mut merged: Option<AttackReport> = None;
    for g_th in 1..=g_max {
        let mut round_cfg = cfg.clone();
        round_cfg.g_th = g_th;
        let report = attack(h, &round_cfg);
        let done = report.found();
        merged = Some(match merged {
            None => report,
            Some(mut acc) => {
                acc.iterations_used += report.iterations_used;
                acc.candidates_tested += report.candidates_tested;
                acc.kernel_dims.extend(report.kernel_dims);
                acc.wall_time += report.wall_time;
                acc.outcome = report.outcome;
                acc
            }
        });
        if done {
            break;
        }
    }
    merged.expect("g_max >= 1")
}

/// All row indices i for which H·d = e^i is solvable, plus H with those
/// rows deleted. Singletons certify redundant rows: when the range of the
/// radical block has full support, no secret row can be a singleton.
pub fn singleton_razor(h: &BitMatrix) -> (BitMatrix, Vec<usize>) {
    let ech = crate::f2la::Echelon::factor(h);
    let mut singletons = Vec::new();
    for i in 0..h.rows() {
        let target = BitVector::unit(h.rows(), i);
        if ech.solve(&target).is_some() {
            singletons.push(i);
        }
    }
    (h.drop_rows(&singletons), singletons)
}

/// Identify the redundant-row set by accumulating supports of kernels of
/// randomly row-dropped tableaus, then solve H·s = 1 on the complement.
/// Each round drops every row independently with probability p; kernel
/// vectors of the surviving rows have images supported on dropped rows,
/// and for suitable p only on dropped *redundant* rows.
pub fn hamming_razor(h: &BitMatrix, cfg: &AttackConfig) -> AttackReport {
    let mut rb = ReportBuilder::new();
    let mut rng = rng_from_seed(cfg.seed);
    let m = h.rows();
    let mut shaved = BitVector::zeros(m);
    let mut dirty = false;
    for round in 0..cfg.endurance {
        rb.iterations = round + 1;
        let drop_mask = BitVector::random_bernoulli(m, cfg.p, &mut rng);
        let mut masked = h.clone();
        for i in drop_mask.iter_ones() {
            for w in masked.row_mut(i) {
                *w = 0;
            }
        }
        let kernel = masked.kernel_basis();
        rb.kernel_dims.push(kernel.dim());
        // Accumulate supports of the kernel images.
        for v in kernel.generators() {
            for i in h.mat_vec(v).iter_ones() {
                if !shaved.get(i) {
                    shaved.set(i, true);
                    dirty = true;
                }
            }
        }
        if dirty && kernel.dim() > 0 {
            dirty = false;
            let mut target = BitVector::ones(m);
            target.xor_assign(&shaved);
            rb.candidates += 1;
            if let Some(candidate) = h.solve(&target) {
                if let Ok(certificate) = validate_secret(h, &candidate, cfg.g_th) {
                    return rb.finish(AttackOutcome::Found {
                        secret: candidate,
                        certificate,
                    });
                }
            }
        }
    }
    // Final attempt even if the last rounds added nothing.
    let mut target = BitVector::ones(m);
    target.xor_assign(&shaved);
    rb.candidates += 1;
    if let Some(candidate) = h.solve(&target) {
        if let Ok(certificate) = validate_secret(h, &candidate, cfg.g_th) {
            return rb.finish(AttackOutcome::Found {
                secret: candidate,
                certificate,
            });
        }
    }
    rb.finish(AttackOutcome::Failed)
}

/// Admissible drop-probability interval for the razor: p·m2 must exceed the
/// redundancy co-rank while p·m1 stays below the minimum-weight scale k_∞
/// of the secret-row code.
pub fn suggest_p(params: &InstanceParams) -> Result<(f64, f64), AttackError> {
    let h = params.m1 as f64 - params.g as f64 - params.d as f64;
    let (_, k_limit, _) = k_infty(params.m1 as f64, h);
    let hi = k_limit / params.m1 as f64;
    let lo = if params.m2 == 0 {
        0.0
    } else {
        let c_rank = params.n as f64 - params.g as f64 - params.d as f64;
        (1.0 - c_rank / params.m2 as f64).max(0.0)
    };
    if lo >= hi {
        return Err(AttackError::EmptyInterval { lo, hi });
    }
    Ok((lo, hi))
}
