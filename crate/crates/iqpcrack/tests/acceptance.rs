//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured numbers (run with `cargo test --test acceptance --
//! --nocapture` to see them on success).

mod common;

use common::*;
use iqpcrack::attacks::{
    double_meyer, hamming_razor, radical_attack, radical_attack_doubly_even, singleton_razor,
    AttackConfig,
};
use iqpcrack::cli::formats;
use iqpcrack::f2la::{BitMatrix, BitVector, Subspace};
use iqpcrack::qrc::{build_qrc_instance, QrcParams};
use iqpcrack::rng::{derive_seed, rng_from_seed};
use iqpcrack::scheme::{
    assemble_instance, assemble_instance_with_params, bias, radical_of_scaled, sample_d,
    sample_parameters, scale_rows, validate_secret, IqpInstance, RedundancyMode,
};
use iqpcrack::sim::{bias_of, simulate};
use iqpcrack::stats::{
    fit_slope, half_success_width, rho, run_kernel_stats, run_qrc_sweep, run_sigmoid_experiment,
    summarize_by_w, umpu_binomial_region, AttackSpec, ExperimentRecord, RHO_TOL,
};
use rand::Rng;
use std::sync::LazyLock;
use std::time::Instant;

const MASTER_SEED: u64 = 20260810;

struct SigmoidRun {
    records: Vec<ExperimentRecord>,
    elapsed_s: f64,
}

/// 1000 challenge-shaped instances attacked once, shared by criteria 1, 2
/// and 9's singleton check.
static SIGMOID: LazyLock<SigmoidRun> = LazyLock::new(|| {
    let start = Instant::now();
    let records = run_sigmoid_experiment(300, 360, 4, 1000, MASTER_SEED);
    SigmoidRun {
        records,
        elapsed_s: start.elapsed().as_secs_f64(),
    }
});

/// Extra instances steered into the low-w transition region, where the
/// unconditioned sampler rarely lands; parameter pairs are drawn from the
/// true conditional distribution (rejection on w), so per-w statistics stay
/// unbiased.
static LOW_W: LazyLock<Vec<ExperimentRecord>> = LazyLock::new(|| {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, 0xFEED));
    let mut records = Vec::new();
    let mut have_very_low = 0;
    let mut index = 0u64;
    while records.len() < 40 || have_very_low < 6 {
        let (m1, d) = sample_parameters(300, 360, 4, &mut rng).unwrap();
        let w = m1 as i64 - 64;
        if w > 8 {
            continue;
        }
        index += 1;
        let seed = derive_seed(MASTER_SEED, 0xB000 + index);
        let inst =
            assemble_instance_with_params(300, 360, 4, m1, d, RedundancyMode::Randomized, seed)
                .unwrap();
        let report = radical_attack(&inst.h);
        let recovered = report.secret() == inst.secret.as_ref();
        if w <= 4 {
            have_very_low += 1;
        }
        records.push(record_stub(&inst, recovered, seed));
        assert!(index < 4000, "low-w steering ran away");
    }
    records
});

fn record_stub(inst: &IqpInstance, recovered: bool, seed: u64) -> ExperimentRecord {
    ExperimentRecord {
        family: inst.family.to_string(),
        q: None,
        n: inst.params.n,
        m: inst.params.m,
        g: inst.params.g,
        m1: inst.params.m1,
        m2: inst.params.m2,
        d: inst.params.d,
        w: inst.params.excess_width(),
        attack: "radical".into(),
        found: recovered,
        recovered_planted: recovered,
        iterations: 1,
        candidates: 1,
        kernel_dim_first: None,
        kernel_dim_mean: 0.0,
        master_seed: MASTER_SEED,
        instance_seed: seed,
        wall_time_s: 0.0,
    }
}

#[test]
fn criterion_1_radical_success_rate() {
    let run = &*SIGMOID;
    let recovered = run.records.iter().filter(|r| r.recovered_planted).count();
    let wide_failures = run
        .records
        .iter()
        .filter(|r| !r.recovered_planted && r.w > 18)
        .count();
    assert!(
        recovered >= 990,
        "criterion 1: only {recovered}/1000 instances recovered"
    );
    assert_eq!(
        wide_failures, 0,
        "criterion 1: radical attack failed on instances with w > 18"
    );
    assert!(
        run.elapsed_s < 600.0,
        "criterion 1: {:.1}s exceeds the 10-minute budget",
        run.elapsed_s
    );
    println!(
        "ACCEPTANCE 1 (radical success at (300,360,4)): {recovered}/1000 recovered, \
         0 failures with w > 18, {:.1}s — PASS",
        run.elapsed_s
    );
}

#[test]
fn criterion_2_sigmoid_agreement() {
    let mut records = SIGMOID.records.clone();
    records.extend(LOW_W.iter().cloned());
    let summary = summarize_by_w(&records, 0.05);

    let populated: Vec<_> = summary.iter().filter(|row| row.trials >= 20).collect();
    assert!(!populated.is_empty(), "criterion 2: no bins with >= 20 samples");
    let passing = populated.iter().filter(|row| row.pass).count();
    let pass_rate = passing as f64 / populated.len() as f64;
    assert!(
        pass_rate >= 0.90,
        "criterion 2: only {passing}/{} populated bins inside their UMPU regions",
        populated.len()
    );

    let w_half = half_success_width(300, 360, 4);
    assert!(
        w_half > 5.0 && w_half < 8.0,
        "criterion 2: transition at w = {w_half}, outside (5, 8)"
    );
    let pooled = |lo: i64, hi: i64| {
        let of: Vec<_> = records.iter().filter(|r| r.w >= lo && r.w <= hi).collect();
        let ok = of.iter().filter(|r| r.recovered_planted).count();
        (ok, of.len())
    };
    let (low_ok, low_n) = pooled(i64::MIN, 4);
    let (high_ok, high_n) = pooled(9, i64::MAX);
    assert!(low_n >= 5 && high_n >= 100, "criterion 2: thin transition pools");
    let low_rate = low_ok as f64 / low_n as f64;
    let high_rate = high_ok as f64 / high_n as f64;
    assert!(
        low_rate < 0.5 && high_rate > 0.5,
        "criterion 2: transition not bracketed, rates {low_rate:.2} / {high_rate:.2}"
    );
    println!(
        "ACCEPTANCE 2 (sigmoid agreement): {passing}/{} bins pass UMPU, w_half = {w_half:.2} in (5,8), \
         success {low_rate:.2} below w=5 vs {high_rate:.2} above w=8 — PASS",
        populated.len()
    );
}

#[test]
fn criterion_3_qrc_resilience() {
    for q in [103usize, 127] {
        let r = (q + 1) / 2;
        let n = q + r;
        let mut recovered = 0;
        for i in 0..100u64 {
            let seed = derive_seed(MASTER_SEED, 0x3000 + (q as u64) * 1000 + i);
            let inst = build_qrc_instance(QrcParams::new(q, n).unwrap(), seed).unwrap();
            let report = radical_attack(&inst.h);
            if report.secret() == inst.secret.as_ref() {
                recovered += 1;
            }
        }
        assert_eq!(
            recovered, 100,
            "criterion 3: radical attack lost {} q={q} instances",
            100 - recovered
        );
        println!("ACCEPTANCE 3 (QRC resilience q={q}, n={n}): {recovered}/100 — PASS");
    }
}

#[test]
fn criterion_4_coverage_union() {
    let grid = [52usize, 65, 78, 91, 104, 117, 130, 143, 155];
    let lazy_cfg = AttackConfig {
        ambition: 8,
        endurance: 1000,
        g_th: 1,
        seed: MASTER_SEED,
        ..AttackConfig::default()
    };
    let attacks = vec![AttackSpec::Radical, AttackSpec::Lazy(lazy_cfg)];
    let records = run_qrc_sweep(103, &grid, &attacks, 20, derive_seed(MASTER_SEED, 4));
    for &n in &grid {
        let radical: Vec<bool> = records
            .iter()
            .filter(|r| r.n == n && r.attack == "radical")
            .map(|r| r.recovered_planted)
            .collect();
        let lazy: Vec<bool> = records
            .iter()
            .filter(|r| r.n == n && r.attack == "lazy")
            .map(|r| r.recovered_planted)
            .collect();
        assert_eq!(radical.len(), 20);
        assert_eq!(lazy.len(), 20);
        let union = radical.iter().zip(&lazy).filter(|(a, b)| **a || **b).count();
        assert_eq!(
            union, 20,
            "criterion 4: instance at n = {n} solved by neither attack"
        );
    }
    println!(
        "ACCEPTANCE 4 (coverage union q=103, {} widths x 20): every instance solved by \
         radical or lazy — PASS",
        grid.len()
    );
}

/// §-level note: the source text states "E = 8, A = 1000" for this
/// configuration while naming E the iteration budget and A the kernel-dim
/// threshold. Read literally that means 8 rounds with an always-true
/// threshold, whose success probability per instance is 1−(1−2^{−gk})^8 ≈
/// 12% (measured 3/20) — irreconcilable with the claimed 100% and with the
/// companion claim that the expected round count is 2^{gk} = 64. The roles
/// are evidently swapped; the test runs 1000 rounds at threshold 8.
#[test]
fn criterion_5_double_meyer_extended_qrc() {
    let widths = [52usize, 86, 120, 155];
    let cfg = AttackConfig {
        ambition: 8,
        endurance: 1000,
        g_th: 1,
        k: 6,
        ..AttackConfig::default()
    };
    for &n in &widths {
        let mut recovered = 0;
        for i in 0..20u64 {
            let seed = derive_seed(MASTER_SEED, 0x5000 + (n as u64) * 100 + i);
            let inst = build_qrc_instance(QrcParams::new(103, n).unwrap(), seed).unwrap();
            let mut c = cfg.clone();
            c.seed = derive_seed(seed, 1);
            let report = double_meyer(&inst.h, &c, None);
            if report.secret() == inst.secret.as_ref() {
                recovered += 1;
            }
        }
        assert_eq!(
            recovered, 20,
            "criterion 5: double meyer lost instances at n = {n}"
        );
    }
    println!(
        "ACCEPTANCE 5 (double meyer on extended QRC, k=6 g_th=1, {} widths x 20): 100% — PASS",
        widths.len()
    );
}

#[test]
fn criterion_6_kernel_statistics() {
    let grid = [104usize, 117, 130, 143, 155];
    let stats = run_kernel_stats(103, &grid, &[2, 3, 4], 6, 25, derive_seed(MASTER_SEED, 6));
    let ns: Vec<f64> = stats.per_n.iter().map(|r| r.n as f64).collect();
    let gram_dims: Vec<f64> = stats.per_n.iter().map(|r| r.mean_dim_gram).collect();
    let quotients: Vec<f64> = stats.per_n.iter().map(|r| r.mean_quotient).collect();

    let slope = fit_slope(&ns, &gram_dims);
    assert!(
        (0.9..=1.1).contains(&slope),
        "criterion 6: dim ker G_d slope {slope} outside [0.9, 1.1]"
    );
    let flat = fit_slope(&ns, &quotients);
    assert!(
        flat.abs() < 0.1,
        "criterion 6: quotient dimension trends with n (slope {flat})"
    );
    for row in &stats.stacked {
        let ratio = row.mean_dim / row.prediction;
        assert!(
            (0.5..=2.0).contains(&ratio),
            "criterion 6: stacked kernel at k={} off prediction by {ratio}",
            row.k
        );
    }
    println!(
        "ACCEPTANCE 6 (kernel statistics): dim ker G_d slope {slope:.3}, quotient slope {flat:.4}, \
         stacked ratios {:?} — PASS",
        stats
            .stacked
            .iter()
            .map(|r| (r.k, (r.mean_dim / r.prediction * 100.0).round() / 100.0))
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_7_simulator_oracle() {
    // Exact bias on 100 small planted instances.
    let shapes = [(8usize, 18usize), (10, 20), (12, 24)];
    let mut checked = 0;
    let mut index = 0u64;
    while checked < 100 {
        index += 1;
        let (n, m) = shapes[(index as usize) % shapes.len()];
        let seed = derive_seed(MASTER_SEED, 0x7000 + index);
        let Ok(inst) = assemble_instance(n, m, 2, RedundancyMode::Randomized, seed) else {
            continue;
        };
        let dist = simulate(&inst.h).unwrap();
        let s = inst.secret.as_ref().unwrap();
        let observed = bias_of(&dist, s);
        let expected = bias(inst.params.g);
        assert!(
            (observed - expected).abs() < 1e-9,
            "criterion 7: bias {observed} vs {expected} at seed {seed}"
        );
        checked += 1;
        assert!(index < 500, "criterion 7: generation kept failing");
    }

    // Alternative secrets: s ⊕ u with H·u = e^j for a singleton j carries
    // codimension g + s' and must show the matching weaker bias exactly.
    let mut alternates = 0;
    let mut tried = 0u64;
    while alternates < 10 && tried < 400 {
        tried += 1;
        let seed = derive_seed(MASTER_SEED, 0x7700 + tried);
        let Ok(inst) = assemble_instance(10, 20, 2, RedundancyMode::Randomized, seed) else {
            continue;
        };
        let s = inst.secret.as_ref().unwrap();
        let (_, singles) = singleton_razor(&inst.h);
        let Some(&j) = singles.first() else { continue };
        let u = inst.h.solve(&BitVector::unit(inst.h.rows(), j)).unwrap();
        if u.is_zero() {
            continue;
        }
        let v = s.xor(&u);
        let Ok(cert) = validate_secret(&inst.h, &v, usize::MAX) else {
            continue;
        };
        if cert.g_actual <= inst.params.g {
            continue;
        }
        let dist = simulate(&inst.h).unwrap();
        let observed = bias_of(&dist, &v);
        let expected = bias(cert.g_actual);
        assert!(
            (observed - expected).abs() < 1e-9,
            "criterion 7: alternative-secret bias {observed} vs {expected} (g' = {})",
            cert.g_actual
        );
        alternates += 1;
    }
    assert!(
        alternates >= 10,
        "criterion 7: only {alternates} alternative secrets constructed"
    );
    println!(
        "ACCEPTANCE 7 (simulator oracle): 100 planted biases exact at 1e-9, \
         {alternates} alternative-secret biases exact — PASS"
    );
}

/// Known-defective sub-clause, kept as stated: the claimed bounds
/// 2^{−w} ≤ ρ(w) ≤ 2^{−w+1} contradict the companion requirement
/// ρ(7)·2⁷ → 1⁻ for the pinned product ρ(w) = 1 − ∏_{i>w}(1 − 2^{−i}),
/// whose true envelope is 2^{−w−1} ≤ ρ(w) < 2^{−w}. The lower bound as
/// stated fails for every w; see the repository notes. This test is
/// expected to fail and documents the defect; the attainable sub-clauses
/// are criterion_8_rho_approximation_and_rank_frequency.
#[test]
fn criterion_8_rho_bounds_as_stated() {
    let mut violations = Vec::new();
    for w in 0..=30u32 {
        let value = rho(w as usize, RHO_TOL);
        let lo = 2f64.powi(-(w as i32));
        let hi = 2f64.powi(1 - w as i32);
        if !(lo <= value && value <= hi) {
            violations.push((w, value, lo));
        }
    }
    assert!(
        violations.is_empty(),
        "criterion 8 (bounds sub-clause) fails as stated: 2^-w <= rho(w) does not hold for any w \
         (e.g. w=0: rho = {:.6} < 1; w=7: rho·2^7 = {:.6} < 1); the stated lower bound is off by \
         a factor of 2 and contradicts the same criterion's rho(7)·2^7 ≈ 1 clause — defect \
         recorded, all other sub-clauses pass",
        rho(0, RHO_TOL),
        rho(7, RHO_TOL) * 128.0
    );
}

#[test]
fn criterion_8_rho_approximation_and_rank_frequency() {
    let approx = rho(7, RHO_TOL) * 128.0;
    assert!(
        (approx - 1.0).abs() < 0.02,
        "criterion 8: rho(7)·2^7 = {approx}"
    );

    let trials = 10_000u64;
    let k = 200usize;
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, 8));
    for w in [0usize, 2, 5] {
        let mut full = 0u64;
        for _ in 0..trials {
            let m = BitMatrix::random(k, k + w, &mut rng);
            if m.rank() == k {
                full += 1;
            }
        }
        let p0 = 1.0 - rho(w, RHO_TOL);
        let (lo, hi) = umpu_binomial_region(trials, p0, 0.05);
        assert!(
            full >= lo && full <= hi,
            "criterion 8: full-rank count {full} outside UMPU region [{lo}, {hi}] at w={w} \
             (theory p = {p0:.5})"
        );
        println!(
            "ACCEPTANCE 8 (rank frequency w={w}): {full}/{trials} in [{lo}, {hi}], theory {p0:.5} — PASS"
        );
    }
    println!("ACCEPTANCE 8 (rho approximation): |rho(7)·2^7 − 1| = {:.4} < 0.02 — PASS",
        (approx - 1.0).abs());
}

#[test]
fn criterion_9_razor_and_singletons() {
    // Hamming's Razor on 100 legacy-mode challenge-shaped instances.
    let mut recovered = 0;
    for i in 0..100u64 {
        let seed = derive_seed(MASTER_SEED, 0x9000 + i);
        let inst =
            assemble_instance(300, 360, 4, RedundancyMode::ChallengeLegacy, seed).unwrap();
        let cfg = AttackConfig {
            p: 0.25,
            endurance: 60,
            g_th: 4,
            seed: derive_seed(seed, 9),
            ..AttackConfig::default()
        };
        let report = hamming_razor(&inst.h, &cfg);
        if report.secret() == inst.secret.as_ref() {
            recovered += 1;
        }
    }
    assert!(
        recovered >= 95,
        "criterion 9: razor recovered only {recovered}/100 legacy instances"
    );

    // Singleton sets never touch planted secret rows when the radical block
    // has full support; instances are regenerated bit-exactly from their
    // recorded seeds.
    let mut checked = 0;
    for record in SIGMOID.records.iter().take(100) {
        let inst = assemble_instance(
            record.n,
            record.m,
            record.g,
            RedundancyMode::Randomized,
            record.instance_seed,
        )
        .unwrap();
        assert_eq!(inst.params.m1, record.m1, "record not reproducible");
        let w = inst.witness.as_ref().unwrap();
        if w.d_block.support_of_columns().len() != inst.params.m1 {
            continue;
        }
        let (_, singles) = singleton_razor(&inst.h);
        let secret_rows: std::collections::HashSet<usize> =
            w.secret_rows().into_iter().collect();
        for s in &singles {
            assert!(
                !secret_rows.contains(s),
                "criterion 9: singleton {s} is a secret row"
            );
        }
        checked += 1;
    }
    assert!(checked >= 90, "criterion 9: too few full-support instances");
    println!(
        "ACCEPTANCE 9 (razor + singletons): razor {recovered}/100 on legacy instances, \
         singleton sets disjoint from secret rows on {checked} instances — PASS"
    );
}

/// The literal challenge-file figures are only checkable against the
/// upstream data set; point IQP_CHALLENGE_MATRIX at it to enable this.
#[test]
fn criterion_9_challenge_file_figures() {
    let Ok(path) = std::env::var("IQP_CHALLENGE_MATRIX") else {
        println!(
            "ACCEPTANCE 9 (challenge-file figures): SKIPPED — set IQP_CHALLENGE_MATRIX to the \
             upstream tableau file to verify 69 singletons, dim ker G = 34, (g, d, m1) = \
             (4, 35, 96) and the published base64 secret"
        );
        return;
    };
    let text = std::fs::read_to_string(&path).expect("reading challenge matrix");
    let h = formats::parse_matrix_compat(&text).expect("parsing challenge matrix");
    assert_eq!(h.gram().kernel_basis().dim(), 34, "dim ker G");
    let (_, singles) = singleton_razor(&h);
    assert_eq!(singles.len(), 69, "singleton count");
    let report = radical_attack_doubly_even(&h);
    let secret = report.secret().expect("doubly-even radical attack must succeed");
    let cert = report.certificate().unwrap();
    assert_eq!((cert.g_actual, cert.rad_dim, cert.m1_observed), (4, 35, 96));
    let encoded = formats::emit_secret(secret);
    assert_eq!(
        encoded.lines().next().unwrap(),
        "cyCxfXKxLxXu3YWND2fSzf+YKtZJFLWY1J0l2rBao0A5zVWRSKA=",
        "published challenge secret"
    );
    println!("ACCEPTANCE 9 (challenge-file figures): verified against {path} — PASS");
}

#[test]
fn criterion_10_oracle_equivalence() {
    let mut rng = rng_from_seed(derive_seed(MASTER_SEED, 10));

    // All packed-word operations against the naive reference, 500 cases.
    for case in 0..500 {
        let rows = rng.gen_range(1..=24);
        let cols = rng.gen_range(1..=24);
        let a = random_naive(rows, cols, &mut rng);
        let fast = from_naive(&a, cols);

        assert_eq!(to_naive(&fast), a, "case {case}: roundtrip");
        assert_eq!(to_naive(&fast.transpose()), naive_transpose(&a));
        assert_eq!(fast.rank(), naive_rank(&a));
        assert_eq!(to_naive(&fast.gram()), naive_gram(&a));

        let inner = cols;
        let cols2 = rng.gen_range(1..=16);
        let b = random_naive(inner, cols2, &mut rng);
        assert_eq!(
            to_naive(&fast.mat_mul(&from_naive(&b, cols2))),
            naive_mul(&a, &b)
        );

        let x = random_naive_vec(cols, &mut rng);
        assert_eq!(
            to_naive_vec(&fast.mat_vec(&from_naive_vec(&x))),
            naive_mat_vec(&a, &x)
        );

        // Kernel: dimensions and double inclusion of spans.
        let kernel = fast.kernel_basis();
        let naive_k = naive_kernel(&a);
        assert_eq!(kernel.dim(), naive_k.len(), "case {case}: kernel dim");
        for v in kernel.generators() {
            let nv = to_naive_vec(v);
            assert!(naive_weight(&naive_mat_vec(&a, &nv)) == 0);
            assert!(naive_in_span(&naive_k, &nv));
        }
        for nv in &naive_k {
            assert!(kernel.contains(&from_naive_vec(nv)));
        }

        // Solvable system: both sides agree and verify.
        let b_target = naive_mat_vec(&a, &x);
        let solved = fast.solve(&from_naive_vec(&b_target)).expect("solvable");
        assert_eq!(to_naive_vec(&fast.mat_vec(&solved)), b_target);
        // Random right-hand side: agreement on solvability.
        let b_rand = random_naive_vec(rows, &mut rng);
        let ours = fast.solve(&from_naive_vec(&b_rand));
        let theirs = naive_solve(&a, &b_rand);
        assert_eq!(ours.is_some(), theirs.is_some(), "case {case}: solvability");
        if let Some(sol) = ours {
            assert_eq!(to_naive_vec(&fast.mat_vec(&sol)), b_rand);
        }
    }

    // Subspace lattice operations against exhaustive enumeration, dim ≤ 12.
    for _ in 0..60 {
        let ambient = rng.gen_range(2..=12);
        let gu: Vec<NVec> = (0..rng.gen_range(1..=5))
            .map(|_| random_naive_vec(ambient, &mut rng))
            .collect();
        let gv: Vec<NVec> = (0..rng.gen_range(1..=5))
            .map(|_| random_naive_vec(ambient, &mut rng))
            .collect();
        let u = Subspace::from_generators(ambient, gu.iter().map(from_naive_vec).collect());
        let v = Subspace::from_generators(ambient, gv.iter().map(from_naive_vec).collect());
        let span_u = enumerate_span(&gu, ambient);
        let span_v = enumerate_span(&gv, ambient);

        let inter = u.intersection(&v);
        let expected_inter: std::collections::HashSet<NVec> =
            span_u.intersection(&span_v).cloned().collect();
        assert_eq!(1usize << inter.dim(), expected_inter.len());
        for x in inter.iter_nonzero() {
            assert!(expected_inter.contains(&to_naive_vec(&x)));
        }

        let sum = u.sum(&v);
        let mut union_gens = gu.clone();
        union_gens.extend(gv.clone());
        let expected_sum = enumerate_span(&union_gens, ambient);
        assert_eq!(1usize << sum.dim(), expected_sum.len());
        assert_eq!(
            inter.dim() + sum.dim(),
            u.dim() + v.dim(),
            "modular dimension law"
        );

        let probe = random_naive_vec(ambient, &mut rng);
        assert_eq!(
            u.contains(&from_naive_vec(&probe)),
            span_u.contains(&probe)
        );
    }

    // Doubly-even certificate against exhaustive span enumeration.
    let mut doubly_even_positives = 0;
    for round in 0..60 {
        let (space, ambient) = if round % 2 == 0 {
            let m1 = 4 + 4 * rng.gen_range(1..=3);
            let d = rng.gen_range(1..=3.min(m1 / 4));
            let block = sample_d(m1, d, &mut rng).unwrap();
            (Subspace::from_columns(&block), m1)
        } else {
            let ambient = rng.gen_range(4..=16);
            let gens: Vec<BitVector> = (0..rng.gen_range(1..=4))
                .map(|_| BitVector::random(ambient, &mut rng))
                .collect();
            (Subspace::from_generators(ambient, gens), ambient)
        };
        let claimed = iqpcrack::f2la::is_doubly_even_space(&space);
        let gens: Vec<NVec> = space.generators().iter().map(to_naive_vec).collect();
        let exhaustive = enumerate_span(&gens, ambient)
            .iter()
            .all(|v| naive_weight(v) % 4 == 0);
        assert_eq!(claimed, exhaustive);
        if claimed {
            doubly_even_positives += 1;
        }
    }
    assert!(doubly_even_positives >= 20, "doubly-even check never exercised positively");

    // Kernel/radical correspondence, exhaustive on 12×8 tableaus.
    for _ in 0..20 {
        let h = BitMatrix::random(12, 8, &mut rng);
        let gram = h.gram();
        let kernel = gram.kernel_basis();
        for v in kernel.generators() {
            let image = h.mat_vec(v);
            for j in 0..h.cols() {
                assert!(!image.dot(&h.col_vec(j)), "kernel image not orthogonal to range");
            }
        }
        for x in 0u32..256 {
            let v = BitVector::from_bools(&(0..8).map(|i| x >> i & 1 == 1).collect::<Vec<_>>());
            let image = h.mat_vec(&v);
            let orthogonal = (0..h.cols()).all(|j| !image.dot(&h.col_vec(j)));
            assert_eq!(orthogonal, kernel.contains(&v));
        }
    }

    // Linearity lemma, exhaustive over all probes on small instances.
    let mut premise_hits = 0usize;
    for (n, m, seed_base) in [(12usize, 26usize, 0x10A0u64), (14, 28, 0x10B0)] {
        let inst = assemble_instance(n, m, 2, RedundancyMode::Randomized, seed_base).unwrap();
        let h = &inst.h;
        let s = inst.secret.as_ref().unwrap();
        let hs = h.mat_vec(s);
        let h_s = scale_rows(h, s);
        let radical = radical_of_scaled(&h_s, &h_s.gram());
        for x in 0u64..(1u64 << n) {
            let d = BitVector::from_bools(
                &(0..n).map(|i| x >> i & 1 == 1).collect::<Vec<_>>(),
            );
            let image = h_s.mat_vec(&d);
            if radical.contains(&image) {
                premise_hits += 1;
                // s must lie in ker Gram(H_d): H_dᵀ(H_d·s) = 0, where
                // H_d·s is (H·d) ∧ (H·s).
                let masked = h.mat_vec(&d).and(&hs);
                assert!(
                    h.left_mul(&masked).is_zero(),
                    "linearity lemma violated at n={n}, probe {x}"
                );
            }
        }
    }
    assert!(premise_hits > 1000, "linearity-lemma premise rarely held");
    println!(
        "ACCEPTANCE 10 (oracle equivalence): 500 randomized op checks, exhaustive subspace \
         lattice + doubly-even + kernel/radical checks, linearity lemma over all probes \
         ({premise_hits} premise hits) — PASS"
    );
}
