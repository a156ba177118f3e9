// Dev probes for calibrating acceptance tests. Not part of the test suite.
use iqpcrack::attacks::*;
use iqpcrack::qrc::*;
use iqpcrack::rng::*;
use iqpcrack::scheme::*;
use iqpcrack::stats::*;
use std::collections::HashMap;
use std::time::Instant;

fn main() {
    let which = std::env::args().nth(1).unwrap_or_default();
    match which.as_str() {
        "mode" => param_mode(),
        "radical" => radical_rate(),
        "legacy" => legacy_rate(),
        "kernels" => kernel_dims(),
        "meyer" => double_meyer_readings(),
        "razor" => razor_rate(),
        "coverage" => coverage(),
        "meyer5" => meyer_planted(),
        other => eprintln!("unknown probe {other}"),
    }
}

fn param_mode() {
    let mut rng = rng_from_seed(20260810);
    let mut counts: HashMap<(usize, usize), u32> = HashMap::new();
    let mut w_sum = 0f64;
    let mut w_gt18 = 0u32;
    let total = 100_000;
    let t0 = Instant::now();
    for _ in 0..total {
        let (m1, d) = sample_parameters(300, 360, 4, &mut rng).unwrap();
        *counts.entry((m1, d)).or_default() += 1;
        let w = m1 as f64 - 64.0;
        w_sum += w;
        if w > 18.0 {
            w_gt18 += 1;
        }
    }
    let mut top: Vec<_> = counts.into_iter().collect();
    top.sort_by_key(|&(_, c)| std::cmp::Reverse(c));
    println!("10^5 draws in {:?}", t0.elapsed());
    println!("mean w = {:.2}  P[w>18] = {:.4}", w_sum / total as f64, w_gt18 as f64 / total as f64);
    for ((m1, d), c) in top.iter().take(8) {
        println!("  (m1={m1}, d={d}): {c}");
    }
}

fn radical_rate() {
    let t0 = Instant::now();
    let records = run_sigmoid_experiment(300, 360, 4, 1000, 42);
    let ok = records.iter().filter(|r| r.recovered_planted).count();
    let fail_w: Vec<i64> = records.iter().filter(|r| !r.recovered_planted).map(|r| r.w).collect();
    println!("1000 instances in {:?}: {} recovered", t0.elapsed(), ok);
    println!("failure widths: {fail_w:?}");
    let big_w_failures = records.iter().filter(|r| !r.recovered_planted && r.w > 18).count();
    println!("failures with w > 18: {big_w_failures}");
}

fn legacy_rate() {
    let mut plain_ok = 0;
    let mut de_ok = 0;
    let mut n_tested = 0;
    let t0 = Instant::now();
    for seed in 0..100 {
        let inst = assemble_instance(300, 360, 4, RedundancyMode::ChallengeLegacy, 50_000 + seed).unwrap();
        n_tested += 1;
        let plain = radical_attack(&inst.h);
        let de = radical_attack_doubly_even(&inst.h);
        let planted = inst.secret.as_ref().unwrap();
        if plain.found() && plain.secret().unwrap() == planted {
            plain_ok += 1;
        }
        if de.found() && de.secret().unwrap() == planted {
            de_ok += 1;
        }
    }
    println!("legacy {n_tested} instances in {:?}: plain {plain_ok}, doubly-even {de_ok}", t0.elapsed());
}

fn kernel_dims() {
    let t0 = Instant::now();
    let stats = run_kernel_stats(103, &[104, 117, 130, 143, 155], &[2, 3, 4], 6, 25, 7);
    println!("kernel stats in {:?}", t0.elapsed());
    for row in &stats.per_n {
        println!(
            "n={} mean ker G_d = {:.2}, ker H_d = {:.2}, quotient = {:.2}, pred = {:.1}",
            row.n, row.mean_dim_gram, row.mean_dim_scaled, row.mean_quotient, row.prediction
        );
    }
    for row in &stats.stacked {
        println!(
            "k={} stacked mean = {:.2}, pred = {:.2}, ratio = {:.2}",
            row.k, row.mean_dim, row.prediction, row.mean_dim / row.prediction
        );
    }
}

fn double_meyer_readings() {
    for &(e, a) in &[(1000usize, 8usize), (8, 1000)] {
        let cfg = AttackConfig {
            ambition: a,
            endurance: e,
            g_th: 1,
            k: 6,
            ..AttackConfig::default()
        };
        let mut found = 0;
        let mut iters = Vec::new();
        let t0 = Instant::now();
        for seed in 0..20 {
            let inst = build_qrc_instance(QrcParams::new(103, 155).unwrap(), 900 + seed).unwrap();
            let mut c = cfg.clone();
            c.seed = seed;
            let rep = double_meyer(&inst.h, &c, None);
            if rep.found() {
                found += 1;
                iters.push(rep.iterations_used);
            }
        }
        println!("(E={e}, A={a}): {found}/20 in {:?}, iterations used: {iters:?}", t0.elapsed());
    }
}

fn razor_rate() {
    let mut ok = 0;
    let t0 = Instant::now();
    for seed in 0..30 {
        let inst = assemble_instance(300, 360, 4, RedundancyMode::ChallengeLegacy, 70_000 + seed).unwrap();
        let cfg = AttackConfig {
            p: 0.25,
            endurance: 60,
            g_th: 4,
            seed,
            ..AttackConfig::default()
        };
        let rep = hamming_razor(&inst.h, &cfg);
        if rep.found() && rep.secret().unwrap() == inst.secret.as_ref().unwrap() {
            ok += 1;
        }
    }
    println!("razor on legacy challenge-shaped: {ok}/30 in {:?}", t0.elapsed());
}

// appended probes

fn coverage() {
    let grid = [52usize, 65, 78, 91, 104, 117, 130, 143, 155];
    let cfg = AttackConfig { ambition: 8, endurance: 1000, g_th: 1, seed: 11, ..AttackConfig::default() };
    let attacks = vec![AttackSpec::Radical, AttackSpec::Lazy(cfg)];
    let t0 = Instant::now();
    let records = run_qrc_sweep(103, &grid, &attacks, 20, 4242);
    println!("sweep in {:?}", t0.elapsed());
    for &n in &grid {
        let rad: Vec<bool> = records.iter().filter(|r| r.n == n && r.attack == "radical").map(|r| r.recovered_planted).collect();
        let lazy: Vec<bool> = records.iter().filter(|r| r.n == n && r.attack == "lazy").map(|r| r.recovered_planted).collect();
        let union = rad.iter().zip(&lazy).filter(|(a, b)| **a || **b).count();
        println!("n={n}: radical {}/20 lazy {}/20 union {union}/20", rad.iter().filter(|b| **b).count(), lazy.iter().filter(|b| **b).count());
    }
}

fn meyer_planted() {
    let cfg = AttackConfig { ambition: 8, endurance: 1000, g_th: 1, k: 6, ..AttackConfig::default() };
    let t0 = Instant::now();
    for &n in &[52usize, 86, 120, 155] {
        let mut planted = 0;
        let mut found = 0;
        for seed in 0..20u64 {
            let inst = build_qrc_instance(QrcParams::new(103, n).unwrap(), 3000 + seed).unwrap();
            let mut c = cfg.clone();
            c.seed = seed * 77 + n as u64;
            let rep = double_meyer(&inst.h, &c, None);
            if rep.found() { found += 1; }
            if rep.found() && rep.secret().unwrap() == inst.secret.as_ref().unwrap() { planted += 1; }
        }
        println!("n={n}: found {found}/20 planted {planted}/20");
    }
    println!("total {:?}", t0.elapsed());
}
