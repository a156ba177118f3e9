//! Command-line surface: generation, attacks, sample verification,
//! simulation, and the experiment harness, with bit-exact file formats.

pub mod formats;

use crate::attacks::{
    double_meyer, hamming_razor, lazy_linearity_attack, radical_attack,
    radical_attack_doubly_even, radical_probe_seeds, AttackConfig, AttackReport,
};
use crate::f2la::BitMatrix;
use crate::qrc::{build_qrc_instance, QrcParams};
use crate::rng::rng_from_seed;
use crate::scheme::{assemble_instance, bias, RedundancyMode};
use crate::sim::{sample, simulate};
use crate::stats::{
    run_kernel_stats, run_qrc_sweep, run_sigmoid_experiment, summarize_by_w,
    umpu_binomial_region, write_records_csv, write_records_jsonl, AttackSpec,
};
use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};

/// Exit status conventions: 0 success/accept/found, 1 failed/reject,
/// 2 I/O, parse, or parameter errors.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser)]
#[command(
    name = "iqpcrack",
    about = "Cryptanalysis workbench for obfuscated IQP circuits",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate an instance and write matrix, secret, and metadata files.
    Generate(GenerateArgs),
    /// Run a secret-extraction attack against a tableau file.
    Attack(AttackArgs),
    /// Test a sample file against a secret at the advertised bias.
    Verify(VerifyArgs),
    /// Simulate a small tableau exactly and emit samples.
    Simulate(SimulateArgs),
    /// Run a Monte-Carlo experiment and write record/summary tables.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Stabilizer,
    Qrc,
    ExtendedQrc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RedundancyArg {
    Randomized,
    Published,
    ChallengeLegacy,
}

impl From<RedundancyArg> for RedundancyMode {
    fn from(a: RedundancyArg) -> Self {
        match a {
            RedundancyArg::Randomized => RedundancyMode::Randomized,
            RedundancyArg::Published => RedundancyMode::Published,
            RedundancyArg::ChallengeLegacy => RedundancyMode::ChallengeLegacy,
        }
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Qubit count / tableau width.
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    /// Hamiltonian terms (stabilizer family).
    #[arg(short = 'm', long)]
    pub m: Option<usize>,
    /// Codimension target (stabilizer family).
    #[arg(short = 'g', long)]
    pub g: Option<usize>,
    /// QRC prime (qrc families).
    #[arg(short = 'q', long)]
    pub q: Option<usize>,
    #[arg(long, value_enum, default_value = "randomized")]
    pub redundancy_mode: RedundancyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory for matrix.txt, secret.b64, meta.json.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the construction witness (pre-obfuscation blocks and the
    /// obfuscation pair) as witness.json. Never part of a challenge export.
    #[arg(long, default_value_t = false)]
    pub witness: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    Radical,
    RadicalDoublyEven,
    Lazy,
    DoubleMeyer,
    SeededDoubleMeyer,
    Razor,
}

#[derive(Args)]
pub struct AttackArgs {
    #[arg(long, value_enum)]
    pub attack: AttackArg,
    #[arg(long)]
    pub matrix: PathBuf,
    /// Accept externally published tableau layouts (best-effort parser).
    #[arg(long, default_value_t = false)]
    pub import_bremner: bool,
    #[arg(long, default_value_t = 8)]
    pub ambition: usize,
    #[arg(long, default_value_t = 1000)]
    pub endurance: usize,
    #[arg(long, default_value_t = 1)]
    pub gth: usize,
    #[arg(long, default_value_t = 6)]
    pub k: usize,
    #[arg(long, default_value_t = 0.25)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the attack report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the recovered secret as a secret file on success.
    #[arg(long)]
    pub secret_out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long)]
    pub secret: PathBuf,
    /// Codimension of the claimed secret; sets the expected bias.
    #[arg(short = 'g', long)]
    pub g: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample file destination; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExperimentName {
    Sigmoid,
    QrcSweep,
    KernelStats,
}

#[derive(Args)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub name: ExperimentName,
    #[arg(short = 'n', long)]
    pub n: Option<usize>,
    #[arg(short = 'm', long)]
    pub m: Option<usize>,
    #[arg(short = 'g', long)]
    pub g: Option<usize>,
    #[arg(short = 'q', long)]
    pub q: Option<usize>,
    /// Instance count for the sigmoid experiment.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Instances per grid point for sweeps.
    #[arg(long)]
    pub per_point: Option<usize>,
    /// Comma-separated width grid for sweeps; defaults to 9 points on
    /// [r, q+r].
    #[arg(long)]
    pub grid: Option<String>,
    /// Comma-separated attack list for qrc-sweep (radical, lazy,
    /// double-meyer, seeded-double-meyer, radical-doubly-even).
    #[arg(long, default_value = "radical,lazy")]
    pub attacks: String,
    /// Paper-scale run (100k sigmoid instances, 100 per sweep point);
    /// multi-hour runtime.
    #[arg(long, default_value_t = false)]
    pub full: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Temp-file-then-rename write, so partially written outputs never appear.
pub fn write_atomic(path: &Path, content: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, content).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn read_matrix(path: &Path, compat: bool) -> Result<BitMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if compat {
        formats::parse_matrix_compat(&text)
    } else {
        formats::parse_matrix(&text)
    };
    parsed.map_err(|e| anyhow!("{}: {e}", path.display()))
}

pub fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let inst = match args.family {
        FamilyArg::Stabilizer => {
            let (n, m, g) = match (args.n, args.m, args.g) {
                (Some(n), Some(m), Some(g)) => (n, m, g),
                _ => bail!("stabilizer family needs --n, --m and --g"),
            };
            assemble_instance(n, m, g, args.redundancy_mode.into(), args.seed)?
        }
        FamilyArg::Qrc | FamilyArg::ExtendedQrc => {
            let q = args.q.ok_or_else(|| anyhow!("qrc families need --q"))?;
            let r = (q + 1) / 2;
            let n = args.n.unwrap_or(match args.family {
                FamilyArg::Qrc => r,
                _ => q + r,
            });
            build_qrc_instance(QrcParams::new(q, n)?, args.seed)?
        }
    };
    fs::create_dir_all(&args.out)?;
    write_atomic(
        &args.out.join("matrix.txt"),
        formats::emit_matrix(&inst.h).as_bytes(),
    )?;
    let secret = inst.secret.as_ref().expect("generated instances carry a secret");
    write_atomic(
        &args.out.join("secret.b64"),
        formats::emit_secret(secret).as_bytes(),
    )?;
    let p = &inst.params;
    let meta = json!({
        "family": inst.family.to_string(),
        "n": p.n, "m": p.m, "g": p.g,
        "m1": p.m1, "m2": p.m2, "d": p.d,
        "w": p.excess_width(),
        "imbalance": p.imbalance(),
        "seed": inst.seed,
        "rank": inst.h.rank(),
        "files": { "matrix": "matrix.txt", "secret": "secret.b64" },
    });
    write_atomic(
        &args.out.join("meta.json"),
        (serde_json::to_string_pretty(&meta)? + "\n").as_bytes(),
    )?;
    if args.witness {
        let w = inst.witness.as_ref().expect("generated instances carry a witness");
        let witness = json!({
            "pre_matrix": formats::emit_matrix(&w.pre_h),
            "pre_secret": formats::emit_secret(&w.pre_secret),
            "f_block": formats::emit_matrix(&w.f_block),
            "d_block": formats::emit_matrix(&w.d_block),
            "redundant": formats::emit_matrix(&w.redundant),
            "row_perm": w.row_perm,
            "mixer": formats::emit_matrix(&w.mixer),
        });
        write_atomic(
            &args.out.join("witness.json"),
            (serde_json::to_string_pretty(&witness)? + "\n").as_bytes(),
        )?;
    }
    println!(
        "generated {} instance: n={} m={} g={} m1={} d={} w={} -> {}",
        inst.family,
        p.n,
        p.m,
        p.g,
        p.m1,
        p.d,
        p.excess_width(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn report_json(attack: &str, report: &AttackReport) -> serde_json::Value {
    let dims = &report.kernel_dims;
    let dim_summary = json!({
        "count": dims.len(),
        "first": dims.first(),
        "min": dims.iter().min(),
        "mean": if dims.is_empty() { 0.0 } else {
            dims.iter().sum::<usize>() as f64 / dims.len() as f64
        },
        "head": dims.iter().take(64).collect::<Vec<_>>(),
    });
    match &report.outcome {
        crate::attacks::AttackOutcome::Found {
            secret,
            certificate,
        } => json!({
            "attack": attack,
            "found": true,
            "secret": formats::emit_secret(secret).lines().next().unwrap(),
            "secret_bits": secret.len(),
            "certificate": {
                "g": certificate.g_actual,
                "rad_dim": certificate.rad_dim,
                "rad_doubly_even": certificate.rad_doubly_even,
                "m1_observed": certificate.m1_observed,
            },
            "iterations": report.iterations_used,
            "candidates_tested": report.candidates_tested,
            "kernel_dims": dim_summary,
            "wall_time_s": report.wall_time,
        }),
        crate::attacks::AttackOutcome::Failed => json!({
            "attack": attack,
            "found": false,
            "iterations": report.iterations_used,
            "candidates_tested": report.candidates_tested,
            "kernel_dims": dim_summary,
            "wall_time_s": report.wall_time,
        }),
    }
}

pub fn cmd_attack(args: &AttackArgs) -> Result<i32> {
    let h = read_matrix(&args.matrix, args.import_bremner)?;
    let cfg = AttackConfig {
        ambition: args.ambition,
        endurance: args.endurance,
        g_th: args.gth,
        k: args.k,
        p: args.p,
        seed: args.seed,
        ..AttackConfig::default()
    }
    .validated()?;
    let (name, report) = match args.attack {
        AttackArg::Radical => ("radical", radical_attack(&h)),
        AttackArg::RadicalDoublyEven => ("radical-doubly-even", radical_attack_doubly_even(&h)),
        AttackArg::Lazy => ("lazy", lazy_linearity_attack(&h, &cfg)),
        AttackArg::DoubleMeyer => ("double-meyer", double_meyer(&h, &cfg, None)),
        AttackArg::SeededDoubleMeyer => {
            let seeds = radical_probe_seeds(&h);
            ("seeded-double-meyer", double_meyer(&h, &cfg, Some(&seeds)))
        }
        AttackArg::Razor => ("hamming-razor", hamming_razor(&h, &cfg)),
    };
    let out = report_json(name, &report);
    let rendered = serde_json::to_string_pretty(&out)? + "\n";
    match &args.out {
        Some(path) => write_atomic(path, rendered.as_bytes())?,
        None => print!("{rendered}"),
    }
    if let (Some(path), Some(secret)) = (&args.secret_out, report.secret()) {
        write_atomic(path, formats::emit_secret(secret).as_bytes())?;
    }
    Ok(if report.found() { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let samples_text = fs::read_to_string(&args.samples)
        .with_context(|| format!("reading {}", args.samples.display()))?;
    let samples = formats::parse_samples(&samples_text)?;
    let secret_text = fs::read_to_string(&args.secret)
        .with_context(|| format!("reading {}", args.secret.display()))?;
    let secret = formats::parse_secret(&secret_text)?;
    let width = samples[0].len();
    if width != secret.len() {
        bail!(
            "dimension mismatch: samples have {} bits, secret has {}",
            width,
            secret.len()
        );
    }
    let hits = samples.iter().filter(|x| !x.dot(&secret)).count() as u64;
    let trials = samples.len() as u64;
    let expected = bias(args.g);
    let (lo, hi) = umpu_binomial_region(trials, expected, args.alpha);
    let accept = hits >= lo && hits <= hi;
    println!(
        "samples: {trials}, orthogonal fraction: {:.4}, expected bias: {:.4}",
        hits as f64 / trials as f64,
        expected
    );
    println!(
        "acceptance region at alpha={}: [{lo}, {hi}] -> {}",
        args.alpha,
        if accept { "ACCEPT" } else { "REJECT" }
    );
    Ok(if accept { EXIT_OK } else { EXIT_FAILED })
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    let h = read_matrix(&args.matrix, false)?;
    let dist = simulate(&h)?;
    let mut rng = rng_from_seed(args.seed);
    let samples = sample(&dist, args.samples, &mut rng);
    let text = formats::emit_samples(&samples);
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| anyhow!("bad grid entry `{t}`: {e}")))
        .collect()
}

fn parse_attack_list(text: &str, cfg: &AttackConfig) -> Result<Vec<AttackSpec>> {
    text.split(',')
        .map(|t| match t.trim() {
            "radical" => Ok(AttackSpec::Radical),
            "radical-doubly-even" => Ok(AttackSpec::RadicalDoublyEven),
            "lazy" => Ok(AttackSpec::Lazy(cfg.clone())),
            "double-meyer" => Ok(AttackSpec::DoubleMeyer(cfg.clone())),
            "seeded-double-meyer" => Ok(AttackSpec::SeededDoubleMeyer(cfg.clone())),
            "hamming-razor" => Ok(AttackSpec::HammingRazor(cfg.clone())),
            other => Err(anyhow!("unknown attack `{other}`")),
        })
        .collect()
}

pub fn cmd_experiment(args: &ExperimentArgs) -> Result<i32> {
    fs::create_dir_all(&args.out)?;
    match args.name {
        ExperimentName::Sigmoid => {
            let (n, m, g) = match (args.n, args.m, args.g) {
                (Some(n), Some(m), Some(g)) => (n, m, g),
                _ => bail!("sigmoid experiment needs --n, --m and --g"),
            };
            let trials = args.trials.unwrap_or(if args.full { 100_000 } else { 1000 });
            let records = run_sigmoid_experiment(n, m, g, trials, args.seed);
            write_records(&args.out, &records)?;
            let summary = summarize_by_w(&records, 0.05);
            let mut csv = String::from("w,trials,successes,rate,theory,accept_lo,accept_hi,pass\n");
            for row in &summary {
                csv.push_str(&format!(
                    "{},{},{},{:.6},{:.6},{},{},{}\n",
                    row.w,
                    row.trials,
                    row.successes,
                    row.rate,
                    row.theory,
                    row.accept_lo,
                    row.accept_hi,
                    row.pass
                ));
            }
            write_atomic(&args.out.join("summary.csv"), csv.as_bytes())?;
            let recovered = records.iter().filter(|r| r.recovered_planted).count();
            println!("sigmoid: {recovered}/{trials} recovered -> {}", args.out.display());
        }
        ExperimentName::QrcSweep => {
            let q = args.q.ok_or_else(|| anyhow!("qrc-sweep needs --q"))?;
            let r = (q + 1) / 2;
            let grid = match &args.grid {
                Some(g) => parse_usize_list(g)?,
                None => default_grid(r, q + r),
            };
            let per_point = args.per_point.unwrap_or(if args.full { 100 } else { 20 });
            let cfg = AttackConfig {
                ambition: 8,
                endurance: 1000,
                g_th: 1,
                k: 6,
                p: 0.25,
                seed: args.seed,
                ..AttackConfig::default()
            };
            let attacks = parse_attack_list(&args.attacks, &cfg)?;
            let records = run_qrc_sweep(q, &grid, &attacks, per_point, args.seed);
            write_records(&args.out, &records)?;
            let mut csv = String::from("n,attack,instances,found,recovered_planted\n");
            for &n in &grid {
                for a in &attacks {
                    let of_point: Vec<_> = records
                        .iter()
                        .filter(|rec| rec.n == n && rec.attack == a.name())
                        .collect();
                    let found = of_point.iter().filter(|rec| rec.found).count();
                    let planted = of_point.iter().filter(|rec| rec.recovered_planted).count();
                    csv.push_str(&format!(
                        "{n},{},{},{found},{planted}\n",
                        a.name(),
                        of_point.len()
                    ));
                }
            }
            write_atomic(&args.out.join("summary.csv"), csv.as_bytes())?;
            println!("qrc-sweep over {} points -> {}", grid.len(), args.out.display());
        }
        ExperimentName::KernelStats => {
            let q = args.q.ok_or_else(|| anyhow!("kernel-stats needs --q"))?;
            let r = (q + 1) / 2;
            let grid = match &args.grid {
                Some(g) => parse_usize_list(g)?,
                None => default_grid(q + 1, q + r),
            };
            let instances = args.per_point.unwrap_or(if args.full { 100 } else { 8 });
            let probes = args.trials.unwrap_or(if args.full { 1000 } else { 30 });
            let stats = run_kernel_stats(q, &grid, &[2, 3, 4], instances, probes, args.seed);
            let mut csv =
                String::from("n,probes,mean_dim_gram,mean_dim_scaled,mean_quotient,prediction\n");
            for row in &stats.per_n {
                csv.push_str(&format!(
                    "{},{},{:.4},{:.4},{:.4},{:.1}\n",
                    row.n,
                    row.probes,
                    row.mean_dim_gram,
                    row.mean_dim_scaled,
                    row.mean_quotient,
                    row.prediction
                ));
            }
            write_atomic(&args.out.join("summary.csv"), csv.as_bytes())?;
            let mut stacked =
                String::from("n,k,tuples,mean_dim,prediction\n");
            for row in &stats.stacked {
                stacked.push_str(&format!(
                    "{},{},{},{:.4},{:.4}\n",
                    row.n, row.k, row.tuples, row.mean_dim, row.prediction
                ));
            }
            write_atomic(&args.out.join("stacked.csv"), stacked.as_bytes())?;
            println!("kernel-stats over {} widths -> {}", grid.len(), args.out.display());
        }
    }
    Ok(EXIT_OK)
}

fn default_grid(lo: usize, hi: usize) -> Vec<usize> {
    let points = 9usize;
    (0..points)
        .map(|i| lo + (hi - lo) * i / (points - 1))
        .collect()
}

fn write_records(dir: &Path, records: &[crate::stats::ExperimentRecord]) -> Result<()> {
    let mut csv_buf = Vec::new();
    write_records_csv(records, &mut csv_buf)?;
    write_atomic(&dir.join("records.csv"), &csv_buf)?;
    let mut jsonl_buf = Vec::new();
    write_records_jsonl(records, &mut jsonl_buf)?;
    write_atomic(&dir.join("records.jsonl"), &jsonl_buf)?;
    Ok(())
}

/// Entry point shared by the binary: returns the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Attack(args) => cmd_attack(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Experiment(args) => cmd_experiment(args),
    }
}
