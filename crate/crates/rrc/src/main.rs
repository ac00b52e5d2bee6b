use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{ensure, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rrc::bench::{run_bench, write_report, Manifest};
use rrc::context::ContextFile;
use rrc::io::{load_image, save_image, write_atomic};
use rrc::noise::add_gaussian_noise;
use rrc::pipeline::{denoise_config, run_deblock, run_denoise, DenoiseMethod};
use rrc::trace::trace_csv;
use rrc_core::denoise::{rank_residual_histogram, ResidualReference};
use rrc_core::gsrc::certify_equivalence;
use rrc_core::jpeg::{jpeg_simulate, DeblockConfig};
use rrc_core::linalg::{svd_thin, Matrix};
use rrc_core::metrics::{psnr, ssim};
use rrc_core::patch::GroupingParams;
use serde::Serialize;

/// Rank-residual low-rank image restoration.
///
/// Set RRC_THREADS to cap the worker count (0 or unset: one per core).
#[derive(Parser)]
#[command(name = "rrc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Rrc,
    Nnm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReferenceArg {
    /// Nonlocal-means reference group of the clean patches.
    Nlm,
    /// The clean patches themselves.
    Patches,
}

#[derive(Subcommand)]
enum Command {
    /// Remove additive white Gaussian noise of known level.
    Denoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        output: PathBuf,
        /// Clean reference; adds per-iteration PSNR to the trace.
        #[arg(long)]
        clean: Option<PathBuf>,
        /// Noise level whose parameter band is used instead of --sigma's.
        #[arg(long)]
        profile: Option<f64>,
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "rrc")]
        method: MethodArg,
    },
    /// Add seeded Gaussian noise (written rounded and clamped to 8 bits).
    Addnoise {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Histogram of rank residuals between degraded and clean groups.
    ResidualHist {
        #[arg(long)]
        clean: PathBuf,
        #[arg(long)]
        degraded: PathBuf,
        #[arg(long, default_value_t = 64)]
        bins: usize,
        #[arg(long, default_value_t = 7)]
        patch_side: usize,
        #[arg(long, default_value_t = 60)]
        group_size: usize,
        #[arg(long, default_value_t = 25)]
        window: usize,
        #[arg(long, value_enum, default_value_t = ReferenceArg::Nlm)]
        reference: ReferenceArg,
        /// Kernel width of the nonlocal-means reference.
        #[arg(long, default_value_t = 40.0)]
        h: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate JPEG coding of the luminance plane.
    Jpegsim {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        qf: u32,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long, default_value_t = 0.2)]
        qc_width: f64,
    },
    /// Reduce compression artifacts of a decoded image.
    Deblock {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        ctx: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        clean: Option<PathBuf>,
        #[arg(long)]
        qc_width: Option<f64>,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Numerically certify the rank-residual / group-sparse equivalence.
    Certify {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        report: PathBuf,
    },
    /// Run a JSON benchmark manifest.
    Bench {
        #[arg(long)]
        manifest: PathBuf,
    },
    /// Peak signal-to-noise ratio in dB.
    Psnr { a: PathBuf, b: PathBuf },
    /// Mean structural similarity.
    Ssim { a: PathBuf, b: PathBuf },
}

fn configure_threads() -> anyhow::Result<()> {
    let n = match std::env::var("RRC_THREADS") {
        Ok(v) => v.trim().parse::<usize>().with_context(|| format!("RRC_THREADS={v:?} is not a count"))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn write_trace(path: Option<&Path>, rows: &[rrc::trace::TraceRow]) -> anyhow::Result<()> {
    if let Some(p) = path {
        write_atomic(p, &trace_csv(rows)?).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CertifyTrial {
    rows: usize,
    cols: usize,
    lambda: f64,
    shared_frame: bool,
    lemma2_max_rel_gap: f64,
    theorem3_relative: f64,
    frame_residual: f64,
}

#[derive(Serialize)]
struct CertifySummary {
    trials: usize,
    seed: u64,
    lemma2_max_rel_gap: f64,
    shared_frame_max_relative: f64,
    independent_frame_max_relative: f64,
    details: Vec<CertifyTrial>,
}

fn certify(trials: usize, seed: u64) -> anyhow::Result<CertifySummary> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut details = Vec::with_capacity(trials);
    for t in 0..trials {
        let d = rng.gen_range(3..=8);
        let m = rng.gen_range(3..=8);
        let mut normal = |_, _| rng.sample::<f64, _>(StandardNormal);
        let group = Matrix::from_fn(d, m, &mut normal);
        let shared = t % 2 == 0;
        let reference = if shared {
            let f = svd_thin(&group)?;
            let scale: Vec<f64> = f.sigma.iter().map(|s| s * 0.6).collect();
            f.reconstruct_with(&scale)?
        } else {
            Matrix::from_fn(d, m, &mut normal)
        };
        let lambda = rng.gen_range(0.0..3.0);
        let rep = certify_equivalence(&group, &reference, lambda, 10, rng.gen())?;
        details.push(CertifyTrial {
            rows: d,
            cols: m,
            lambda,
            shared_frame: rep.shared_frame,
            lemma2_max_rel_gap: rep.lemma2_max_rel_gap,
            theorem3_relative: rep.theorem3_relative,
            frame_residual: rep.frame_residual,
        });
    }
    let max_of = |pred: &dyn Fn(&CertifyTrial) -> bool| {
        details.iter().filter(|t| pred(t)).map(|t| t.theorem3_relative).fold(0.0, f64::max)
    };
    Ok(CertifySummary {
        trials,
        seed,
        lemma2_max_rel_gap: details.iter().map(|t| t.lemma2_max_rel_gap).fold(0.0, f64::max),
        shared_frame_max_relative: max_of(&|t| t.shared_frame),
        independent_frame_max_relative: max_of(&|t| !t.shared_frame),
        details,
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Denoise {
            input,
            sigma,
            output,
            clean,
            profile,
            trace,
            method,
        } => {
            let noisy = load_image(&input)?;
            let clean = clean.map(|p| load_image(&p)).transpose()?;
            let cfg = denoise_config(sigma, profile)?;
            let method = match method {
                MethodArg::Rrc => DenoiseMethod::Rrc,
                MethodArg::Nnm => DenoiseMethod::Nnm,
            };
            let (x, rows) = run_denoise(&noisy, &cfg, method, clean.as_ref())?;
            save_image(&x, &output)?;
            write_trace(trace.as_deref(), &rows)?;
            if let Some(c) = &clean {
                println!("psnr {:.4} ssim {:.4} iterations {}", psnr(c, &x)?, ssim(c, &x)?, rows.len());
            }
        }
        Command::Addnoise {
            input,
            sigma,
            seed,
            output,
        } => {
            ensure!(sigma >= 0.0 && sigma.is_finite(), "sigma must be finite and nonnegative");
            let img = load_image(&input)?;
            save_image(&add_gaussian_noise(&img, sigma, seed)?, &output)?;
        }
        Command::ResidualHist {
            clean,
            degraded,
            bins,
            patch_side,
            group_size,
            window,
            reference,
            h,
            output,
        } => {
            ensure!(bins > 0, "bins must be positive");
            let params = GroupingParams::new(patch_side, group_size, window)?;
            let reference = match reference {
                ReferenceArg::Nlm => ResidualReference::NonlocalMeans(h),
                ReferenceArg::Patches => ResidualReference::CleanPatches,
            };
            let h = rank_residual_histogram(&load_image(&clean)?, &load_image(&degraded)?, &params, reference, bins)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["lo", "hi", "count"])?;
            for (lo, hi, n) in h.histogram.bins() {
                w.write_record([lo.to_string(), hi.to_string(), n.to_string()])?;
            }
            let bytes = w.into_inner()?;
            match output {
                Some(p) => write_atomic(&p, &bytes)?,
                None => print!("{}", String::from_utf8_lossy(&bytes)),
            }
            eprintln!("samples {} excess_kurtosis {:.4}", h.samples, h.excess_kurtosis);
        }
        Command::Jpegsim {
            input,
            qf,
            out,
            ctx,
            qc_width,
        } => {
            let img = load_image(&input)?;
            let (decoded, qc) = jpeg_simulate(&img, qf, qc_width)?;
            let json = ContextFile::from_context(&qc).to_json();
            save_image(&decoded, &out)?;
            write_atomic(&ctx, json.as_bytes()).with_context(|| format!("writing {}", ctx.display()))?;
        }
        Command::Deblock {
            input,
            ctx,
            out,
            clean,
            qc_width,
            trace,
        } => {
            let decoded = load_image(&input)?;
            let file = ContextFile::load(&ctx)?;
            let qc = file.quantization_context(&decoded, qc_width)?;
            let mut cfg = DeblockConfig::for_qf(file.qf)?;
            cfg.qc_width = qc.qc_width;
            let clean = clean.map(|p| load_image(&p)).transpose()?;
            let (x, rows) = run_deblock(&decoded, &qc, &cfg, clean.as_ref())?;
            save_image(&x, &out)?;
            write_trace(trace.as_deref(), &rows)?;
            if let Some(c) = &clean {
                println!("psnr {:.4} (input {:.4}) iterations {}", psnr(c, &x)?, psnr(c, &decoded)?, rows.len());
            }
        }
        Command::Certify { trials, seed, report } => {
            let summary = certify(trials, seed)?;
            write_atomic(&report, serde_json::to_string_pretty(&summary)?.as_bytes())?;
            println!(
                "lemma2 max gap {:.3e}; shared-frame max relative distance {:.3e}; independent-frame max {:.3e}",
                summary.lemma2_max_rel_gap, summary.shared_frame_max_relative, summary.independent_frame_max_relative
            );
        }
        Command::Bench { manifest } => {
            let m = Manifest::load(&manifest)?;
            let report = run_bench(&m)?;
            write_report(&report, &m.output_dir)?;
            for a in &report.aggregates {
                println!("{} {} psnr {:.4} ssim {:.4} ({} rows)", a.method.name(), a.param, a.psnr, a.ssim, a.rows);
            }
            for miss in &report.missing {
                eprintln!("missing: {miss}");
            }
        }
        Command::Psnr { a, b } => println!("{:.4}", psnr(&load_image(&a)?, &load_image(&b)?)?),
        Command::Ssim { a, b } => println!("{:.6}", ssim(&load_image(&a)?, &load_image(&b)?)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads().and_then(|_| run(cli)) {
        eprintln!("error: {e:#}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
