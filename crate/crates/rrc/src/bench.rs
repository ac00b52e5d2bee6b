//! Manifest-driven benchmark harness.
//!
//! Denoising rows add seeded Gaussian noise (one realization per image and
//! noise level, shared by all methods). Deblocking rows simulate JPEG coding
//! at each quality factor. The results CSV carries only deterministic
//! columns; wall-clock time goes to the JSON report and a separate timing
//! CSV.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use rrc_core::jpeg::{jpeg_simulate, DeblockConfig};
use rrc_core::metrics::{psnr, ssim};
use serde::{Deserialize, Serialize};

use crate::io::{load_image, save_image, write_atomic};
use crate::noise::{add_gaussian_noise, cell_seed};
use crate::pipeline::{denoise_config, run_deblock, run_denoise, DenoiseMethod};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Denoise,
    Deblock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rrc,
    Nnm,
    Jpeg,
    Deblock,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rrc => "rrc",
            Method::Nnm => "nnm",
            Method::Jpeg => "jpeg",
            Method::Deblock => "deblock",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub inputs: Vec<PathBuf>,
    pub task: Task,
    /// Noise levels for denoising, quality factors for deblocking.
    pub params: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Defaults to `rrc, nnm` for denoising and `jpeg, deblock` otherwise.
    #[serde(default)]
    pub methods: Option<Vec<Method>>,
}

impl Manifest {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let m: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> anyhow::Result<()> {
        for m in self.methods() {
            let ok = matches!(
                (self.task, m),
                (Task::Denoise, Method::Rrc | Method::Nnm) | (Task::Deblock, Method::Jpeg | Method::Deblock)
            );
            if !ok {
                bail!("method {} does not apply to task {:?}", m.name(), self.task);
            }
        }
        for &p in &self.params {
            match self.task {
                Task::Denoise if !(p > 0.0 && p <= 100.0) => bail!("noise level {p} outside (0, 100]"),
                Task::Deblock if !(p >= 1.0 && p <= 100.0 && p.fract() == 0.0) => {
                    bail!("quality factor {p} must be an integer in 1..=100")
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn methods(&self) -> Vec<Method> {
        self.methods.clone().unwrap_or_else(|| match self.task {
            Task::Denoise => vec![Method::Rrc, Method::Nnm],
            Task::Deblock => vec![Method::Jpeg, Method::Deblock],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub image: String,
    pub method: Method,
    pub param: f64,
    pub psnr: f64,
    pub ssim: f64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub method: Method,
    pub param: f64,
    pub rows: usize,
    pub psnr: f64,
    pub ssim: f64,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Means over rows sharing a method and parameter, in first-seen order.
    pub aggregates: Vec<Aggregate>,
    pub missing: Vec<String>,
    pub complete: bool,
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "image".into())
}

/// Runs every (image, parameter, method) cell in manifest order and writes
/// restored images into the output directory.
pub fn run_bench(manifest: &Manifest) -> anyhow::Result<BenchReport> {
    manifest.validate()?;
    let methods = manifest.methods();
    let mut report = BenchReport::default();
    if !manifest.inputs.is_empty() {
        std::fs::create_dir_all(&manifest.output_dir)
            .with_context(|| format!("creating {}", manifest.output_dir.display()))?;
    }
    for (idx, input) in manifest.inputs.iter().enumerate() {
        let clean = match load_image(input) {
            Ok(img) => img,
            Err(e) => {
                report.missing.push(format!("{}: {e}", input.display()));
                continue;
            }
        };
        let name = stem(input);
        for &param in &manifest.params {
            let degraded = match manifest.task {
                Task::Denoise => add_gaussian_noise(&clean, param, cell_seed(manifest.seed, idx, param))?,
                Task::Deblock => jpeg_simulate(&clean, param as u32, 0.2)?.0,
            };
            for &method in &methods {
                let start = Instant::now();
                let out = match method {
                    Method::Rrc | Method::Nnm => {
                        let cfg = denoise_config(param, None)?;
                        let m = if method == Method::Rrc { DenoiseMethod::Rrc } else { DenoiseMethod::Nnm };
                        run_denoise(&degraded, &cfg, m, None)?.0
                    }
                    Method::Jpeg => degraded.clone(),
                    Method::Deblock => {
                        let (decoded, qc) = jpeg_simulate(&clean, param as u32, 0.2)?;
                        run_deblock(&decoded, &qc, &DeblockConfig::for_qf(param as u32)?, None)?.0
                    }
                };
                let runtime_seconds = start.elapsed().as_secs_f64();
                let file = manifest.output_dir.join(format!("{name}_{}_{param}.png", method.name()));
                save_image(&out, &file)?;
                report.rows.push(BenchRow {
                    image: name.clone(),
                    method,
                    param,
                    psnr: psnr(&clean, &out)?,
                    ssim: ssim(&clean, &out)?,
                    runtime_seconds,
                });
            }
        }
    }
    report.aggregates = aggregate(&report.rows);
    report.complete = report.missing.is_empty();
    Ok(report)
}

fn aggregate(rows: &[BenchRow]) -> Vec<Aggregate> {
    let mut out: Vec<Aggregate> = Vec::new();
    for r in rows {
        let slot = match out.iter_mut().find(|a| a.method == r.method && a.param == r.param) {
            Some(a) => a,
            None => {
                out.push(Aggregate {
                    method: r.method,
                    param: r.param,
                    rows: 0,
                    psnr: 0.0,
                    ssim: 0.0,
                    runtime_seconds: 0.0,
                });
                out.last_mut().expect("just pushed")
            }
        };
        slot.rows += 1;
        slot.psnr += r.psnr;
        slot.ssim += r.ssim;
        slot.runtime_seconds += r.runtime_seconds;
    }
    for a in &mut out {
        let n = a.rows as f64;
        a.psnr /= n;
        a.ssim /= n;
        a.runtime_seconds /= n;
    }
    out
}

/// `image,method,param,psnr,ssim` plus `mean` rows per method and parameter.
pub fn results_csv(report: &BenchReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["image", "method", "param", "psnr", "ssim"])?;
    for r in &report.rows {
        w.write_record([&r.image, r.method.name(), &r.param.to_string(), &format!("{:.4}", r.psnr), &format!("{:.4}", r.ssim)])?;
    }
    for a in &report.aggregates {
        w.write_record(["mean", a.method.name(), &a.param.to_string(), &format!("{:.4}", a.psnr), &format!("{:.4}", a.ssim)])?;
    }
    Ok(w.into_inner()?)
}

/// `image,method,param,runtime_seconds`
pub fn timings_csv(report: &BenchReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["image", "method", "param", "runtime_seconds"])?;
    for r in &report.rows {
        w.write_record([&r.image, r.method.name(), &r.param.to_string(), &format!("{:.3}", r.runtime_seconds)])?;
    }
    Ok(w.into_inner()?)
}

/// Writes `bench.csv`, `timings.csv` and `bench.json` into `dir`.
pub fn write_report(report: &BenchReport, dir: &Path) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_atomic(&dir.join("bench.csv"), &results_csv(report)?)?;
    write_atomic(&dir.join("timings.csv"), &timings_csv(report)?)?;
    write_atomic(&dir.join("bench.json"), serde_json::to_string_pretty(report)?.as_bytes())?;
    Ok(())
}
