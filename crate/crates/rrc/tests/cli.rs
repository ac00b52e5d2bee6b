//! Command-line behaviour: outputs on success, nonzero exit and no files on
//! failure.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rrc::io::{load_image, save_image};
use rrc_core::metrics::psnr;
use rrc_core::ImageBuffer;

fn rrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rrc")).args(args).env("RRC_THREADS", "1").output().expect("spawn rrc")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// 40×40 crop of the bundled Lena image.
fn crop_to(dir: &Path) -> (PathBuf, ImageBuffer) {
    let lena = load_image(&Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/lena256.png")).unwrap();
    let img = ImageBuffer::from_fn(40, 40, |r, c| lena.get(100 + r, 100 + c));
    let path = dir.join("clean.png");
    save_image(&img, &path).unwrap();
    (path, img)
}

#[test]
fn addnoise_then_denoise_improves_psnr() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, img) = crop_to(dir.path());
    let noisy = dir.path().join("noisy.pgm");
    let out = dir.path().join("out.png");
    let trace = dir.path().join("trace.csv");
    assert!(rrc(&["addnoise", "--input", s(&clean), "--sigma", "25", "--seed", "3", "--output", s(&noisy)]).status.success());
    let o = rrc(&[
        "denoise", "--input", s(&noisy), "--sigma", "25", "--output", s(&out), "--clean", s(&clean), "--trace", s(&trace),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let before = psnr(&load_image(&noisy).unwrap(), &img).unwrap();
    let after = psnr(&load_image(&out).unwrap(), &img).unwrap();
    assert!(after > before + 2.0, "{before} -> {after}");
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert!(csv.lines().count() >= 2);
}

#[test]
fn addnoise_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, _) = crop_to(dir.path());
    let paths: Vec<PathBuf> = ["a.pgm", "b.pgm", "c.pgm"].iter().map(|n| dir.path().join(n)).collect();
    for (p, seed) in paths.iter().zip(["1", "1", "2"]) {
        assert!(rrc(&["addnoise", "--input", s(&clean), "--sigma", "10", "--seed", seed, "--output", s(p)]).status.success());
    }
    let bytes: Vec<Vec<u8>> = paths.iter().map(|p| std::fs::read(p).unwrap()).collect();
    assert_eq!(bytes[0], bytes[1]);
    assert_ne!(bytes[0], bytes[2]);
}

#[test]
fn jpegsim_then_deblock_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, img) = crop_to(dir.path());
    let decoded = dir.path().join("dec.png");
    let ctx = dir.path().join("ctx.json");
    let out = dir.path().join("deb.png");
    assert!(rrc(&["jpegsim", "--input", s(&clean), "--qf", "20", "--out", s(&decoded), "--ctx", s(&ctx)]).status.success());
    let o = rrc(&["deblock", "--input", s(&decoded), "--ctx", s(&ctx), "--out", s(&out), "--clean", s(&clean)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let restored = load_image(&out).unwrap();
    assert_eq!((restored.rows(), restored.cols()), (40, 40));
    assert!(psnr(&restored, &img).unwrap().is_finite());
}

#[test]
fn metrics_subcommands_print_values() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, _) = crop_to(dir.path());
    let o = rrc(&["ssim", s(&clean), s(&clean)]);
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "1.000000");
}

#[test]
fn residual_hist_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, _) = crop_to(dir.path());
    let noisy = dir.path().join("noisy.png");
    let csv = dir.path().join("hist.csv");
    assert!(rrc(&["addnoise", "--input", s(&clean), "--sigma", "20", "--output", s(&noisy)]).status.success());
    for reference in ["nlm", "patches"] {
        let o = rrc(&[
            "residual-hist", "--clean", s(&clean), "--degraded", s(&noisy), "--bins", "10", "--group-size", "16",
            "--window", "11", "--reference", reference, "--output", s(&csv),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let text = std::fs::read_to_string(&csv).unwrap();
        assert_eq!(text.lines().next(), Some("lo,hi,count"));
        assert_eq!(text.lines().count(), 11);
    }
}

#[test]
fn failures_exit_nonzero_and_write_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let (clean, _) = crop_to(dir.path());
    let garbage = dir.path().join("garbage.png");
    std::fs::write(&garbage, b"not an image").unwrap();
    let out = dir.path().join("out.png");
    let cases: Vec<Vec<&str>> = vec![
        vec!["denoise", "--input", s(&garbage), "--sigma", "20", "--output", s(&out)],
        vec!["denoise", "--input", s(&clean), "--sigma", "-5", "--output", s(&out)],
        vec!["addnoise", "--input", s(&clean), "--sigma", "nan", "--output", s(&out)],
        vec!["jpegsim", "--input", s(&clean), "--qf", "0", "--out", s(&out), "--ctx", s(&out)],
        vec!["deblock", "--input", s(&clean), "--ctx", s(&garbage), "--out", s(&out)],
        vec!["psnr", s(&clean), s(&garbage)],
    ];
    for args in cases {
        let o = rrc(&args);
        assert!(!o.status.success(), "{args:?} succeeded");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
        assert!(!out.exists(), "{args:?} left output behind");
    }
    let leftovers: Vec<_> = std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 2, "{leftovers:?}");
}

#[test]
fn bad_thread_count_is_rejected() {
    let o = Command::new(env!("CARGO_BIN_EXE_rrc")).args(["certify", "--trials", "1", "--report", "/nonexistent/x.json"]).env("RRC_THREADS", "many").output().unwrap();
    assert!(!o.status.success());
}
