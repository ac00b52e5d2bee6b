//! Per-iteration trace CSV.

use rrc_core::denoise::IterationRecord;

/// One trace row; `psnr_vs_clean` is filled when a clean image is known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub record: IterationRecord,
    pub psnr_vs_clean: Option<f64>,
}

/// `iter,sigma_t,mean_lambda,rel_change,psnr_vs_clean`
pub fn trace_csv(rows: &[TraceRow]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["iter", "sigma_t", "mean_lambda", "rel_change", "psnr_vs_clean"])?;
    for r in rows {
        w.write_record([
            r.record.iter.to_string(),
            r.record.sigma_t.to_string(),
            r.record.mean_lambda.to_string(),
            r.record.rel_change.to_string(),
            r.psnr_vs_clean.map(|p| p.to_string()).unwrap_or_default(),
        ])?;
    }
    Ok(w.into_inner()?)
}
