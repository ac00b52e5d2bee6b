//! JSON sidecar describing how an image was JPEG-coded.
//!
//! `{"qf": 10, "q_matrix": [64 entries, row-major], "qc_width": 0.2}`. The
//! quantization indices are recovered from the decoded image itself.

use std::path::Path;

use anyhow::{ensure, Context};
use rrc_core::jpeg::QuantizationContext;
use rrc_core::ImageBuffer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextFile {
    pub qf: u32,
    pub q_matrix: Vec<u16>,
    pub qc_width: f64,
}

impl ContextFile {
    pub fn from_context(qc: &QuantizationContext) -> Self {
        Self {
            qf: qc.qf,
            q_matrix: qc.q_matrix.to_vec(),
            qc_width: qc.qc_width,
        }
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let ctx: Self = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        ensure!(ctx.q_matrix.len() == 64, "q_matrix must have 64 entries, found {}", ctx.q_matrix.len());
        Ok(ctx)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain struct serializes")
    }

    /// Rebuilds the constraint set around `decoded`, optionally at another
    /// width.
    pub fn quantization_context(&self, decoded: &ImageBuffer, qc_width: Option<f64>) -> anyhow::Result<QuantizationContext> {
        let q: [u16; 64] = self.q_matrix.as_slice().try_into().context("q_matrix must have 64 entries")?;
        Ok(QuantizationContext::from_image(decoded, self.qf, q, qc_width.unwrap_or(self.qc_width))?)
    }
}
