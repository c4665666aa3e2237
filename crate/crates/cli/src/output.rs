//! Artifact files and their manifest. Writes happen in call order on one
//! thread, so the manifest order is deterministic.

use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

use crate::config::{Format, RunConfig};
use crate::report::{ManifestEntry, ReportDocument};

pub struct ArtifactWriter {
    dir: PathBuf,
    formats: std::collections::BTreeSet<Format>,
    manifest: Vec<ManifestEntry>,
}

impl ArtifactWriter {
    pub fn new(config: &RunConfig) -> Self {
        Self {
            dir: config.out.clone(),
            formats: config.formats.clone(),
            manifest: Vec::new(),
        }
    }

    /// Writes `name` if its format is enabled; returns whether it was written.
    pub fn write(&mut self, name: &str, format: Format, kind: &str, contents: &str) -> Result<bool> {
        if !self.formats.contains(&format) {
            return Ok(false);
        }
        fs::create_dir_all(&self.dir).with_context(|| format!("creating {}", self.dir.display()))?;
        let path = self.dir.join(name);
        fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
        self.manifest.push(ManifestEntry {
            path: name.to_string(),
            kind: kind.to_string(),
            bytes: contents.len(),
            sha256: format!("{:x}", Sha256::digest(contents.as_bytes())),
        });
        Ok(true)
    }

    pub fn write_json<T: serde::Serialize>(&mut self, name: &str, kind: &str, value: &T) -> Result<bool> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, Format::Json, kind, &text)
    }

    /// Attach the manifest and write `report.json` (when JSON is enabled).
    pub fn finish(self, mut report: ReportDocument) -> Result<ReportDocument> {
        report.manifest = self.manifest;
        if self.formats.contains(&Format::Json) {
            fs::create_dir_all(&self.dir)?;
            let path = self.dir.join("report.json");
            fs::write(&path, report.to_json()).with_context(|| format!("writing {}", path.display()))?;
        }
        Ok(report)
    }
}

/// `index,arclength,re,im` rows for a polyline, formatted like trajectory exports.
pub fn polyline_csv(points: &[scurve_core::C64]) -> String {
    use std::fmt::Write;
    let mut out = String::from("index,arclength,re,im\n");
    let mut s = 0.0;
    for (i, z) in points.iter().enumerate() {
        if i > 0 {
            s += (z - points[i - 1]).norm();
        }
        let _ = writeln!(out, "{i},{s:.12e},{:.15e},{:.15e}", z.re, z.im);
    }
    out
}
