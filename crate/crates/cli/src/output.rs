//! Output sinks and the per-run manifest.

use serde::Serialize;
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

#[derive(Serialize)]
pub struct OutputDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct Versions {
    pub horn: &'static str,
    pub horn_core: &'static str,
}

#[derive(Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub versions: Versions,
    pub started_unix: f64,
    pub wall_clock_seconds: f64,
    pub outputs: Vec<OutputDigest>,
}

pub struct Run {
    manifest: RunManifest,
    start: Instant,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Run {
    pub fn new(subcommand: &str, seed: Option<u64>, threads: Option<usize>) -> Self {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Run {
            manifest: RunManifest {
                subcommand: subcommand.to_string(),
                args: std::env::args().collect(),
                seed,
                threads,
                versions: Versions {
                    horn: env!("CARGO_PKG_VERSION"),
                    horn_core: horn_core::VERSION,
                },
                started_unix,
                wall_clock_seconds: 0.0,
                outputs: Vec::new(),
            },
            start: Instant::now(),
        }
    }

    /// Writes `bytes` to `out`, or to stdout when `out` is `None`.
    pub fn emit(&mut self, out: Option<&Path>, bytes: &[u8]) -> std::io::Result<()> {
        let path = match out {
            Some(p) => {
                std::fs::write(p, bytes)?;
                p.display().to_string()
            }
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(bytes)?;
                so.flush()?;
                "-".to_string()
            }
        };
        self.manifest.outputs.push(OutputDigest {
            path,
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    /// Sidecar `<out>.manifest.json` next to a file output, otherwise one
    /// JSON line on stderr.
    pub fn finish(mut self, out: Option<&Path>) -> std::io::Result<()> {
        self.manifest.wall_clock_seconds = self.start.elapsed().as_secs_f64();
        let json = serde_json::to_string_pretty(&self.manifest).map_err(std::io::Error::other)?;
        match out {
            Some(p) => std::fs::write(manifest_path(p), json + "\n"),
            None => {
                let line = serde_json::json!({ "manifest": &self.manifest });
                writeln!(std::io::stderr(), "{line}")
            }
        }
    }
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// RFC 4180 field quoting.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let v: Vec<String> = fields.into_iter().map(|f| csv_field(f.as_ref())).collect();
    v.join(",") + "\n"
}
