//! Output directories. Everything except `metadata.json` is a pure function of
//! the config, so reruns are byte-identical.

use crate::config::CampaignConfig;
use crate::{io_err, CliResult};
use serde::Serialize;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};
use sweepoutlab::verifiers::{write_csv, write_json};

pub struct OutputDir {
    pub dir: PathBuf,
    name: String,
    started: SystemTime,
    clock: Instant,
}

impl OutputDir {
    /// `<root>/<name>/`, created if missing, with a copy of the config.
    pub fn create(cfg: &CampaignConfig, name: &str) -> CliResult<Self> {
        let dir = cfg.output_dir.join(name);
        std::fs::create_dir_all(&dir).map_err(|e| io_err(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
        let out = Self { dir, name: name.to_string(), started: SystemTime::now(), clock: Instant::now() };
        out.text("config.toml", &cfg.to_toml().map_err(io_err)?)?;
        Ok(out)
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    fn wrap(&self, file: &str, r: std::io::Result<()>) -> CliResult<PathBuf> {
        let p = self.path(file);
        r.map_err(|e| io_err(anyhow::anyhow!("cannot write {}: {e}", p.display())))?;
        Ok(p)
    }

    pub fn json<T: Serialize>(&self, file: &str, value: &T) -> CliResult<PathBuf> {
        self.wrap(file, write_json(&self.path(file), value))
    }

    pub fn csv<T: Serialize>(&self, file: &str, rows: &[T]) -> CliResult<PathBuf> {
        self.wrap(file, write_csv(&self.path(file), rows))
    }

    pub fn text(&self, file: &str, body: &str) -> CliResult<PathBuf> {
        self.wrap(file, std::fs::write(self.path(file), body))
    }

    /// Writes the timestamp sidecar.
    pub fn finish(&self, cfg: &CampaignConfig, passed: Option<bool>) -> CliResult<()> {
        let unix = |t: SystemTime| t.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0);
        let meta = serde_json::json!({
            "run": self.name,
            "version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "threads": rayon::current_num_threads(),
            "started_unix": unix(self.started),
            "finished_unix": unix(SystemTime::now()),
            "elapsed_seconds": self.clock.elapsed().as_secs_f64(),
            "passed": passed,
        });
        self.json("metadata.json", &meta).map(|_| ())
    }
}

/// Whitespace-separated table with a `#` header line, for gnuplot.
pub fn dat_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = format!("# {}\n", header.join(" "));
    for r in rows {
        out.push_str(&r.join(" "));
        out.push('\n');
    }
    out
}
