//! Output directory handling and the per-run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub threads: usize,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub outputs: Vec<OutputDigest>,
}

/// Collects payload files written during one run.
pub struct Sink {
    dir: PathBuf,
    outputs: Vec<OutputDigest>,
    started: Instant,
}

impl Sink {
    pub fn new(dir: &Path) -> std::io::Result<Sink> {
        fs::create_dir_all(dir)?;
        Ok(Sink { dir: dir.to_path_buf(), outputs: Vec::new(), started: Instant::now() })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> std::io::Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, contents)?;
        self.outputs.push(OutputDigest { file: name.to_string(), sha256: hex::encode(Sha256::digest(contents.as_bytes())) });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> std::io::Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        self.write(name, &text)
    }

    pub fn finish(
        self,
        subcommand: &str,
        params: serde_json::Value,
        seed: Option<u64>,
        exit_code: i32,
    ) -> std::io::Result<PathBuf> {
        let manifest = RunManifest {
            subcommand: subcommand.to_string(),
            params,
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            wall_time_s: self.started.elapsed().as_secs_f64(),
            exit_code,
            outputs: self.outputs,
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).map_err(std::io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}
