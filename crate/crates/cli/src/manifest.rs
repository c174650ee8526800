use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::CliError;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub file: String,
    pub sha256: String,
}

/// Written as `manifest.json` next to the outputs of every run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub platform: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    /// SHA-256 of `config` serialized as compact JSON.
    pub config_sha256: String,
    pub config: RunConfig,
    pub outputs: Vec<OutputFile>,
}

/// Output directory plus the list of files written to it.
pub struct OutDir {
    pub dir: PathBuf,
    pub files: Vec<OutputFile>,
}

impl OutDir {
    /// The directory must already exist.
    pub fn open(dir: &Path) -> Result<Self, CliError> {
        if !dir.is_dir() {
            return Err(CliError::Usage(format!("output directory {} does not exist", dir.display())));
        }
        Ok(OutDir { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.files.push(OutputFile { file: name.to_string(), sha256: sha256_hex(bytes) });
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        self.write(name, text.as_bytes())
    }

    pub fn finish(mut self, command: &str, config: &RunConfig) -> Result<PathBuf, CliError> {
        let compact = serde_json::to_vec(config).map_err(|e| CliError::Io(e.to_string()))?;
        let manifest = Manifest {
            tool: "chsh-rates".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            platform: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
            seed: config.seed,
            threads: config.threads,
            config_sha256: sha256_hex(&compact),
            config: config.clone(),
            outputs: std::mem::take(&mut self.files),
        };
        self.write_json("manifest.json", &manifest)
    }
}
