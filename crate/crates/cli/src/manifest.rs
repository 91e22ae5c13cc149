use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command, Format};

pub const MANIFEST_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub twistsel: String,
    pub cli: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub started_unix_secs: f64,
    pub elapsed_secs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// `None` for standard output.
    pub path: Option<String>,
    pub format: Format,
    pub bytes: usize,
    pub sha256: String,
}

/// Everything needed to rerun a command and check its output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub manifest_version: u32,
    pub subcommand: Command,
    pub args: Cli,
    pub resolved: Value,
    pub seed: Option<u64>,
    pub versions: Versions,
    pub timing: Timing,
    pub outputs: Vec<OutputRecord>,
    pub warnings: Vec<String>,
    pub exit_code: i32,
}

pub fn digest(text: &str) -> String {
    format!("{:x}", Sha256::digest(text.as_bytes()))
}

pub fn versions() -> Versions {
    Versions { twistsel: twistsel::VERSION.into(), cli: env!("CARGO_PKG_VERSION").into() }
}
