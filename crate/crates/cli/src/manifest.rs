//! The grid manifest: every run of an experiment, its seed and its status.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use gpbo::engine::{GridCell, GridSpec};
use gpbo::mean::MeanKind;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Pending,
    Complete,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub problem: String,
    pub acquisition: String,
    pub mean: MeanKind,
    pub repeat: usize,
    pub seed: u64,
    /// Record path relative to the output directory.
    pub record: String,
    pub status: RunStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub grid: GridSpec,
    pub runs: Vec<ManifestEntry>,
}

/// `records/<problem>/<acquisition>/<mean>/<repeat>.jsonl`
pub fn record_path(cell: &GridCell) -> String {
    format!(
        "records/{}/{}/{}/{}.jsonl",
        cell.problem, cell.acquisition, cell.mean, cell.repeat
    )
}

impl Manifest {
    pub fn new(grid: GridSpec, cells: &[GridCell]) -> Self {
        let runs = cells
            .iter()
            .map(|c| ManifestEntry {
                problem: c.problem.clone(),
                acquisition: c.acquisition.clone(),
                mean: c.mean,
                repeat: c.repeat,
                seed: c.config.seed,
                record: record_path(c),
                status: RunStatus::Pending,
                error: None,
            })
            .collect();
        Self {
            schema_version: MANIFEST_VERSION,
            grid,
            runs,
        }
    }

    pub fn path(out_dir: &Path) -> PathBuf {
        out_dir.join(MANIFEST_FILE)
    }

    pub fn load(out_dir: &Path) -> Result<Self, CliError> {
        let path = Self::path(out_dir);
        let text = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let m: Self = serde_json::from_str(&text)
            .map_err(|e| CliError::Corrupt(format!("{}: {e}", path.display())))?;
        if m.schema_version != MANIFEST_VERSION {
            return Err(CliError::Corrupt(format!(
                "{}: unsupported schema_version {}",
                path.display(),
                m.schema_version
            )));
        }
        Ok(m)
    }

    /// Writes through a temporary file and a rename, so readers never see a
    /// partial manifest.
    pub fn save(&self, out_dir: &Path) -> Result<(), CliError> {
        let path = Self::path(out_dir);
        let tmp = out_dir.join(format!("{MANIFEST_FILE}.tmp"));
        let text = serde_json::to_string_pretty(self).expect("manifest serialises");
        let write = || -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(text.as_bytes())?;
            f.write_all(b"\n")?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        };
        write().map_err(|e| CliError::io(&path, e))
    }
}
