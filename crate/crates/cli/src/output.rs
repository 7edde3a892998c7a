//! CSV tables, atomic writes and the run manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const MANIFEST: &str = "manifest.json";
pub const FAILURES: &str = "failures.json";

pub const ENERGY_HEADER: &str = "t,E,E1,E2,fN,slack,h_eps,min_sep";
pub const SWEEP_HEADER: &str = "N,eps,hbar,E_t0,E_tfinal,slack_tfinal,weak_err_phi1,weak_err_phi2,status";
pub const QUANTIZE_HEADER: &str = "eps,hbar,kinetic,confinement,I,J,trace_id_relerr";
pub const COERCIVITY_HEADER: &str = "N,test_function,median_lhs,median_slack";
pub const EULER_HEADER: &str = "t,circulation,l1_change,omega_max";

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => fmt_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.replace([',', '\n'], ";"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

pub fn render_csv(header: &str, rows: &[Vec<Cell>]) -> String {
    let mut s = String::with_capacity(64 * (rows.len() + 1));
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(Cell::render).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn write_csv(path: &Path, header: &str, rows: &[Vec<Cell>]) -> std::io::Result<()> {
    write_atomic(path, render_csv(header, rows).as_bytes())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// Relative to the run directory, `/`-separated.
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub id: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub kind: String,
    pub version: String,
    pub config: BTreeMap<String, String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    /// `passed`, `failed` or `error: ...`.
    pub status: String,
    pub failures: Vec<Failure>,
    pub files: Vec<FileDigest>,
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in std::fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.strip_prefix(root).map(|p| p != Path::new(MANIFEST)).unwrap_or(false) {
            out.push(path);
        }
    }
    Ok(())
}

/// Digests of every file under `dir` except the manifest, sorted by path.
pub fn digest_tree(dir: &Path) -> std::io::Result<Vec<FileDigest>> {
    let mut files = Vec::new();
    collect_files(dir, dir, &mut files)?;
    let mut out = Vec::with_capacity(files.len());
    for f in files {
        let bytes = std::fs::read(&f)?;
        let rel = f.strip_prefix(dir).expect("collected under dir");
        let path = rel.components().map(|c| c.as_os_str().to_string_lossy()).collect::<Vec<_>>().join("/");
        out.push(FileDigest { path, bytes: bytes.len() as u64, sha256: sha256_hex(&bytes) });
    }
    out.sort_by(|a, b| a.path.cmp(&b.path));
    Ok(out)
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        write_atomic(&dir.join(MANIFEST), json.as_bytes())
    }

    pub fn read(dir: &Path) -> std::io::Result<RunManifest> {
        let text = std::fs::read_to_string(dir.join(MANIFEST))?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }

    /// Paths whose current content no longer matches the recorded digest.
    pub fn verify(&self, dir: &Path) -> Vec<String> {
        self.files
            .iter()
            .filter(|f| match std::fs::read(dir.join(&f.path)) {
                Ok(bytes) => sha256_hex(&bytes) != f.sha256,
                Err(_) => true,
            })
            .map(|f| f.path.clone())
            .collect()
    }
}
