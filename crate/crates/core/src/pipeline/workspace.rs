//! On-disk checkpoint state.
//!
//! A workspace directory holds `manifest.json`, the canonical input text and
//! one artifact file per completed unit. Artifacts are written to a temporary
//! file, synced and renamed into place; only then is the unit appended to the
//! manifest ledger together with the SHA-256 of the file contents.
//!
//! Artifact layout (all integers little-endian):
//!
//! ```text
//! magic    8 bytes   "PDETRES\0" (residues) or "PDETINT\0" (signed integers)
//! version  u32       1
//! ndim     u32
//! shape    ndim x u64
//! residues: modulus u64, then prod(shape) x u64 row-major
//! integers: prod(shape) x (u32 byte length, two's-complement LE bytes)
//! ```

use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::PipelineError;

pub const RESIDUE_MAGIC: [u8; 8] = *b"PDETRES\0";
pub const INTEGER_MAGIC: [u8; 8] = *b"PDETINT\0";
pub const ARTIFACT_VERSION: u32 = 1;
pub const MANIFEST_FORMAT: u32 = 1;

const MANIFEST: &str = "manifest.json";
const INPUT: &str = "input.poly";

/// Planning parameters recorded so a workspace can be resumed on its own.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredConfig {
    pub prime_start: u64,
    pub min_primes: usize,
    pub scan_limit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub unit: String,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: u32,
    pub input_hash: String,
    pub plan_hash: String,
    pub config: StoredConfig,
    pub primes: Vec<u64>,
    pub shape: Vec<usize>,
    pub ledger: Vec<LedgerEntry>,
    pub complete: bool,
}

impl Manifest {
    pub fn find(&self, unit: &str) -> Option<&LedgerEntry> {
        self.ledger.iter().find(|e| e.unit == unit)
    }
}

/// Handle on a checkpoint directory.
#[derive(Clone, Debug)]
pub struct Workspace {
    root: PathBuf,
}

impl Workspace {
    /// Opens (creating if needed) the directory at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|e| PipelineError::io(&root, e))?;
        Ok(Workspace { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.root.join(MANIFEST)
    }

    pub fn load_manifest(&self) -> Result<Option<Manifest>, PipelineError> {
        let path = self.manifest_path();
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(PipelineError::io(path, e)),
        };
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| PipelineError::CheckpointInvalid(format!("manifest does not parse: {e}")))?;
        if manifest.format != MANIFEST_FORMAT {
            return Err(PipelineError::CheckpointInvalid(format!("manifest format {} unsupported", manifest.format)));
        }
        Ok(Some(manifest))
    }

    pub fn save_manifest(&self, manifest: &Manifest) -> Result<(), PipelineError> {
        let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
        self.write_atomic(MANIFEST, text.as_bytes())
    }

    pub fn read_input(&self) -> Result<String, PipelineError> {
        let path = self.root.join(INPUT);
        fs::read_to_string(&path).map_err(|e| PipelineError::io(path, e))
    }

    pub fn write_input(&self, text: &str) -> Result<(), PipelineError> {
        self.write_atomic(INPUT, text.as_bytes())
    }

    /// Writes `bytes` under `name` via temp file, fsync and rename; returns
    /// the content checksum.
    pub fn write_artifact(&self, name: &str, bytes: &[u8]) -> Result<String, PipelineError> {
        self.write_atomic(name, bytes)?;
        Ok(sha256_hex(bytes))
    }

    /// Reads an artifact and verifies it against its ledger checksum.
    pub fn read_artifact(&self, entry: &LedgerEntry) -> Result<Vec<u8>, PipelineError> {
        let path = self.root.join(&entry.file);
        let bytes = fs::read(&path).map_err(|e| {
            PipelineError::CheckpointInvalid(format!("{} for unit {}: {e}", path.display(), entry.unit))
        })?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(PipelineError::CheckpointInvalid(format!(
                "checksum mismatch for unit {} ({})",
                entry.unit, entry.file
            )));
        }
        Ok(bytes)
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> Result<(), PipelineError> {
        let target = self.root.join(name);
        let tmp = self.root.join(format!("{name}.tmp"));
        {
            let mut f = OpenOptions::new()
                .create(true)
                .write(true)
                .truncate(true)
                .open(&tmp)
                .map_err(|e| PipelineError::io(&tmp, e))?;
            f.write_all(bytes).map_err(|e| PipelineError::io(&tmp, e))?;
            f.sync_all().map_err(|e| PipelineError::io(&tmp, e))?;
        }
        fs::rename(&tmp, &target).map_err(|e| PipelineError::io(&target, e))?;
        // the rename itself is durable only once the directory is synced
        if let Ok(dir) = File::open(&self.root) {
            let _ = dir.sync_all();
        }
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn header(magic: [u8; 8], shape: &[usize]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * shape.len());
    out.extend_from_slice(&magic);
    out.extend_from_slice(&ARTIFACT_VERSION.to_le_bytes());
    out.extend_from_slice(&(shape.len() as u32).to_le_bytes());
    for &n in shape {
        out.extend_from_slice(&(n as u64).to_le_bytes());
    }
    out
}

pub fn encode_residues(shape: &[usize], modulus: u64, values: &[u64]) -> Vec<u8> {
    let mut out = header(RESIDUE_MAGIC, shape);
    out.reserve(8 + 8 * values.len());
    out.extend_from_slice(&modulus.to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn encode_integers(shape: &[usize], values: &[BigInt]) -> Vec<u8> {
    let mut out = header(INTEGER_MAGIC, shape);
    for v in values {
        let bytes = v.to_signed_bytes_le();
        out.extend_from_slice(&(bytes.len() as u32).to_le_bytes());
        out.extend_from_slice(&bytes);
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], PipelineError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| PipelineError::CheckpointInvalid("artifact truncated".into()))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, PipelineError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, PipelineError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn header(&mut self, magic: [u8; 8]) -> Result<Vec<usize>, PipelineError> {
        if self.take(8)? != magic {
            return Err(PipelineError::CheckpointInvalid("bad artifact magic".into()));
        }
        let version = self.u32()?;
        if version != ARTIFACT_VERSION {
            return Err(PipelineError::CheckpointInvalid(format!("artifact version {version}")));
        }
        let ndim = self.u32()? as usize;
        (0..ndim).map(|_| self.u64().map(|n| n as usize)).collect()
    }

    fn finish(&self) -> Result<(), PipelineError> {
        if self.pos != self.bytes.len() {
            return Err(PipelineError::CheckpointInvalid("trailing bytes in artifact".into()));
        }
        Ok(())
    }
}

/// Returns `(shape, modulus, values)`.
pub fn decode_residues(bytes: &[u8]) -> Result<(Vec<usize>, u64, Vec<u64>), PipelineError> {
    let mut r = Reader { bytes, pos: 0 };
    let shape = r.header(RESIDUE_MAGIC)?;
    let modulus = r.u64()?;
    let len: usize = shape.iter().product();
    let values = (0..len).map(|_| r.u64()).collect::<Result<Vec<_>, _>>()?;
    r.finish()?;
    if values.iter().any(|&v| v >= modulus) {
        return Err(PipelineError::CheckpointInvalid("residue out of range".into()));
    }
    Ok((shape, modulus, values))
}

pub fn decode_integers(bytes: &[u8]) -> Result<(Vec<usize>, Vec<BigInt>), PipelineError> {
    let mut r = Reader { bytes, pos: 0 };
    let shape = r.header(INTEGER_MAGIC)?;
    let len: usize = shape.iter().product();
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        let n = r.u32()? as usize;
        values.push(BigInt::from_signed_bytes_le(r.take(n)?));
    }
    r.finish()?;
    Ok((shape, values))
}
