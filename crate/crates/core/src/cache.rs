//! Persistent cache of Hecke matrices and quotient bases.
//!
//! File layout: magic `EISR1`, `u32` format version, then `u64` level, prime
//! and dimension, then `u32` entries, all little-endian. A Hecke matrix stores
//! `dim × dim` entries row-major; a basis file stores the `dim` Manin-symbol
//! indices of the basis. Files are named by the SHA-256 of a key string, and
//! Hecke keys include a fingerprint of the basis they were computed on.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};
use crate::modsym::{hecke_matrix, HeckeMatrix, HeckeSource, ModSymSpace};

pub const MAGIC: &[u8; 5] = b"EISR1";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 5 + 4 + 3 * 8;

/// Environment variable consulted when no cache directory is given.
pub const CACHE_ENV: &str = "EISRANK_CACHE";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub level: u64,
    pub p: u64,
    pub dim: u64,
    pub entries: Vec<u32>,
}

impl MatrixFile {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.entries.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&self.level.to_le_bytes());
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&self.dim.to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&e.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8], path: &Path) -> Result<Self> {
        let bad = |reason: &str| Error::CacheFormat {
            path: path.display().to_string(),
            reason: reason.to_string(),
        };
        if bytes.len() < HEADER_LEN || &bytes[..5] != MAGIC {
            return Err(bad("missing magic"));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let u64_at = |i: usize| u64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        if u32_at(5) != FORMAT_VERSION {
            return Err(bad("unsupported version"));
        }
        let body = &bytes[HEADER_LEN..];
        if !body.len().is_multiple_of(4) {
            return Err(bad("truncated entries"));
        }
        Ok(Self {
            level: u64_at(9),
            p: u64_at(17),
            dim: u64_at(25),
            entries: body
                .chunks_exact(4)
                .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
                .collect(),
        })
    }
}

/// Writes via a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn read_matrix_file(path: &Path) -> Result<Option<MatrixFile>> {
    match fs::read(path) {
        Ok(bytes) => MatrixFile::from_bytes(&bytes, path).map(Some),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn hash_key(key: &str) -> String {
    hex::encode(Sha256::digest(key.as_bytes()))
}

fn basis_key(space: &ModSymSpace) -> String {
    format!(
        "basis:M={}:p={}:sign={}",
        space.level(),
        space.p(),
        space.sign().tag()
    )
}

fn basis_fingerprint(space: &ModSymSpace) -> String {
    let mut h = Sha256::new();
    for r in space.basis_reps() {
        h.update(r.to_le_bytes());
    }
    hex::encode(&h.finalize()[..8])
}

fn hecke_key(space: &ModSymSpace, l: u64) -> String {
    format!(
        "hecke:M={}:p={}:sign={}:l={}:basis={}",
        space.level(),
        space.p(),
        space.sign().tag(),
        l,
        basis_fingerprint(space)
    )
}

/// Directory-backed cache; safe to share between threads and processes.
#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    /// The explicit directory, else `$EISRANK_CACHE`, else no cache.
    pub fn from_option_or_env(dir: Option<PathBuf>) -> Result<Option<Self>> {
        match dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)) {
            Some(d) => Self::new(d).map(Some),
            None => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.eisr", hash_key(key)))
    }

    fn store_basis(&self, space: &ModSymSpace) -> Result<()> {
        let path = self.path_for(&basis_key(space));
        let reps = space.basis_reps();
        if let Some(f) = read_matrix_file(&path)? {
            if f.entries == reps {
                return Ok(());
            }
        }
        let file = MatrixFile {
            level: space.level(),
            p: space.p(),
            dim: reps.len() as u64,
            entries: reps.to_vec(),
        };
        write_atomic(&path, &file.to_bytes())
    }

    pub fn load_hecke(&self, space: &ModSymSpace, l: u64) -> Result<Option<HeckeMatrix>> {
        let path = self.path_for(&hecke_key(space, l));
        let Some(f) = read_matrix_file(&path)? else {
            return Ok(None);
        };
        let dim = space.dim();
        if f.level != space.level()
            || f.p != space.p()
            || f.dim != dim as u64
            || f.entries.len() != dim * dim
            || f.entries.iter().any(|&x| x as u64 >= space.p())
        {
            return Err(Error::CacheFormat {
                path: path.display().to_string(),
                reason: "header or size does not match the space".into(),
            });
        }
        let dense = DenseMatrix::from_flat(dim, dim, f.entries);
        Ok(Some(HeckeMatrix {
            l,
            mat: SparseMatrix::from_dense(&dense),
        }))
    }

    pub fn store_hecke(&self, space: &ModSymSpace, t: &HeckeMatrix) -> Result<()> {
        self.store_basis(space)?;
        let file = MatrixFile {
            level: space.level(),
            p: space.p(),
            dim: space.dim() as u64,
            entries: t.mat.to_dense().data().to_vec(),
        };
        write_atomic(&self.path_for(&hecke_key(space, t.l)), &file.to_bytes())
    }
}

impl HeckeSource for MatrixCache {
    fn hecke(&self, space: &ModSymSpace, l: u64) -> Result<HeckeMatrix> {
        if let Some(t) = self.load_hecke(space, l)? {
            return Ok(t);
        }
        let t = hecke_matrix(space, l)?;
        self.store_hecke(space, &t)?;
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modsym::{build_space, Sign};

    #[test]
    fn round_trip_and_layout() {
        let f = MatrixFile {
            level: 11,
            p: 5,
            dim: 2,
            entries: vec![1, 2, 3, 4],
        };
        let bytes = f.to_bytes();
        assert_eq!(&bytes[..5], b"EISR1");
        assert_eq!(bytes.len(), 33 + 16);
        assert_eq!(u64::from_le_bytes(bytes[9..17].try_into().unwrap()), 11);
        assert_eq!(MatrixFile::from_bytes(&bytes, Path::new("x")).unwrap(), f);
        assert!(MatrixFile::from_bytes(&bytes[..10], Path::new("x")).is_err());
    }

    #[test]
    fn cached_hecke_matches_direct() {
        let dir = tempfile::tempdir().unwrap();
        let cache = MatrixCache::new(dir.path()).unwrap();
        let s = build_space(49, 5, Sign::Plus).unwrap();
        let direct = hecke_matrix(&s, 3).unwrap();
        assert_eq!(cache.hecke(&s, 3).unwrap(), direct);
        assert!(cache.load_hecke(&s, 3).unwrap().is_some());
        assert_eq!(cache.hecke(&s, 3).unwrap(), direct);
    }
}
