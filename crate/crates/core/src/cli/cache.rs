//! Content-addressed on-disk cache of assembled matrices in the triplet format.
//!
//! Each entry is `<key>.triplets`, whose first line `# sha256 <hex>` checksums the rest.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactla::{LinAlgError, SparseRationalMatrix};
use crate::pde::Parity;
use crate::ratexpr::{format_rational, Rational};

/// Environment variable naming the cache root when no directory is given explicitly.
pub const CACHE_ENV: &str = "INTEGRABILITY_CACHE_DIR";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache I/O error at {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cache entry {0} is corrupt (checksum mismatch)")]
    Corrupt(PathBuf),
    #[error("cache entry {path} does not parse: {source}")]
    Parse { path: PathBuf, source: LinAlgError },
}

pub fn sha256_hex(data: &[u8]) -> String {
    format!("{:x}", Sha256::digest(data))
}

/// Key over everything that determines the matrix: the Hamiltonian, degree, parity, level and point.
pub fn matrix_key(hamiltonian_text: &str, degree: u32, parity: Parity, n: u32, point: &[Rational; 2]) -> String {
    let material = format!(
        "v1|{}|deg={}|par={}|n={}|pt={},{}",
        hamiltonian_text,
        degree,
        parity,
        n,
        format_rational(&point[0]),
        format_rational(&point[1])
    );
    sha256_hex(material.as_bytes())
}

#[derive(Clone, Debug)]
pub struct MatrixCache {
    dir: PathBuf,
}

impl MatrixCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self, CacheError> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| CacheError::Io { path: dir.clone(), source })?;
        Ok(MatrixCache { dir })
    }

    /// `--cache-dir` if given, else the environment variable, else no cache.
    pub fn resolve(explicit: Option<&Path>) -> Result<Option<Self>, CacheError> {
        match explicit {
            Some(p) => Ok(Some(Self::new(p)?)),
            None => match std::env::var_os(CACHE_ENV) {
                Some(p) if !p.is_empty() => Ok(Some(Self::new(PathBuf::from(p))?)),
                _ => Ok(None),
            },
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{}.triplets", key))
    }

    pub fn store(&self, key: &str, m: &SparseRationalMatrix) -> Result<(), CacheError> {
        let body = m.to_triplets();
        let path = self.path(key);
        let tmp = self.dir.join(format!("{}.tmp{}", key, std::process::id()));
        let io = |source| CacheError::Io { path: path.clone(), source };
        let mut f = fs::File::create(&tmp).map_err(io)?;
        writeln!(f, "# sha256 {}", sha256_hex(body.as_bytes())).map_err(io)?;
        f.write_all(body.as_bytes()).map_err(io)?;
        drop(f);
        fs::rename(&tmp, &path).map_err(io)
    }

    /// `Ok(None)` when absent; an error when present but corrupt.
    pub fn load(&self, key: &str) -> Result<Option<SparseRationalMatrix>, CacheError> {
        let path = self.path(key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(source) => return Err(CacheError::Io { path, source }),
        };
        let (head, body) = text.split_once('\n').ok_or_else(|| CacheError::Corrupt(path.clone()))?;
        let want = head.strip_prefix("# sha256 ").ok_or_else(|| CacheError::Corrupt(path.clone()))?;
        if sha256_hex(body.as_bytes()) != want.trim() {
            return Err(CacheError::Corrupt(path));
        }
        SparseRationalMatrix::from_triplets(body).map(Some).map_err(|source| CacheError::Parse { path, source })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratexpr::{int, ratio};

    #[test]
    fn round_trip_and_corruption() {
        let dir = std::env::temp_dir().join(format!("integrability-cache-test-{}", std::process::id()));
        let c = MatrixCache::new(&dir).unwrap();
        let m = SparseRationalMatrix::from_dense(&[vec![int(1), ratio(-2, 3)], vec![int(0), int(5)]]);
        let pt = [ratio(1, 2), int(2)];
        let k = matrix_key("H", 6, Parity::Even, 3, &pt);
        assert!(c.load(&k).unwrap().is_none());
        c.store(&k, &m).unwrap();
        assert_eq!(c.load(&k).unwrap(), Some(m));
        assert_ne!(k, matrix_key("H", 6, Parity::Even, 3, &[ratio(1, 3), int(3)]));
        let p = c.path(&k);
        let t = fs::read_to_string(&p).unwrap().replace("-2/3", "-2/5");
        fs::write(&p, t).unwrap();
        assert!(matches!(c.load(&k), Err(CacheError::Corrupt(_))));
        fs::remove_dir_all(dir).unwrap();
    }
}
