//! On-disk resolution cache, keyed by a hash of the resolved module and the length.
//! Each entry is a directory holding a manifest and one file per layer; entries are
//! written to a scratch directory and renamed into place.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::polyrep::PolyRep;
use crate::resolution::{Combo, Engine, HomalgError, Resolution, Summand};

const SCHEMA: &str = "spf.resolution/1";

#[derive(Serialize, Deserialize)]
struct Manifest {
    schema: String,
    p: u32,
    expr: String,
    dims: Vec<usize>,
    degrees: Vec<u32>,
    length: usize,
    layer_sizes: Vec<usize>,
    terminated: bool,
    working_dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct LayerFile {
    schema: String,
    summands: Vec<Summand>,
    /// P_0 only: images of the generators in M
    augmentation: Vec<Vec<(u32, u32)>>,
    /// d_i: P_i → P_{i−1}, per summand of P_i
    differential: Vec<Vec<(u32, Combo)>>,
}

#[derive(Clone, Debug)]
pub struct ResolutionCache {
    dir: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub entries: usize,
    pub bytes: u64,
}

impl ResolutionCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResolutionCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// sha256 over the module's serialized form and the requested length.
    pub fn key(m: &PolyRep, length: usize) -> String {
        let mut h = Sha256::new();
        h.update(SCHEMA.as_bytes());
        h.update(m.to_json().as_bytes());
        h.update(length.to_le_bytes());
        hex::encode(h.finalize())
    }

    pub fn load(&self, key: &str) -> Option<Resolution> {
        let d = self.dir.join(key);
        let man: Manifest = serde_json::from_slice(&fs::read(d.join("manifest.json")).ok()?).ok()?;
        if man.schema != SCHEMA {
            return None;
        }
        let p = crate::field::Prime::new(man.p).ok()?;
        let mut res = Resolution {
            p,
            dims: man.dims,
            degrees: man.degrees,
            expr: man.expr,
            layers: Vec::new(),
            augmentation: Vec::new(),
            differentials: Vec::new(),
            terminated: man.terminated,
            working_dims: man.working_dims,
        };
        for i in 0..man.layer_sizes.len() {
            let lf: LayerFile = serde_json::from_slice(&fs::read(d.join(format!("layer-{i}.json"))).ok()?).ok()?;
            if lf.summands.len() != man.layer_sizes[i] {
                return None;
            }
            if i == 0 {
                res.augmentation = lf.augmentation;
            } else {
                res.differentials.push(lf.differential);
            }
            res.layers.push(lf.summands);
        }
        Some(res)
    }

    pub fn store(&self, key: &str, res: &Resolution) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let fin = self.dir.join(key);
        if fin.exists() {
            return Ok(());
        }
        let tmp = self.dir.join(format!(".{key}.{}.{}", std::process::id(), rand::random::<u64>()));
        fs::create_dir_all(&tmp)?;
        let man = Manifest {
            schema: SCHEMA.into(),
            p: res.p.get(),
            expr: res.expr.clone(),
            dims: res.dims.clone(),
            degrees: res.degrees.clone(),
            length: res.length(),
            layer_sizes: res.layers.iter().map(|l| l.len()).collect(),
            terminated: res.terminated,
            working_dims: res.working_dims.clone(),
        };
        for (i, l) in res.layers.iter().enumerate() {
            let lf = LayerFile {
                schema: SCHEMA.into(),
                summands: l.clone(),
                augmentation: if i == 0 { res.augmentation.clone() } else { Vec::new() },
                differential: if i > 0 { res.differentials[i - 1].clone() } else { Vec::new() },
            };
            fs::write(tmp.join(format!("layer-{i}.json")), serde_json::to_vec(&lf)?)?;
        }
        fs::write(tmp.join("manifest.json"), serde_json::to_vec_pretty(&man)?)?;
        match fs::rename(&tmp, &fin) {
            Ok(()) => Ok(()),
            // another writer finished first
            Err(_) if fin.exists() => fs::remove_dir_all(&tmp),
            Err(e) => {
                let _ = fs::remove_dir_all(&tmp);
                Err(e)
            }
        }
    }

    /// Resolve through the cache.
    pub fn resolve(&self, e: &mut Engine, m: &PolyRep, length: usize) -> Result<Resolution, HomalgError> {
        let key = Self::key(m, length);
        if let Some(r) = self.load(&key) {
            return Ok(r);
        }
        let r = e.resolve(m, length)?;
        // a failed write only costs a recomputation later
        let _ = self.store(&key, &r);
        Ok(r)
    }

    pub fn stats(&self) -> io::Result<CacheStats> {
        let mut st = CacheStats::default();
        let Ok(rd) = fs::read_dir(&self.dir) else { return Ok(st) };
        for e in rd {
            let e = e?;
            if e.file_name().to_string_lossy().starts_with('.') || !e.file_type()?.is_dir() {
                continue;
            }
            st.entries += 1;
            for f in fs::read_dir(e.path())? {
                st.bytes += f?.metadata()?.len();
            }
        }
        Ok(st)
    }

    pub fn clear(&self) -> io::Result<usize> {
        let Ok(rd) = fs::read_dir(&self.dir) else { return Ok(0) };
        let mut n = 0;
        for e in rd {
            let e = e?;
            if e.file_type()?.is_dir() {
                fs::remove_dir_all(e.path())?;
                n += 1;
            }
        }
        Ok(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Prime;
    use crate::polyrep::*;
    use crate::resolution::EngineOptions;

    #[test]
    fn round_trip_and_clear() {
        let dir = tempfile::tempdir().unwrap();
        let c = ResolutionCache::new(dir.path());
        let p = Prime::new(2).unwrap();
        let tw = frobenius_twist(&standard(p, 2), 1);
        let mut e = Engine::for_rep(&tw, EngineOptions::default());
        let r1 = c.resolve(&mut e, &tw, 3).unwrap();
        assert_eq!(c.stats().unwrap().entries, 1);
        let r2 = c.load(&ResolutionCache::key(&tw, 3)).unwrap();
        assert_eq!(r1, r2);
        let again = c.resolve(&mut e, &tw, 3).unwrap();
        assert_eq!(again, r1);
        assert_ne!(ResolutionCache::key(&tw, 3), ResolutionCache::key(&tw, 4));
        assert_eq!(c.clear().unwrap(), 1);
        assert_eq!(c.stats().unwrap(), CacheStats::default());
    }
}
