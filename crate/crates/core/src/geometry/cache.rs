//! On-disk cache of facet enumerations, keyed by a hash of the vertex set.

use std::fs;
use std::path::{Path, PathBuf};

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{facet_enumeration, HPolytope, VPolytope};
use crate::error::Result;

/// SHA-256 of the sorted vertex list, as lowercase hex.
pub fn content_hash(vp: &VPolytope) -> String {
    let mut vertices: Vec<String> = vp.vertices().iter().map(|v| v.to_string()).collect();
    vertices.sort();
    let mut hasher = Sha256::new();
    hasher.update(format!("dim={};n={}\n", vp.dim(), vp.len()));
    for v in &vertices {
        hasher.update(v.as_bytes());
        hasher.update(b"\n");
    }
    hex::encode(hasher.finalize())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Built,
    /// A file existed but was unreadable or inconsistent with the vertices.
    Rebuilt,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    hash: String,
    polytope: HPolytope,
}

#[derive(Clone, Debug)]
pub struct HullCache {
    dir: PathBuf,
}

impl HullCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.hrep.json"))
    }

    fn load(&self, path: &Path, hash: &str, vp: &VPolytope) -> Option<HPolytope> {
        let text = fs::read_to_string(path).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        (file.hash == hash && consistent(&file.polytope, vp)).then_some(file.polytope)
    }
}

/// Every facet and equality must hold on every vertex, and every facet must be tight somewhere.
fn consistent(hp: &HPolytope, vp: &VPolytope) -> bool {
    hp.ambient_dim == vp.dim()
        && hp.facets.iter().all(|f| {
            f.dim() == vp.dim()
                && vp.vertices().iter().all(|v| !f.evaluate(v).is_negative())
                && vp.vertices().iter().any(|v| f.evaluate(v).is_zero())
        })
        && hp
            .equalities
            .iter()
            .all(|e| e.dim() == vp.dim() && vp.vertices().iter().all(|v| e.evaluate(v).is_zero()))
}

/// Facet enumeration that reuses `cache/<name>.hrep.json` when it matches `vp`.
pub fn facet_enumeration_cached(
    vp: &VPolytope,
    cache: &HullCache,
    name: &str,
) -> Result<(HPolytope, CacheStatus)> {
    let hash = content_hash(vp);
    let path = cache.path_for(name);
    let existed = path.exists();
    if existed {
        if let Some(hp) = cache.load(&path, &hash, vp) {
            return Ok((hp, CacheStatus::Hit));
        }
    }
    let hp = facet_enumeration(vp)?;
    fs::create_dir_all(&cache.dir)?;
    let file = CacheFile {
        hash,
        polytope: hp,
    };
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_string(&file)?)?;
    fs::rename(&tmp, &path)?;
    let status = if existed {
        CacheStatus::Rebuilt
    } else {
        CacheStatus::Built
    };
    Ok((file.polytope, status))
}
