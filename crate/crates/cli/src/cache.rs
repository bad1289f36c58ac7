//! On-disk Gröbner cache. Entries are keyed by the SHA-256 of the order
//! descriptor and the printed generators, and hold the order descriptor
//! followed by one basis element per line. A missing, unreadable or
//! mismatched entry is a miss.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nforge_core::arith::{parse_polynomial, Polynomial};
use nforge_core::ideal::{GroebnerBasis, Ideal};
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "NFORGE_CACHE_DIR";

#[derive(Debug, Clone)]
pub struct GroebnerCache {
    dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lookup {
    Hit,
    Miss,
}

/// The environment variable wins over the flag.
pub fn resolve_dir(flag: Option<&Path>) -> Option<PathBuf> {
    match std::env::var_os(ENV_VAR) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag.map(Path::to_path_buf),
    }
}

pub fn key(ideal: &Ideal) -> String {
    let mut h = Sha256::new();
    h.update(ideal.order().descriptor().as_bytes());
    for g in ideal.generators() {
        h.update(b"\n");
        h.update(g.to_string().as_bytes());
    }
    hex::encode(h.finalize())
}

impl GroebnerCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path(&self, ideal: &Ideal) -> PathBuf {
        self.dir.join(format!("{}.gb", key(ideal)))
    }

    fn load(&self, ideal: &Ideal) -> Option<GroebnerBasis> {
        let text = fs::read_to_string(self.path(ideal)).ok()?;
        let mut lines = text.lines();
        if lines.next()? != format!("order {}", ideal.order().descriptor()) {
            return None;
        }
        let ctx = ideal.context();
        let basis: Vec<Polynomial> = lines.map(|l| parse_polynomial(l, &ctx)).collect::<Result<_, _>>().ok()?;
        GroebnerBasis::from_reduced(ideal.order(), ideal.generators(), &basis).ok()
    }

    fn store(&self, ideal: &Ideal, gb: &GroebnerBasis) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut body = format!("order {}\n", ideal.order().descriptor());
        for g in gb.basis() {
            body.push_str(&g.to_string());
            body.push('\n');
        }
        let dest = self.path(ideal);
        let tmp = dest.with_extension(format!("gb.tmp.{}", std::process::id()));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(body.as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, &dest)
    }

    /// Seeds `ideal` from the cache or computes and stores its basis.
    pub fn groebner<'a>(&self, ideal: &'a Ideal) -> nforge_core::error::Result<(&'a GroebnerBasis, Lookup)> {
        if let Some(gb) = self.load(ideal) {
            ideal.seed_groebner(gb);
            return Ok((ideal.groebner()?, Lookup::Hit));
        }
        let gb = ideal.groebner()?;
        // advisory: a failed write only costs time later
        let _ = self.store(ideal, gb);
        Ok((gb, Lookup::Miss))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nforge_core::ideal::{Budget, MonomialOrder};
    use nforge_core::serde_poly::parse_free;

    fn ideal() -> Ideal {
        let gens = vec![parse_free("x^2 - y").unwrap(), parse_free("x*y - 1").unwrap()];
        Ideal::new(gens, MonomialOrder::degrevlex(["x", "y"]), Budget::default())
    }

    #[test]
    fn second_lookup_hits_with_same_basis() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GroebnerCache::new(dir.path());
        let a = ideal();
        let (gb, how) = cache.groebner(&a).unwrap();
        assert_eq!(how, Lookup::Miss);
        let first = gb.basis();
        let b = ideal();
        let (gb, how) = cache.groebner(&b).unwrap();
        assert_eq!(how, Lookup::Hit);
        assert_eq!(gb.basis(), first);
        assert!(!fs::read_dir(dir.path()).unwrap().any(|e| e.unwrap().file_name().to_string_lossy().contains(".tmp")));
    }

    #[test]
    fn corrupt_entry_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GroebnerCache::new(dir.path());
        let a = ideal();
        fs::write(cache.path(&a), "order lex(x)\nx\n").unwrap();
        let (_, how) = cache.groebner(&a).unwrap();
        assert_eq!(how, Lookup::Miss);
    }

    #[test]
    fn key_depends_on_order() {
        let a = ideal();
        let b = Ideal::new(a.generators().to_vec(), MonomialOrder::lex(["x", "y"]), Budget::default());
        assert_ne!(key(&a), key(&b));
    }
}
