use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use log::warn;

use crate::tsv::{self, data_lines};
use crate::{Error, Result};

/// Number of senses per verb, `default_k` for verbs not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseInventory {
    counts: BTreeMap<String, usize>,
    pub default_k: usize,
}

impl Default for SenseInventory {
    fn default() -> Self {
        Self {
            counts: BTreeMap::new(),
            default_k: 2,
        }
    }
}

impl SenseInventory {
    pub fn insert(&mut self, verb: &str, senses: usize) -> Result<()> {
        if senses == 0 {
            return Err(Error::contract(format!("sense count for {verb:?} must be >= 1")));
        }
        self.counts.insert(verb.to_string(), senses);
        Ok(())
    }

    pub fn senses(&self, verb: &str) -> usize {
        self.counts.get(verb).copied().unwrap_or(self.default_k)
    }

    /// TSV: verb, sense count.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = tsv::read_to_string(path)?;
        let mut inv = Self::default();
        for line in data_lines(&content) {
            let f = line.fields();
            let err = |m: String| Error::format(path, line.offset, format!("line {}: {m}", line.number));
            if f.len() != 2 {
                return Err(err("expected verb and count".into()));
            }
            let n: usize = f[1].trim().parse().map_err(|_| err(format!("bad count {:?}", f[1])))?;
            inv.insert(&f[0].trim().to_lowercase(), n).map_err(|e| err(e.to_string()))?;
        }
        Ok(inv)
    }
}

/// Unordered antonym pairs of verbs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Thesaurus {
    antonyms: BTreeSet<(String, String)>,
}

impl Thesaurus {
    pub fn insert(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::contract(format!("verb {a:?} cannot be its own antonym")));
        }
        let pair = if a < b { (a, b) } else { (b, a) };
        self.antonyms.insert((pair.0.to_string(), pair.1.to_string()));
        Ok(())
    }

    pub fn are_antonyms(&self, a: &str, b: &str) -> bool {
        let pair = if a < b { (a, b) } else { (b, a) };
        self.antonyms.contains(&(pair.0.to_string(), pair.1.to_string()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.antonyms.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    pub fn len(&self) -> usize {
        self.antonyms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.antonyms.is_empty()
    }

    /// TSV: verb, verb, relation. Only `antonym` rows are kept.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = tsv::read_to_string(path)?;
        let mut t = Self::default();
        for line in data_lines(&content) {
            let f = line.fields();
            let err = |m: String| Error::format(path, line.offset, format!("line {}: {m}", line.number));
            if f.len() != 3 {
                return Err(err("expected verb, verb, relation".into()));
            }
            if f[2].trim() != "antonym" {
                warn!("thesaurus line {}: relation {:?} ignored", line.number, f[2]);
                continue;
            }
            let (a, b) = (f[0].trim().to_lowercase(), f[1].trim().to_lowercase());
            t.insert(&a, &b).map_err(|e| err(e.to_string()))?;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inventory_defaults_to_two() {
        let mut inv = SenseInventory::default();
        inv.insert("stimulate", 6).unwrap();
        assert_eq!(inv.senses("stimulate"), 6);
        assert_eq!(inv.senses("zorble"), 2);
        assert!(inv.insert("x", 0).is_err());
    }

    #[test]
    fn thesaurus_symmetric_irreflexive() {
        let mut t = Thesaurus::default();
        t.insert("love", "hate").unwrap();
        t.insert("hate", "love").unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.are_antonyms("hate", "love"));
        assert!(t.insert("x", "x").is_err());
    }

    #[test]
    fn files_load() {
        let dir = tempfile::tempdir().unwrap();
        let inv = dir.path().join("inv.tsv");
        std::fs::write(&inv, "stimulate\t6\n# comment\nbeat\t2\n").unwrap();
        assert_eq!(SenseInventory::load(&inv).unwrap().senses("stimulate"), 6);
        std::fs::write(&inv, "stimulate\tsix\n").unwrap();
        assert!(SenseInventory::load(&inv).is_err());

        let th = dir.path().join("th.tsv");
        std::fs::write(&th, "win\tlose\tantonym\nbig\tlarge\tsynonym\n").unwrap();
        let t = Thesaurus::load(&th).unwrap();
        assert_eq!(t.len(), 1);
    }
}
