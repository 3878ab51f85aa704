use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::senses::{mean, Sense, VerbSenses};
use crate::corpus::{TypedVerb, VerbKey};
use crate::embedding::{EmbeddingTable, SymbolKind};
use crate::tsv::{self, data_lines, non_empty, opt};
use crate::{Error, Result};

/// The per-verb map `f` (typed verb → sense, with centroid) and the global
/// map `g` (sense → predicate cluster).
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterMaps {
    senses: Vec<Sense>,
    global: Vec<usize>,
    num_global: usize,
    by_typed: BTreeMap<TypedVerb, usize>,
    by_key: BTreeMap<VerbKey, Vec<usize>>,
}

impl ClusterMaps {
    pub fn new(senses: VerbSenses, global: Vec<usize>, num_global: usize) -> Result<Self> {
        let senses = senses.senses;
        if senses.len() != global.len() {
            return Err(Error::contract("one global id is needed per sense"));
        }
        if let Some(g) = global.iter().find(|&&g| g >= num_global) {
            return Err(Error::contract(format!("global id {g} >= {num_global}")));
        }
        let mut by_typed = BTreeMap::new();
        let mut by_key: BTreeMap<VerbKey, Vec<usize>> = BTreeMap::new();
        for (i, s) in senses.iter().enumerate() {
            by_key.entry(s.key.clone()).or_default().push(i);
            for m in &s.members {
                if by_typed.insert(m.clone(), i).is_some() {
                    return Err(Error::contract(format!("{m} belongs to two senses")));
                }
            }
        }
        Ok(Self {
            senses,
            global,
            num_global,
            by_typed,
            by_key,
        })
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn num_global(&self) -> usize {
        self.num_global
    }

    /// Global id of the sense at `position`.
    pub fn g(&self, position: usize) -> usize {
        self.global[position]
    }

    /// The sense a typed verb belongs to.
    pub fn f(&self, tv: &TypedVerb) -> Option<&Sense> {
        self.by_typed.get(tv).map(|&i| &self.senses[i])
    }

    pub fn global_of(&self, tv: &TypedVerb) -> Option<usize> {
        self.by_typed.get(tv).map(|&i| self.global[i])
    }

    pub fn senses_of(&self, key: &VerbKey) -> impl Iterator<Item = &Sense> {
        self.by_key
            .get(key)
            .into_iter()
            .flatten()
            .map(|&i| &self.senses[i])
    }

    /// Global id of the verb's largest sense (lowest local index on ties).
    pub fn fallback_global(&self, key: &VerbKey) -> Option<usize> {
        let positions = self.by_key.get(key)?;
        let mut best: Option<usize> = None;
        for &p in positions {
            best = match best {
                Some(b)
                    if self.senses[b].members.len() > self.senses[p].members.len()
                        || (self.senses[b].members.len() == self.senses[p].members.len()
                            && self.senses[b].index <= self.senses[p].index) =>
                {
                    Some(b)
                }
                _ => Some(p),
            };
        }
        best.map(|b| self.global[b])
    }

    /// Writes the cluster table (verb, preposition, subject_type,
    /// object_type, local_cluster, global_cluster) and the sense centroids.
    pub fn save(&self, clusters: impl AsRef<Path>, centroids: impl AsRef<Path>) -> Result<()> {
        let mut out = format!("#global_clusters\t{}\n", self.num_global);
        out.push_str("#verb\tpreposition\tsubject_type\tobject_type\tlocal_cluster\tglobal_cluster\n");
        for (s, g) in self.senses.iter().zip(&self.global) {
            for m in &s.members {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}",
                    m.verb,
                    opt(&m.preposition),
                    m.subject_type,
                    opt(&m.object_type),
                    s.index,
                    g
                )
                .unwrap();
            }
        }
        tsv::write_file(clusters.as_ref(), &out)?;

        let dim = self.senses.first().map_or(0, |s| s.centroid.len());
        let mut table = EmbeddingTable::new(dim);
        for s in &self.senses {
            table.insert(SymbolKind::Relation, &s.name(), &s.centroid)?;
        }
        table.save(centroids)
    }

    pub fn load(clusters: impl AsRef<Path>, centroids: impl AsRef<Path>) -> Result<Self> {
        let path = clusters.as_ref();
        let content = tsv::read_to_string(path)?;
        let num_global = content
            .lines()
            .next()
            .and_then(|l| l.strip_prefix("#global_clusters\t"))
            .and_then(|n| n.trim().parse().ok())
            .ok_or_else(|| Error::format(path, 0, "missing #global_clusters header"))?;
        let table = EmbeddingTable::load(centroids.as_ref())?;

        let mut senses: Vec<Sense> = Vec::new();
        let mut global = Vec::new();
        let mut position: BTreeMap<(VerbKey, usize), usize> = BTreeMap::new();
        for line in data_lines(&content) {
            let f = line.fields();
            let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
            if f.len() != 6 {
                return Err(err("expected 6 fields"));
            }
            let local: usize = f[4].parse().map_err(|_| err("bad local cluster"))?;
            let g: usize = f[5].parse().map_err(|_| err("bad global cluster"))?;
            let tv = TypedVerb::new(f[0], non_empty(f[1]), f[2], non_empty(f[3]));
            let key = tv.key();
            let pos = match position.get(&(key.clone(), local)) {
                Some(&p) => p,
                None => {
                    let name = format!("{key}#{local}");
                    let centroid = table
                        .lookup(SymbolKind::Relation, &name)
                        .map_err(|_| err(&format!("no centroid for {name}")))?
                        .to_vec();
                    senses.push(Sense {
                        key: key.clone(),
                        index: local,
                        members: Vec::new(),
                        centroid,
                    });
                    global.push(g);
                    position.insert((key, local), senses.len() - 1);
                    senses.len() - 1
                }
            };
            if global[pos] != g {
                return Err(err("sense mapped to two global clusters"));
            }
            senses[pos].members.push(tv);
        }
        Self::new(VerbSenses { senses }, global, num_global)
    }

    /// Largest deviation between stored centroids and the means of the
    /// member embeddings in `table`.
    pub fn centroid_deviation(&self, table: &EmbeddingTable) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for s in &self.senses {
            let vecs: Vec<&[f64]> = s
                .members
                .iter()
                .map(|m| table.lookup(SymbolKind::Relation, &m.to_string()))
                .collect::<Result<_>>()?;
            let m = mean(&vecs);
            for (a, b) in m.iter().zip(&s.centroid) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::senses::tests::table_with;
    use crate::cluster::{build_cluster_maps, PredicateConfig, SenseInventory, Thesaurus};

    fn maps() -> (EmbeddingTable, ClusterMaps) {
        let table = table_with(&[("beat", 6), ("eat", 3), ("stimulate", 7)], 8, 5);
        let mut inv = SenseInventory::default();
        inv.insert("stimulate", 6).unwrap();
        let config = PredicateConfig { k: 4, ..PredicateConfig::default() };
        let m = build_cluster_maps(&table, &inv, &Thesaurus::default(), &config, 11).unwrap();
        (table, m)
    }

    #[test]
    fn every_signature_mapped() {
        let (table, m) = maps();
        for (tv, _) in table.typed_verbs() {
            let sense = m.f(&tv).unwrap();
            assert!(sense.members.contains(&tv));
            assert!(m.global_of(&tv).unwrap() < 4);
        }
        assert!(m.centroid_deviation(&table).unwrap() <= 1e-9);
    }

    #[test]
    fn save_load_round_trip() {
        let (_, m) = maps();
        let dir = tempfile::tempdir().unwrap();
        let (c, e) = (dir.path().join("clusters.tsv"), dir.path().join("centroids.txt"));
        m.save(&c, &e).unwrap();
        let back = ClusterMaps::load(&c, &e).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn fallback_prefers_largest_then_lowest_index() {
        let (_, m) = maps();
        let key = VerbKey::bare("beat");
        let senses: Vec<&Sense> = m.senses_of(&key).collect();
        let max = senses.iter().map(|s| s.members.len()).max().unwrap();
        let pick = senses.iter().find(|s| s.members.len() == max).unwrap();
        let pos = m.senses().iter().position(|s| s == *pick).unwrap();
        assert_eq!(m.fallback_global(&key), Some(m.g(pos)));
        assert_eq!(m.fallback_global(&VerbKey::bare("unknown")), None);
    }
}
