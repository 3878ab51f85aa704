//! Per-verb argument clustering: the signatures of each verb (+ preposition)
//! are grouped into at most `k^v` senses.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::affinity::cosine_affinity;
use super::inventory::SenseInventory;
use super::spectral::spectral_cluster;
use crate::corpus::{TypedVerb, VerbKey};
use crate::embedding::EmbeddingTable;
use crate::{derive_seed, Error, Result};

/// One local cluster `C_i^v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sense {
    pub key: VerbKey,
    pub index: usize,
    pub members: Vec<TypedVerb>,
    /// Mean of the member embeddings.
    pub centroid: Vec<f64>,
}

impl Sense {
    pub fn name(&self) -> String {
        format!("{}#{}", self.key, self.index)
    }
}

/// Senses of every verb, ordered by verb key then local index.
#[derive(Debug, Clone, PartialEq)]
pub struct VerbSenses {
    pub senses: Vec<Sense>,
}

pub(crate) fn mean(vectors: &[&[f64]]) -> Vec<f64> {
    let dim = vectors[0].len();
    let mut m = vec![0.0; dim];
    for v in vectors {
        for (a, x) in m.iter_mut().zip(v.iter()) {
            *a += x;
        }
    }
    m.iter_mut().for_each(|a| *a /= vectors.len() as f64);
    m
}

fn cluster_verb(
    key: &VerbKey,
    members: &[(TypedVerb, &[f64])],
    inventory: &SenseInventory,
    seed: u64,
) -> Result<Vec<Sense>> {
    let n = members.len();
    let k = inventory.senses(&key.verb).min(n);
    let labels = if n == 1 {
        vec![0]
    } else {
        let vectors: Vec<Vec<f64>> = members.iter().map(|(_, v)| v.to_vec()).collect();
        let w = cosine_affinity(&vectors)?;
        spectral_cluster(&w, k, derive_seed(seed, &key.to_string()))?
    };
    let k = labels.iter().max().map_or(0, |m| m + 1);
    Ok((0..k)
        .map(|c| {
            let in_c: Vec<&(TypedVerb, &[f64])> =
                members.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(m, _)| m).collect();
            let vecs: Vec<&[f64]> = in_c.iter().map(|(_, v)| *v).collect();
            Sense {
                key: key.clone(),
                index: c,
                members: in_c.iter().map(|(tv, _)| tv.clone()).collect(),
                centroid: mean(&vecs),
            }
        })
        .collect())
}

/// Clusters the typed verbs in `table` verb by verb. Each verb draws its own
/// seed from `seed` and its name, so results do not depend on scheduling.
pub fn verb_argument_clusters(
    table: &EmbeddingTable,
    inventory: &SenseInventory,
    seed: u64,
) -> Result<VerbSenses> {
    let mut groups: BTreeMap<VerbKey, Vec<(TypedVerb, &[f64])>> = BTreeMap::new();
    for (tv, v) in table.typed_verbs() {
        groups.entry(tv.key()).or_default().push((tv, v));
    }
    if groups.is_empty() {
        return Err(Error::contract("embedding table holds no typed verbs"));
    }
    let groups: Vec<(VerbKey, Vec<(TypedVerb, &[f64])>)> = groups.into_iter().collect();
    let per_verb: Vec<Result<Vec<Sense>>> = groups
        .par_iter()
        .map(|(key, members)| cluster_verb(key, members, inventory, seed))
        .collect();
    let mut senses = Vec::new();
    for r in per_verb {
        senses.extend(r?);
    }
    Ok(VerbSenses { senses })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::embedding::SymbolKind;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn table_with(verbs: &[(&str, usize)], dim: usize, seed: u64) -> EmbeddingTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = EmbeddingTable::new(dim);
        for &(verb, n) in verbs {
            for i in 0..n {
                let tv = TypedVerb::new(verb, None, format!("s{i}"), Some(format!("o{i}")));
                let v: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
                table.insert(SymbolKind::Relation, &tv.to_string(), &v).unwrap();
            }
        }
        table.insert(SymbolKind::Entity, "person", &vec![0.5; dim]).unwrap();
        table
    }

    #[test]
    fn inventory_sets_sense_count() {
        let table = table_with(&[("stimulate", 9), ("beat", 5), ("eat", 1)], 10, 3);
        let mut inventory = SenseInventory::default();
        inventory.insert("stimulate", 6).unwrap();
        let senses = verb_argument_clusters(&table, &inventory, 0).unwrap();
        let count = |v: &str| senses.senses.iter().filter(|s| s.key.verb == v).count();
        assert_eq!(count("stimulate"), 6);
        assert_eq!(count("beat"), 2);
        assert_eq!(count("eat"), 1);
        assert!(senses.senses.iter().all(|s| !s.members.is_empty()));
    }

    #[test]
    fn singleton_centroid_is_its_embedding() {
        let table = table_with(&[("eat", 1)], 4, 1);
        let senses = verb_argument_clusters(&table, &SenseInventory::default(), 0).unwrap();
        let (tv, v) = &table.typed_verbs()[0];
        assert_eq!(senses.senses[0].members, vec![tv.clone()]);
        assert_eq!(senses.senses[0].centroid, v.to_vec());
    }

    #[test]
    fn deterministic_across_runs() {
        let table = table_with(&[("a", 7), ("b", 6), ("c", 8), ("d", 3)], 6, 9);
        let inv = SenseInventory::default();
        let first = verb_argument_clusters(&table, &inv, 42).unwrap();
        for _ in 0..3 {
            assert_eq!(verb_argument_clusters(&table, &inv, 42).unwrap(), first);
        }
    }

    #[test]
    fn no_typed_verbs_rejected() {
        let table = EmbeddingTable::new(3);
        assert!(verb_argument_clusters(&table, &SenseInventory::default(), 0).is_err());
    }
}
