//! Resnik selectional preference strength and association.
//!
//! For a verb `v` and argument slot, with `P(c|v)` the verb's category
//! distribution and `P(c)` the slot prior over all verbs:
//!
//! ```text
//! S(v)   = Σ_c P(c|v) · ln(P(c|v) / P(c))
//! A(v,c) = P(c|v) · ln(P(c|v) / P(c)) / S(v)
//! ```
//!
//! Verbs with `S(v) = 0` get `A(v,·) = 0`.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use super::types::{CategoryMap, Triple, VerbKey};
use crate::tsv::{self, data_lines, non_empty, opt};
use crate::{Error, Result};

/// Strength below this is treated as exactly zero.
const ZERO_STRENGTH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Subject,
    Object,
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Slot::Subject => "subject",
            Slot::Object => "object",
        })
    }
}

impl FromStr for Slot {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subject" => Ok(Slot::Subject),
            "object" => Ok(Slot::Object),
            _ => Err(Error::contract(format!("unknown slot {s:?}"))),
        }
    }
}

/// Statistics for one (verb, slot).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotStats {
    /// Joint counts per category (fractional when an NP has several categories).
    pub counts: BTreeMap<String, f64>,
    pub total: f64,
    pub strength: f64,
    pub association: BTreeMap<String, f64>,
}

impl SlotStats {
    pub fn conditional(&self, category: &str) -> f64 {
        if self.total > 0.0 {
            self.counts.get(category).copied().unwrap_or(0.0) / self.total
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssociationTable {
    verbs: BTreeMap<(VerbKey, Slot), SlotStats>,
    priors: BTreeMap<Slot, BTreeMap<String, f64>>,
}

impl AssociationTable {
    /// Builds the table from raw (verb, slot, category, count) observations.
    pub fn from_counts<I>(observations: I) -> Self
    where
        I: IntoIterator<Item = (VerbKey, Slot, String, f64)>,
    {
        let mut verbs: BTreeMap<(VerbKey, Slot), SlotStats> = BTreeMap::new();
        let mut priors: BTreeMap<Slot, BTreeMap<String, f64>> = BTreeMap::new();
        for (verb, slot, category, count) in observations {
            let stats = verbs.entry((verb, slot)).or_default();
            *stats.counts.entry(category.clone()).or_default() += count;
            stats.total += count;
            *priors.entry(slot).or_default().entry(category).or_default() += count;
        }
        let prior_totals: BTreeMap<Slot, f64> =
            priors.iter().map(|(s, m)| (*s, m.values().sum())).collect();

        for ((_, slot), stats) in verbs.iter_mut() {
            let prior = &priors[slot];
            let prior_total = prior_totals[slot];
            let terms: Vec<(String, f64)> = stats
                .counts
                .iter()
                .map(|(c, &n)| {
                    let p_cv = n / stats.total;
                    let p_c = prior[c] / prior_total;
                    let term = if p_cv > 0.0 { p_cv * (p_cv / p_c).ln() } else { 0.0 };
                    (c.clone(), term)
                })
                .collect();
            let strength: f64 = terms.iter().map(|(_, t)| t).sum();
            if strength > ZERO_STRENGTH {
                stats.strength = strength;
                stats.association = terms.into_iter().map(|(c, t)| (c, t / strength)).collect();
            } else {
                stats.strength = 0.0;
                stats.association = terms.into_iter().map(|(c, _)| (c, 0.0)).collect();
            }
        }
        Self { verbs, priors }
    }

    pub fn stats(&self, verb: &VerbKey, slot: Slot) -> Option<&SlotStats> {
        self.verbs.get(&(verb.clone(), slot))
    }

    /// `A(v,c)`; 0 for unseen verb, slot or category.
    pub fn association(&self, verb: &VerbKey, slot: Slot, category: &str) -> f64 {
        self.stats(verb, slot)
            .and_then(|s| s.association.get(category).copied())
            .unwrap_or(0.0)
    }

    pub fn strength(&self, verb: &VerbKey, slot: Slot) -> Option<f64> {
        self.stats(verb, slot).map(|s| s.strength)
    }

    /// Marginal `P(c)` over all fillers of `slot`.
    pub fn prior(&self, slot: Slot, category: &str) -> f64 {
        let Some(m) = self.priors.get(&slot) else {
            return 0.0;
        };
        let total: f64 = m.values().sum();
        if total > 0.0 {
            m.get(category).copied().unwrap_or(0.0) / total
        } else {
            0.0
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&VerbKey, Slot, &SlotStats)> {
        self.verbs.iter().map(|((v, s), st)| (v, *s, st))
    }

    pub fn is_empty(&self) -> bool {
        self.verbs.is_empty()
    }

    /// Writes the raw counts; loading recomputes every derived quantity.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from(
            "#verb\tpreposition\tslot\tcategory\tcount\tassociation\tstrength\n",
        );
        for (verb, slot, stats) in self.iter() {
            for (cat, count) in &stats.counts {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    verb.verb,
                    opt(&verb.preposition),
                    slot,
                    cat,
                    count,
                    stats.association[cat],
                    stats.strength
                )
                .unwrap();
            }
        }
        tsv::write_file(path.as_ref(), &out)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = tsv::read_to_string(path)?;
        let mut obs = Vec::new();
        for line in data_lines(&content) {
            let f = line.fields();
            let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
            if f.len() != 7 {
                return Err(err("expected 7 fields"));
            }
            let slot: Slot = f[2].parse().map_err(|_| err("bad slot"))?;
            let count: f64 = f[4].parse().map_err(|_| err("bad count"))?;
            obs.push((VerbKey::new(f[0], non_empty(f[1])), slot, f[3].to_string(), count));
        }
        Ok(Self::from_counts(obs))
    }
}

/// Accumulates slot fillers over `triples`, splitting each triple's count
/// evenly across its noun phrase's categories, and computes associations.
/// Noun phrases missing from `cmap` are skipped for that slot.
pub fn resnik_associations(triples: &[Triple], cmap: &CategoryMap) -> AssociationTable {
    let mut obs = Vec::new();
    for t in triples {
        let key = t.verb_key();
        let slots = [(Slot::Subject, Some(&t.subject_np)), (Slot::Object, t.object_np.as_ref())];
        for (slot, np) in slots {
            let Some(cats) = np.and_then(|np| cmap.get(np)) else {
                continue;
            };
            let share = t.count as f64 / cats.len() as f64;
            for c in cats {
                obs.push((key.clone(), slot, c.clone(), share));
            }
        }
    }
    AssociationTable::from_counts(obs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn obj(verb: &str, cat: &str, n: f64) -> (VerbKey, Slot, String, f64) {
        (VerbKey::bare(verb), Slot::Object, cat.to_string(), n)
    }

    fn eat_see() -> AssociationTable {
        AssociationTable::from_counts([
            obj("eat", "food", 3.0),
            obj("eat", "person", 1.0),
            obj("see", "person", 3.0),
            obj("see", "food", 1.0),
        ])
    }

    #[test]
    fn worked_example() {
        // Oracle: P(food)=P(person)=1/2, P(food|eat)=3/4, P(person|eat)=1/4.
        let t1 = 0.75 * (0.75f64 / 0.5).ln();
        let t2 = 0.25 * (0.25f64 / 0.5).ln();
        let expected = t1 / (t1 + t2);
        let table = eat_see();
        let a = table.association(&VerbKey::bare("eat"), Slot::Object, "food");
        assert!((a - expected).abs() < 1e-12);
        assert!((a - 2.3247).abs() < 1e-4);
        assert!((table.strength(&VerbKey::bare("eat"), Slot::Object).unwrap() - (t1 + t2)).abs() < 1e-15);
    }

    #[test]
    fn single_category_verb() {
        let table = AssociationTable::from_counts([
            obj("eat", "food", 2.0),
            obj("see", "person", 3.0),
            obj("see", "food", 1.0),
        ]);
        let eat = VerbKey::bare("eat");
        let p_food = 3.0 / 6.0;
        assert!((table.strength(&eat, Slot::Object).unwrap() + f64::ln(p_food)).abs() < 1e-12);
        assert!((table.association(&eat, Slot::Object, "food") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_strength_gives_zero_association() {
        let table = AssociationTable::from_counts([
            obj("a", "x", 1.0),
            obj("a", "y", 1.0),
            obj("b", "x", 2.0),
            obj("b", "y", 2.0),
        ]);
        let a = VerbKey::bare("a");
        assert_eq!(table.strength(&a, Slot::Object), Some(0.0));
        assert_eq!(table.association(&a, Slot::Object, "x"), 0.0);
        assert_eq!(table.association(&a, Slot::Object, "y"), 0.0);
    }

    #[test]
    fn ambiguous_np_splits_count() {
        let mut cmap = CategoryMap::new();
        cmap.insert("apple", ["food", "company"]).unwrap();
        cmap.insert("i", ["person"]).unwrap();
        let triples = vec![Triple::new("i", "eat", None, Some("apple"), 4).unwrap()];
        let table = resnik_associations(&triples, &cmap);
        let st = table.stats(&VerbKey::bare("eat"), Slot::Object).unwrap();
        assert_eq!(st.counts["food"], 2.0);
        assert_eq!(st.counts["company"], 2.0);
        // Missing NP: no slot entry at all.
        let triples = vec![Triple::new("nobody", "eat", None, Some("apple"), 1).unwrap()];
        let table = resnik_associations(&triples, &cmap);
        assert!(table.stats(&VerbKey::bare("eat"), Slot::Subject).is_none());
    }

    #[test]
    fn save_load_reproduces_table() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("assoc.tsv");
        let table = eat_see();
        table.save(&p).unwrap();
        assert_eq!(AssociationTable::load(&p).unwrap(), table);
    }
}
