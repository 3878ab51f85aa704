use std::collections::{BTreeMap, BTreeSet};

use log::warn;

use super::resnik::{AssociationTable, Slot};
use super::types::{CategoryMap, Triple, TypedTriple, TypedVerb, VerbKey};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TypingConfig {
    /// Minimum association on every filled slot.
    pub tau: f64,
    /// Minimum aggregate count of a signature.
    pub min_sig_count: u64,
}

impl Default for TypingConfig {
    fn default() -> Self {
        Self {
            tau: 0.0,
            min_sig_count: 2,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypingOutput {
    pub typed: Vec<TypedTriple>,
    /// Verbs that had typable triples but no surviving signature.
    pub dropped_verbs: Vec<VerbKey>,
}

/// Picks the category of `np` with maximal association for `verb`/`slot`,
/// breaking ties by the lexicographically smaller category.
pub fn assign_type(
    cmap: &CategoryMap,
    assoc: &AssociationTable,
    verb: &VerbKey,
    slot: Slot,
    np: &str,
) -> Option<String> {
    let cats = cmap.get(np)?;
    let mut best: Option<(&String, f64)> = None;
    for c in cats {
        let a = assoc.association(verb, slot, c);
        best = match best {
            Some((bc, ba)) if ba > a || (ba == a && bc <= c) => Some((bc, ba)),
            _ => Some((c, a)),
        };
    }
    best.map(|(c, _)| c.clone())
}

fn type_triple(t: &Triple, cmap: &CategoryMap, assoc: &AssociationTable) -> Option<TypedVerb> {
    let key = t.verb_key();
    let subject_type = assign_type(cmap, assoc, &key, Slot::Subject, &t.subject_np)?;
    let object_type = match &t.object_np {
        Some(np) => Some(assign_type(cmap, assoc, &key, Slot::Object, np)?),
        None => None,
    };
    Some(TypedVerb::new(
        t.verb.clone(),
        t.preposition.clone(),
        subject_type,
        object_type,
    ))
}

/// Aggregate count per signature.
pub fn signature_counts(typed: &[TypedTriple]) -> BTreeMap<TypedVerb, u64> {
    let mut counts = BTreeMap::new();
    for t in typed {
        *counts.entry(t.typed_verb.clone()).or_insert(0) += t.count;
    }
    counts
}

/// Types every triple's arguments and keeps signatures that pass the
/// association and frequency filters. Input order is preserved; triples
/// with untypable arguments are skipped.
pub fn build_typed_triples(
    triples: &[Triple],
    cmap: &CategoryMap,
    assoc: &AssociationTable,
    config: TypingConfig,
) -> TypingOutput {
    let candidates: Vec<TypedTriple> = triples
        .iter()
        .filter_map(|t| {
            type_triple(t, cmap, assoc).map(|tv| TypedTriple {
                subject_np: t.subject_np.clone(),
                typed_verb: tv,
                object_np: t.object_np.clone(),
                count: t.count,
            })
        })
        .collect();

    let kept: BTreeSet<TypedVerb> = signature_counts(&candidates)
        .into_iter()
        .filter(|(tv, count)| {
            let key = tv.key();
            let subj_ok = assoc.association(&key, Slot::Subject, &tv.subject_type) >= config.tau;
            let obj_ok = tv
                .object_type
                .as_ref()
                .is_none_or(|o| assoc.association(&key, Slot::Object, o) >= config.tau);
            subj_ok && obj_ok && *count >= config.min_sig_count
        })
        .map(|(tv, _)| tv)
        .collect();

    let seen: BTreeSet<VerbKey> = candidates.iter().map(|t| t.typed_verb.key()).collect();
    let surviving: BTreeSet<VerbKey> = kept.iter().map(TypedVerb::key).collect();
    let dropped_verbs: Vec<VerbKey> = seen.difference(&surviving).cloned().collect();
    if !dropped_verbs.is_empty() {
        let names: Vec<String> = dropped_verbs.iter().map(ToString::to_string).collect();
        warn!("no surviving signatures for verbs: {}", names.join(", "));
    }

    TypingOutput {
        typed: candidates
            .into_iter()
            .filter(|t| kept.contains(&t.typed_verb))
            .collect(),
        dropped_verbs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::resnik_associations;

    fn cmap(entries: &[(&str, &[&str])]) -> CategoryMap {
        let mut m = CategoryMap::new();
        for (np, cats) in entries {
            m.insert(np, cats.iter()).unwrap();
        }
        m
    }

    #[test]
    fn marry_gets_person_person() {
        let m = cmap(&[
            ("barack_obama", &["person"]),
            ("michelle_obama", &["person"]),
            ("tom_hanks", &["person"]),
            ("rita_wilson", &["person"]),
        ]);
        let triples = vec![
            Triple::new("barack_obama", "marry", None, Some("michelle_obama"), 1).unwrap(),
            Triple::new("tom_hanks", "marry", None, Some("rita_wilson"), 1).unwrap(),
        ];
        let assoc = resnik_associations(&triples, &m);
        let out = build_typed_triples(&triples, &m, &assoc, TypingConfig::default());
        assert_eq!(out.typed.len(), 2);
        assert_eq!(out.typed[0].typed_verb.to_string(), "marry(person,person)");
        assert!(out.dropped_verbs.is_empty());
    }

    #[test]
    fn tie_breaks_lexicographically() {
        let m = cmap(&[("x", &["zebra", "apple"])]);
        let assoc = AssociationTable::default();
        let t = assign_type(&m, &assoc, &VerbKey::bare("v"), Slot::Subject, "x");
        assert_eq!(t.as_deref(), Some("apple"));
    }

    #[test]
    fn single_category_wins_regardless() {
        let m = cmap(&[("x", &["rare"])]);
        let assoc = AssociationTable::from_counts([(
            VerbKey::bare("v"),
            Slot::Subject,
            "common".to_string(),
            10.0,
        )]);
        let t = assign_type(&m, &assoc, &VerbKey::bare("v"), Slot::Subject, "x");
        assert_eq!(t.as_deref(), Some("rare"));
    }

    #[test]
    fn highest_association_wins() {
        let m = cmap(&[
            ("apple", &["company", "food"]),
            ("bread", &["food"]),
            ("google", &["company"]),
            ("i", &["person"]),
        ]);
        let triples = vec![
            Triple::new("i", "eat", None, Some("apple"), 2).unwrap(),
            Triple::new("i", "eat", None, Some("bread"), 4).unwrap(),
            Triple::new("i", "sue", None, Some("google"), 4).unwrap(),
        ];
        let assoc = resnik_associations(&triples, &m);
        let eat = VerbKey::bare("eat");
        assert_eq!(
            assign_type(&m, &assoc, &eat, Slot::Object, "apple").as_deref(),
            Some("food")
        );
        assert_eq!(
            assign_type(&m, &assoc, &VerbKey::bare("sue"), Slot::Object, "apple").as_deref(),
            Some("company")
        );
    }

    #[test]
    fn rare_signatures_and_verbs_dropped() {
        let m = cmap(&[("i", &["person"]), ("bed", &["location"])]);
        let triples = vec![
            Triple::new("i", "sleep", Some("in"), Some("bed"), 1).unwrap(),
            Triple::new("i", "sleep", None, None, 3).unwrap(),
        ];
        let assoc = resnik_associations(&triples, &m);
        let out = build_typed_triples(&triples, &m, &assoc, TypingConfig::default());
        assert_eq!(out.typed.len(), 1);
        assert_eq!(out.typed[0].typed_verb.to_string(), "sleep(person)");
        assert_eq!(out.dropped_verbs, vec![VerbKey::new("sleep", Some("in".into()))]);

        let out = build_typed_triples(
            &triples,
            &m,
            &assoc,
            TypingConfig { tau: 0.0, min_sig_count: 1 },
        );
        assert_eq!(out.typed[0].typed_verb.to_string(), "sleep+in(person,location)");
    }
}
