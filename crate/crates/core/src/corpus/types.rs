use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// A verb lemma with its optional attached preposition ("sleep+in").
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VerbKey {
    pub verb: String,
    pub preposition: Option<String>,
}

impl VerbKey {
    pub fn new(verb: impl Into<String>, preposition: Option<String>) -> Self {
        Self {
            verb: verb.into(),
            preposition,
        }
    }

    pub fn bare(verb: impl Into<String>) -> Self {
        Self::new(verb, None)
    }
}

impl fmt::Display for VerbKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.preposition {
            Some(p) => write!(f, "{}+{}", self.verb, p),
            None => f.write_str(&self.verb),
        }
    }
}

/// One observed kernel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub subject_np: String,
    pub verb: String,
    pub preposition: Option<String>,
    pub object_np: Option<String>,
    pub count: u64,
}

impl Triple {
    pub fn new(
        subject_np: &str,
        verb: &str,
        preposition: Option<&str>,
        object_np: Option<&str>,
        count: u64,
    ) -> Result<Self> {
        let norm = |s: &str| s.trim().to_lowercase();
        let subject_np = norm(subject_np);
        let verb = norm(verb);
        let preposition = preposition.map(norm).filter(|s| !s.is_empty());
        let object_np = object_np.map(norm).filter(|s| !s.is_empty());
        if verb.is_empty() {
            return Err(Error::contract("empty verb"));
        }
        if subject_np.is_empty() {
            return Err(Error::contract("empty subject"));
        }
        if count == 0 {
            return Err(Error::contract("count must be at least 1"));
        }
        if preposition.is_some() && object_np.is_none() {
            return Err(Error::contract("preposition without a prepositional object"));
        }
        Ok(Self {
            subject_np,
            verb,
            preposition,
            object_np,
            count,
        })
    }

    pub fn verb_key(&self) -> VerbKey {
        VerbKey::new(self.verb.clone(), self.preposition.clone())
    }
}

/// Noun phrase to ordered, duplicate-free category list.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CategoryMap {
    entries: BTreeMap<String, Vec<String>>,
}

impl CategoryMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `np` with `categories`, dropping duplicates but keeping order.
    pub fn insert<I, S>(&mut self, np: &str, categories: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut cats: Vec<String> = Vec::new();
        for c in categories {
            let c = c.as_ref().trim().to_lowercase();
            if !c.is_empty() && !cats.contains(&c) {
                cats.push(c);
            }
        }
        if cats.is_empty() {
            return Err(Error::contract(format!("no categories for noun phrase {np:?}")));
        }
        self.entries.insert(np.trim().to_lowercase(), cats);
        Ok(())
    }

    pub fn get(&self, np: &str) -> Option<&[String]> {
        self.entries.get(np).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }
}

/// A verb (+ preposition) with its argument type signature, e.g.
/// `marry(person,person)` or `sleep+in(person,location)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypedVerb {
    pub verb: String,
    pub preposition: Option<String>,
    pub subject_type: String,
    pub object_type: Option<String>,
}

impl TypedVerb {
    pub fn new(
        verb: impl Into<String>,
        preposition: Option<String>,
        subject_type: impl Into<String>,
        object_type: Option<String>,
    ) -> Self {
        Self {
            verb: verb.into(),
            preposition,
            subject_type: subject_type.into(),
            object_type,
        }
    }

    pub fn key(&self) -> VerbKey {
        VerbKey::new(self.verb.clone(), self.preposition.clone())
    }

    /// Pure intransitive: no preposition and no object type.
    pub fn is_intransitive(&self) -> bool {
        self.object_type.is_none()
    }
}

impl fmt::Display for TypedVerb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}", self.key(), self.subject_type)?;
        if let Some(o) = &self.object_type {
            write!(f, ",{o}")?;
        }
        f.write_str(")")
    }
}

impl FromStr for TypedVerb {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::contract(format!("malformed typed verb {s:?}"));
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let head = &s[..open];
        let (verb, preposition) = match head.split_once('+') {
            Some((v, p)) => (v, Some(p.to_string())),
            None => (head, None),
        };
        let (subject_type, object_type) = match inner.split_once(',') {
            Some((a, b)) => (a, Some(b.to_string())),
            None => (inner, None),
        };
        if verb.is_empty() || subject_type.is_empty() || object_type.as_deref() == Some("") {
            return Err(bad());
        }
        Ok(Self::new(verb, preposition, subject_type, object_type))
    }
}

/// A triple whose verb carries its type signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TypedTriple {
    pub subject_np: String,
    pub typed_verb: TypedVerb,
    pub object_np: Option<String>,
    pub count: u64,
}
