use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::types::{CategoryMap, Triple, TypedTriple, TypedVerb};
use crate::tsv::{self, data_lines, non_empty, opt};
use crate::{Error, Result};

/// A skipped input line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Per-line problems collected while loading; never fatal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub errors: Vec<LineError>,
}

impl LoadReport {
    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    fn push(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(LineError {
            line,
            message: message.into(),
        });
    }
}

/// Reads a triples TSV: subject, verb, preposition, object, count.
pub fn load_triples(path: impl AsRef<Path>, min_count: u64) -> Result<(Vec<Triple>, LoadReport)> {
    let content = tsv::read_to_string(path.as_ref())?;
    Ok(parse_triples(&content, min_count))
}

pub fn parse_triples(content: &str, min_count: u64) -> (Vec<Triple>, LoadReport) {
    let mut triples = Vec::new();
    let mut report = LoadReport::default();
    for line in data_lines(content) {
        let fields = line.fields();
        if fields.len() != 5 {
            report.push(line.number, format!("expected 5 fields, found {}", fields.len()));
            continue;
        }
        let count: u64 = match fields[4].trim().parse() {
            Ok(c) => c,
            Err(_) => {
                report.push(line.number, format!("non-integer count {:?}", fields[4]));
                continue;
            }
        };
        match Triple::new(fields[0], fields[1], Some(fields[2]), Some(fields[3]), count) {
            Ok(t) if t.count >= min_count => triples.push(t),
            Ok(_) => {}
            Err(e) => report.push(line.number, e.to_string()),
        }
    }
    (triples, report)
}

/// Reads a category map TSV: noun phrase, comma-separated categories.
pub fn load_category_map(path: impl AsRef<Path>) -> Result<CategoryMap> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    parse_category_map(&content).map_err(|(offset, msg)| Error::format(path, offset, msg))
}

pub fn parse_category_map(content: &str) -> std::result::Result<CategoryMap, (u64, String)> {
    let mut map = CategoryMap::new();
    for line in data_lines(content) {
        let fields = line.fields();
        if fields.len() != 2 {
            return Err((line.offset, format!("line {}: expected 2 fields", line.number)));
        }
        map.insert(fields[0], fields[1].split(','))
            .map_err(|e| (line.offset, format!("line {}: {e}", line.number)))?;
    }
    Ok(map)
}

const TYPED_HEADER: &str = "#subject_np\tverb\tpreposition\tsubject_type\tobject_type\tobject_np\tcount\n";

/// Writes typed triples, one per line, in the given order.
pub fn save_typed_triples(path: impl AsRef<Path>, typed: &[TypedTriple]) -> Result<()> {
    let mut out = String::from(TYPED_HEADER);
    for t in typed {
        let tv = &t.typed_verb;
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.subject_np,
            tv.verb,
            opt(&tv.preposition),
            tv.subject_type,
            opt(&tv.object_type),
            opt(&t.object_np),
            t.count
        )
        .unwrap();
    }
    tsv::write_file(path.as_ref(), &out)
}

pub fn load_typed_triples(path: impl AsRef<Path>) -> Result<Vec<TypedTriple>> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    let mut typed = Vec::new();
    for line in data_lines(&content) {
        let f = line.fields();
        let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
        if f.len() != 7 {
            return Err(err("expected 7 fields"));
        }
        let count = f[6].parse().map_err(|_| err("bad count"))?;
        if f[1].is_empty() || f[3].is_empty() {
            return Err(err("empty verb or subject type"));
        }
        typed.push(TypedTriple {
            subject_np: f[0].to_string(),
            typed_verb: TypedVerb::new(f[1], non_empty(f[2]), f[3], non_empty(f[4])),
            object_np: non_empty(f[5]),
            count,
        });
    }
    Ok(typed)
}

/// Writes aggregated signatures: verb, preposition, subject_type, object_type, count.
pub fn save_signatures(path: impl AsRef<Path>, signatures: &BTreeMap<TypedVerb, u64>) -> Result<()> {
    let mut out = String::from("#verb\tpreposition\tsubject_type\tobject_type\tcount\n");
    for (tv, count) in signatures {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            tv.verb,
            opt(&tv.preposition),
            tv.subject_type,
            opt(&tv.object_type),
            count
        )
        .unwrap();
    }
    tsv::write_file(path.as_ref(), &out)
}

pub fn load_signatures(path: impl AsRef<Path>) -> Result<BTreeMap<TypedVerb, u64>> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    let mut sigs = BTreeMap::new();
    for line in data_lines(&content) {
        let f = line.fields();
        let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
        if f.len() != 5 {
            return Err(err("expected 5 fields"));
        }
        let count = f[4].parse().map_err(|_| err("bad count"))?;
        sigs.insert(TypedVerb::new(f[0], non_empty(f[1]), f[2], non_empty(f[3])), count);
    }
    Ok(sigs)
}
