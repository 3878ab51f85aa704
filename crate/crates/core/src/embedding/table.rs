use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use crate::corpus::TypedVerb;
use crate::tsv;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    /// Noun phrases; renormalized to unit length during training.
    Entity,
    /// Typed verbs.
    Relation,
    Preposition,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymbolKind::Entity => "entity",
            SymbolKind::Relation => "relation",
            SymbolKind::Preposition => "preposition",
        })
    }
}

impl FromStr for SymbolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entity" => Ok(SymbolKind::Entity),
            "relation" => Ok(SymbolKind::Relation),
            "preposition" => Ok(SymbolKind::Preposition),
            _ => Err(Error::contract(format!("unknown symbol kind {s:?}"))),
        }
    }
}

/// Dense store of equal-length vectors keyed by (kind, symbol), kept in
/// insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    symbols: Vec<(SymbolKind, String)>,
    index: HashMap<(SymbolKind, String), usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    pub fn new(dimension: usize) -> Self {
        Self {
            dimension,
            symbols: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Inserts or overwrites a vector and returns its row.
    pub fn insert(&mut self, kind: SymbolKind, symbol: &str, vector: &[f64]) -> Result<usize> {
        if vector.len() != self.dimension {
            return Err(Error::contract(format!(
                "vector for {symbol:?} has dimension {}, table has {}",
                vector.len(),
                self.dimension
            )));
        }
        if symbol.is_empty() || symbol.contains(char::is_whitespace) {
            return Err(Error::contract(format!("invalid symbol {symbol:?}")));
        }
        let key = (kind, symbol.to_string());
        if let Some(&row) = self.index.get(&key) {
            self.row_mut(row).copy_from_slice(vector);
            return Ok(row);
        }
        let row = self.symbols.len();
        self.symbols.push(key.clone());
        self.index.insert(key, row);
        self.data.extend_from_slice(vector);
        Ok(row)
    }

    pub fn row_of(&self, kind: SymbolKind, symbol: &str) -> Option<usize> {
        self.index.get(&(kind, symbol.to_string())).copied()
    }

    pub fn get(&self, kind: SymbolKind, symbol: &str) -> Option<&[f64]> {
        self.row_of(kind, symbol).map(|r| self.row(r))
    }

    /// Like [`get`](Self::get) but an absent symbol is an error.
    pub fn lookup(&self, kind: SymbolKind, symbol: &str) -> Result<&[f64]> {
        self.get(kind, symbol)
            .ok_or_else(|| Error::Data(format!("no {kind} vector for {symbol:?}")))
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dimension..(row + 1) * self.dimension]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.dimension..(row + 1) * self.dimension]
    }

    pub fn symbol(&self, row: usize) -> (SymbolKind, &str) {
        let (k, s) = &self.symbols[row];
        (*k, s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolKind, &str, &[f64])> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, (k, s))| (*k, s.as_str(), self.row(i)))
    }

    /// All relation rows that parse as typed verbs.
    pub fn typed_verbs(&self) -> Vec<(TypedVerb, &[f64])> {
        self.iter()
            .filter(|(k, _, _)| *k == SymbolKind::Relation)
            .filter_map(|(_, s, v)| s.parse::<TypedVerb>().ok().map(|tv| (tv, v)))
            .collect()
    }

    pub(crate) fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut Vec<f64> {
        &mut self.data
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "{} {}", self.len(), self.dimension).unwrap();
        for (kind, symbol, v) in self.iter() {
            write!(out, "{kind} {symbol}").unwrap();
            for x in v {
                write!(out, " {x}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        tsv::write_file(path.as_ref(), &self.to_text())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let content = tsv::read_to_string(path)?;
        Self::parse(&content).map_err(|(offset, msg)| Error::format(path, offset, msg))
    }

    /// Parses the text format. Lines without a kind tag (`word v1 .. vd`) are
    /// read as entities so plain word-vector files with a header load too.
    pub fn parse(content: &str) -> std::result::Result<Self, (u64, String)> {
        let mut lines = content.split_inclusive('\n');
        let mut offset = 0u64;
        let header = lines.next().ok_or((0, "missing header".to_string()))?;
        let mut head = header.split_whitespace();
        let count: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or((0, "bad count in header".to_string()))?;
        let dimension: usize = head
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or((0, "bad dimension in header".to_string()))?;
        if head.next().is_some() {
            return Err((0, "header must be \"<count> <dimension>\"".into()));
        }
        offset += header.len() as u64;

        let mut table = Self::new(dimension);
        for i in 0..count {
            let Some(raw) = lines.next() else {
                return Err((offset, format!("truncated: expected {count} rows, found {i}")));
            };
            let line_offset = offset;
            offset += raw.len() as u64;
            if !raw.ends_with('\n') && i + 1 < count {
                return Err((offset, format!("truncated: expected {count} rows, found {}", i + 1)));
            }
            let tokens: Vec<&str> = raw.split_whitespace().collect();
            let (kind, symbol, values) = if tokens.len() == dimension + 2 {
                let kind = tokens[0]
                    .parse()
                    .map_err(|e: Error| (line_offset, e.to_string()))?;
                (kind, tokens[1], &tokens[2..])
            } else if tokens.len() == dimension + 1 {
                (SymbolKind::Entity, tokens[0], &tokens[1..])
            } else {
                return Err((
                    line_offset,
                    format!(
                        "row has {} values, dimension is {dimension}",
                        tokens.len().saturating_sub(2)
                    ),
                ));
            };
            let vector: Vec<f64> = values
                .iter()
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| (line_offset, format!("bad number: {e}")))?;
            table
                .insert(kind, symbol, &vector)
                .map_err(|e| (line_offset, e.to_string()))?;
        }
        if lines.any(|l| !l.trim().is_empty()) {
            return Err((offset, format!("more rows than the declared {count}")));
        }
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(3);
        t.insert(SymbolKind::Entity, "barack_obama", &[0.1, -2.5e-17, 1.0 / 3.0]).unwrap();
        t.insert(SymbolKind::Relation, "marry(person,person)", &[f64::MIN_POSITIVE, 7.0, -0.0]).unwrap();
        t.insert(SymbolKind::Preposition, "in", &[1e300, -1e-300, 0.2]).unwrap();
        t
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let t = sample();
        let back = EmbeddingTable::parse(&t.to_text()).unwrap();
        assert_eq!(back.len(), 3);
        for ((k1, s1, v1), (k2, s2, v2)) in t.iter().zip(back.iter()) {
            assert_eq!((k1, s1), (k2, s2));
            let b1: Vec<u64> = v1.iter().map(|x| x.to_bits()).collect();
            let b2: Vec<u64> = v2.iter().map(|x| x.to_bits()).collect();
            assert_eq!(b1, b2);
        }
    }

    #[test]
    fn empty_table_round_trip() {
        let t = EmbeddingTable::new(5);
        let back = EmbeddingTable::parse(&t.to_text()).unwrap();
        assert_eq!(back.dimension(), 5);
        assert!(back.is_empty());
    }

    #[test]
    fn truncated_file_names_offset() {
        let text = sample().to_text();
        let cut = text.rfind("preposition").unwrap();
        let err = EmbeddingTable::parse(&text[..cut]).unwrap_err();
        assert_eq!(err.0, cut as u64);
        // Row cut mid-way.
        let err = EmbeddingTable::parse(&text[..cut + 16]).unwrap_err();
        assert_eq!(err.0, cut as u64);
    }

    #[test]
    fn dimension_mismatch_is_format_error() {
        let err = EmbeddingTable::parse("1 3\nentity a 1 2\n").unwrap_err();
        assert_eq!(err.0, 4);
        let mut t = EmbeddingTable::new(2);
        assert!(t.insert(SymbolKind::Entity, "a", &[1.0]).is_err());
    }

    #[test]
    fn untagged_rows_load_as_entities() {
        let t = EmbeddingTable::parse("2 2\ncat 1 0\ndog 0 1\n").unwrap();
        assert_eq!(t.get(SymbolKind::Entity, "dog"), Some(&[0.0, 1.0][..]));
    }

    #[test]
    fn absent_symbol_is_detectable() {
        let t = sample();
        assert!(t.lookup(SymbolKind::Entity, "nobody").is_err());
        assert!(t.lookup(SymbolKind::Entity, "in").is_err());
        assert_eq!(t.typed_verbs().len(), 1);
    }
}
