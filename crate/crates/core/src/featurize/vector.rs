use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::tsv::{self, data_lines};
use crate::{Error, Result};

/// Sparse nonnegative counts over `dim` feature ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureVector {
    pub message_id: String,
    pub dim: usize,
    pub counts: BTreeMap<usize, u32>,
}

impl FeatureVector {
    pub fn empty(message_id: &str, dim: usize) -> Self {
        Self {
            message_id: message_id.to_string(),
            dim,
            counts: BTreeMap::new(),
        }
    }

    pub fn increment(&mut self, feature: usize) {
        assert!(feature < self.dim, "feature {feature} out of range {}", self.dim);
        *self.counts.entry(feature).or_insert(0) += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.values().map(|&c| u64::from(c)).sum()
    }

    pub fn binarized(&self) -> Self {
        Self {
            counts: self.counts.keys().map(|&k| (k, 1)).collect(),
            ..self.clone()
        }
    }

    pub fn to_dense(&self, binary: bool) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for (&k, &c) in &self.counts {
            v[k] = if binary { 1.0 } else { f64::from(c) };
        }
        v
    }
}

/// Adds an all-zero vector for every id in `ids` that has none (messages
/// without kernels). The result is ordered by message id.
pub fn include_messages<'a>(
    vectors: Vec<FeatureVector>,
    ids: impl IntoIterator<Item = &'a str>,
    dim: usize,
) -> Vec<FeatureVector> {
    let mut by_id: BTreeMap<String, FeatureVector> =
        vectors.into_iter().map(|v| (v.message_id.clone(), v)).collect();
    for id in ids {
        by_id
            .entry(id.to_string())
            .or_insert_with(|| FeatureVector::empty(id, dim));
    }
    by_id.into_values().collect()
}

/// First line `#features\t<dim>`, then `message_id\tid:count\t...` rows.
pub fn save_features(path: impl AsRef<Path>, vectors: &[FeatureVector], dim: usize) -> Result<()> {
    let mut out = format!("#features\t{dim}\n");
    for v in vectors {
        out.push_str(&v.message_id);
        for (k, c) in &v.counts {
            write!(out, "\t{k}:{c}").unwrap();
        }
        out.push('\n');
    }
    tsv::write_file(path.as_ref(), &out)
}

pub fn load_features(path: impl AsRef<Path>) -> Result<(usize, Vec<FeatureVector>)> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    let dim: usize = content
        .lines()
        .next()
        .and_then(|l| l.strip_prefix("#features\t"))
        .and_then(|d| d.trim().parse().ok())
        .ok_or_else(|| Error::format(path, 0, "missing #features header"))?;
    let mut vectors = Vec::new();
    for line in data_lines(&content) {
        let f = line.fields();
        let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
        let mut v = FeatureVector::empty(f[0], dim);
        for pair in &f[1..] {
            let (k, c) = pair.split_once(':').ok_or_else(|| err("expected id:count"))?;
            let k: usize = k.parse().map_err(|_| err("bad feature id"))?;
            let c: u32 = c.parse().map_err(|_| err("bad count"))?;
            if k >= dim {
                return Err(err("feature id beyond declared dimension"));
            }
            v.counts.insert(k, c);
        }
        vectors.push(v);
    }
    Ok((dim, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.tsv");
        let mut a = FeatureVector::empty("m1", 4);
        a.increment(3);
        a.increment(3);
        a.increment(0);
        let b = FeatureVector::empty("m2", 4);
        save_features(&p, &[a.clone(), b.clone()], 4).unwrap();
        assert_eq!(load_features(&p).unwrap(), (4, vec![a.clone(), b]));
        assert_eq!(a.binarized().to_dense(false), vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(a.to_dense(false), vec![1.0, 0.0, 0.0, 2.0]);
        assert_eq!(a.total(), 3);
    }
}
