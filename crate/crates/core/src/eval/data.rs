use std::collections::BTreeMap;
use std::path::Path;

use crate::featurize::FeatureVector;
use crate::tsv::{self, data_lines};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledInstance {
    pub features: FeatureVector,
    pub label: bool,
}

/// TSV: message_id, label (0 or 1). Duplicate ids are an error.
pub fn load_labels(path: impl AsRef<Path>) -> Result<BTreeMap<String, bool>> {
    let path = path.as_ref();
    let content = tsv::read_to_string(path)?;
    let mut labels = BTreeMap::new();
    for line in data_lines(&content) {
        let f = line.fields();
        let err = |m: &str| Error::format(path, line.offset, format!("line {}: {m}", line.number));
        if f.len() != 2 {
            return Err(err("expected message_id and label"));
        }
        let label = match f[1].trim() {
            "0" => false,
            "1" => true,
            _ => return Err(err("label must be 0 or 1")),
        };
        if labels.insert(f[0].trim().to_string(), label).is_some() {
            return Err(err("duplicate message id"));
        }
    }
    Ok(labels)
}

/// One instance per labeled message, in id order; messages without a
/// feature vector get an all-zero vector of dimension `dim`.
pub fn join_labels(
    labels: &BTreeMap<String, bool>,
    features: &[FeatureVector],
    dim: usize,
) -> Vec<LabeledInstance> {
    let by_id: BTreeMap<&str, &FeatureVector> =
        features.iter().map(|f| (f.message_id.as_str(), f)).collect();
    labels
        .iter()
        .map(|(id, &label)| LabeledInstance {
            features: by_id
                .get(id.as_str())
                .map(|f| (*f).clone())
                .unwrap_or_else(|| FeatureVector::empty(id, dim)),
            label,
        })
        .collect()
}
