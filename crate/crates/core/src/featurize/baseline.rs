//! Baseline featurizers: k-means over averaged subject/verb/object word
//! vectors, and a plain bag of verbs.

use std::collections::{BTreeMap, HashSet};

use crate::cluster::{kmeans_fit, KMeansFit, DEFAULT_RESTARTS};
use crate::embedding::{EmbeddingTable, SymbolKind};
use crate::{Error, Result};

use super::kernel::{group_by_message, KernelRecord};
use super::vector::FeatureVector;

#[derive(Debug, Clone)]
pub struct SvoBaseline {
    fit: KMeansFit,
}

impl SvoBaseline {
    /// Mean of whichever of subject, verb and object have vectors.
    pub fn kernel_vector(kernel: &KernelRecord, vectors: &EmbeddingTable) -> Option<Vec<f64>> {
        let words = [kernel.subject_np.as_deref(), Some(kernel.verb.as_str()), kernel.object_np.as_deref()];
        let found: Vec<&[f64]> = words
            .into_iter()
            .flatten()
            .filter_map(|w| vectors.get(SymbolKind::Entity, w))
            .collect();
        if found.is_empty() {
            return None;
        }
        let mut m = vec![0.0; vectors.dimension()];
        for v in &found {
            for (a, x) in m.iter_mut().zip(v.iter()) {
                *a += x;
            }
        }
        m.iter_mut().for_each(|a| *a /= found.len() as f64);
        Some(m)
    }

    pub fn fit(kernels: &[KernelRecord], vectors: &EmbeddingTable, k: usize, seed: u64) -> Result<Self> {
        let points: Vec<Vec<f64>> = kernels
            .iter()
            .filter_map(|kr| Self::kernel_vector(kr, vectors))
            .collect();
        let distinct: HashSet<Vec<u64>> = points
            .iter()
            .map(|p| p.iter().map(|x| x.to_bits()).collect())
            .collect();
        if k == 0 || k > distinct.len() {
            return Err(Error::contract(format!(
                "S-V-O baseline: k = {k} but only {} distinct kernel vectors",
                distinct.len()
            )));
        }
        Ok(Self {
            fit: kmeans_fit(&points, k, seed, DEFAULT_RESTARTS)?,
        })
    }

    pub fn k(&self) -> usize {
        self.fit.centroids.len()
    }

    /// Vectors over `k + 1` features; id `k` counts kernels with no word vector.
    pub fn featurize(&self, kernels: &[KernelRecord], vectors: &EmbeddingTable) -> Vec<FeatureVector> {
        let k = self.k();
        group_by_message(kernels)
            .into_iter()
            .map(|(id, ks)| {
                let mut v = FeatureVector::empty(id, k + 1);
                for kr in ks {
                    v.increment(match Self::kernel_vector(kr, vectors) {
                        Some(x) => self.fit.predict(&x),
                        None => k,
                    });
                }
                v
            })
            .collect()
    }
}

/// Fits the baseline on `kernels` and featurizes the same kernels.
pub fn featurize_svo_baseline(
    kernels: &[KernelRecord],
    vectors: &EmbeddingTable,
    k: usize,
    seed: u64,
) -> Result<Vec<FeatureVector>> {
    Ok(SvoBaseline::fit(kernels, vectors, k, seed)?.featurize(kernels, vectors))
}

/// Feature id per verb lemma; one extra id for unseen verbs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbVocabulary {
    ids: BTreeMap<String, usize>,
}

impl VerbVocabulary {
    pub fn from_kernels(kernels: &[KernelRecord]) -> Self {
        let verbs: std::collections::BTreeSet<&str> = kernels.iter().map(|k| k.verb.as_str()).collect();
        Self {
            ids: verbs.into_iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.ids.len() + 1
    }
}

pub fn featurize_verb_bag(kernels: &[KernelRecord], vocab: &VerbVocabulary) -> Vec<FeatureVector> {
    let oov = vocab.ids.len();
    group_by_message(kernels)
        .into_iter()
        .map(|(id, ks)| {
            let mut v = FeatureVector::empty(id, vocab.dim());
            for k in ks {
                v.increment(vocab.ids.get(&k.verb).copied().unwrap_or(oov));
            }
            v
        })
        .collect()
}
