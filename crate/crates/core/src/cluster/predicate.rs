//! Cross-verb clustering of sense centroids with antonym repulsion.

use serde::{Deserialize, Serialize};

use super::affinity::{apply_antonym_edges, rbf_affinity, Bandwidth};
use super::inventory::Thesaurus;
use super::senses::VerbSenses;
use super::spectral::signed_spectral_cluster;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PredicateConfig {
    /// Number of global predicate clusters.
    pub k: usize,
    /// Magnitude of the repulsive antonym edges.
    pub beta: f64,
    pub bandwidth: Bandwidth,
}

impl Default for PredicateConfig {
    fn default() -> Self {
        Self {
            k: 200,
            beta: 1.0,
            bandwidth: Bandwidth::Median,
        }
    }
}

/// Assigns each sense (in `senses` order) a global cluster id in `0..k`.
pub fn predicate_clusters(
    senses: &VerbSenses,
    thesaurus: &Thesaurus,
    config: &PredicateConfig,
    seed: u64,
) -> Result<Vec<usize>> {
    let n = senses.senses.len();
    if config.k == 0 || config.k > n {
        return Err(Error::contract(format!(
            "global k = {} must lie in 1..={n} (number of verb senses)",
            config.k
        )));
    }
    if n == 1 {
        return Ok(vec![0]);
    }
    let centroids: Vec<Vec<f64>> = senses.senses.iter().map(|s| s.centroid.clone()).collect();
    let verbs: Vec<String> = senses.senses.iter().map(|s| s.key.verb.clone()).collect();
    let w = rbf_affinity(&centroids, config.bandwidth)?;
    let w = apply_antonym_edges(&w, thesaurus, &verbs, config.beta)?;
    signed_spectral_cluster(&w, config.k, seed)
}
