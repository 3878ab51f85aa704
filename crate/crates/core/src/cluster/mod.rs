//! Clustering primitives and the two-stage verb clustering.
//!
//! Stage one ([`verb_argument_clusters`]) groups each verb's signatures into
//! senses by spectral clustering of cosine affinities. Stage two
//! ([`predicate_clusters`]) clusters all sense centroids with an RBF
//! affinity, antonym repulsion and signed spectral clustering.

mod affinity;
pub mod eigen;
mod inventory;
mod kmeans;
mod maps;
mod metrics;
mod predicate;
mod senses;
mod spectral;

pub use affinity::{apply_antonym_edges, cosine_affinity, rbf_affinity, Bandwidth};
pub use inventory::{SenseInventory, Thesaurus};
pub use kmeans::{kmeans, kmeans_fit, KMeansFit, DEFAULT_RESTARTS};
pub use maps::ClusterMaps;
pub use metrics::adjusted_rand_index;
pub use predicate::{predicate_clusters, PredicateConfig};
pub use senses::{verb_argument_clusters, Sense, VerbSenses};
pub use spectral::{signed_spectral_cluster, spectral_cluster, spectral_embedding};

use crate::embedding::EmbeddingTable;
use crate::Result;

/// Runs both stages and returns the combined maps.
pub fn build_cluster_maps(
    table: &EmbeddingTable,
    inventory: &SenseInventory,
    thesaurus: &Thesaurus,
    config: &PredicateConfig,
    seed: u64,
) -> Result<ClusterMaps> {
    let senses = verb_argument_clusters(table, inventory, crate::derive_seed(seed, "senses"))?;
    let global = predicate_clusters(&senses, thesaurus, config, crate::derive_seed(seed, "predicates"))?;
    ClusterMaps::new(senses, global, config.k)
}
