//! Translation embeddings for typed verbs.
//!
//! Transitive triples are scored by `d(subject + typed_verb, object)`;
//! prepositional triples of pure intransitive verbs by
//! `d(typed_intransitive + preposition, object)`. Both families share one
//! space and are trained jointly under a margin ranking loss against
//! corrupted triples.

mod gradcheck;
mod objective;
mod sampling;
mod table;
mod train;

pub use gradcheck::{gradient_check, max_relative_error, GradientCheck};
pub use objective::{l2_distance, margin_loss, HingeObjective, IndexedTriple};
pub use sampling::{corrupt, corrupt_pair, Replaced};
pub use table::{EmbeddingTable, SymbolKind};
pub use train::{
    split_training_triples, train, IntransitiveTriple, TrainConfig, TrainOutput, TrainingSet,
};
