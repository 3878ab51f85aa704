//! Typed-verb predicate clustering.
//!
//! The pipeline runs in four stages, each usable on its own:
//!
//! 1. [`corpus`]: read (subject, verb, preposition, object) kernels, estimate
//!    Resnik selectional associations against a noun-phrase category map and
//!    assign each verb its argument type signatures.
//! 2. [`embedding`]: learn translation embeddings where
//!    `subject + typed_verb ≈ object` (and `typed_intransitive + preposition ≈ object`)
//!    under a margin ranking loss.
//! 3. [`cluster`]: cluster the signatures of each verb into senses with
//!    normalized-cut spectral clustering, then cluster the sense centroids
//!    across verbs with a signed spectral step that repels antonyms.
//! 4. [`featurize`] and [`eval`]: map message kernels to predicate-cluster
//!    features and score them with cross-validated logistic regression.

pub mod cli;
pub mod cluster;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod featurize;
pub mod synth;
pub(crate) mod tsv;

pub use error::{Error, Result};

/// Stable 64-bit FNV-1a hash, used to derive sub-seeds from names.
pub fn stable_hash(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Derives a child seed from a master seed and a stage or item name.
pub fn derive_seed(master: u64, name: &str) -> u64 {
    let mut bytes = master.to_le_bytes().to_vec();
    bytes.extend_from_slice(name.as_bytes());
    stable_hash(&bytes)
}
