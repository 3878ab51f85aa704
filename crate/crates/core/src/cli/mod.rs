//! Pipeline configuration and the stage runners behind the `verbclust`
//! binary. Every stage reads its inputs from configured paths or from the
//! output directory and writes flat text files back into it.

mod config;
mod stages;

pub use config::{ClusterSection, EvalSection, FeaturizeSection, Paths, PipelineConfig, TrainSection, TypingSection};
pub use stages::{run_cluster, run_evaluate, run_featurize, run_train, run_type, FeatureMode};
