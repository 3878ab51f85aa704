//! Message kernels to sparse feature vectors.

mod baseline;
mod kernel;
mod predicate;
mod vector;

pub use baseline::{featurize_svo_baseline, featurize_verb_bag, SvoBaseline, VerbVocabulary};
pub use kernel::{group_by_message, load_kernels, parse_kernels, KernelRecord};
pub use predicate::{featurize, route_kernel, Route};
pub use vector::{include_messages, load_features, save_features, FeatureVector};
