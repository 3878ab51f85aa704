//! Logistic-regression evaluation of feature vectors under stratified
//! cross-validation.

mod cv;
mod data;
mod logreg;
mod metrics;

pub use cv::{cross_validate, stratified_folds, CvConfig, CvReport, FoldMetrics};
pub use data::{join_labels, load_labels, LabeledInstance};
pub use logreg::{train_logreg, train_logreg_from, LogLoss, LogRegConfig, LogisticModel};
pub use metrics::{f_score, Scores};
