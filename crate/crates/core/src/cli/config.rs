use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{Bandwidth, PredicateConfig};
use crate::corpus::TypingConfig;
use crate::embedding::TrainConfig;
use crate::eval::{CvConfig, LogRegConfig};
use crate::{derive_seed, Error, Result};

/// Input files and the output directory. Relative paths are resolved
/// against the directory of the config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub triples: Option<PathBuf>,
    pub categories: Option<PathBuf>,
    pub senses: Option<PathBuf>,
    pub thesaurus: Option<PathBuf>,
    pub kernels: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    /// External word vectors for the S-V-O baseline.
    pub word_vectors: Option<PathBuf>,
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TypingSection {
    pub tau: f64,
    pub min_sig_count: u64,
    /// Triples below this count are skipped when loading.
    pub min_count: u64,
}

impl Default for TypingSection {
    fn default() -> Self {
        let t = TypingConfig::default();
        Self {
            tau: t.tau,
            min_sig_count: t.min_sig_count,
            min_count: 1,
        }
    }
}

/// Embedding settings; the seed comes from the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub dimension: usize,
    pub epochs: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub workers: usize,
}

impl Default for TrainSection {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            dimension: t.dimension,
            epochs: t.epochs,
            margin: t.margin,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            workers: t.workers,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    /// Number of global predicate clusters.
    pub k: usize,
    pub beta: f64,
    /// `"median"` or `{ fixed = <sigma> }`.
    pub sigma: Bandwidth,
}

impl Default for ClusterSection {
    fn default() -> Self {
        let p = PredicateConfig::default();
        Self {
            k: p.k,
            beta: p.beta,
            sigma: p.bandwidth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturizeSection {
    /// Number of k-means groups for the S-V-O baseline.
    pub svo_k: usize,
}

impl Default for FeaturizeSection {
    fn default() -> Self {
        Self { svo_k: 50 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub folds: usize,
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Presence features rather than counts.
    pub binary: bool,
}

impl Default for EvalSection {
    fn default() -> Self {
        let c = CvConfig::default();
        Self {
            folds: c.folds,
            lambda: c.logreg.lambda,
            tol: c.logreg.tol,
            max_iter: c.logreg.max_iter,
            binary: c.logreg.binary,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; each stage derives its own seed from it by name.
    pub seed: u64,
    pub paths: Paths,
    pub typing: TypingSection,
    pub train: TrainSection,
    pub cluster: ClusterSection,
    pub featurize: FeaturizeSection,
    pub evaluate: EvalSection,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Makes every relative path relative to `base` instead.
    pub fn resolve_paths(&mut self, base: &Path) {
        let p = &mut self.paths;
        for path in [
            &mut p.triples,
            &mut p.categories,
            &mut p.senses,
            &mut p.thesaurus,
            &mut p.kernels,
            &mut p.labels,
            &mut p.word_vectors,
        ]
        .into_iter()
        .flatten()
        {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if p.output.is_relative() {
            p.output = base.join(&p.output);
        }
    }

    /// Every configured input file must exist.
    pub fn validate_paths(&self) -> Result<()> {
        let p = &self.paths;
        let inputs = [
            ("triples", &p.triples),
            ("categories", &p.categories),
            ("senses", &p.senses),
            ("thesaurus", &p.thesaurus),
            ("kernels", &p.kernels),
            ("labels", &p.labels),
            ("word_vectors", &p.word_vectors),
        ];
        for (key, path) in inputs {
            if let Some(path) = path {
                if !path.is_file() {
                    return Err(Error::Data(format!("paths.{key}: {} does not exist", path.display())));
                }
            }
        }
        Ok(())
    }

    pub fn stage_seed(&self, stage: &str) -> u64 {
        derive_seed(self.seed, stage)
    }

    pub fn typing_config(&self) -> TypingConfig {
        TypingConfig {
            tau: self.typing.tau,
            min_sig_count: self.typing.min_sig_count,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let t = &self.train;
        TrainConfig {
            dimension: t.dimension,
            epochs: t.epochs,
            margin: t.margin,
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            workers: t.workers,
            seed: self.stage_seed("train"),
        }
    }

    pub fn predicate_config(&self) -> PredicateConfig {
        PredicateConfig {
            k: self.cluster.k,
            beta: self.cluster.beta,
            bandwidth: self.cluster.sigma,
        }
    }

    pub fn cv_config(&self) -> CvConfig {
        let e = &self.evaluate;
        CvConfig {
            folds: e.folds,
            seed: self.stage_seed("evaluate"),
            logreg: LogRegConfig {
                lambda: e.lambda,
                tol: e.tol,
                max_iter: e.max_iter,
                binary: e.binary,
            },
        }
    }

    /// A path that a stage cannot run without.
    pub fn required<'a>(&self, key: &str, path: &'a Option<PathBuf>) -> Result<&'a Path> {
        path.as_deref()
            .ok_or_else(|| Error::Contract(format!("paths.{key} must be set for this stage")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_round_trip() {
        let c = PipelineConfig::from_toml("[paths]\noutput = \"out\"\n").unwrap();
        assert_eq!(c.train.dimension, 300);
        assert_eq!(c.train.epochs, 100);
        assert_eq!(c.cluster.k, 200);
        assert_eq!(c.evaluate.folds, 10);
        assert_eq!(c.evaluate.lambda, 1.0);
        assert_eq!(PipelineConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(PipelineConfig::from_toml("[cluster]\nkk = 3\n").is_err());
    }

    #[test]
    fn fixed_bandwidth_parses() {
        let c = PipelineConfig::from_toml("[cluster]\nsigma = { fixed = 0.5 }\n").unwrap();
        assert_eq!(c.cluster.sigma, Bandwidth::Fixed(0.5));
    }

    #[test]
    fn relative_paths_resolved_and_checked() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("t.tsv"), "").unwrap();
        let mut c = PipelineConfig::from_toml("[paths]\ntriples = \"t.tsv\"\noutput = \"out\"\n").unwrap();
        c.resolve_paths(dir.path());
        assert_eq!(c.paths.output, dir.path().join("out"));
        c.validate_paths().unwrap();
        c.paths.kernels = Some(dir.path().join("missing.tsv"));
        let err = c.validate_paths().unwrap_err().to_string();
        assert!(err.contains("missing.tsv"), "{err}");
    }

    #[test]
    fn stage_seeds_differ() {
        let c = PipelineConfig::default();
        assert_ne!(c.train_config().seed, c.cv_config().seed);
    }
}
