use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use log::{info, warn};
use serde::Serialize;

use super::config::PipelineConfig;
use crate::cluster::{build_cluster_maps, ClusterMaps, SenseInventory, Thesaurus};
use crate::corpus::{
    build_typed_triples, load_category_map, load_triples, load_typed_triples, resnik_associations,
    save_signatures, save_typed_triples, signature_counts, AssociationTable,
};
use crate::embedding::{split_training_triples, train, EmbeddingTable};
use crate::eval::{cross_validate, join_labels, load_labels, CvReport};
use crate::featurize::{
    featurize, featurize_svo_baseline, featurize_verb_bag, include_messages, load_features, load_kernels,
    save_features, FeatureVector, VerbVocabulary,
};
use crate::{tsv, Error, Result};

/// Which feature family `featurize` and `evaluate` work on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureMode {
    /// Predicate-cluster features.
    Cluster,
    /// k-means over averaged subject/verb/object word vectors.
    Svo,
    /// Bag of verb lemmas.
    Verb,
}

impl FeatureMode {
    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Cluster => "cluster",
            FeatureMode::Svo => "svo",
            FeatureMode::Verb => "verb",
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            FeatureMode::Cluster => "",
            FeatureMode::Svo => "_svo",
            FeatureMode::Verb => "_verb",
        }
    }
}

fn out(config: &PipelineConfig, name: &str) -> PathBuf {
    config.paths.output.join(name)
}

/// Types the triples corpus: writes `typed_triples.tsv`, `signatures.tsv`
/// and `associations.tsv`.
pub fn run_type(config: &PipelineConfig) -> Result<()> {
    let triples_path = config.required("triples", &config.paths.triples)?;
    let cmap = load_category_map(config.required("categories", &config.paths.categories)?)?;
    let (triples, report) = load_triples(triples_path, config.typing.min_count)?;
    for e in &report.errors {
        warn!("{}: line {}: {}", triples_path.display(), e.line, e.message);
    }
    let assoc = resnik_associations(&triples, &cmap);
    let typing = build_typed_triples(&triples, &cmap, &assoc, config.typing_config());
    let signatures = signature_counts(&typing.typed);
    save_typed_triples(out(config, "typed_triples.tsv"), &typing.typed)?;
    save_signatures(out(config, "signatures.tsv"), &signatures)?;
    assoc.save(out(config, "associations.tsv"))?;
    info!(
        "typed {} of {} triples into {} signatures",
        typing.typed.len(),
        triples.len(),
        signatures.len()
    );
    Ok(())
}

/// Trains embeddings on `typed_triples.tsv`: writes `embeddings.txt` and
/// `loss_trace.tsv`.
pub fn run_train(config: &PipelineConfig) -> Result<()> {
    let typed = load_typed_triples(out(config, "typed_triples.tsv"))?;
    let set = split_training_triples(&typed);
    let result = train(&set.transitive, &set.intransitive, &config.train_config())?;
    result.table.save(out(config, "embeddings.txt"))?;
    let mut trace = String::from("#epoch\tmean_loss\n");
    for (epoch, loss) in result.loss_trace.iter().enumerate() {
        writeln!(trace, "{epoch}\t{loss}").unwrap();
    }
    tsv::write_file(&out(config, "loss_trace.tsv"), &trace)?;
    if let Some(last) = result.loss_trace.last() {
        info!("final mean loss {last}");
    }
    Ok(())
}

/// Clusters the embedded typed verbs: writes `clusters.tsv` and
/// `centroids.txt`.
pub fn run_cluster(config: &PipelineConfig) -> Result<()> {
    let table = EmbeddingTable::load(out(config, "embeddings.txt"))?;
    let inventory = match &config.paths.senses {
        Some(p) => SenseInventory::load(p)?,
        None => SenseInventory::default(),
    };
    let thesaurus = match &config.paths.thesaurus {
        Some(p) => Thesaurus::load(p)?,
        None => Thesaurus::default(),
    };
    let maps = build_cluster_maps(
        &table,
        &inventory,
        &thesaurus,
        &config.predicate_config(),
        config.stage_seed("cluster"),
    )?;
    maps.save(out(config, "clusters.tsv"), out(config, "centroids.txt"))?;
    info!("{} senses in {} global clusters", maps.senses().len(), maps.num_global());
    Ok(())
}

/// Writes `features.tsv` (cluster mode), `features_svo.tsv` or
/// `features_verb.tsv`. Labeled messages without kernels get zero vectors.
pub fn run_featurize(config: &PipelineConfig, mode: FeatureMode) -> Result<()> {
    let kernels = load_kernels(config.required("kernels", &config.paths.kernels)?)?;
    let (dim, vectors) = match mode {
        FeatureMode::Cluster => {
            let cmap = load_category_map(config.required("categories", &config.paths.categories)?)?;
            let assoc = AssociationTable::load(out(config, "associations.tsv"))?;
            let maps = ClusterMaps::load(out(config, "clusters.tsv"), out(config, "centroids.txt"))?;
            (maps.num_global() + 1, featurize(&kernels, &cmap, &assoc, &maps))
        }
        FeatureMode::Svo => {
            let vectors = EmbeddingTable::load(config.required("word_vectors", &config.paths.word_vectors)?)?;
            let k = config.featurize.svo_k;
            (k + 1, featurize_svo_baseline(&kernels, &vectors, k, config.stage_seed("svo"))?)
        }
        FeatureMode::Verb => {
            let vocab = VerbVocabulary::from_kernels(&kernels);
            (vocab.dim(), featurize_verb_bag(&kernels, &vocab))
        }
    };
    let vectors = match &config.paths.labels {
        Some(p) => {
            let labels = load_labels(p)?;
            include_messages(vectors, labels.keys().map(String::as_str), dim)
        }
        None => vectors,
    };
    save_features(out(config, &format!("features{}.tsv", mode.suffix())), &vectors, dim)?;
    info!("{} messages, {} features ({} mode)", vectors.len(), dim, mode.name());
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    mode: &'static str,
    instances: usize,
    report: &'a CvReport,
    config: &'a PipelineConfig,
}

/// Cross-validates the features of `mode` against the labels: writes
/// `cv_report*.tsv` and `cv_summary*.json`.
pub fn run_evaluate(config: &PipelineConfig, mode: FeatureMode) -> Result<CvReport> {
    let labels = load_labels(config.required("labels", &config.paths.labels)?)?;
    let (dim, vectors) = load_features(out(config, &format!("features{}.tsv", mode.suffix())))?;
    let unlabeled = unlabeled_ids(&labels, &vectors);
    if unlabeled > 0 {
        warn!("{unlabeled} featurized messages have no label and are skipped");
    }
    let instances = join_labels(&labels, &vectors, dim);
    let report = cross_validate(&instances, &config.cv_config())?;
    report.save(out(config, &format!("cv_report{}.tsv", mode.suffix())))?;
    let summary = Summary {
        mode: mode.name(),
        instances: instances.len(),
        report: &report,
        config,
    };
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Data(e.to_string()))?;
    tsv::write_file(&out(config, &format!("cv_summary{}.json", mode.suffix())), &(json + "\n"))?;
    info!("mean F1 {:.4} over {} folds", report.mean_f1, report.folds.len());
    Ok(report)
}

fn unlabeled_ids(labels: &BTreeMap<String, bool>, vectors: &[FeatureVector]) -> usize {
    vectors.iter().filter(|v| !labels.contains_key(&v.message_id)).count()
}
