use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::data::LabeledInstance;
use super::logreg::{train_logreg, LogRegConfig};
use super::metrics::f_score;
use crate::tsv;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvConfig {
    pub folds: usize,
    pub seed: u64,
    pub logreg: LogRegConfig,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            folds: 10,
            seed: 0,
            logreg: LogRegConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub n_test: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvReport {
    pub folds: Vec<FoldMetrics>,
    pub mean_precision: f64,
    pub mean_recall: f64,
    pub mean_f1: f64,
    pub seed: u64,
}

/// Fold index per instance. Each class is shuffled and dealt round-robin,
/// continuing the rotation across classes, so fold sizes differ by at most
/// one and every fold sees both classes.
pub fn stratified_folds(labels: &[bool], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::contract("cross-validation needs at least 2 folds"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut next = 0;
    for class in [false, true] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < folds {
            return Err(Error::Data(format!(
                "class {} has {} instances, fewer than {folds} folds; use fewer folds",
                u8::from(class),
                members.len()
            )));
        }
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

pub fn cross_validate(instances: &[LabeledInstance], config: &CvConfig) -> Result<CvReport> {
    let labels: Vec<bool> = instances.iter().map(|i| i.label).collect();
    let assignment = stratified_folds(&labels, config.folds, config.seed)?;
    let folds: Vec<FoldMetrics> = (0..config.folds)
        .into_par_iter()
        .map(|fold| -> Result<FoldMetrics> {
            let mut test = Vec::new();
            let mut train = Vec::new();
            for (instance, &f) in instances.iter().zip(&assignment) {
                if f == fold {
                    test.push(instance);
                } else {
                    train.push(instance.clone());
                }
            }
            let model = train_logreg(&train, &config.logreg)?;
            let predictions: Vec<bool> = test.iter().map(|i| model.predict(i)).collect();
            let truth: Vec<bool> = test.iter().map(|i| i.label).collect();
            let s = f_score(&predictions, &truth);
            Ok(FoldMetrics {
                fold,
                n_test: test.len(),
                precision: s.precision,
                recall: s.recall,
                f1: s.f1,
            })
        })
        .collect::<Result<_>>()?;
    let mean = |f: fn(&FoldMetrics) -> f64| folds.iter().map(f).sum::<f64>() / folds.len() as f64;
    Ok(CvReport {
        mean_precision: mean(|m| m.precision),
        mean_recall: mean(|m| m.recall),
        mean_f1: mean(|m| m.f1),
        folds,
        seed: config.seed,
    })
}

impl CvReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("#fold\tn_test\tprecision\trecall\tf1\n");
        for f in &self.folds {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\n",
                f.fold, f.n_test, f.precision, f.recall, f.f1
            ));
        }
        let n: usize = self.folds.iter().map(|f| f.n_test).sum();
        out.push_str(&format!(
            "mean\t{}\t{}\t{}\t{}\n",
            n, self.mean_precision, self.mean_recall, self.mean_f1
        ));
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        tsv::write_file(path.as_ref(), &self.to_tsv())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::featurize::FeatureVector;
    use proptest::prelude::*;
    use rand::Rng;

    proptest! {
        #[test]
        fn folds_partition_and_balance(seed in 0u64..100, pos in 10usize..40, neg in 10usize..40) {
            let labels: Vec<bool> = (0..pos + neg).map(|i| i < pos).collect();
            let folds = stratified_folds(&labels, 10, seed).unwrap();
            let mut sizes = [0usize; 10];
            for class in [false, true] {
                let mut per = [0usize; 10];
                for (i, &f) in folds.iter().enumerate() {
                    prop_assert!(f < 10);
                    if labels[i] == class {
                        per[f] += 1;
                    }
                }
                prop_assert!(per.iter().all(|&c| c >= 1));
                prop_assert!(per.iter().max().unwrap() - per.iter().min().unwrap() <= 1);
                for f in 0..10 {
                    sizes[f] += per[f];
                }
            }
            prop_assert_eq!(sizes.iter().sum::<usize>(), pos + neg);
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn too_few_instances_suggests_fewer_folds() {
        let labels = [true, true, false, false, false];
        let err = stratified_folds(&labels, 3, 0).unwrap_err().to_string();
        assert!(err.contains("fewer folds"), "{err}");
    }

    #[test]
    fn report_has_fold_and_mean_rows() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<LabeledInstance> = (0..60)
            .map(|i| {
                let label = i % 2 == 0;
                let mut f = FeatureVector::empty(&i.to_string(), 3);
                f.increment(usize::from(label));
                if rng.random_bool(0.5) {
                    f.increment(2);
                }
                LabeledInstance { features: f, label }
            })
            .collect();
        let report = cross_validate(&data, &CvConfig::default()).unwrap();
        assert_eq!(report.mean_f1, 1.0);
        let tsv = report.to_tsv();
        assert_eq!(tsv.lines().filter(|l| !l.starts_with('#')).count(), 11);
        assert!(tsv.lines().last().unwrap().starts_with("mean\t60"));
    }

    #[test]
    fn random_features_match_always_positive_baseline() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = 0.7;
        let data: Vec<LabeledInstance> = (0..500)
            .map(|i| {
                let mut f = FeatureVector::empty(&i.to_string(), 20);
                for k in 0..20 {
                    if rng.random_bool(0.3) {
                        f.increment(k);
                    }
                }
                LabeledInstance { features: f, label: rng.random_bool(p) }
            })
            .collect();
        let observed = data.iter().filter(|i| i.label).count() as f64 / data.len() as f64;
        let baseline = 2.0 * observed / (1.0 + observed);
        let report = cross_validate(&data, &CvConfig::default()).unwrap();
        let f1s: Vec<f64> = report.folds.iter().map(|f| f.f1).collect();
        let var = f1s.iter().map(|x| (x - report.mean_f1).powi(2)).sum::<f64>() / (f1s.len() - 1) as f64;
        let sigma = (var / f1s.len() as f64).sqrt().max(1e-3);
        assert!(
            (report.mean_f1 - baseline).abs() <= 3.0 * sigma,
            "{} vs {baseline} (sigma {sigma})",
            report.mean_f1
        );
    }

    #[test]
    fn planted_cluster_rule_is_learned() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data: Vec<LabeledInstance> = (0..300)
            .map(|i| {
                let mut f = FeatureVector::empty(&i.to_string(), 8);
                let c = rng.random_range(0..8);
                f.increment(c);
                if rng.random_bool(0.5) {
                    // Distractor drawn from the label-neutral clusters 6 and 7.
                    f.increment(6 + rng.random_range(0..2));
                }
                LabeledInstance { features: f, label: c < 3 }
            })
            .collect();
        let report = cross_validate(&data, &CvConfig::default()).unwrap();
        assert!(report.mean_f1 >= 0.95, "{}", report.mean_f1);
    }
}
