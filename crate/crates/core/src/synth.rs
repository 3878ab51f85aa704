//! Synthetic corpora with planted structure, for tests, the acceptance
//! suite and `verbclust synth`.

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::corpus::{CategoryMap, Triple, TypedTriple, TypedVerb};
use crate::embedding::{EmbeddingTable, SymbolKind};
use crate::featurize::KernelRecord;
use crate::tsv;
use crate::Result;

fn unit_gaussian(dim: usize, rng: &mut impl Rng) -> Vec<f64> {
    let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// A toy knowledge base generated by hidden translations.
#[derive(Debug, Clone)]
pub struct PlantedKb {
    pub entities: Vec<String>,
    pub relations: Vec<TypedVerb>,
    pub triples: Vec<TypedTriple>,
}

/// Entities get hidden unit positions and relations hidden offsets; the
/// object of `(s, r)` is the entity nearest to `pos(s) + offset(r)` other
/// than `s`. Draws `n_triples` (subject, relation) pairs uniformly with
/// replacement.
pub fn planted_kb(
    n_entities: usize,
    n_relations: usize,
    n_triples: usize,
    latent_dim: usize,
    seed: u64,
) -> PlantedKb {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let entities: Vec<String> = (0..n_entities).map(|i| format!("e{i:03}")).collect();
    let relations: Vec<TypedVerb> = (0..n_relations)
        .map(|i| TypedVerb::new(format!("rel{i}"), None, "thing", Some("thing".into())))
        .collect();
    let pos: Vec<Vec<f64>> = (0..n_entities).map(|_| unit_gaussian(latent_dim, &mut rng)).collect();
    let offsets: Vec<Vec<f64>> = (0..n_relations)
        .map(|_| unit_gaussian(latent_dim, &mut rng))
        .collect();
    let target = |s: usize, r: usize| -> usize {
        let q: Vec<f64> = pos[s].iter().zip(&offsets[r]).map(|(a, b)| a + b).collect();
        (0..n_entities)
            .filter(|&e| e != s)
            .map(|e| {
                let d: f64 = q.iter().zip(&pos[e]).map(|(a, b)| (a - b) * (a - b)).sum();
                (e, d)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(e, _)| e)
            .expect("at least two entities")
    };
    let triples = (0..n_triples)
        .map(|_| {
            let s = rng.random_range(0..n_entities);
            let r = rng.random_range(0..n_relations);
            TypedTriple {
                subject_np: entities[s].clone(),
                typed_verb: relations[r].clone(),
                object_np: Some(entities[target(s, r)].clone()),
                count: 1,
            }
        })
        .collect();
    PlantedKb {
        entities,
        relations,
        triples,
    }
}

/// `n_per_blob` isotropic Gaussian points (std `sigma`) around each centre.
/// Returns points and their blob labels.
pub fn gaussian_blobs(
    centres: &[Vec<f64>],
    n_per_blob: usize,
    sigma: f64,
    seed: u64,
) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    for (label, c) in centres.iter().enumerate() {
        for _ in 0..n_per_blob {
            points.push(
                c.iter()
                    .map(|x| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        x + sigma * z
                    })
                    .collect::<Vec<f64>>(),
            );
            labels.push(label);
        }
    }
    (points, labels)
}

fn pick<'a, T>(items: &'a [T], rng: &mut impl Rng) -> &'a T {
    items.choose(rng).expect("non-empty choice")
}

const AMBIGUOUS: [&str; 4] = ["beat", "crush", "knock", "smash"];
const POSITIVE_ONLY: [&str; 1] = ["defeat"];
const NEGATIVE_ONLY: [&str; 2] = ["assault", "attack"];
const NEUTRAL: [&str; 4] = ["eat", "cook", "love", "hate"];

/// Settings for [`classification_corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationConfig {
    pub messages: usize,
    /// Probability that a message is generated from the positive class.
    pub positive_rate: f64,
    /// Probability that an observed label is flipped.
    pub noise: f64,
    pub seed: u64,
}

impl Default for ClassificationConfig {
    fn default() -> Self {
        Self {
            messages: 1000,
            positive_rate: 0.5,
            noise: 0.02,
            seed: 0,
        }
    }
}

impl ClassificationConfig {
    /// F1 of the classifier that recovers the generating class exactly; no
    /// classifier can do better in expectation.
    pub fn bayes_f1(&self) -> f64 {
        let tp = self.positive_rate * (1.0 - self.noise);
        2.0 * tp / (2.0 * tp + self.noise)
    }
}

/// A labeled message corpus whose labels depend on which argument type a
/// verb takes, not on the verb alone.
///
/// Positive messages contain one kernel where an athlete is beaten, crushed,
/// knocked, smashed or defeated; negative messages contain the same
/// ambiguous verbs (or assault/attack) applied to a plain person, or no key
/// kernel at all. Every message also carries 0-2 neutral food kernels.
#[derive(Debug, Clone)]
pub struct ClassificationCorpus {
    pub triples: Vec<Triple>,
    pub categories: CategoryMap,
    pub senses: Vec<(String, usize)>,
    pub antonyms: Vec<(String, String)>,
    pub kernels: Vec<KernelRecord>,
    pub labels: BTreeMap<String, bool>,
}

/// Files written by [`ClassificationCorpus::write`].
#[derive(Debug, Clone)]
pub struct CorpusFiles {
    pub triples: PathBuf,
    pub categories: PathBuf,
    pub senses: PathBuf,
    pub thesaurus: PathBuf,
    pub kernels: PathBuf,
    pub labels: PathBuf,
}

pub fn classification_corpus(config: &ClassificationConfig) -> ClassificationCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let names = |prefix: &str, n: usize| -> Vec<String> { (0..n).map(|i| format!("{prefix}{i:02}")).collect() };
    let people = names("person", 20);
    let athletes = names("athlete", 20);
    let foods = names("food", 10);
    let mut categories = CategoryMap::new();
    for (group, cat) in [(&people, "person"), (&athletes, "athlete"), (&foods, "food")] {
        for np in group.iter() {
            categories.insert(np, [cat]).expect("category");
        }
    }

    let mut triples = Vec::new();
    let mut emit = |verb: &str, objects: &[String], rng: &mut ChaCha8Rng| {
        for _ in 0..30 {
            let t = Triple::new(pick(&people, rng), verb, None, Some(pick(objects, rng)), rng.random_range(1..4));
            triples.push(t.expect("valid triple"));
        }
    };
    for v in AMBIGUOUS {
        emit(v, &athletes, &mut rng);
        emit(v, &people, &mut rng);
    }
    for v in POSITIVE_ONLY {
        emit(v, &athletes, &mut rng);
    }
    for v in NEGATIVE_ONLY {
        emit(v, &people, &mut rng);
    }
    for v in NEUTRAL {
        emit(v, &foods, &mut rng);
    }

    let mut kernels = Vec::new();
    let mut labels = BTreeMap::new();
    for m in 0..config.messages {
        let id = format!("m{m:05}");
        let positive = rng.random_bool(config.positive_rate);
        let mut own = Vec::new();
        let key = if positive {
            let verb = if rng.random_bool(0.8) { pick(&AMBIGUOUS, &mut rng) } else { pick(&POSITIVE_ONLY, &mut rng) };
            Some((*verb, pick(&athletes, &mut rng)))
        } else {
            let u: f64 = rng.random();
            if u < 0.5 {
                Some((*pick(&AMBIGUOUS, &mut rng), pick(&people, &mut rng)))
            } else if u < 0.7 {
                Some((*pick(&NEGATIVE_ONLY, &mut rng), pick(&people, &mut rng)))
            } else {
                None
            }
        };
        if let Some((verb, object)) = key {
            own.push(KernelRecord::new(&id, Some(pick(&people, &mut rng)), verb, None, Some(object)));
        }
        let neutral = if own.is_empty() { rng.random_range(1..3) } else { rng.random_range(0..3) };
        for _ in 0..neutral {
            let verb = pick(&NEUTRAL, &mut rng);
            own.push(KernelRecord::new(&id, Some(pick(&people, &mut rng)), verb, None, Some(pick(&foods, &mut rng))));
        }
        own.shuffle(&mut rng);
        kernels.extend(own.into_iter().map(|k| k.expect("valid kernel")));
        labels.insert(id, positive ^ rng.random_bool(config.noise));
    }

    ClassificationCorpus {
        triples,
        categories,
        senses: AMBIGUOUS.iter().map(|v| (v.to_string(), 2)).collect(),
        antonyms: vec![("love".into(), "hate".into())],
        kernels,
        labels,
    }
}

impl ClassificationCorpus {
    /// Word vectors for every noun phrase and verb: noun phrases scatter
    /// (std 0.1) around a random centre per category, verbs are independent
    /// unit Gaussians.
    pub fn word_vectors(&self, dim: usize, seed: u64) -> EmbeddingTable {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut table = EmbeddingTable::new(dim);
        let mut centres: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for (np, cats) in self.categories.iter() {
            let centre = centres
                .entry(cats[0].as_str())
                .or_insert_with(|| unit_gaussian(dim, &mut rng))
                .clone();
            let v: Vec<f64> = centre
                .iter()
                .map(|c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + 0.1 * z
                })
                .collect();
            table.insert(SymbolKind::Entity, np, &v).expect("fresh symbol");
        }
        let verbs: std::collections::BTreeSet<&str> = self.kernels.iter().map(|k| k.verb.as_str()).collect();
        for verb in verbs {
            table
                .insert(SymbolKind::Entity, verb, &unit_gaussian(dim, &mut rng))
                .expect("fresh symbol");
        }
        table
    }

    /// Writes every input file of the pipeline into `dir`.
    pub fn write(&self, dir: &Path) -> Result<CorpusFiles> {
        let files = CorpusFiles {
            triples: dir.join("triples.tsv"),
            categories: dir.join("categories.tsv"),
            senses: dir.join("senses.tsv"),
            thesaurus: dir.join("thesaurus.tsv"),
            kernels: dir.join("kernels.tsv"),
            labels: dir.join("labels.tsv"),
        };
        let mut out = String::from("#subject\tverb\tpreposition\tobject\tcount\n");
        for t in &self.triples {
            let o = t.object_np.as_deref().unwrap_or("");
            let p = t.preposition.as_deref().unwrap_or("");
            writeln!(out, "{}\t{}\t{p}\t{o}\t{}", t.subject_np, t.verb, t.count).unwrap();
        }
        tsv::write_file(&files.triples, &out)?;

        let mut out = String::new();
        for (np, cats) in self.categories.iter() {
            writeln!(out, "{np}\t{}", cats.join(",")).unwrap();
        }
        tsv::write_file(&files.categories, &out)?;

        let mut out = String::new();
        for (v, k) in &self.senses {
            writeln!(out, "{v}\t{k}").unwrap();
        }
        tsv::write_file(&files.senses, &out)?;

        let mut out = String::new();
        for (a, b) in &self.antonyms {
            writeln!(out, "{a}\t{b}\tantonym").unwrap();
        }
        tsv::write_file(&files.thesaurus, &out)?;

        let mut out = String::from("#message_id\tsubject\tverb\tpreposition\tobject\n");
        for k in &self.kernels {
            let s = k.subject_np.as_deref().unwrap_or("");
            let p = k.preposition.as_deref().unwrap_or("");
            let o = k.object_np.as_deref().unwrap_or("");
            writeln!(out, "{}\t{s}\t{}\t{p}\t{o}", k.message_id, k.verb).unwrap();
        }
        tsv::write_file(&files.kernels, &out)?;

        let mut out = String::new();
        for (id, &l) in &self.labels {
            writeln!(out, "{id}\t{}", u8::from(l)).unwrap();
        }
        tsv::write_file(&files.labels, &out)?;
        Ok(files)
    }
}
