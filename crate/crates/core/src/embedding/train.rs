use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};

use log::{debug, warn};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::objective::{pair_gradient, DenseRows, IndexedTriple, RowSource};
use super::sampling::corrupt_pair;
use super::table::{EmbeddingTable, SymbolKind};
use crate::corpus::{TypedTriple, TypedVerb};
use crate::{derive_seed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dimension: usize,
    pub epochs: usize,
    pub margin: f64,
    pub learning_rate: f64,
    pub batch_size: usize,
    /// Parallel workers; 1 is the deterministic mode.
    pub workers: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            dimension: 300,
            epochs: 100,
            margin: 1.0,
            learning_rate: 0.01,
            batch_size: 512,
            workers: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = self.dimension > 0
            && self.margin > 0.0
            && self.learning_rate > 0.0
            && self.batch_size > 0
            && self.workers > 0;
        if !positive || !self.margin.is_finite() || !self.learning_rate.is_finite() {
            return Err(Error::contract(format!("invalid training config {self:?}")));
        }
        Ok(())
    }
}

/// `(typed_intransitive, preposition, object)`, scored as
/// `d(typed_intransitive + preposition, object)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntransitiveTriple {
    pub head: TypedVerb,
    pub preposition: String,
    pub object_np: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingSet {
    pub transitive: Vec<TypedTriple>,
    pub intransitive: Vec<IntransitiveTriple>,
}

/// Splits typed triples into the two loss families. Every triple with an
/// object is transitive. Prepositional triples additionally feed the
/// intransitive family when the bare verb with the same subject type was
/// observed as a pure intransitive.
pub fn split_training_triples(typed: &[TypedTriple]) -> TrainingSet {
    let heads: BTreeSet<&TypedVerb> = typed
        .iter()
        .map(|t| &t.typed_verb)
        .filter(|tv| tv.is_intransitive() && tv.preposition.is_none())
        .collect();
    let mut set = TrainingSet::default();
    let mut fed: BTreeSet<TypedVerb> = BTreeSet::new();
    for t in typed {
        let Some(object) = &t.object_np else { continue };
        set.transitive.push(t.clone());
        if let Some(prep) = &t.typed_verb.preposition {
            let head = TypedVerb::new(t.typed_verb.verb.clone(), None, t.typed_verb.subject_type.clone(), None);
            if heads.contains(&head) {
                fed.insert(head.clone());
                set.intransitive.push(IntransitiveTriple {
                    head,
                    preposition: prep.clone(),
                    object_np: object.clone(),
                    count: t.count,
                });
            }
        }
    }
    for h in heads {
        if !fed.contains(h) {
            warn!("intransitive {h} has no prepositional triples and gets no embedding");
        }
    }
    set
}

#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub table: EmbeddingTable,
    /// Mean hinge loss per training triple, one entry per epoch.
    pub loss_trace: Vec<f64>,
}

/// Indexed problem: symbol table layout plus the distinct training triples.
pub(crate) struct Problem {
    pub table: EmbeddingTable,
    pub entity_rows: Vec<usize>,
    pub intransitive_rows: Vec<usize>,
    /// (triple, is_intransitive)
    pub triples: Vec<(IndexedTriple, bool)>,
}

impl Problem {
    pub fn build(
        transitive: &[TypedTriple],
        intransitive: &[IntransitiveTriple],
        dimension: usize,
    ) -> Result<Self> {
        let mut entities = BTreeSet::new();
        let mut relations = BTreeSet::new();
        let mut preps = BTreeSet::new();
        for t in transitive {
            let o = t.object_np.as_ref().ok_or_else(|| {
                Error::contract(format!("transitive triple without object: {}", t.typed_verb))
            })?;
            entities.insert(t.subject_np.clone());
            entities.insert(o.clone());
            relations.insert(t.typed_verb.to_string());
        }
        for t in intransitive {
            entities.insert(t.object_np.clone());
            relations.insert(t.head.to_string());
            preps.insert(t.preposition.clone());
        }
        let zero = vec![0.0; dimension];
        let mut table = EmbeddingTable::new(dimension);
        let mut entity_rows = Vec::new();
        for e in &entities {
            entity_rows.push(table.insert(SymbolKind::Entity, e, &zero)?);
        }
        for r in &relations {
            table.insert(SymbolKind::Relation, r, &zero)?;
        }
        for p in &preps {
            table.insert(SymbolKind::Preposition, p, &zero)?;
        }

        let row = |k, s: &str| table.row_of(k, s).expect("symbol registered above");
        let mut seen = HashSet::new();
        let mut triples = Vec::new();
        for t in transitive {
            let it = IndexedTriple {
                head: row(SymbolKind::Entity, &t.subject_np),
                relation: row(SymbolKind::Relation, &t.typed_verb.to_string()),
                tail: row(SymbolKind::Entity, t.object_np.as_deref().unwrap()),
            };
            if seen.insert((it, false)) {
                triples.push((it, false));
            }
        }
        let mut heads = BTreeSet::new();
        for t in intransitive {
            let it = IndexedTriple {
                head: row(SymbolKind::Relation, &t.head.to_string()),
                relation: row(SymbolKind::Preposition, &t.preposition),
                tail: row(SymbolKind::Entity, &t.object_np),
            };
            heads.insert(it.head);
            if seen.insert((it, true)) {
                triples.push((it, true));
            }
        }
        Ok(Self {
            table,
            entity_rows,
            intransitive_rows: heads.into_iter().collect(),
            triples,
        })
    }

    /// Uniform `[-6/√d, 6/√d]` per coordinate, then unit-norm entities.
    pub fn initialize(&mut self, rng: &mut impl Rng) {
        let dim = self.table.dimension();
        let bound = 6.0 / (dim as f64).sqrt();
        for x in self.table.data_mut().iter_mut() {
            *x = rng.random_range(-bound..=bound);
        }
        normalize_rows(self.table.data_mut(), dim, &self.entity_rows);
    }

    pub(crate) fn corrupt(&self, t: IndexedTriple, intransitive: bool, rng: &mut impl Rng) -> Result<IndexedTriple> {
        let head_pool = if intransitive {
            &self.intransitive_rows
        } else {
            &self.entity_rows
        };
        let (head, tail, _) = corrupt_pair(&t.head, &t.tail, head_pool, &self.entity_rows, rng)?;
        Ok(IndexedTriple {
            head,
            relation: t.relation,
            tail,
        })
    }

    /// Loss and accumulated gradient of one minibatch at the current parameters.
    fn batch(
        &self,
        src: &impl RowSource,
        batch: &[usize],
        margin: f64,
        rng: &mut impl Rng,
    ) -> Result<(f64, BTreeMap<usize, Vec<f64>>)> {
        let dim = self.table.dimension();
        let mut grads = BTreeMap::new();
        let mut loss = 0.0;
        for &i in batch {
            let (pos, intransitive) = self.triples[i];
            let neg = self.corrupt(pos, intransitive, rng)?;
            loss += pair_gradient(src, pos, neg, margin, dim, &mut grads);
        }
        Ok((loss, grads))
    }
}

fn normalize_rows(data: &mut [f64], dim: usize, rows: &[usize]) {
    for &r in rows {
        let v = &mut data[r * dim..(r + 1) * dim];
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    }
}

struct AtomicRows {
    data: Vec<AtomicU64>,
    dim: usize,
}

impl RowSource for AtomicRows {
    fn read_row(&self, row: usize, out: &mut [f64]) {
        for (o, a) in out.iter_mut().zip(&self.data[row * self.dim..(row + 1) * self.dim]) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }
}

impl AtomicRows {
    /// Unsynchronized read-modify-write; concurrent updates may be lost.
    fn apply(&self, grads: &BTreeMap<usize, Vec<f64>>, lr: f64) {
        for (&row, g) in grads {
            for (a, gi) in self.data[row * self.dim..(row + 1) * self.dim].iter().zip(g) {
                let x = f64::from_bits(a.load(Ordering::Relaxed));
                a.store((x - lr * gi).to_bits(), Ordering::Relaxed);
            }
        }
    }
}

fn apply_dense(data: &mut [f64], dim: usize, grads: &BTreeMap<usize, Vec<f64>>, lr: f64) {
    for (&row, g) in grads {
        for (x, gi) in data[row * dim..(row + 1) * dim].iter_mut().zip(g) {
            *x -= lr * gi;
        }
    }
}

fn check_finite(loss: f64, epoch: usize, batch: usize) -> Result<()> {
    if loss.is_finite() {
        Ok(())
    } else {
        Err(Error::Numeric(format!(
            "non-finite loss {loss} in epoch {epoch}, batch {batch}"
        )))
    }
}

/// Minibatch SGD on the joint margin ranking objective. Entity vectors are
/// renormalized after every epoch; typed verbs and prepositions are not.
pub fn train(
    transitive: &[TypedTriple],
    intransitive: &[IntransitiveTriple],
    config: &TrainConfig,
) -> Result<TrainOutput> {
    config.validate()?;
    if transitive.is_empty() {
        return Err(Error::contract("training needs at least one transitive triple"));
    }
    let mut problem = Problem::build(transitive, intransitive, config.dimension)?;
    if problem.entity_rows.len() < 2 {
        return Err(Error::contract("training needs at least 2 distinct noun phrases"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    problem.initialize(&mut rng);

    let dim = config.dimension;
    let n = problem.triples.len();
    let mut order: Vec<usize> = (0..n).collect();
    let mut loss_trace = Vec::with_capacity(config.epochs);

    if config.workers == 1 {
        let mut data = problem.table.data().to_vec();
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let mut total = 0.0;
            for (b, batch) in order.chunks(config.batch_size).enumerate() {
                let src = DenseRows { data: &data, dim };
                let (loss, grads) = problem.batch(&src, batch, config.margin, &mut rng)?;
                check_finite(loss, epoch, b)?;
                total += loss;
                apply_dense(&mut data, dim, &grads, config.learning_rate);
            }
            normalize_rows(&mut data, dim, &problem.entity_rows);
            loss_trace.push(total / n as f64);
            debug!("epoch {epoch}: mean loss {}", total / n as f64);
        }
        *problem.table.data_mut() = data;
    } else {
        let rows = AtomicRows {
            data: problem.table.data().iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
            dim,
        };
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let batches: Vec<&[usize]> = order.chunks(config.batch_size).collect();
            let results: Vec<Result<f64>> = std::thread::scope(|scope| {
                let handles: Vec<_> = (0..config.workers)
                    .map(|w| {
                        let (problem, rows, batches) = (&problem, &rows, &batches);
                        scope.spawn(move || -> Result<f64> {
                            let mut wrng = ChaCha8Rng::seed_from_u64(derive_seed(
                                config.seed,
                                &format!("epoch{epoch}/worker{w}"),
                            ));
                            let mut total = 0.0;
                            for b in (w..batches.len()).step_by(config.workers) {
                                let (loss, grads) =
                                    problem.batch(rows, batches[b], config.margin, &mut wrng)?;
                                check_finite(loss, epoch, b)?;
                                total += loss;
                                rows.apply(&grads, config.learning_rate);
                            }
                            Ok(total)
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("training worker panicked")).collect()
            });
            let mut total = 0.0;
            for r in results {
                total += r?;
            }
            let mut snapshot: Vec<f64> =
                rows.data.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect();
            normalize_rows(&mut snapshot, dim, &problem.entity_rows);
            for (a, x) in rows.data.iter().zip(&snapshot) {
                a.store(x.to_bits(), Ordering::Relaxed);
            }
            loss_trace.push(total / n as f64);
        }
        *problem.table.data_mut() = rows
            .data
            .iter()
            .map(|a| f64::from_bits(a.load(Ordering::Relaxed)))
            .collect();
    }

    Ok(TrainOutput {
        table: problem.table,
        loss_trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt(s: &str, v: &str, o: &str) -> TypedTriple {
        TypedTriple {
            subject_np: s.into(),
            typed_verb: v.parse().unwrap(),
            object_np: Some(o.into()),
            count: 1,
        }
    }

    fn toy() -> Vec<TypedTriple> {
        vec![
            tt("a", "marry(person,person)", "b"),
            tt("c", "marry(person,person)", "d"),
            tt("a", "eat(person,food)", "bread"),
            tt("c", "eat(person,food)", "rice"),
        ]
    }

    fn small_config() -> TrainConfig {
        TrainConfig {
            dimension: 8,
            epochs: 5,
            batch_size: 2,
            seed: 11,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let config = TrainConfig { epochs: 0, ..small_config() };
        let out = train(&toy(), &[], &config).unwrap();
        assert!(out.loss_trace.is_empty());
        let mut p = Problem::build(&toy(), &[], 8).unwrap();
        p.initialize(&mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(out.table, p.table);
        let bound = 6.0 / 8f64.sqrt();
        let (_, _, v) = out.table.iter().find(|(k, _, _)| *k == SymbolKind::Relation).unwrap();
        assert!(v.iter().all(|x| x.abs() <= bound));
    }

    #[test]
    fn entities_unit_norm_and_relations_free() {
        let out = train(&toy(), &[], &small_config()).unwrap();
        for (kind, _, v) in out.table.iter() {
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if kind == SymbolKind::Entity {
                assert!((norm - 1.0).abs() < 1e-9);
            }
        }
        assert_eq!(out.loss_trace.len(), 5);
        assert!(out.loss_trace.iter().all(|l| *l >= 0.0));
    }

    #[test]
    fn deterministic_single_worker() {
        let a = train(&toy(), &[], &small_config()).unwrap();
        let b = train(&toy(), &[], &small_config()).unwrap();
        assert_eq!(a.table.to_text(), b.table.to_text());
        assert_eq!(a.loss_trace, b.loss_trace);
    }

    #[test]
    fn hogwild_runs_and_keeps_invariants() {
        let config = TrainConfig { workers: 3, batch_size: 1, ..small_config() };
        let out = train(&toy(), &[], &config).unwrap();
        for (kind, _, v) in out.table.iter() {
            if kind == SymbolKind::Entity {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((norm - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn intransitive_family_shares_space() {
        let typed = vec![
            TypedTriple {
                subject_np: "i".into(),
                typed_verb: "sleep(person)".parse().unwrap(),
                object_np: None,
                count: 3,
            },
            tt("i", "sleep+in(person,location)", "bed"),
            tt("you", "sleep+in(person,location)", "room"),
            tt("you", "give+to(person,person)", "i"),
        ];
        let set = split_training_triples(&typed);
        assert_eq!(set.transitive.len(), 3);
        assert_eq!(set.intransitive.len(), 2);
        assert_eq!(set.intransitive[0].head.to_string(), "sleep(person)");
        let out = train(&set.transitive, &set.intransitive, &small_config()).unwrap();
        assert!(out.table.get(SymbolKind::Relation, "sleep(person)").is_some());
        assert!(out.table.get(SymbolKind::Preposition, "in").is_some());
        assert!(out.table.get(SymbolKind::Relation, "sleep+in(person,location)").is_some());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(train(&[], &[], &small_config()).is_err());
        let one = vec![tt("a", "v(x,x)", "a")];
        assert!(train(&one, &[], &small_config()).is_err());
        let config = TrainConfig { margin: 0.0, ..small_config() };
        assert!(train(&toy(), &[], &config).is_err());
    }

    #[test]
    fn diverging_run_reports_batch() {
        let config = TrainConfig { learning_rate: f64::MAX, epochs: 3, ..small_config() };
        match train(&toy(), &[], &config) {
            Err(Error::Numeric(msg)) => assert!(msg.contains("batch")),
            other => panic!("expected numeric failure, got {other:?}"),
        }
    }
}
