use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use super::evaluate::extract_table;
use super::{derive_seed, TaskSpec, FOLD_PURPOSE};
use crate::gp::TypedTree;
use crate::learners::{cv_accuracy, fit_normalizer, FeatureTable, LearnError};

/// Common-tree fitness: mean of the two tasks' accuracies minus the tree's
/// node count.
pub fn common_fitness(acc1: f64, acc2: f64, size: usize) -> f64 {
    (acc1 + acc2) / 2.0 - size as f64
}

/// Turns a raw training feature table for task `task` into an accuracy.
pub trait CvScorer: Sync {
    fn score(&self, task: usize, table: &FeatureTable) -> Result<f64, LearnError>;
}

/// Min-max normalisation on the whole table followed by stratified k-fold
/// linear SVM accuracy. Each task gets its own fold seed, fixed for the run.
#[derive(Clone, Debug)]
pub struct LinearCv {
    pub k: usize,
    pub fold_seeds: Vec<u64>,
}

impl LinearCv {
    pub fn for_run(k: usize, seed: u64, tasks: usize) -> Self {
        Self {
            k,
            fold_seeds: (0..tasks as u64).map(|t| derive_seed(seed, FOLD_PURPOSE + t)).collect(),
        }
    }
}

impl CvScorer for LinearCv {
    fn score(&self, task: usize, table: &FeatureTable) -> Result<f64, LearnError> {
        let norm = fit_normalizer(table)?;
        cv_accuracy(&norm.apply(table), self.k, self.fold_seeds[task])
    }
}

#[derive(Debug, Default)]
pub struct EvalCounters {
    /// Fitness values handed out, one per individual per evaluation.
    pub fitness: AtomicUsize,
    /// Training-set feature extractions actually performed.
    pub extractions: AtomicUsize,
    /// Lookups of the best common tree's cached features.
    pub common_lookups: AtomicUsize,
}

impl EvalCounters {
    pub fn fitness(&self) -> usize {
        self.fitness.load(Ordering::Relaxed)
    }

    pub fn extractions(&self) -> usize {
        self.extractions.load(Ordering::Relaxed)
    }

    pub fn common_lookups(&self) -> usize {
        self.common_lookups.load(Ordering::Relaxed)
    }
}

type Features = Option<Arc<FeatureTable>>;

/// Fitness evaluation with memoised training features.
///
/// Feature tables are keyed by (task, tree text). Entries used during a
/// generation survive into the next one; anything unused for a whole
/// generation is dropped.
pub struct Evaluator<'a, S: CvScorer> {
    tasks: Vec<&'a TaskSpec>,
    scorer: &'a S,
    parallel: bool,
    current: HashMap<(usize, String), Features>,
    previous: HashMap<(usize, String), Features>,
    pub counters: EvalCounters,
}

impl<'a, S: CvScorer> Evaluator<'a, S> {
    pub fn new(tasks: Vec<&'a TaskSpec>, scorer: &'a S, parallel: bool) -> Self {
        Self {
            tasks,
            scorer,
            parallel,
            current: HashMap::new(),
            previous: HashMap::new(),
            counters: EvalCounters::default(),
        }
    }

    pub fn task(&self, t: usize) -> &TaskSpec {
        self.tasks[t]
    }

    pub fn begin_generation(&mut self) {
        self.previous = std::mem::take(&mut self.current);
    }

    fn map<T: Sync, U: Send>(&self, items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
        if self.parallel {
            items.par_iter().map(f).collect()
        } else {
            items.iter().map(f).collect()
        }
    }

    /// Training features of each tree (or group of trees concatenated) on
    /// task `task`; `None` marks an evaluation failure.
    pub fn features(&mut self, task: usize, groups: &[Vec<&TypedTree>]) -> Vec<Features> {
        let keys: Vec<String> = groups
            .iter()
            .map(|g| g.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" | "))
            .collect();
        let mut missing: Vec<usize> = Vec::new();
        for (i, key) in keys.iter().enumerate() {
            let k = (task, key.clone());
            if self.current.contains_key(&k) {
                continue;
            }
            if let Some(v) = self.previous.remove(&k) {
                self.current.insert(k, v);
            } else if !missing.iter().any(|&j| keys[j] == *key) {
                missing.push(i);
            }
        }
        let spec = self.tasks[task];
        let computed = self.map(&missing, |&i| {
            extract_table(&groups[i], &spec.train, spec.classes).ok().map(Arc::new)
        });
        self.counters.extractions.fetch_add(missing.len(), Ordering::Relaxed);
        for (&i, v) in missing.iter().zip(computed) {
            self.current.insert((task, keys[i].clone()), v);
        }
        keys.into_iter()
            .map(|k| self.current[&(task, k)].clone())
            .collect()
    }

    /// Scores feature tables, optionally appending `extra` columns to each.
    /// Failures score negative infinity.
    pub fn score(&self, task: usize, tables: &[Features], extra: Option<&FeatureTable>) -> Vec<f64> {
        self.counters.fitness.fetch_add(tables.len(), Ordering::Relaxed);
        // identical tables share one score
        let mut first: Vec<usize> = Vec::with_capacity(tables.len());
        for (i, t) in tables.iter().enumerate() {
            let j = (0..i)
                .find(|&j| match (t, &tables[j]) {
                    (Some(a), Some(b)) => Arc::ptr_eq(a, b),
                    _ => false,
                })
                .unwrap_or(i);
            first.push(j);
        }
        let unique: Vec<usize> = (0..tables.len()).filter(|&i| first[i] == i).collect();
        let scores = self.map(&unique, |&i| {
            let Some(t) = &tables[i] else {
                return f64::NEG_INFINITY;
            };
            let joined;
            let table = match extra {
                Some(e) => match t.hconcat(e) {
                    Ok(j) => {
                        joined = j;
                        &joined
                    }
                    Err(_) => return f64::NEG_INFINITY,
                },
                None => t.as_ref(),
            };
            self.scorer.score(task, table).unwrap_or(f64::NEG_INFINITY)
        });
        let mut by_index = vec![f64::NEG_INFINITY; tables.len()];
        for (&i, s) in unique.iter().zip(scores) {
            by_index[i] = s;
        }
        (0..tables.len()).map(|i| by_index[first[i]]).collect()
    }

    /// Fitness of each common tree: both tasks' accuracies combined with
    /// the size penalty.
    pub fn common_fitness_batch(&mut self, trees: &[&TypedTree]) -> Vec<f64> {
        let groups: Vec<Vec<&TypedTree>> = trees.iter().map(|&t| vec![t]).collect();
        let f1 = self.features(0, &groups);
        let f2 = self.features(1, &groups);
        let a1 = self.score(0, &f1, None);
        let a2 = self.score(1, &f2, None);
        // one fitness per tree, not per task
        self.counters.fitness.fetch_sub(trees.len(), Ordering::Relaxed);
        trees
            .iter()
            .zip(a1.iter().zip(&a2))
            .map(|(t, (&x, &y))| common_fitness(x, y, t.size()))
            .collect()
    }

    /// Fitness of each task tree when its features are joined with the
    /// given common-tree features.
    pub fn task_fitness_batch(
        &mut self,
        task: usize,
        trees: &[&TypedTree],
        common: Option<&FeatureTable>,
    ) -> Vec<f64> {
        let groups: Vec<Vec<&TypedTree>> = trees.iter().map(|&t| vec![t]).collect();
        let feats = self.features(task, &groups);
        self.score(task, &feats, common)
    }

    /// Cached training features of a single tree (extracting if needed).
    pub fn tree_features(&mut self, task: usize, tree: &TypedTree) -> Features {
        self.counters.common_lookups.fetch_add(1, Ordering::Relaxed);
        self.features(task, &[vec![tree]]).pop().flatten()
    }
}
