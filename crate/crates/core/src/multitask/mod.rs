//! Multitask evolution: KSMTGP (one common population plus one population
//! per task) and the FGP, MTFGP and MFFGP baselines, with final test and
//! transfer evaluation.

mod baselines;
mod breed;
mod evaluate;
mod fitness;
mod ksmtgp;

pub use baselines::{fgp_run, fgp_run_with, mffgp_run, mffgp_run_with, mtfgp_run, mtfgp_run_with};
pub use breed::{breed, elite_count, rank_order};
pub use evaluate::{extract_table, test_evaluate, transfer_evaluate, TransferMode};
pub use fitness::{common_fitness, CvScorer, EvalCounters, Evaluator, LinearCv};
pub use ksmtgp::{ksmtgp_run, ksmtgp_run_with};

pub use crate::data::TaskSpec;

use std::fmt;

use thiserror::Error;

use crate::data::DataError;
use crate::gp::{GpError, TypedTree};
use crate::learners::LearnError;

#[derive(Debug, Error)]
pub enum MultitaskError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("solution has no common tree")]
    NoCommonTree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Ksmtgp,
    Fgp,
    Mtfgp,
    Mffgp,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Ksmtgp => "ksmtgp",
            Method::Fgp => "fgp",
            Method::Mtfgp => "mtfgp",
            Method::Mffgp => "mffgp",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Evolution parameters. Defaults follow the published setup; tree depth
/// bounds are the fixed [`crate::gp::MIN_DEPTH`]..=[`crate::gp::MAX_DEPTH`].
#[derive(Clone, Debug, PartialEq)]
pub struct EvoConfig {
    pub pop_size: usize,
    pub generations: usize,
    pub p_crossover: f64,
    pub p_mutation: f64,
    pub p_elitism: f64,
    pub tournament_k: usize,
    pub k_folds: usize,
    /// Cross-skill mating probability for MFFGP.
    pub rmp: f64,
    pub seed: u64,
    /// Evaluate fitness on the rayon pool. Results do not depend on it.
    pub parallel: bool,
}

impl Default for EvoConfig {
    fn default() -> Self {
        Self {
            pop_size: 100,
            generations: 50,
            p_crossover: 0.8,
            p_mutation: 0.19,
            p_elitism: 0.01,
            tournament_k: 5,
            k_folds: 3,
            rmp: 0.3,
            seed: 0,
            parallel: true,
        }
    }
}

impl EvoConfig {
    pub fn validate(&self) -> Result<(), MultitaskError> {
        let fail = |m: String| Err(MultitaskError::Config(m));
        if self.pop_size < 2 {
            return fail(format!("pop_size must be at least 2, got {}", self.pop_size));
        }
        for (name, p) in [
            ("p_crossover", self.p_crossover),
            ("p_mutation", self.p_mutation),
            ("p_elitism", self.p_elitism),
            ("rmp", self.rmp),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return fail(format!("{name} must lie in [0, 1], got {p}"));
            }
        }
        let total = self.p_crossover + self.p_mutation + self.p_elitism;
        if (total - 1.0).abs() > 1e-9 {
            return fail(format!("operator rates must sum to 1, got {total}"));
        }
        if self.tournament_k == 0 {
            return fail("tournament_k must be positive".into());
        }
        if self.k_folds < 2 {
            return fail(format!("k_folds must be at least 2, got {}", self.k_folds));
        }
        Ok(())
    }
}

/// Trees that solve one task. Features are the task tree's followed by the
/// common tree's. MTFGP stores its second tree in `common_tree`.
#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub task_tree: TypedTree,
    pub common_tree: Option<TypedTree>,
    pub fitness: f64,
}

impl Solution {
    pub fn trees(&self) -> Vec<&TypedTree> {
        std::iter::once(&self.task_tree).chain(self.common_tree.as_ref()).collect()
    }

    pub fn feature_count(&self) -> usize {
        self.trees().iter().map(|t| t.feature_dim()).sum()
    }

    pub fn size(&self) -> usize {
        self.trees().iter().map(|t| t.size()).sum()
    }
}

/// Per-generation statistics for one task.
#[derive(Clone, Debug, PartialEq)]
pub struct GenStats {
    pub generation: usize,
    pub task: usize,
    /// Best fitness in this generation's population.
    pub population_best: f64,
    /// Fitness of the best solution found so far.
    pub best_so_far: f64,
    /// Fitness and size of the generation's best common tree (KSMTGP only).
    pub common: Option<(f64, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub method: Method,
    pub seed: u64,
    pub generations: usize,
    pub trace: Vec<GenStats>,
    pub solutions: Vec<Solution>,
    pub test_accuracy: Vec<f64>,
    pub feature_counts: Vec<usize>,
    pub fitness_evaluations: usize,
    pub evolve_secs: f64,
    pub test_secs: f64,
}

impl RunRecord {
    /// Best-so-far fitness per generation for `task`.
    pub fn best_trace(&self, task: usize) -> Vec<f64> {
        self.trace
            .iter()
            .filter(|s| s.task == task)
            .map(|s| s.best_so_far)
            .collect()
    }
}

/// Independent seeds per purpose derived from the run seed.
pub(crate) fn derive_seed(seed: u64, purpose: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ purpose.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) const FOLD_PURPOSE: u64 = 0x100;
pub(crate) const TEST_PURPOSE: u64 = 0x200;

pub(crate) fn population_rng(seed: u64, stream: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
