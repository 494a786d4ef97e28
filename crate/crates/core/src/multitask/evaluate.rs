use super::{derive_seed, MultitaskError, Solution, TaskSpec, TEST_PURPOSE};
use crate::data::LabeledImages;
use crate::gp::{eval_tree, TypedTree};
use crate::learners::{accuracy, fit_normalizer, train_linear, FeatureTable};

/// One row per image: the features of each tree in turn.
pub fn extract_table(
    trees: &[&TypedTree],
    split: &LabeledImages,
    classes: usize,
) -> Result<FeatureTable, MultitaskError> {
    let d: usize = trees.iter().map(|t| t.feature_dim()).sum();
    let mut data = Vec::with_capacity(split.len() * d);
    for img in &split.images {
        for t in trees {
            data.extend_from_slice(eval_tree(t, img)?.values());
        }
    }
    Ok(FeatureTable::from_flat(data, d, split.labels.clone(), classes)?)
}

fn holdout_accuracy(trees: &[&TypedTree], task: &TaskSpec, seed: u64) -> Result<f64, MultitaskError> {
    let train = extract_table(trees, &task.train, task.classes)?;
    let test = extract_table(trees, &task.test, task.classes)?;
    let norm = fit_normalizer(&train)?;
    let model = train_linear(&norm.apply(&train), derive_seed(seed, TEST_PURPOSE));
    Ok(accuracy(&model, &norm.apply(&test)))
}

/// Trains on the full (normalised) training split and scores the test
/// split. The normaliser is fitted on training data only.
pub fn test_evaluate(sol: &Solution, task: &TaskSpec, seed: u64) -> Result<f64, MultitaskError> {
    holdout_accuracy(&sol.trees(), task, seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransferMode {
    Both,
    CommonOnly,
    TaskOnly,
}

impl TransferMode {
    pub const ALL: [TransferMode; 3] = [TransferMode::Both, TransferMode::CommonOnly, TransferMode::TaskOnly];

    pub fn name(self) -> &'static str {
        match self {
            TransferMode::Both => "both",
            TransferMode::CommonOnly => "common_only",
            TransferMode::TaskOnly => "task_only",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|m| m.name() == s)
    }

    pub fn trees(self, sol: &Solution) -> Result<Vec<&TypedTree>, MultitaskError> {
        Ok(match self {
            TransferMode::Both => sol.trees(),
            TransferMode::TaskOnly => vec![&sol.task_tree],
            TransferMode::CommonOnly => {
                vec![sol.common_tree.as_ref().ok_or(MultitaskError::NoCommonTree)?]
            }
        })
    }
}

/// Like [`test_evaluate`] on a different task, using the trees `mode`
/// selects. Image sizes may differ from the source task.
pub fn transfer_evaluate(
    sol: &Solution,
    other: &TaskSpec,
    mode: TransferMode,
    seed: u64,
) -> Result<f64, MultitaskError> {
    holdout_accuracy(&mode.trees(sol)?, other, seed)
}
