use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::svm::{accuracy, gram, train_on_gram, SvmParams};
use super::{FeatureTable, LearnError};

/// Splits row indices into `k` folds. Each class is shuffled and dealt
/// round-robin, the dealing position carrying over from one class to the
/// next so fold sizes stay balanced too. Folds are returned sorted.
pub fn stratified_kfold(labels: &[usize], k: usize, seed: u64) -> Result<Vec<Vec<usize>>, LearnError> {
    if k < 2 {
        return Err(LearnError::FoldCount(k));
    }
    if labels.is_empty() {
        return Err(LearnError::Empty);
    }
    let classes = labels.iter().max().map_or(0, |&m| m + 1);
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for (class, members) in by_class.iter_mut().enumerate() {
        if members.is_empty() {
            continue;
        }
        if members.len() < k {
            return Err(LearnError::ClassTooSmall {
                class,
                count: members.len(),
                k,
            });
        }
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    folds.iter_mut().for_each(|f| f.sort_unstable());
    Ok(folds)
}

/// Mean held-out accuracy over `k` stratified folds. The table is expected
/// to be normalised already.
pub fn cv_accuracy(table: &FeatureTable, k: usize, seed: u64) -> Result<f64, LearnError> {
    let folds = stratified_kfold(table.labels(), k, seed)?;
    let n = table.len();
    let full = gram(table);
    let params = SvmParams::default();
    let mut total = 0.0;
    for (f, held_out) in folds.iter().enumerate() {
        let train_idx: Vec<usize> = folds
            .iter()
            .enumerate()
            .filter(|&(g, _)| g != f)
            .flat_map(|(_, fold)| fold.iter().copied())
            .collect();
        let sub: Vec<f64> = train_idx
            .iter()
            .flat_map(|&i| train_idx.iter().map(move |&j| (i, j)))
            .map(|(i, j)| full[i * n + j])
            .collect();
        let model = train_on_gram(&table.subset(&train_idx), &sub, seed, &params);
        total += accuracy(&model, &table.subset(held_out));
    }
    Ok(total / k as f64)
}
