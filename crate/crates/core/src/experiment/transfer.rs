use std::fs;
use std::path::{Path, PathBuf};

use super::config::{TaskSource, TransferConfig};
use super::runner::{fmt6, tree_file_name};
use super::stats::{summarize, Summary};
use super::ExperimentError;
use crate::gp::{build_primitive_set, parse_tree};
use crate::multitask::{test_evaluate, transfer_evaluate, Solution, TransferMode};

/// Reads a two-line tree file written by `run`.
pub fn read_tree_file(path: &Path) -> Result<Solution, ExperimentError> {
    let text = fs::read_to_string(path).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let pset = build_primitive_set();
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let task = lines
        .next()
        .ok_or_else(|| ExperimentError::Format(format!("{}: empty tree file", path.display())))?;
    let in_file = |e| ExperimentError::Format(format!("{}: {e}", path.display()));
    let task_tree = parse_tree(task, &pset).map_err(in_file)?;
    let common_tree = match lines.next() {
        None | Some("-") => None,
        Some(line) => Some(parse_tree(line, &pset).map_err(in_file)?),
    };
    Ok(Solution {
        task_tree,
        common_tree,
        fitness: f64::NAN,
    })
}

/// Tree files for `task` (0-based) in run order.
pub fn find_tree_files(dir: &Path, task: usize) -> Result<Vec<(usize, PathBuf)>, ExperimentError> {
    let mut found = Vec::new();
    let mut run = 0;
    loop {
        let path = dir.join(tree_file_name(task, run));
        if !path.exists() {
            break;
        }
        found.push((run, path));
        run += 1;
    }
    if found.is_empty() {
        return Err(ExperimentError::Format(format!(
            "no {} files in {}",
            tree_file_name(task, 0),
            dir.display()
        )));
    }
    Ok(found)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransferRow {
    pub mode: TransferMode,
    pub run: usize,
    pub accuracy: f64,
}

/// Applies every saved solution to the target task under each mode. Run
/// `i` trains its classifier with seed `cfg.seed + i`.
pub fn transfer_command(cfg: &TransferConfig) -> Result<Vec<TransferRow>, ExperimentError> {
    let target = cfg.target.load()?;
    let files = find_tree_files(&cfg.source_dir, cfg.source_task - 1)?;
    let mut rows = Vec::new();
    for (run, path) in files {
        let sol = read_tree_file(&path)?;
        for &mode in &cfg.modes {
            let seed = cfg.seed.wrapping_add(run as u64);
            let accuracy = transfer_evaluate(&sol, &target, mode, seed)?;
            rows.push(TransferRow { mode, run, accuracy });
        }
    }
    Ok(rows)
}

pub fn transfer_summaries(rows: &[TransferRow]) -> Vec<(TransferMode, Summary)> {
    TransferMode::ALL
        .into_iter()
        .filter_map(|mode| {
            let acc: Vec<f64> = rows.iter().filter(|r| r.mode == mode).map(|r| r.accuracy).collect();
            (!acc.is_empty()).then(|| (mode, summarize(&acc)))
        })
        .collect()
}

pub fn write_transfer(rows: &[TransferRow], path: &Path) -> Result<(), ExperimentError> {
    let mut text = String::from("mode,run,accuracy\n");
    for r in rows {
        text.push_str(&format!("{},{},{}\n", r.mode.name(), r.run, fmt6(r.accuracy)));
    }
    fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Test accuracy of a saved solution on a task, using every tree in the file.
pub fn eval_tree_file(path: &Path, task: &TaskSource, seed: u64) -> Result<f64, ExperimentError> {
    let sol = read_tree_file(path)?;
    Ok(test_evaluate(&sol, &task.load()?, seed)?)
}
