//! Experiment driver behind the `mtgp` binary: configuration files, repeated
//! runs, output files, significance tests and tree rendering.

mod config;
mod dot;
mod runner;
mod stats;
mod transfer;

use std::path::PathBuf;

pub use config::{Descriptor, ExperimentConfig, KeyValues, MethodName, TaskSource, TransferConfig};
pub use dot::export_dot;
pub use runner::{
    fmt6, read_results, run_experiment, run_experiment_with, summaries_by_task, tree_file_name,
    tree_file_text, write_outputs, write_results, ExperimentOutcome, RunRow, RunTiming,
    RESULTS_HEADER,
};
pub use stats::{compare_results, summarize, wilcoxon_ranksum, Comparison, RankSum, Summary, Verdict, ALPHA, EXACT_LIMIT};
pub use transfer::{
    eval_tree_file, find_tree_files, read_tree_file, transfer_command, transfer_summaries,
    write_transfer, TransferRow,
};

use crate::data::DataError;
use crate::gp::GpError;
use crate::learners::LearnError;
use crate::multitask::MultitaskError;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error("config: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Format(String),
    #[error("stats: {0}")]
    Stats(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Gp(#[from] GpError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error(transparent)]
    Multitask(#[from] MultitaskError),
    #[error(transparent)]
    Image(#[from] crate::imageops::ImageError),
}

impl ExperimentError {
    /// Process exit code: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) | ExperimentError::Multitask(MultitaskError::Config(_)) => 2,
            _ => 1,
        }
    }
}
