//! Strongly typed tree GP: primitive set, trees, generation, evaluation,
//! variation and selection.

mod eval;
mod generate;
mod primitives;
mod select;
mod text;
mod tree;
mod variation;

pub use eval::eval_tree;
pub use generate::{generate_subtree, generate_tree, init_population, GenMethod};
pub use primitives::{
    build_primitive_set, round_sig6, Constant, Layer, Prim, PrimitiveSet, TerminalKind, Type,
};
pub use select::{select_individual, tournament_select, TOURNAMENT_SIZE};
pub use text::{parse_tree, serialize_tree};
pub use tree::{Node, TypedTree, MAX_DEPTH, MIN_DEPTH};
pub use variation::{subtree_crossover, subtree_mutation, MUTATION_MAX_HEIGHT};

use thiserror::Error;

use crate::imageops::ImageError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GpError {
    #[error("malformed tree: {0}")]
    Malformed(String),
    #[error("type error: {0}")]
    Type(String),
    #[error("tree depth {0} exceeds the limit of {MAX_DEPTH}")]
    Depth(usize),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("tree produced a non-finite feature")]
    NonFinite,
    #[error("cannot select from an empty population")]
    EmptyPopulation,
}

/// A population member: one or more trees plus the last assigned fitness.
#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub trees: Vec<TypedTree>,
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(trees: Vec<TypedTree>) -> Self {
        Self {
            trees,
            fitness: None,
        }
    }

    /// Total node count over all trees.
    pub fn size(&self) -> usize {
        self.trees.iter().map(TypedTree::size).sum()
    }
}
