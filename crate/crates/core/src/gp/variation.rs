use rand::Rng;

use super::generate::{generate_subtree, GenMethod};
use super::primitives::{PrimitiveSet, Type};
use super::tree::{TypedTree, MAX_DEPTH};

/// Height limit for subtrees grown by mutation.
pub const MUTATION_MAX_HEIGHT: usize = 3;

fn node_types(t: &TypedTree) -> Vec<Type> {
    t.nodes().iter().map(|n| n.ty()).collect()
}

/// Swaps one pair of same-typed non-root subtrees chosen uniformly over all
/// compatible pairs. A child deeper than the limit is replaced by its
/// parent; with no compatible pair both parents are returned unchanged.
pub fn subtree_crossover<R: Rng + ?Sized>(
    a: &TypedTree,
    b: &TypedTree,
    rng: &mut R,
) -> (TypedTree, TypedTree) {
    let (ta, tb) = (node_types(a), node_types(b));
    let count_in_b = |ty: Type| tb[1..].iter().filter(|&&t| t == ty).count();
    let weights: Vec<usize> = ta[1..].iter().map(|&t| count_in_b(t)).collect();
    let total: usize = weights.iter().sum();
    if total == 0 {
        return (a.clone(), b.clone());
    }
    let mut pick = rng.gen_range(0..total);
    let mut i = 0;
    while pick >= weights[i] {
        pick -= weights[i];
        i += 1;
    }
    let ty = ta[i + 1];
    let j = tb
        .iter()
        .enumerate()
        .skip(1)
        .filter(|&(_, &t)| t == ty)
        .nth(pick)
        .map(|(j, _)| j)
        .expect("weight counts matching nodes");
    let i = i + 1;

    let c1 = a.with_subtree(i, b.subtree(j));
    let c2 = b.with_subtree(j, a.subtree(i));
    let keep = |child: TypedTree, parent: &TypedTree| {
        if child.depth() > MAX_DEPTH {
            parent.clone()
        } else {
            child
        }
    };
    (keep(c1, a), keep(c2, b))
}

/// Replaces a uniformly chosen non-root subtree with a fresh grow subtree
/// of the same type, at most [`MUTATION_MAX_HEIGHT`] high and never
/// pushing the tree past the depth limit.
pub fn subtree_mutation<R: Rng + ?Sized>(
    pset: &PrimitiveSet,
    t: &TypedTree,
    rng: &mut R,
) -> TypedTree {
    if t.size() < 2 {
        return t.clone();
    }
    let i = rng.gen_range(1..t.size());
    let depth = t.node_depths()[i];
    let ty = t.nodes()[i].ty();
    let need = pset.min_height(ty).unwrap_or(0);
    let limit = MUTATION_MAX_HEIGHT.min(MAX_DEPTH - depth).max(need);
    let sub = generate_subtree(pset, rng, ty, GenMethod::Grow, 0, limit);
    let child = t.with_subtree(i, &sub);
    if child.depth() > MAX_DEPTH {
        t.clone()
    } else {
        child
    }
}
