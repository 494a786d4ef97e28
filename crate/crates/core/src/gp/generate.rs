use rand::seq::SliceRandom;
use rand::Rng;

use super::primitives::{Prim, PrimitiveSet, TerminalKind, Type};
use super::tree::{Node, TypedTree, MAX_DEPTH, MIN_DEPTH};
use super::Individual;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenMethod {
    Grow,
    Full,
}

struct Generator<'a, R: Rng + ?Sized> {
    pset: &'a PrimitiveSet,
    rng: &'a mut R,
    method: GenMethod,
    min_depth: usize,
    max_depth: usize,
    out: Vec<Node>,
}

impl<R: Rng + ?Sized> Generator<'_, R> {
    fn emit(&mut self, ty: Type, depth: usize) {
        let remaining = self.max_depth.saturating_sub(depth);
        let funcs: Vec<Prim> = self
            .pset
            .producers(ty)
            .iter()
            .copied()
            .filter(|&p| self.pset.prim_min_height(p) <= remaining)
            .collect();
        let terms = self.pset.terminals_of(ty);

        let use_terminal = if funcs.is_empty() {
            true
        } else if terms.is_empty() {
            false
        } else {
            match self.method {
                GenMethod::Full => false,
                GenMethod::Grow => {
                    depth >= self.min_depth && self.rng.gen_bool(self.pset.terminal_ratio())
                }
            }
        };

        if use_terminal {
            let kind: TerminalKind = *terms
                .choose(self.rng)
                .unwrap_or_else(|| panic!("no terminal or feasible producer for {ty}"));
            let node = kind.sample(self.rng);
            self.out.push(node);
        } else {
            let p = *funcs.choose(self.rng).expect("non-empty");
            self.out.push(Node::Func(p));
            for &arg in p.args() {
                self.emit(arg, depth + 1);
            }
        }
    }
}

/// Emits a random subtree producing `ty` whose height is at most
/// `max_height` (when the grammar allows one that short).
pub fn generate_subtree<R: Rng + ?Sized>(
    pset: &PrimitiveSet,
    rng: &mut R,
    ty: Type,
    method: GenMethod,
    min_height: usize,
    max_height: usize,
) -> Vec<Node> {
    let mut g = Generator {
        pset,
        rng,
        method,
        min_depth: min_height,
        max_depth: max_height,
        out: Vec::new(),
    };
    g.emit(ty, 0);
    g.out
}

/// Random root-typed tree. Grow stops branches early with probability
/// [`PrimitiveSet::terminal_ratio`] once past `min_depth`; full extends
/// every image-typed path to `max_depth`.
pub fn generate_tree<R: Rng + ?Sized>(
    pset: &PrimitiveSet,
    rng: &mut R,
    method: GenMethod,
    min_depth: usize,
    max_depth: usize,
) -> TypedTree {
    assert!(
        MIN_DEPTH <= min_depth && min_depth <= max_depth && max_depth <= MAX_DEPTH,
        "depth bounds must satisfy 2 <= min <= max <= 8"
    );
    let nodes = generate_subtree(pset, rng, pset.root_type(), method, min_depth, max_depth);
    TypedTree::from_nodes_unchecked(nodes)
}

/// Ramped half-and-half: individual `i` gets max depth `2 + i mod 7` and
/// alternates grow (even) and full (odd).
pub fn init_population<R: Rng + ?Sized>(
    pset: &PrimitiveSet,
    rng: &mut R,
    size: usize,
    trees_per_individual: usize,
) -> Vec<Individual> {
    assert!(size >= 2, "population size must be at least 2");
    let span = MAX_DEPTH - MIN_DEPTH + 1;
    (0..size)
        .map(|i| {
            let max_depth = MIN_DEPTH + i % span;
            let method = if i % 2 == 0 {
                GenMethod::Grow
            } else {
                GenMethod::Full
            };
            let trees = (0..trees_per_individual)
                .map(|_| generate_tree(pset, rng, method, MIN_DEPTH, max_depth))
                .collect();
            Individual::new(trees)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gp::build_primitive_set;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_trees_type_check() {
        let pset = build_primitive_set();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..1000 {
            let method = if i % 2 == 0 { GenMethod::Grow } else { GenMethod::Full };
            let max = 2 + i % 7;
            let t = generate_tree(&pset, &mut rng, method, 2, max);
            t.type_check(&pset).unwrap();
            assert!(t.depth() >= 2 && t.depth() <= max, "{t}");
        }
    }

    #[test]
    fn full_trees_reach_max_depth() {
        let pset = build_primitive_set();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let t = generate_tree(&pset, &mut rng, GenMethod::Full, 2, 4);
            assert_eq!(t.depth(), 4, "{t}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let pset = build_primitive_set();
        let a = generate_tree(&pset, &mut ChaCha8Rng::seed_from_u64(9), GenMethod::Grow, 2, 6);
        let b = generate_tree(&pset, &mut ChaCha8Rng::seed_from_u64(9), GenMethod::Grow, 2, 6);
        assert_eq!(a, b);
    }

    #[test]
    fn ramped_population() {
        let pset = build_primitive_set();
        let pop = init_population(&pset, &mut ChaCha8Rng::seed_from_u64(3), 100, 1);
        assert_eq!(pop.len(), 100);
        assert!(pop.iter().all(|ind| ind.fitness.is_none()));
        let mut depths: Vec<usize> = pop.iter().map(|ind| ind.trees[0].depth()).collect();
        depths.sort_unstable();
        depths.dedup();
        assert!(depths.len() >= 3, "{depths:?}");
        let again = init_population(&pset, &mut ChaCha8Rng::seed_from_u64(3), 100, 1);
        assert!(pop.iter().zip(&again).all(|(a, b)| a.trees == b.trees));
    }
}
