use std::cmp::Ordering;

use rand::Rng;

use super::EvoConfig;
use crate::gp::{subtree_crossover, subtree_mutation, tournament_select, PrimitiveSet, TypedTree};

/// Number of elites copied unchanged: 1% of the population, at least one.
pub fn elite_count(cfg: &EvoConfig) -> usize {
    ((cfg.p_elitism * cfg.pop_size as f64).round() as usize).max(1)
}

/// Indices sorted best first: higher fitness, then smaller size, then
/// lower index.
pub fn rank_order(fitness: &[f64], sizes: &[usize]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..fitness.len()).collect();
    idx.sort_by(|&a, &b| {
        fitness[b]
            .partial_cmp(&fitness[a])
            .unwrap_or(Ordering::Equal)
            .then(sizes[a].cmp(&sizes[b]))
            .then(a.cmp(&b))
    });
    idx
}

/// Next generation of multi-tree individuals (one tree for most
/// populations). Elites come first when `elitism` is set; each remaining
/// slot draws r in [0, 1): below `p_crossover` it takes the first child of
/// a crossover, below `p_crossover + p_mutation` a mutant, otherwise a copy
/// of a tournament winner. Multi-tree variation acts on one tree index
/// chosen uniformly.
pub fn breed<R: Rng + ?Sized>(
    pop: &[Vec<TypedTree>],
    fitness: &[f64],
    elitism: bool,
    cfg: &EvoConfig,
    pset: &PrimitiveSet,
    rng: &mut R,
) -> Vec<Vec<TypedTree>> {
    let n = pop.len();
    let sizes: Vec<usize> = pop.iter().map(|ind| ind.iter().map(TypedTree::size).sum()).collect();
    let mut next: Vec<Vec<TypedTree>> = Vec::with_capacity(n);
    if elitism {
        let order = rank_order(fitness, &sizes);
        next.extend(order.iter().take(elite_count(cfg).min(n)).map(|&i| pop[i].clone()));
    }
    let select = |rng: &mut R| tournament_select(fitness, &sizes, cfg.tournament_k, rng);
    while next.len() < n {
        let r: f64 = rng.gen();
        if r < cfg.p_crossover {
            let (a, b) = (select(rng), select(rng));
            let ti = rng.gen_range(0..pop[a].len());
            let (c1, _) = subtree_crossover(&pop[a][ti], &pop[b][ti], rng);
            let mut child = pop[a].clone();
            child[ti] = c1;
            next.push(child);
        } else if r < cfg.p_crossover + cfg.p_mutation {
            let a = select(rng);
            let ti = rng.gen_range(0..pop[a].len());
            let mut child = pop[a].clone();
            child[ti] = subtree_mutation(pset, &pop[a][ti], rng);
            next.push(child);
        } else {
            next.push(pop[select(rng)].clone());
        }
    }
    next
}
