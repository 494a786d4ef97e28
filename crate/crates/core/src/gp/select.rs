use rand::Rng;

use super::{GpError, Individual};

pub const TOURNAMENT_SIZE: usize = 5;

/// Tournament selection with replacement. Higher fitness wins; ties go to
/// the smaller individual, then the lower index. Missing fitness counts as
/// negative infinity.
pub fn tournament_select<R: Rng + ?Sized>(
    fitness: &[f64],
    sizes: &[usize],
    k: usize,
    rng: &mut R,
) -> usize {
    assert!(!fitness.is_empty() && fitness.len() == sizes.len());
    let mut best = rng.gen_range(0..fitness.len());
    for _ in 1..k.max(1) {
        let c = rng.gen_range(0..fitness.len());
        if beats(fitness[c], sizes[c], c, fitness[best], sizes[best], best) {
            best = c;
        }
    }
    best
}

/// Tournament over a population; unevaluated members count as negative
/// infinity.
pub fn select_individual<R: Rng + ?Sized>(
    pop: &[Individual],
    k: usize,
    rng: &mut R,
) -> Result<usize, GpError> {
    if pop.is_empty() {
        return Err(GpError::EmptyPopulation);
    }
    let fitness: Vec<f64> = pop.iter().map(|i| i.fitness.unwrap_or(f64::NEG_INFINITY)).collect();
    let sizes: Vec<usize> = pop.iter().map(Individual::size).collect();
    Ok(tournament_select(&fitness, &sizes, k, rng))
}

fn beats(fa: f64, sa: usize, ia: usize, fb: f64, sb: usize, ib: usize) -> bool {
    let fa = if fa.is_nan() { f64::NEG_INFINITY } else { fa };
    let fb = if fb.is_nan() { f64::NEG_INFINITY } else { fb };
    if fa != fb {
        return fa > fb;
    }
    (sa, ia) < (sb, ib)
}
