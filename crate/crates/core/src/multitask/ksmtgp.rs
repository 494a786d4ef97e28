use std::sync::atomic::Ordering;
use std::time::Instant;

use super::breed::{breed, rank_order};
use super::fitness::{CvScorer, Evaluator, LinearCv};
use super::{
    population_rng, test_evaluate, EvoConfig, GenStats, Method, MultitaskError, RunRecord,
    Solution, TaskSpec,
};
use crate::gp::{build_primitive_set, init_population, TypedTree};

/// Best solution found so far for one task.
#[derive(Clone, Debug)]
pub(crate) struct BestSoFar {
    pub solution: Solution,
    pub size: usize,
}

impl BestSoFar {
    /// Higher fitness wins, then smaller combined size; an exact tie keeps
    /// the earlier solution.
    pub fn offer(slot: &mut Option<BestSoFar>, solution: Solution) {
        let size = solution.size();
        let better = match slot {
            None => true,
            Some(b) => {
                solution.fitness > b.solution.fitness
                    || (solution.fitness == b.solution.fitness && size < b.size)
            }
        };
        if better {
            *slot = Some(BestSoFar { solution, size });
        }
    }
}

pub(crate) fn single(pop: &[Vec<TypedTree>]) -> Vec<&TypedTree> {
    pop.iter().map(|ind| &ind[0]).collect()
}

pub(crate) fn finish_record(
    method: Method,
    cfg: &EvoConfig,
    tasks: &[&TaskSpec],
    best: Vec<Option<BestSoFar>>,
    trace: Vec<GenStats>,
    fitness_evaluations: usize,
    started: Instant,
) -> Result<RunRecord, MultitaskError> {
    let evolve_secs = started.elapsed().as_secs_f64();
    let solutions: Vec<Solution> = best
        .into_iter()
        .map(|b| b.expect("at least one generation evaluated").solution)
        .collect();
    let test_start = Instant::now();
    let test_accuracy = solutions
        .iter()
        .zip(tasks)
        .map(|(s, t)| test_evaluate(s, t, cfg.seed))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RunRecord {
        method,
        seed: cfg.seed,
        generations: cfg.generations,
        feature_counts: solutions.iter().map(Solution::feature_count).collect(),
        trace,
        solutions,
        test_accuracy,
        fitness_evaluations,
        evolve_secs,
        test_secs: test_start.elapsed().as_secs_f64(),
    })
}

pub fn ksmtgp_run(
    task1: &TaskSpec,
    task2: &TaskSpec,
    cfg: &EvoConfig,
) -> Result<(Solution, Solution, RunRecord), MultitaskError> {
    let scorer = LinearCv::for_run(cfg.k_folds, cfg.seed, 2);
    ksmtgp_run_with(task1, task2, cfg, &scorer)
}

/// KSMTGP with a caller-supplied accuracy estimator.
///
/// Each generation evaluates the common population on both tasks, picks the
/// best common tree, then evaluates each task population with that tree's
/// features appended. The common population is bred without elitism.
pub fn ksmtgp_run_with<S: CvScorer>(
    task1: &TaskSpec,
    task2: &TaskSpec,
    cfg: &EvoConfig,
    scorer: &S,
) -> Result<(Solution, Solution, RunRecord), MultitaskError> {
    cfg.validate()?;
    task1.validate(cfg.k_folds)?;
    task2.validate(cfg.k_folds)?;
    let started = Instant::now();
    let pset = build_primitive_set();
    let tasks = [task1, task2];

    let mut rng_common = population_rng(cfg.seed, 0);
    let mut rng_task = [population_rng(cfg.seed, 1), population_rng(cfg.seed, 2)];
    let to_trees = |inds: Vec<crate::gp::Individual>| -> Vec<Vec<TypedTree>> {
        inds.into_iter().map(|i| i.trees).collect()
    };
    let mut common = to_trees(init_population(&pset, &mut rng_common, cfg.pop_size, 1));
    let mut task_pops = [
        to_trees(init_population(&pset, &mut rng_task[0], cfg.pop_size, 1)),
        to_trees(init_population(&pset, &mut rng_task[1], cfg.pop_size, 1)),
    ];

    let mut ev = Evaluator::new(tasks.to_vec(), scorer, cfg.parallel);
    let mut best: Vec<Option<BestSoFar>> = vec![None, None];
    let mut trace = Vec::new();

    for g in 0..=cfg.generations {
        ev.begin_generation();
        let common_fit = ev.common_fitness_batch(&single(&common));
        let common_sizes: Vec<usize> = common.iter().map(|c| c[0].size()).collect();
        let ct = rank_order(&common_fit, &common_sizes)[0];
        let ct_tree = common[ct][0].clone();

        let mut task_fit: [Vec<f64>; 2] = Default::default();
        for t in 0..2 {
            let trees = single(&task_pops[t]);
            let fit = match ev.tree_features(t, &ct_tree) {
                Some(cf) => ev.task_fitness_batch(t, &trees, Some(&cf)),
                None => {
                    ev.counters.fitness.fetch_add(trees.len(), Ordering::Relaxed);
                    vec![f64::NEG_INFINITY; trees.len()]
                }
            };
            let sizes: Vec<usize> = trees.iter().map(|t| t.size()).collect();
            let b = rank_order(&fit, &sizes)[0];
            BestSoFar::offer(
                &mut best[t],
                Solution {
                    task_tree: trees[b].clone(),
                    common_tree: Some(ct_tree.clone()),
                    fitness: fit[b],
                },
            );
            trace.push(GenStats {
                generation: g,
                task: t,
                population_best: fit[b],
                best_so_far: best[t].as_ref().map_or(f64::NEG_INFINITY, |b| b.solution.fitness),
                common: Some((common_fit[ct], ct_tree.size())),
            });
            task_fit[t] = fit;
        }

        if g < cfg.generations {
            common = breed(&common, &common_fit, false, cfg, &pset, &mut rng_common);
            for t in 0..2 {
                task_pops[t] = breed(&task_pops[t], &task_fit[t], true, cfg, &pset, &mut rng_task[t]);
            }
        }
    }

    let record = finish_record(
        Method::Ksmtgp,
        cfg,
        &tasks,
        best,
        trace,
        ev.counters.fitness(),
        started,
    )?;
    let (s1, s2) = (record.solutions[0].clone(), record.solutions[1].clone());
    Ok((s1, s2, record))
}
