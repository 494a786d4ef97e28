use std::time::Instant;

use rand::Rng;

use super::breed::{breed, rank_order};
use super::fitness::{CvScorer, Evaluator, LinearCv};
use super::ksmtgp::{finish_record, BestSoFar};
use super::{
    population_rng, EvoConfig, GenStats, Method, MultitaskError, RunRecord, Solution, TaskSpec,
};
use crate::gp::{
    build_primitive_set, init_population, subtree_crossover, subtree_mutation, tournament_select,
    TypedTree,
};

/// Generational GP with elitism on one task; individuals hold `trees`
/// trees whose features are concatenated.
fn single_task_run<S: CvScorer>(
    method: Method,
    task: &TaskSpec,
    cfg: &EvoConfig,
    scorer: &S,
    trees: usize,
) -> Result<(Solution, RunRecord), MultitaskError> {
    cfg.validate()?;
    task.validate(cfg.k_folds)?;
    let started = Instant::now();
    let pset = build_primitive_set();
    let mut rng = population_rng(cfg.seed, 1);
    let mut pop: Vec<Vec<TypedTree>> = init_population(&pset, &mut rng, cfg.pop_size, trees)
        .into_iter()
        .map(|i| i.trees)
        .collect();
    let mut ev = Evaluator::new(vec![task], scorer, cfg.parallel);
    let mut best = vec![None];
    let mut trace = Vec::new();

    for g in 0..=cfg.generations {
        ev.begin_generation();
        let groups: Vec<Vec<&TypedTree>> = pop.iter().map(|ind| ind.iter().collect()).collect();
        let feats = ev.features(0, &groups);
        let fit = ev.score(0, &feats, None);
        let sizes: Vec<usize> = pop.iter().map(|ind| ind.iter().map(TypedTree::size).sum()).collect();
        let b = rank_order(&fit, &sizes)[0];
        BestSoFar::offer(
            &mut best[0],
            Solution {
                task_tree: pop[b][0].clone(),
                common_tree: pop[b].get(1).cloned(),
                fitness: fit[b],
            },
        );
        trace.push(GenStats {
            generation: g,
            task: 0,
            population_best: fit[b],
            best_so_far: best[0].as_ref().map_or(f64::NEG_INFINITY, |b: &BestSoFar| b.solution.fitness),
            common: None,
        });
        if g < cfg.generations {
            pop = breed(&pop, &fit, true, cfg, &pset, &mut rng);
        }
    }
    let record = finish_record(method, cfg, &[task], best, trace, ev.counters.fitness(), started)?;
    Ok((record.solutions[0].clone(), record))
}

/// Single-tree GP on one task. The solution has no common tree.
pub fn fgp_run(task: &TaskSpec, cfg: &EvoConfig) -> Result<(Solution, RunRecord), MultitaskError> {
    fgp_run_with(task, cfg, &LinearCv::for_run(cfg.k_folds, cfg.seed, 1))
}

pub fn fgp_run_with<S: CvScorer>(
    task: &TaskSpec,
    cfg: &EvoConfig,
    scorer: &S,
) -> Result<(Solution, RunRecord), MultitaskError> {
    single_task_run(Method::Fgp, task, cfg, scorer, 1)
}

/// Two-tree GP on one task. The second tree is stored in the solution's
/// `common_tree` slot.
pub fn mtfgp_run(task: &TaskSpec, cfg: &EvoConfig) -> Result<(Solution, RunRecord), MultitaskError> {
    mtfgp_run_with(task, cfg, &LinearCv::for_run(cfg.k_folds, cfg.seed, 1))
}

pub fn mtfgp_run_with<S: CvScorer>(
    task: &TaskSpec,
    cfg: &EvoConfig,
    scorer: &S,
) -> Result<(Solution, RunRecord), MultitaskError> {
    single_task_run(Method::Mtfgp, task, cfg, scorer, 2)
}

/// Multifactorial member: one tree, the task it is evaluated on and its
/// fitness on that task.
#[derive(Clone, Debug)]
struct Member {
    tree: TypedTree,
    skill: usize,
    fitness: f64,
}

/// Scalar fitness `1 / (1 + rank)` with ranks taken inside each skill group.
fn scalar_fitness(pop: &[Member]) -> Vec<f64> {
    let mut scalar = vec![0.0; pop.len()];
    for t in 0..2 {
        let group: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].skill == t).collect();
        let fit: Vec<f64> = group.iter().map(|&i| pop[i].fitness).collect();
        let sizes: Vec<usize> = group.iter().map(|&i| pop[i].tree.size()).collect();
        for (rank, &j) in rank_order(&fit, &sizes).iter().enumerate() {
            scalar[group[j]] = 1.0 / (1.0 + rank as f64);
        }
    }
    scalar
}

fn best_of_skill(pop: &[Member], t: usize) -> usize {
    let group: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].skill == t).collect();
    let fit: Vec<f64> = group.iter().map(|&i| pop[i].fitness).collect();
    let sizes: Vec<usize> = group.iter().map(|&i| pop[i].tree.size()).collect();
    group[rank_order(&fit, &sizes)[0]]
}

pub fn mffgp_run(
    task1: &TaskSpec,
    task2: &TaskSpec,
    cfg: &EvoConfig,
) -> Result<(Solution, Solution, RunRecord), MultitaskError> {
    mffgp_run_with(task1, task2, cfg, &LinearCv::for_run(cfg.k_folds, cfg.seed, 2))
}

/// Multifactorial GP: one unified population of `2 * pop_size` trees.
///
/// Every initial tree is scored on both tasks and assigned the task where
/// its rank is better; later offspring are scored on their skill task only.
/// Same-skill parents always cross, mixed pairs cross with probability
/// `rmp` and are otherwise mutated separately. The best member of each
/// skill survives unchanged.
pub fn mffgp_run_with<S: CvScorer>(
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
    let total = 2 * cfg.pop_size;
    let mut rng = population_rng(cfg.seed, 3);
    let trees: Vec<TypedTree> = init_population(&pset, &mut rng, total, 1)
        .into_iter()
        .map(|mut i| i.trees.remove(0))
        .collect();
    let mut ev = Evaluator::new(tasks.to_vec(), scorer, cfg.parallel);

    // initial evaluation on both tasks and skill assignment
    ev.begin_generation();
    let refs: Vec<&TypedTree> = trees.iter().collect();
    let sizes: Vec<usize> = trees.iter().map(TypedTree::size).collect();
    let both = [
        ev.task_fitness_batch(0, &refs, None),
        ev.task_fitness_batch(1, &refs, None),
    ];
    let mut rank = [vec![0; total], vec![0; total]];
    for t in 0..2 {
        for (r, &i) in rank_order(&both[t], &sizes).iter().enumerate() {
            rank[t][i] = r;
        }
    }
    let mut skill: Vec<usize> = (0..total)
        .map(|i| match rank[0][i].cmp(&rank[1][i]) {
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Equal => usize::from(rng.gen_bool(0.5)),
        })
        .collect();
    for t in 0..2 {
        if !skill.contains(&t) {
            let top = (0..total).find(|&i| rank[t][i] == 0).expect("ranks cover population");
            skill[top] = t;
        }
    }
    let mut pop: Vec<Member> = trees
        .into_iter()
        .enumerate()
        .map(|(i, tree)| Member {
            tree,
            skill: skill[i],
            fitness: both[skill[i]][i],
        })
        .collect();

    let mut best: Vec<Option<BestSoFar>> = vec![None, None];
    let mut trace = Vec::new();
    for g in 0..=cfg.generations {
        if g > 0 {
            ev.begin_generation();
            let elites: Vec<Member> = (0..2).map(|t| pop[best_of_skill(&pop, t)].clone()).collect();
            let scalar = scalar_fitness(&pop);
            let sizes: Vec<usize> = pop.iter().map(|m| m.tree.size()).collect();
            let mut offspring: Vec<Member> = Vec::with_capacity(total);
            let want = total - elites.len();
            while offspring.len() < want {
                let a = &pop[tournament_select(&scalar, &sizes, cfg.tournament_k, &mut rng)];
                let b = &pop[tournament_select(&scalar, &sizes, cfg.tournament_k, &mut rng)];
                let r: f64 = rng.gen();
                let mutate = |m: &Member, rng: &mut _| Member {
                    tree: subtree_mutation(&pset, &m.tree, rng),
                    skill: m.skill,
                    fitness: f64::NEG_INFINITY,
                };
                let pair = if r < cfg.p_crossover {
                    if a.skill == b.skill || rng.gen::<f64>() < cfg.rmp {
                        let (c1, c2) = subtree_crossover(&a.tree, &b.tree, &mut rng);
                        let s1 = if rng.gen_bool(0.5) { a.skill } else { b.skill };
                        let s2 = if rng.gen_bool(0.5) { a.skill } else { b.skill };
                        [
                            Member { tree: c1, skill: s1, fitness: f64::NEG_INFINITY },
                            Member { tree: c2, skill: s2, fitness: f64::NEG_INFINITY },
                        ]
                    } else {
                        [mutate(a, &mut rng), mutate(b, &mut rng)]
                    }
                } else if r < cfg.p_crossover + cfg.p_mutation {
                    [mutate(a, &mut rng), mutate(b, &mut rng)]
                } else {
                    [a.clone(), b.clone()]
                };
                for m in pair {
                    if offspring.len() < want {
                        offspring.push(m);
                    }
                }
            }
            for t in 0..2 {
                let idx: Vec<usize> = (0..offspring.len()).filter(|&i| offspring[i].skill == t).collect();
                let refs: Vec<&TypedTree> = idx.iter().map(|&i| &offspring[i].tree).collect();
                let fit = ev.task_fitness_batch(t, &refs, None);
                for (&i, f) in idx.iter().zip(fit) {
                    offspring[i].fitness = f;
                }
            }
            pop = elites;
            pop.extend(offspring);
        }

        for t in 0..2 {
            let b = best_of_skill(&pop, t);
            BestSoFar::offer(
                &mut best[t],
                Solution {
                    task_tree: pop[b].tree.clone(),
                    common_tree: None,
                    fitness: pop[b].fitness,
                },
            );
            trace.push(GenStats {
                generation: g,
                task: t,
                population_best: pop[b].fitness,
                best_so_far: best[t].as_ref().map_or(f64::NEG_INFINITY, |b| b.solution.fitness),
                common: None,
            });
        }
    }

    let record = finish_record(
        Method::Mffgp,
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
