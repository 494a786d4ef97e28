use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{Descriptor, ExperimentConfig, MethodName};
use super::stats::{summarize, Summary};
use super::ExperimentError;
use crate::data::{raw_pixel_table, LabeledImages, TaskSpec};
use crate::imageops::{hog_vec, lbp_hist, sift_vec};
use crate::learners::{accuracy, cv_accuracy, fit_normalizer, train_linear, FeatureTable};
use crate::multitask::{
    derive_seed, fgp_run, ksmtgp_run, mffgp_run, mtfgp_run, EvoConfig, RunRecord, Solution,
    FOLD_PURPOSE, TEST_PURPOSE,
};

/// One line of `results.csv`.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub method: String,
    pub run: usize,
    pub seed: u64,
    pub task: String,
    pub best_fitness: f64,
    pub test_accuracy: f64,
    pub feature_count: usize,
    pub common_size: usize,
    pub task_size: usize,
}

pub const RESULTS_HEADER: [&str; 9] = [
    "method",
    "run",
    "seed",
    "task",
    "best_fitness",
    "test_accuracy",
    "feature_count",
    "common_size",
    "task_size",
];

/// Fixed six-decimal rendering so reruns are byte-identical.
pub fn fmt6(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn parse_float(s: &str) -> Option<f64> {
    match s {
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        "nan" => Some(f64::NAN),
        _ => s.parse().ok(),
    }
}

impl RunRow {
    fn record(&self) -> [String; 9] {
        [
            self.method.clone(),
            self.run.to_string(),
            self.seed.to_string(),
            self.task.clone(),
            fmt6(self.best_fitness),
            fmt6(self.test_accuracy),
            self.feature_count.to_string(),
            self.common_size.to_string(),
            self.task_size.to_string(),
        ]
    }

    fn from_record(rec: &csv::StringRecord, line: u64) -> Result<Self, ExperimentError> {
        let bad = |what: &str| ExperimentError::Format(format!("line {line}: bad {what}"));
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(RESULTS_HEADER[i]));
        let int = |i: usize| field(i)?.parse::<usize>().map_err(|_| bad(RESULTS_HEADER[i]));
        let float = |i: usize| parse_float(field(i)?).ok_or_else(|| bad(RESULTS_HEADER[i]));
        Ok(Self {
            method: field(0)?.to_string(),
            run: int(1)?,
            seed: field(2)?.parse().map_err(|_| bad("seed"))?,
            task: field(3)?.to_string(),
            best_fitness: float(4)?,
            test_accuracy: float(5)?,
            feature_count: int(6)?,
            common_size: int(7)?,
            task_size: int(8)?,
        })
    }
}

/// Everything an experiment produced, in run order.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub rows: Vec<RunRow>,
    /// Evolutionary runs only; empty for the fixed-feature baselines.
    pub records: Vec<RunRecord>,
    pub timings: Vec<RunTiming>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunTiming {
    pub run: usize,
    pub seed: u64,
    pub evolve_secs: f64,
    pub test_secs: f64,
    pub fitness_evaluations: usize,
}

impl ExperimentOutcome {
    /// Test-accuracy summary per task, in first-appearance order.
    pub fn summaries(&self) -> Vec<(String, Summary)> {
        summaries_by_task(&self.rows)
    }
}

pub fn summaries_by_task(rows: &[RunRow]) -> Vec<(String, Summary)> {
    let mut tasks: Vec<String> = Vec::new();
    for r in rows {
        if !tasks.contains(&r.task) {
            tasks.push(r.task.clone());
        }
    }
    tasks
        .into_iter()
        .map(|t| {
            let acc: Vec<f64> = rows.iter().filter(|r| r.task == t).map(|r| r.test_accuracy).collect();
            let s = summarize(&acc);
            (t, s)
        })
        .collect()
}

fn descriptor_table(split: &LabeledImages, classes: usize, desc: Descriptor) -> Result<FeatureTable, ExperimentError> {
    let mut rows = Vec::with_capacity(split.len());
    for img in &split.images {
        let mut row = Vec::new();
        if matches!(desc, Descriptor::Sift | Descriptor::All) {
            row.extend_from_slice(sift_vec(img)?.values());
        }
        if matches!(desc, Descriptor::Hog | Descriptor::All) {
            row.extend_from_slice(hog_vec(img)?.values());
        }
        if matches!(desc, Descriptor::Lbp | Descriptor::All) {
            row.extend_from_slice(lbp_hist(img)?.values());
        }
        rows.push(row);
    }
    Ok(FeatureTable::from_rows(&rows, split.labels.clone(), classes)?)
}

/// Cross-validated training accuracy and test accuracy of a fixed feature
/// extractor, scored the same way as evolved trees.
fn fixed_features_run(
    method: MethodName,
    desc: Descriptor,
    task: &TaskSpec,
    cfg: &EvoConfig,
) -> Result<(f64, f64, usize), ExperimentError> {
    let table = |split: &LabeledImages| match method {
        MethodName::RawPixel => Ok(raw_pixel_table(split, task.classes)?),
        _ => descriptor_table(split, task.classes, desc),
    };
    let train = table(&task.train)?;
    let test = table(&task.test)?;
    if train.dim() != test.dim() {
        return Err(ExperimentError::Config(format!(
            "task {}: train and test images differ in size",
            task.name
        )));
    }
    let norm = fit_normalizer(&train)?;
    let train = norm.apply(&train);
    let cv = cv_accuracy(&train, cfg.k_folds, derive_seed(cfg.seed, FOLD_PURPOSE))?;
    let model = train_linear(&train, derive_seed(cfg.seed, TEST_PURPOSE));
    Ok((cv, accuracy(&model, &norm.apply(&test)), train.dim()))
}

fn solution_row(method: MethodName, run: usize, seed: u64, task: &TaskSpec, sol: &Solution, acc: f64) -> RunRow {
    RunRow {
        method: method.name().into(),
        run,
        seed,
        task: task.name.clone(),
        best_fitness: sol.fitness,
        test_accuracy: acc,
        feature_count: sol.feature_count(),
        common_size: sol.common_tree.as_ref().map_or(0, |t| t.size()),
        task_size: sol.task_tree.size(),
    }
}

/// Runs `cfg.runs` independent runs with seeds `base_seed + i`, calling
/// `progress` after each run with that run's rows.
pub fn run_experiment_with(
    cfg: &ExperimentConfig,
    progress: &mut dyn FnMut(&[RunRow]),
) -> Result<ExperimentOutcome, ExperimentError> {
    let tasks = cfg.tasks.iter().map(|t| t.load()).collect::<Result<Vec<_>, _>>()?;
    let mut names: Vec<&str> = Vec::new();
    for t in &tasks {
        if names.contains(&t.name.as_str()) {
            return Err(ExperimentError::Config(format!("two tasks are both named '{}'", t.name)));
        }
        names.push(&t.name);
    }
    let mut outcome = ExperimentOutcome {
        rows: Vec::new(),
        records: Vec::new(),
        timings: Vec::new(),
    };
    for run in 0..cfg.runs {
        let seed = cfg.base_seed.wrapping_add(run as u64);
        let evo = EvoConfig { seed, ..cfg.evo.clone() };
        let first = outcome.rows.len();
        let record = match cfg.method {
            MethodName::Ksmtgp | MethodName::Mffgp => {
                let (s1, s2, rec) = if cfg.method == MethodName::Ksmtgp {
                    ksmtgp_run(&tasks[0], &tasks[1], &evo)?
                } else {
                    mffgp_run(&tasks[0], &tasks[1], &evo)?
                };
                for (k, sol) in [s1, s2].iter().enumerate() {
                    let row = solution_row(cfg.method, run, seed, &tasks[k], sol, rec.test_accuracy[k]);
                    outcome.rows.push(row);
                }
                Some(rec)
            }
            MethodName::Fgp | MethodName::Mtfgp => {
                let (sol, rec) = if cfg.method == MethodName::Fgp {
                    fgp_run(&tasks[0], &evo)?
                } else {
                    mtfgp_run(&tasks[0], &evo)?
                };
                outcome
                    .rows
                    .push(solution_row(cfg.method, run, seed, &tasks[0], &sol, rec.test_accuracy[0]));
                Some(rec)
            }
            MethodName::RawPixel | MethodName::FixedDescriptor => {
                let started = Instant::now();
                for task in &tasks {
                    let (cv, acc, dim) = fixed_features_run(cfg.method, cfg.descriptor, task, &evo)?;
                    outcome.rows.push(RunRow {
                        method: cfg.method.name().into(),
                        run,
                        seed,
                        task: task.name.clone(),
                        best_fitness: cv,
                        test_accuracy: acc,
                        feature_count: dim,
                        common_size: 0,
                        task_size: 0,
                    });
                }
                outcome.timings.push(RunTiming {
                    run,
                    seed,
                    evolve_secs: 0.0,
                    test_secs: started.elapsed().as_secs_f64(),
                    fitness_evaluations: 0,
                });
                None
            }
        };
        if let Some(rec) = record {
            outcome.timings.push(RunTiming {
                run,
                seed,
                evolve_secs: rec.evolve_secs,
                test_secs: rec.test_secs,
                fitness_evaluations: rec.fitness_evaluations,
            });
            outcome.records.push(rec);
        }
        progress(&outcome.rows[first..]);
    }
    Ok(outcome)
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome, ExperimentError> {
    run_experiment_with(cfg, &mut |_| {})
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>, ExperimentError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    Ok(csv::Writer::from_writer(file))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> ExperimentError + '_ {
    move |e| ExperimentError::Format(format!("{}: {e}", path.display()))
}

pub fn write_results(rows: &[RunRow], path: &Path) -> Result<(), ExperimentError> {
    let mut w = csv_writer(path)?;
    w.write_record(RESULTS_HEADER).map_err(csv_err(path))?;
    for r in rows {
        w.write_record(r.record()).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_results(path: &Path) -> Result<Vec<RunRow>, ExperimentError> {
    let mut reader = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = reader.headers().map_err(csv_err(path))?;
    if header.iter().ne(RESULTS_HEADER) {
        return Err(ExperimentError::Format(format!(
            "{}: expected header {}",
            path.display(),
            RESULTS_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(csv_err(path))?;
        rows.push(RunRow::from_record(&rec, i as u64 + 2)?);
    }
    Ok(rows)
}

/// Serialises a solution as two lines: the task tree, then the common tree
/// or `-`.
pub fn tree_file_text(sol: &Solution) -> String {
    let common = sol.common_tree.as_ref().map_or("-".to_string(), |t| t.to_string());
    format!("{}\n{common}\n", sol.task_tree)
}

pub fn tree_file_name(task: usize, run: usize) -> String {
    format!("best_task{}_run{run}.tree", task + 1)
}

/// Writes every output file and returns their paths.
pub fn write_outputs(
    cfg: &ExperimentConfig,
    outcome: &ExperimentOutcome,
    dir: &Path,
) -> Result<Vec<PathBuf>, ExperimentError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();

    let path = dir.join("results.csv");
    write_results(&outcome.rows, &path)?;
    written.push(path);

    let path = dir.join("summary.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["method", "task", "runs", "max", "mean", "std"]).map_err(csv_err(&path))?;
    for (task, s) in outcome.summaries() {
        w.write_record([
            cfg.method.name().to_string(),
            task,
            s.n.to_string(),
            fmt6(s.max),
            fmt6(s.mean),
            fmt6(s.std),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);

    for (run, rec) in outcome.records.iter().enumerate() {
        for (k, sol) in rec.solutions.iter().enumerate() {
            let path = dir.join(tree_file_name(k, run));
            fs::write(&path, tree_file_text(sol)).map_err(io_err(&path))?;
            written.push(path);
        }
        let path = dir.join(format!("trace_run{run}.csv"));
        let mut w = csv_writer(&path)?;
        w.write_record(["generation", "task", "population_best", "best_so_far", "common_fitness", "common_size"])
            .map_err(csv_err(&path))?;
        for s in &rec.trace {
            let (cf, cs) = s
                .common
                .map_or((String::new(), String::new()), |(f, n)| (fmt6(f), n.to_string()));
            w.write_record([
                s.generation.to_string(),
                (s.task + 1).to_string(),
                fmt6(s.population_best),
                fmt6(s.best_so_far),
                cf,
                cs,
            ])
            .map_err(csv_err(&path))?;
        }
        w.flush().map_err(io_err(&path))?;
        written.push(path);
    }

    let path = dir.join("timings.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["run", "seed", "evolve_secs", "test_secs", "fitness_evaluations"])
        .map_err(csv_err(&path))?;
    for t in &outcome.timings {
        w.write_record([
            t.run.to_string(),
            t.seed.to_string(),
            format!("{:.3}", t.evolve_secs),
            format!("{:.3}", t.test_secs),
            t.fitness_evaluations.to_string(),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;
    written.push(path);
    Ok(written)
}
