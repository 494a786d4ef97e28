//! Acceptance runner: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs as a plain binary so the lines always print.

mod common;

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::{derived_examples, exact_ranksum_p, oracle_deviations, random_image, trivial_invariants, HashScorer};
use mtgp::data::{raw_pixel_baseline, SynthSpec, TaskSpec};
use mtgp::experiment::{compare_results, summarize, wilcoxon_ranksum, RunRow, ALPHA};
use mtgp::gp::{
    build_primitive_set, eval_tree, generate_tree, parse_tree, subtree_crossover, subtree_mutation, GenMethod,
    MAX_DEPTH,
};
use mtgp::imageops::{hog_vec, lbp_hist, sift_vec, Image};
use mtgp::learners::{cv_accuracy, FeatureTable};
use mtgp::multitask::{
    extract_table, fgp_run, ksmtgp_run, transfer_evaluate, CvScorer, EvoConfig, Evaluator, Solution, TransferMode,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-9;
const ORACLE_IMAGES: usize = 100;
const ORACLE_BUDGET_SECS: f64 = 60.0;
const VARIATIONS: usize = 10_000;
const STUB_TRIPLES: usize = 1_000;
const CHANCE_BAND: (f64, f64) = (30.0, 70.0);
const CHANCE_SEEDS: u64 = 30;
const CHANCE_REQUIRED: usize = 28;
const SCALED_POP: usize = 50;
const SCALED_GENERATIONS: usize = 20;
const SCALED_RUNS: u64 = 10;
const BASELINE_MARGIN: f64 = 5.0;
const NON_INFERIORITY: f64 = 2.0;
const TRANSFER_SIDE: usize = 48;
const WILCOXON_TOL: f64 = 0.01;

type Outcome = (bool, String);

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut worst_name) = (0.0f64, "");
    for _ in 0..ORACLE_IMAGES {
        let (h, w) = (rng.gen_range(10..22), rng.gen_range(10..22));
        let img = random_image(&mut rng, h, w);
        for (name, dev) in oracle_deviations(&img, &mut rng).into_iter().chain(derived_examples()) {
            if dev > worst || dev.is_nan() {
                worst = if dev.is_nan() { f64::INFINITY } else { dev };
                worst_name = name;
            }
        }
    }
    let invariants = trivial_invariants();
    let broken: Vec<&str> = invariants.iter().filter(|(_, ok)| !ok).map(|(n, _)| *n).collect();
    let secs = started.elapsed().as_secs_f64();
    let pass = worst <= ORACLE_TOL && broken.is_empty() && secs < ORACLE_BUDGET_SECS;
    (
        pass,
        format!(
            "max oracle deviation {worst:.1e} ({worst_name}) over {ORACLE_IMAGES} images, tol {ORACLE_TOL:e}; \
             {}/{} exact invariants hold{}; {secs:.1}s (budget {ORACLE_BUDGET_SECS}s)",
            invariants.len() - broken.len(),
            invariants.len(),
            if broken.is_empty() { String::new() } else { format!(", broken: {broken:?}") }
        ),
    )
}

fn criterion_2() -> Outcome {
    let img = Image::from_fn(32, 32, |r, c| ((r * 13 + c * 7) % 17) as f64 / 17.0);
    let pset = build_primitive_set();
    let dim = |text: &str| eval_tree(&parse_tree(text, &pset).unwrap(), &img).unwrap().dim();
    let got = [
        sift_vec(&img).unwrap().dim(),
        hog_vec(&img).unwrap().dim(),
        lbp_hist(&img).unwrap().dim(),
        dim("Root2(SIFT(Image), HOG(Image))"),
        dim("Root3(LBP(Image), HOG(Gabor(Sqrt(W-Sub(Gau(Image, 1), 0.79, SobelY(Image), 0.994)), 2, 3)), SIFT(LoG1(LBP-F(Med(Min(Image))))))"),
    ];
    let want = [128, 64, 59, 192, 251];
    (got == want, format!("SIFT/HOG/LBP/common/task2 dims {got:?}, expected {want:?}"))
}

fn criterion_3() -> Outcome {
    let pset = build_primitive_set();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut ops, mut violations) = (0usize, 0usize);
    let check = |t: &mtgp::gp::TypedTree, violations: &mut usize| {
        if t.type_check(&pset).is_err() || t.depth() > MAX_DEPTH {
            *violations += 1;
        }
    };
    let mut i = 0usize;
    while ops < VARIATIONS {
        let method = if i.is_multiple_of(2) { GenMethod::Grow } else { GenMethod::Full };
        let a = generate_tree(&pset, &mut rng, method, 2, 2 + i % 7);
        let b = generate_tree(&pset, &mut rng, GenMethod::Grow, 2, 2 + (i / 7) % 7);
        i += 1;
        let (c1, c2) = subtree_crossover(&a, &b, &mut rng);
        check(&c1, &mut violations);
        check(&c2, &mut violations);
        let m = subtree_mutation(&pset, &c1, &mut rng);
        check(&m, &mut violations);
        ops += 2;
    }
    (violations == 0, format!("{ops} crossover/mutation operations, {violations} type or depth violations"))
}

fn tiny_task(spec: SynthSpec) -> TaskSpec {
    let mut spec = spec;
    spec.train_per_class = 3;
    spec.test_per_class = 1;
    spec.generate().unwrap()
}

fn criterion_4() -> Outcome {
    let a = tiny_task(SynthSpec::orientation());
    let b = tiny_task(SynthSpec::frequency());
    let pset = build_primitive_set();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let trees: Vec<_> = (0..STUB_TRIPLES)
        .map(|i| generate_tree(&pset, &mut rng, if i % 2 == 0 { GenMethod::Grow } else { GenMethod::Full }, 2, 2 + i % 3))
        .collect();
    let refs: Vec<_> = trees.iter().collect();
    let mut ev = Evaluator::new(vec![&a, &b], &HashScorer, true);
    let got = ev.common_fitness_batch(&refs);
    let mut exact = 0;
    for (t, f) in trees.iter().zip(&got) {
        let acc = |task: &TaskSpec, k| {
            extract_table(&[t], &task.train, task.classes)
                .map_or(f64::NEG_INFINITY, |tab| HashScorer.score(k, &tab).unwrap())
        };
        let expected = (acc(&a, 0) + acc(&b, 1)) / 2.0 - t.size() as f64;
        if *f == expected {
            exact += 1;
        }
    }
    (
        exact == STUB_TRIPLES,
        format!("{exact}/{STUB_TRIPLES} (acc1, acc2, size) triples reproduce (acc1+acc2)/2 - size exactly"),
    )
}

fn run_cli(dir: &Path, out: &str, parallel: bool) -> Result<(), String> {
    let cfg = format!(
        "method = ksmtgp\npop_size = 16\ngenerations = 3\nruns = 2\nseed = 21\nparallel = {parallel}\nsynth.test_per_class = 20\n"
    );
    let name = format!("{out}.cfg");
    fs::write(dir.join(&name), cfg).map_err(|e| e.to_string())?;
    let status = Command::new(env!("CARGO_BIN_EXE_mtgp"))
        .args(["run", "--config", &name, "--out", out])
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    Ok(())
}

fn criterion_5() -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for (out, parallel) in [("first", true), ("second", true), ("serial", false)] {
        if let Err(e) = run_cli(d, out, parallel) {
            return (false, format!("run failed: {e}"));
        }
    }
    let mut files: Vec<String> = fs::read_dir(d.join("first"))
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .filter(|f| f != "timings.csv")
        .collect();
    files.sort();
    let same = |other: &str| {
        files
            .iter()
            .filter(|f| fs::read(d.join("first").join(f)).ok() != fs::read(d.join(other).join(f)).ok())
            .cloned()
            .collect::<Vec<_>>()
    };
    let (rerun, serial) = (same("second"), same("serial"));
    (
        rerun.is_empty() && serial.is_empty(),
        format!(
            "{} output files compared (results, traces, trees); parallel rerun differs in {rerun:?}, serial run differs in {serial:?}",
            files.len()
        ),
    )
}

fn criterion_6() -> Outcome {
    // two clusters in opposite corners of the unit cube, margin well above
    // the regularisation scale
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let labels: Vec<usize> = (0..60).map(|i| i % 2).collect();
    let rows: Vec<Vec<f64>> = labels
        .iter()
        .map(|&y| (0..4).map(|_| 0.25 + 0.5 * y as f64 + rng.gen_range(-0.2..0.2)).collect())
        .collect();
    let table = FeatureTable::from_rows(&rows, labels.clone(), 2).unwrap();
    let separable = cv_accuracy(&table, 3, 6).unwrap();
    let mut inside = 0;
    for seed in 0..CHANCE_SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let x: Vec<Vec<f64>> = (0..60).map(|_| (0..4).map(|_| rng.gen::<f64>()).collect()).collect();
        let mut y: Vec<usize> = (0..60).map(|i| i % 2).collect();
        y.shuffle(&mut rng);
        let acc = cv_accuracy(&FeatureTable::from_rows(&x, y, 2).unwrap(), 3, seed).unwrap();
        if (CHANCE_BAND.0..=CHANCE_BAND.1).contains(&acc) {
            inside += 1;
        }
    }
    (
        separable == 100.0 && inside >= CHANCE_REQUIRED,
        format!(
            "separable n=60 d=4 cv accuracy {separable:.2} (want 100); shuffled labels inside [{}, {}] in {inside}/{CHANCE_SEEDS} seeds (want >= {CHANCE_REQUIRED})",
            CHANCE_BAND.0, CHANCE_BAND.1
        ),
    )
}

struct Scaled {
    ksmtgp: Vec<(Solution, Solution, Vec<f64>)>,
    fgp: [Vec<f64>; 2],
    baseline: [Vec<f64>; 2],
    secs: f64,
}

fn scaled_experiment(a: &TaskSpec, b: &TaskSpec) -> Scaled {
    let started = Instant::now();
    let mut out = Scaled {
        ksmtgp: Vec::new(),
        fgp: [Vec::new(), Vec::new()],
        baseline: [Vec::new(), Vec::new()],
        secs: 0.0,
    };
    for seed in 0..SCALED_RUNS {
        let cfg = EvoConfig {
            pop_size: SCALED_POP,
            generations: SCALED_GENERATIONS,
            seed,
            ..EvoConfig::default()
        };
        let (s1, s2, rec) = ksmtgp_run(a, b, &cfg).unwrap();
        out.ksmtgp.push((s1, s2, rec.test_accuracy.clone()));
        for (k, task) in [a, b].into_iter().enumerate() {
            out.fgp[k].push(fgp_run(task, &cfg).unwrap().1.test_accuracy[0]);
            out.baseline[k].push(raw_pixel_baseline(task, seed).unwrap());
        }
    }
    out.secs = started.elapsed().as_secs_f64();
    out
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn criterion_7(s: &Scaled) -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    let mut rows = (Vec::new(), Vec::new());
    for k in 0..2 {
        let acc: Vec<f64> = s.ksmtgp.iter().map(|r| r.2[k]).collect();
        let (km, fm, bm) = (mean(&acc), mean(&s.fgp[k]), mean(&s.baseline[k]));
        let a_ok = km >= bm + BASELINE_MARGIN;
        let c_ok = km >= fm - NON_INFERIORITY;
        pass &= a_ok && c_ok;
        let verdict = wilcoxon_ranksum(&acc, &s.fgp[k]).map(|r| r.verdict(ALPHA).symbol()).unwrap_or('?');
        parts.push(format!(
            "task {}: KSMTGP {km:.2} vs raw pixels {bm:.2} (need +{BASELINE_MARGIN}) {}, vs FGP {fm:.2} (need >= -{NON_INFERIORITY}) {}, Wilcoxon vs FGP '{verdict}'",
            k + 1,
            if a_ok { "ok" } else { "FAIL" },
            if c_ok { "ok" } else { "FAIL" },
        ));
        for (i, &v) in acc.iter().enumerate() {
            rows.0.push(row("ksmtgp", k, i, v));
        }
        for (i, &v) in s.fgp[k].iter().enumerate() {
            rows.1.push(row("fgp", k, i, v));
        }
    }
    let common: Vec<f64> = s.ksmtgp.iter().map(|r| r.0.common_tree.as_ref().unwrap().size() as f64).collect();
    let task: Vec<f64> = s
        .ksmtgp
        .iter()
        .flat_map(|r| [r.0.task_tree.size() as f64, r.1.task_tree.size() as f64])
        .collect();
    let b_ok = mean(&common) <= mean(&task);
    pass &= b_ok;
    parts.push(format!(
        "mean common size {:.2} <= mean task size {:.2} {}",
        mean(&common),
        mean(&task),
        if b_ok { "ok" } else { "FAIL" }
    ));
    let _ = compare_results(&rows.0, &rows.1);
    parts.push(format!("pop {SCALED_POP}, {SCALED_GENERATIONS} generations, {SCALED_RUNS} runs, {:.0}s", s.secs));
    (pass, parts.join("; "))
}

fn row(method: &str, task: usize, run: usize, acc: f64) -> RunRow {
    RunRow {
        method: method.into(),
        run,
        seed: run as u64,
        task: format!("task{task}"),
        best_fitness: acc,
        test_accuracy: acc,
        feature_count: 0,
        common_size: 0,
        task_size: 0,
    }
}

fn criterion_8(s: &Scaled) -> Outcome {
    let target = SynthSpec::orientation().with_size(TRANSFER_SIDE, TRANSFER_SIDE).generate().unwrap();
    let chance = 100.0 / target.classes as f64;
    let mut per_mode = Vec::new();
    for mode in TransferMode::ALL {
        let mut acc = Vec::new();
        for (i, run) in s.ksmtgp.iter().enumerate() {
            match transfer_evaluate(&run.0, &target, mode, i as u64) {
                Ok(a) => acc.push(a),
                Err(e) => return (false, format!("{} run {i} failed: {e}", mode.name())),
            }
        }
        per_mode.push((mode, summarize(&acc)));
    }
    let common = per_mode.iter().find(|(m, _)| *m == TransferMode::CommonOnly).unwrap().1;
    let text: Vec<String> = per_mode
        .iter()
        .map(|(m, s)| format!("{} {:.2} +- {:.2}", m.name(), s.mean, s.std))
        .collect();
    (
        common.mean > chance,
        format!("32x32 trees on {TRANSFER_SIDE}x{TRANSFER_SIDE} orientation task: {} (chance {chance:.0})", text.join(", ")),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut worst, mut cases) = (0.0f64, 0);
    for n in 2..=8 {
        for m in 2..=8 {
            for trial in 0..4 {
                let (a, b): (Vec<f64>, Vec<f64>) = if trial % 2 == 0 {
                    (
                        (0..n).map(|_| f64::from(rng.gen_range(0..5))).collect(),
                        (0..m).map(|_| f64::from(rng.gen_range(1..6))).collect(),
                    )
                } else {
                    ((0..n).map(|_| rng.gen::<f64>()).collect(), (0..m).map(|_| rng.gen::<f64>() + 0.3).collect())
                };
                let got = wilcoxon_ranksum(&a, &b).unwrap().p_value;
                worst = worst.max((got - exact_ranksum_p(&a, &b)).abs());
                cases += 1;
            }
        }
    }
    let better: Vec<f64> = (0..30).map(|i| 90.0 + f64::from(i % 7)).collect();
    let worse: Vec<f64> = (0..30).map(|i| 80.0 + f64::from(i % 7)).collect();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (i, (&x, &y)) in better.iter().zip(&worse).enumerate() {
        a.push(row("ksmtgp", 0, i, x));
        b.push(row("fgp", 0, i, y));
        a.push(row("ksmtgp", 1, i, y));
        b.push(row("fgp", 1, i, x));
        a.push(row("ksmtgp", 2, i, x));
        b.push(row("fgp", 2, i, x));
    }
    let symbols: String = compare_results(&a, &b).unwrap().iter().map(|c| c.verdict.symbol()).collect();
    (
        worst <= WILCOXON_TOL && symbols == "+-=",
        format!(
            "max |p - exact| {worst:.1e} over {cases} cases with n, m in 2..=8 (tol {WILCOXON_TOL}); verdicts '{symbols}' (want '+-=')"
        ),
    )
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        (false, format!("panicked: {msg}"))
    })
}

fn main() {
    let names = [
        "operator oracles",
        "descriptor dimensions",
        "GP closure",
        "fitness arithmetic",
        "determinism",
        "learner sanity",
        "scaled synthetic experiment",
        "transfer to 48x48",
        "Wilcoxon rank-sum",
    ];
    let mut results: Vec<Outcome> = vec![
        guarded(criterion_1),
        guarded(criterion_2),
        guarded(criterion_3),
        guarded(criterion_4),
        guarded(criterion_5),
        guarded(criterion_6),
    ];
    let a = SynthSpec::orientation().generate().unwrap();
    let b = SynthSpec::frequency().generate().unwrap();
    match catch_unwind(AssertUnwindSafe(|| scaled_experiment(&a, &b))) {
        Ok(scaled) => {
            results.push(guarded(|| criterion_7(&scaled)));
            results.push(guarded(|| criterion_8(&scaled)));
        }
        Err(_) => {
            results.push((false, "scaled experiment panicked".into()));
            results.push((false, "skipped: no trained trees".into()));
        }
    }
    results.push(guarded(criterion_9));

    let mut failed = 0;
    for (i, ((pass, detail), name)) in results.iter().zip(names).enumerate() {
        println!("acceptance {} {name}: {} - {detail}", i + 1, if *pass { "PASS" } else { "FAIL" });
        failed += usize::from(!pass);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
