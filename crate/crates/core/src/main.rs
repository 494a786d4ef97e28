use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mtgp::data::save_task;
use mtgp::experiment::{
    compare_results, eval_tree_file, export_dot, fmt6, read_results, read_tree_file,
    run_experiment_with, transfer_command, transfer_summaries, write_outputs, write_transfer,
    ExperimentConfig, ExperimentError, KeyValues, TaskSource, TransferConfig,
};

#[derive(Parser)]
#[command(name = "mtgp", version, about = "Multitask genetic programming for image feature learning")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run repeated evolutionary or baseline experiments.
    Run {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Base seed; run i uses seed + i.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        runs: Option<usize>,
        #[arg(long)]
        method: Option<String>,
    },
    /// Write the synthetic task pair as PGM datasets.
    Synth {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "synth")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Apply saved trees to another task.
    Transfer {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare two results.csv files with the Wilcoxon rank-sum test.
    Stats {
        a: PathBuf,
        b: PathBuf,
        /// Directory for comparison.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a tree file as Graphviz DOT.
    ExportDot {
        tree: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test accuracy of a saved tree file on the config's first task.
    Eval {
        tree: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn load_kv(path: Option<&Path>) -> Result<(KeyValues, PathBuf), ExperimentError> {
    match path {
        Some(p) => {
            let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
            Ok((KeyValues::from_file(p)?, base))
        }
        None => Ok((KeyValues::default(), PathBuf::from("."))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), ExperimentError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| ExperimentError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, text).map_err(|source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(command: Command) -> Result<(), ExperimentError> {
    match command {
        Command::Run {
            config,
            out,
            seed,
            runs,
            method,
        } => {
            let (mut kv, base) = load_kv(config.as_deref())?;
            if let Some(s) = seed {
                kv.set("seed", s);
            }
            if let Some(r) = runs {
                kv.set("runs", r);
            }
            if let Some(m) = method {
                kv.set("method", m);
            }
            let mut cfg = ExperimentConfig::from_kv(&kv, &base)?;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            let outcome = run_experiment_with(&cfg, &mut |rows| {
                for r in rows {
                    eprintln!(
                        "run {} seed {} {}: fitness {} test {}",
                        r.run,
                        r.seed,
                        r.task,
                        fmt6(r.best_fitness),
                        fmt6(r.test_accuracy)
                    );
                }
            })?;
            write_outputs(&cfg, &outcome, &cfg.out_dir)?;
            for (task, s) in outcome.summaries() {
                println!(
                    "{} {task}: max {:.2} mean {:.2} +- {:.2} over {} runs",
                    cfg.method.name(),
                    s.max,
                    s.mean,
                    s.std,
                    s.n
                );
            }
            println!("wrote {}", cfg.out_dir.display());
        }
        Command::Synth { config, out, seed } => {
            let (mut kv, base) = load_kv(config.as_deref())?;
            if let Some(s) = seed {
                kv.set("synth.seed", s);
            }
            let cfg = ExperimentConfig::from_kv(&kv, &base)?;
            for source in &cfg.tasks {
                if !matches!(source, TaskSource::Synth(_)) {
                    return Err(ExperimentError::Config("synth only writes synth: tasks".into()));
                }
                let task = source.load()?;
                let dir = out.join(&task.name);
                save_task(&task, &dir)?;
                println!("wrote {} ({} train, {} test)", dir.display(), task.train.len(), task.test.len());
            }
        }
        Command::Transfer { config, out, seed } => {
            let (mut kv, base) = load_kv(Some(&config))?;
            if let Some(s) = seed {
                kv.set("seed", s);
            }
            let mut cfg = TransferConfig::from_kv(&kv, &base)?;
            if let Some(o) = out {
                cfg.out_dir = o;
            }
            let rows = transfer_command(&cfg)?;
            fs::create_dir_all(&cfg.out_dir).map_err(|source| ExperimentError::Io {
                path: cfg.out_dir.clone(),
                source,
            })?;
            write_transfer(&rows, &cfg.out_dir.join("transfer.csv"))?;
            for (mode, s) in transfer_summaries(&rows) {
                println!("{}: {:.2} +- {:.2} over {} runs", mode.name(), s.mean, s.std, s.n);
            }
        }
        Command::Stats { a, b, out } => {
            let comparisons = compare_results(&read_results(&a)?, &read_results(&b)?)?;
            let mut csv = String::from("task,mean_a,std_a,mean_b,std_b,statistic,p_value,verdict\n");
            for c in &comparisons {
                println!(
                    "{}: {:.2} +- {:.2} vs {:.2} +- {:.2}, p = {:.4} ({})",
                    c.task,
                    c.a.mean,
                    c.a.std,
                    c.b.mean,
                    c.b.std,
                    c.test.p_value,
                    c.verdict.symbol()
                );
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    c.task,
                    fmt6(c.a.mean),
                    fmt6(c.a.std),
                    fmt6(c.b.mean),
                    fmt6(c.b.std),
                    fmt6(c.test.statistic),
                    fmt6(c.test.p_value),
                    c.verdict.symbol()
                ));
            }
            if let Some(dir) = out {
                write_file(&dir.join("comparison.csv"), &csv)?;
            }
        }
        Command::ExportDot { tree, out } => {
            let sol = read_tree_file(&tree)?;
            let mut text = export_dot(&sol.task_tree, "task_tree");
            if let Some(common) = &sol.common_tree {
                text.push_str(&export_dot(common, "common_tree"));
            }
            match out {
                Some(path) => write_file(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Eval { tree, config, seed } => {
            let (kv, base) = load_kv(config.as_deref())?;
            let cfg = ExperimentConfig::from_kv(&kv, &base)?;
            let accuracy = eval_tree_file(&tree, &cfg.tasks[0], seed)?;
            println!("{accuracy:.2}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
