//! Flat `key = value` configuration files.
//!
//! Blank lines and text after `#` are ignored. Keys are case-sensitive;
//! unknown or repeated keys are errors so typos do not pass silently.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::ExperimentError;
use crate::data::{load_dataset, SynthKind, SynthSpec, TaskSpec};
use crate::multitask::{EvoConfig, TransferMode};

/// Parsed key/value pairs with the line each came from.
#[derive(Clone, Debug, Default)]
pub struct KeyValues {
    entries: BTreeMap<String, (usize, String)>,
    source: String,
}

fn config_err(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl KeyValues {
    pub fn parse(text: &str, source: &str) -> Result<Self, ExperimentError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("{source}:{}: expected key = value", i + 1)))?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(config_err(format!("{source}:{}: empty key", i + 1)));
            }
            if let Some((first, _)) = entries.insert(key.clone(), (i + 1, value.trim().to_string())) {
                return Err(config_err(format!(
                    "{source}:{}: '{key}' already set on line {first}",
                    i + 1
                )));
            }
        }
        Ok(Self {
            entries,
            source: source.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, ExperimentError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Sets a value as if it had been written in the file, replacing any
    /// existing entry (used for command-line overrides).
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), (0, value.to_string()));
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(_, v)| v.as_str())
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T, ExperimentError> {
        match self.entries.get(key) {
            None => Ok(default),
            Some((line, v)) => v.parse().map_err(|_| {
                let at = match line {
                    0 => "command line".to_string(),
                    n => format!("{}:{n}", self.source),
                };
                config_err(format!("{at}: invalid value '{v}' for '{key}'"))
            }),
        }
    }

    /// Fails on any key outside `known`.
    pub fn check_known(&self, known: &[&str]) -> Result<(), ExperimentError> {
        for (key, (line, _)) in &self.entries {
            if !known.contains(&key.as_str()) {
                return Err(config_err(format!("{}:{line}: unknown key '{key}'", self.source)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodName {
    Ksmtgp,
    Fgp,
    Mtfgp,
    Mffgp,
    RawPixel,
    FixedDescriptor,
}

impl MethodName {
    pub const ALL: [MethodName; 6] = [
        MethodName::Ksmtgp,
        MethodName::Fgp,
        MethodName::Mtfgp,
        MethodName::Mffgp,
        MethodName::RawPixel,
        MethodName::FixedDescriptor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodName::Ksmtgp => "ksmtgp",
            MethodName::Fgp => "fgp",
            MethodName::Mtfgp => "mtfgp",
            MethodName::Mffgp => "mffgp",
            MethodName::RawPixel => "raw_pixel",
            MethodName::FixedDescriptor => "fixed_descriptor",
        }
    }

    /// Number of tasks the method needs; `None` accepts one or two.
    pub fn task_count(self) -> Option<usize> {
        match self {
            MethodName::Ksmtgp | MethodName::Mffgp => Some(2),
            MethodName::Fgp | MethodName::Mtfgp => Some(1),
            MethodName::RawPixel | MethodName::FixedDescriptor => None,
        }
    }
}

impl FromStr for MethodName {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| config_err(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Descriptor {
    Sift,
    Hog,
    Lbp,
    All,
}

impl FromStr for Descriptor {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sift" => Ok(Descriptor::Sift),
            "hog" => Ok(Descriptor::Hog),
            "lbp" => Ok(Descriptor::Lbp),
            "all" => Ok(Descriptor::All),
            _ => Err(config_err(format!("unknown descriptor '{s}' (sift, hog, lbp or all)"))),
        }
    }
}

/// Where a task's images come from.
#[derive(Clone, Debug, PartialEq)]
pub enum TaskSource {
    Synth(SynthSpec),
    Dir(PathBuf),
}

impl TaskSource {
    pub fn load(&self) -> Result<TaskSpec, ExperimentError> {
        match self {
            TaskSource::Synth(spec) => Ok(spec.generate()?),
            TaskSource::Dir(path) => Ok(load_dataset(path)?.into_task()),
        }
    }
}

const SYNTH_KEYS: [&str; 6] = [
    "synth.height",
    "synth.width",
    "synth.train_per_class",
    "synth.test_per_class",
    "synth.noise_std",
    "synth.seed",
];

fn task_source(kv: &KeyValues, value: &str, base_dir: &Path) -> Result<TaskSource, ExperimentError> {
    let Some(kind) = value.strip_prefix("synth:") else {
        let p = Path::new(value);
        return Ok(TaskSource::Dir(if p.is_absolute() { p.to_path_buf() } else { base_dir.join(p) }));
    };
    let mut spec = match kind {
        "orientation" => SynthSpec::orientation(),
        "frequency" => SynthSpec::frequency(),
        other => return Err(config_err(format!("unknown synthetic task '{other}'"))),
    };
    spec.height = kv.get("synth.height", spec.height)?;
    spec.width = kv.get("synth.width", spec.width)?;
    spec.train_per_class = kv.get("synth.train_per_class", spec.train_per_class)?;
    spec.test_per_class = kv.get("synth.test_per_class", spec.test_per_class)?;
    spec.noise_std = kv.get("synth.noise_std", spec.noise_std)?;
    spec.seed = kv.get("synth.seed", spec.seed)?;
    let classes_key = match spec.kind {
        SynthKind::Orientation => "synth.orientation_classes",
        SynthKind::Frequency => "synth.frequency_classes",
    };
    spec.classes = kv.get(classes_key, spec.classes)?;
    spec.validate()?;
    Ok(TaskSource::Synth(spec))
}

/// Everything `run` needs.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub method: MethodName,
    pub tasks: Vec<TaskSource>,
    pub evo: EvoConfig,
    pub runs: usize,
    pub base_seed: u64,
    pub out_dir: PathBuf,
    pub descriptor: Descriptor,
}

const EXPERIMENT_KEYS: [&str; 16] = [
    "method",
    "task1",
    "task2",
    "runs",
    "seed",
    "out",
    "descriptor",
    "pop_size",
    "generations",
    "p_crossover",
    "p_mutation",
    "p_elitism",
    "tournament_k",
    "k_folds",
    "rmp",
    "parallel",
];

impl ExperimentConfig {
    /// Builds the config; relative dataset paths resolve against `base_dir`.
    pub fn from_kv(kv: &KeyValues, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut known: Vec<&str> = EXPERIMENT_KEYS.to_vec();
        known.extend(SYNTH_KEYS);
        known.extend(["synth.orientation_classes", "synth.frequency_classes"]);
        kv.check_known(&known)?;

        let method: MethodName = kv.get("method", MethodName::Ksmtgp)?;
        let defaults = EvoConfig::default();
        let evo = EvoConfig {
            pop_size: kv.get("pop_size", defaults.pop_size)?,
            generations: kv.get("generations", defaults.generations)?,
            p_crossover: kv.get("p_crossover", defaults.p_crossover)?,
            p_mutation: kv.get("p_mutation", defaults.p_mutation)?,
            p_elitism: kv.get("p_elitism", defaults.p_elitism)?,
            tournament_k: kv.get("tournament_k", defaults.tournament_k)?,
            k_folds: kv.get("k_folds", defaults.k_folds)?,
            rmp: kv.get("rmp", defaults.rmp)?,
            parallel: kv.get("parallel", defaults.parallel)?,
            seed: 0,
        };
        evo.validate().map_err(|e| config_err(e.to_string()))?;

        let default_tasks: &[&str] = match method.task_count() {
            Some(1) => &["synth:orientation"],
            _ => &["synth:orientation", "synth:frequency"],
        };
        let mut tasks = Vec::new();
        for (i, key) in ["task1", "task2"].iter().enumerate() {
            let value = match kv.raw(key) {
                Some(v) => v.to_string(),
                None if kv.raw("task1").is_none() => match default_tasks.get(i) {
                    Some(v) => v.to_string(),
                    None => continue,
                },
                None => continue,
            };
            tasks.push(task_source(kv, &value, base_dir)?);
        }
        if let Some(n) = method.task_count() {
            if tasks.len() != n {
                return Err(config_err(format!(
                    "method {} needs exactly {n} task(s), got {}",
                    method.name(),
                    tasks.len()
                )));
            }
        }
        let runs: usize = kv.get("runs", 30)?;
        if runs == 0 {
            return Err(config_err("runs must be positive"));
        }
        Ok(Self {
            method,
            tasks,
            evo,
            runs,
            base_seed: kv.get("seed", 0)?,
            out_dir: PathBuf::from(kv.raw("out").unwrap_or("results")),
            descriptor: kv.get("descriptor", Descriptor::All)?,
        })
    }

    pub fn from_text(text: &str) -> Result<Self, ExperimentError> {
        Self::from_kv(&KeyValues::parse(text, "<config>")?, Path::new("."))
    }
}

/// Settings for `transfer`: saved trees from one experiment applied to
/// another task.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferConfig {
    pub source_dir: PathBuf,
    pub source_task: usize,
    pub target: TaskSource,
    pub modes: Vec<TransferMode>,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl TransferConfig {
    pub fn from_kv(kv: &KeyValues, base_dir: &Path) -> Result<Self, ExperimentError> {
        let mut known = vec!["source", "source_task", "target", "mode", "seed", "out"];
        known.extend(SYNTH_KEYS);
        known.extend(["synth.orientation_classes", "synth.frequency_classes"]);
        kv.check_known(&known)?;
        let source = kv.raw("source").ok_or_else(|| config_err("'source' is required"))?;
        let target = kv.raw("target").ok_or_else(|| config_err("'target' is required"))?;
        let modes = match kv.raw("mode").unwrap_or("all") {
            "all" => TransferMode::ALL.to_vec(),
            m => vec![TransferMode::from_name(m).ok_or_else(|| {
                config_err(format!("unknown mode '{m}' (both, common_only, task_only or all)"))
            })?],
        };
        let source_task: usize = kv.get("source_task", 1)?;
        if !(1..=2).contains(&source_task) {
            return Err(config_err("source_task must be 1 or 2"));
        }
        Ok(Self {
            source_dir: base_dir.join(source),
            source_task,
            target: task_source(kv, target, base_dir)?,
            modes,
            seed: kv.get("seed", 0)?,
            out_dir: PathBuf::from(kv.raw("out").unwrap_or("transfer")),
        })
    }
}
