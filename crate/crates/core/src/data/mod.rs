//! Dataset ingestion (`manifest.csv` plus PGM files) and the synthetic
//! grating benchmark.

mod pgm;
mod synth;

pub use pgm::{parse_pgm, write_pgm};
pub use synth::{generate_synth_pair, raw_pixel_baseline, raw_pixel_table, SynthKind, SynthSpec};

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::imageops::{Image, MIN_DESCRIPTOR_SIDE};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid PGM: {0}")]
    Pgm(String),
    #[error("{path}: {msg}")]
    Image { path: PathBuf, msg: String },
    #[error("manifest line {line}: {msg}")]
    Manifest { line: usize, msg: String },
    #[error("class '{class}' has no {split} examples")]
    MissingClass { class: String, split: Split },
    #[error("invalid synthetic spec: {0}")]
    Spec(String),
    #[error("task '{task}': {msg}")]
    Task { task: String, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

/// Images with parallel dense labels.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LabeledImages {
    pub images: Vec<Image>,
    pub labels: Vec<usize>,
}

impl LabeledImages {
    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    pub fn push(&mut self, img: Image, label: usize) {
        self.images.push(img);
        self.labels.push(label);
    }

    pub fn class_counts(&self, classes: usize) -> Vec<usize> {
        let mut counts = vec![0; classes];
        self.labels.iter().for_each(|&l| counts[l] += 1);
        counts
    }
}

/// One classification task: a training split and a test split.
#[derive(Clone, Debug, PartialEq)]
pub struct TaskSpec {
    pub name: String,
    pub classes: usize,
    pub train: LabeledImages,
    pub test: LabeledImages,
}

impl TaskSpec {
    /// Checks that both splits are non-empty, images are large enough for
    /// the descriptors and every class has at least `k` training examples.
    pub fn validate(&self, k: usize) -> Result<(), DataError> {
        let fail = |msg: String| DataError::Task {
            task: self.name.clone(),
            msg,
        };
        if self.train.is_empty() || self.test.is_empty() {
            return Err(fail("train and test splits must be non-empty".into()));
        }
        for split in [&self.train, &self.test] {
            if split.labels.iter().any(|&l| l >= self.classes) {
                return Err(fail(format!("label outside 0..{}", self.classes)));
            }
            if let Some(img) = split
                .images
                .iter()
                .find(|i| i.height() < MIN_DESCRIPTOR_SIDE || i.width() < MIN_DESCRIPTOR_SIDE)
            {
                return Err(fail(format!(
                    "{}x{} image is below the {MIN_DESCRIPTOR_SIDE}x{MIN_DESCRIPTOR_SIDE} minimum",
                    img.height(),
                    img.width()
                )));
            }
        }
        for (class, &n) in self.train.class_counts(self.classes).iter().enumerate() {
            if n < k {
                return Err(fail(format!(
                    "class {class} has {n} training images, fewer than {k} folds"
                )));
            }
        }
        Ok(())
    }
}

/// A loaded dataset: items in manifest order with their split tags.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub class_names: Vec<String>,
    pub images: Vec<Image>,
    pub labels: Vec<usize>,
    pub splits: Vec<Split>,
}

impl Dataset {
    pub fn classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn split(&self, which: Split) -> LabeledImages {
        let mut out = LabeledImages::default();
        for ((img, &l), &s) in self.images.iter().zip(&self.labels).zip(&self.splits) {
            if s == which {
                out.push(img.clone(), l);
            }
        }
        out
    }

    pub fn into_task(self) -> TaskSpec {
        TaskSpec {
            train: self.split(Split::Train),
            test: self.split(Split::Test),
            classes: self.classes(),
            name: self.name,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DataError + '_ {
    move |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Reads `root/manifest.csv` (header `path,label,split`) and the PGM files
/// it lists. Labels are numbered by first appearance.
pub fn load_dataset(root: &Path) -> Result<Dataset, DataError> {
    let manifest = root.join("manifest.csv");
    let text = fs::read(&manifest).map_err(io_err(&manifest))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_slice());
    let header = reader.headers().map_err(|e| DataError::Manifest {
        line: 1,
        msg: e.to_string(),
    })?;
    if header != vec!["path", "label", "split"] {
        return Err(DataError::Manifest {
            line: 1,
            msg: format!("header must be 'path,label,split', found '{}'", header.iter().collect::<Vec<_>>().join(",")),
        });
    }

    let mut class_names: Vec<String> = Vec::new();
    let (mut images, mut labels, mut splits) = (Vec::new(), Vec::new(), Vec::new());
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| DataError::Manifest {
            line,
            msg: e.to_string(),
        })?;
        let fail = |msg: String| DataError::Manifest { line, msg };
        let (path, label, split) = (&rec[0], &rec[1], &rec[2]);
        let split = match split {
            "train" => Split::Train,
            "test" => Split::Test,
            other => return Err(fail(format!("unknown split '{other}' (expected train or test)"))),
        };
        let file = root.join(path);
        let bytes = fs::read(&file).map_err(|e| fail(format!("{}: {e}", file.display())))?;
        let img = parse_pgm(&bytes).map_err(|e| fail(format!("{}: {e}", file.display())))?;
        if img.height() < MIN_DESCRIPTOR_SIDE || img.width() < MIN_DESCRIPTOR_SIDE {
            return Err(fail(format!(
                "{}: {}x{} is below the {MIN_DESCRIPTOR_SIDE}x{MIN_DESCRIPTOR_SIDE} minimum",
                file.display(),
                img.height(),
                img.width()
            )));
        }
        let id = match class_names.iter().position(|c| c == label) {
            Some(id) => id,
            None => {
                class_names.push(label.to_string());
                class_names.len() - 1
            }
        };
        images.push(img);
        labels.push(id);
        splits.push(split);
    }
    for (id, class) in class_names.iter().enumerate() {
        for split in [Split::Train, Split::Test] {
            if !labels.iter().zip(&splits).any(|(&l, &s)| l == id && s == split) {
                return Err(DataError::MissingClass {
                    class: class.clone(),
                    split,
                });
            }
        }
    }
    let name = root
        .file_name()
        .map_or_else(|| "dataset".to_string(), |n| n.to_string_lossy().into_owned());
    Ok(Dataset {
        name,
        class_names,
        images,
        labels,
        splits,
    })
}

/// Writes a task as `manifest.csv` plus one PGM per image under `root`.
/// Labels are written as `class<k>`.
pub fn save_task(task: &TaskSpec, root: &Path) -> Result<(), DataError> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let mut manifest = String::from("path,label,split\n");
    for (split, items) in [(Split::Train, &task.train), (Split::Test, &task.test)] {
        for (i, (img, &l)) in items.images.iter().zip(&items.labels).enumerate() {
            let rel = format!("{split}/{i:05}.pgm");
            let path = root.join(&rel);
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            fs::write(&path, write_pgm(img)).map_err(io_err(&path))?;
            manifest.push_str(&format!("{rel},class{l},{split}\n"));
        }
    }
    let path = root.join("manifest.csv");
    fs::write(&path, manifest).map_err(io_err(&path))
}
