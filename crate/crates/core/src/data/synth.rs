//! Sinusoidal grating tasks. Task A separates orientations at a fixed
//! spatial frequency; task B separates spatial frequencies at random
//! orientations. Phase is always random, so raw pixel intensities carry
//! little linear signal while gradient and texture statistics do.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{DataError, LabeledImages, TaskSpec};
use crate::imageops::{Image, MIN_DESCRIPTOR_SIDE};
use crate::learners::{self, FeatureTable, LearnError};

const CONTRAST: f64 = 0.35;
const ORIENTATION_PERIOD: f64 = 6.0;
const LOW_PERIOD: f64 = 12.0;
const HIGH_PERIOD: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    Orientation,
    Frequency,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSpec {
    pub kind: SynthKind,
    pub height: usize,
    pub width: usize,
    pub classes: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub noise_std: f64,
    pub seed: u64,
}

impl SynthSpec {
    /// 4 orientations, 32x32, 10 train and 100 test images per class.
    pub fn orientation() -> Self {
        Self {
            kind: SynthKind::Orientation,
            height: 32,
            width: 32,
            classes: 4,
            train_per_class: 10,
            test_per_class: 100,
            noise_std: 0.1,
            seed: 0,
        }
    }

    /// Low versus high frequency, otherwise like [`SynthSpec::orientation`].
    pub fn frequency() -> Self {
        Self {
            kind: SynthKind::Frequency,
            classes: 2,
            ..Self::orientation()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_size(mut self, height: usize, width: usize) -> Self {
        self.height = height;
        self.width = width;
        self
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let fail = |m: String| Err(DataError::Spec(m));
        if self.height < MIN_DESCRIPTOR_SIDE || self.width < MIN_DESCRIPTOR_SIDE {
            return fail(format!("image size must be at least {MIN_DESCRIPTOR_SIDE}x{MIN_DESCRIPTOR_SIDE}"));
        }
        if self.classes < 2 {
            return fail("need at least 2 classes".into());
        }
        if self.train_per_class < 3 {
            return fail("need at least 3 training images per class".into());
        }
        if self.test_per_class == 0 {
            return fail("need at least 1 test image per class".into());
        }
        if !(self.noise_std.is_finite() && self.noise_std >= 0.0) {
            return fail("noise_std must be finite and non-negative".into());
        }
        Ok(())
    }

    fn name(&self) -> &'static str {
        match self.kind {
            SynthKind::Orientation => "orientation",
            SynthKind::Frequency => "frequency",
        }
    }

    /// Orientation (radians) and period (pixels) for one sample of `class`.
    fn grating_params(&self, class: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
        match self.kind {
            SynthKind::Orientation => (class as f64 * PI / self.classes as f64, ORIENTATION_PERIOD),
            SynthKind::Frequency => {
                let t = class as f64 / (self.classes - 1) as f64;
                let period = LOW_PERIOD * (HIGH_PERIOD / LOW_PERIOD).powf(t);
                (rng.gen_range(0.0..PI), period)
            }
        }
    }

    fn sample(&self, class: usize, rng: &mut ChaCha8Rng, noise: &Normal<f64>) -> Image {
        let (theta, period) = self.grating_params(class, rng);
        let phase = rng.gen_range(0.0..2.0 * PI);
        let (ct, st) = (theta.cos(), theta.sin());
        let (cy, cx) = ((self.height as f64 - 1.0) / 2.0, (self.width as f64 - 1.0) / 2.0);
        let k = 2.0 * PI / period;
        let mut pixels = Vec::with_capacity(self.height * self.width);
        for r in 0..self.height {
            for c in 0..self.width {
                let (x, y) = (c as f64 - cx, r as f64 - cy);
                let v = 0.5 + CONTRAST * (k * (x * ct + y * st) + phase).cos() + noise.sample(rng);
                pixels.push(v.clamp(0.0, 1.0));
            }
        }
        Image::new(self.height, self.width, pixels).expect("positive size")
    }

    pub fn generate(&self) -> Result<TaskSpec, DataError> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.kind as u64);
        let noise = Normal::new(0.0, self.noise_std).map_err(|e| DataError::Spec(e.to_string()))?;
        let mut split = |per_class: usize| {
            let mut out = LabeledImages::default();
            for _ in 0..per_class {
                for class in 0..self.classes {
                    out.push(self.sample(class, &mut rng, &noise), class);
                }
            }
            out
        };
        let train = split(self.train_per_class);
        let test = split(self.test_per_class);
        Ok(TaskSpec {
            name: self.name().to_string(),
            classes: self.classes,
            train,
            test,
        })
    }
}

/// Builds the two benchmark tasks.
pub fn generate_synth_pair(a: &SynthSpec, b: &SynthSpec) -> Result<(TaskSpec, TaskSpec), DataError> {
    Ok((a.generate()?, b.generate()?))
}

/// Flattened pixel intensities, one row per image.
pub fn raw_pixel_table(split: &LabeledImages, classes: usize) -> Result<FeatureTable, LearnError> {
    let rows: Vec<Vec<f64>> = split.images.iter().map(|i| i.pixels().to_vec()).collect();
    FeatureTable::from_rows(&rows, split.labels.clone(), classes)
}

/// Test accuracy of the linear classifier on raw pixels, with min-max
/// scaling fitted on the training split.
pub fn raw_pixel_baseline(task: &TaskSpec, seed: u64) -> Result<f64, LearnError> {
    let train = raw_pixel_table(&task.train, task.classes)?;
    let test = raw_pixel_table(&task.test, task.classes)?;
    if train.dim() != test.dim() {
        return Err(LearnError::RaggedRow {
            row: 0,
            expected: train.dim(),
            got: test.dim(),
        });
    }
    let norm = learners::fit_normalizer(&train)?;
    let model = learners::train_linear(&norm.apply(&train), seed);
    Ok(learners::accuracy(&model, &norm.apply(&test)))
}
