//! One-vs-rest linear SVM (L2-regularised hinge loss) trained by dual
//! coordinate descent. The bias is learned as the weight of an extra
//! constant feature equal to 1, so it is regularised like the others.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::FeatureTable;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SvmParams {
    pub c: f64,
    pub max_epochs: usize,
    /// Stop once the duality gap falls below `tol * max(1, primal)`.
    pub tol: f64,
}

impl Default for SvmParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            max_epochs: 1000,
            tol: 1e-4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    /// One weight row per class.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
    pub c_reg: f64,
}

impl LinearModel {
    pub fn classes(&self) -> usize {
        self.bias.len()
    }

    pub fn decision_values(&self, x: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(w, b)| dot(w, x) + b)
            .collect()
    }

    /// Class with the largest decision value; ties go to the lowest class.
    pub fn predict(&self, x: &[f64]) -> usize {
        let mut best = 0;
        let mut best_v = f64::NEG_INFINITY;
        for (k, w) in self.weights.iter().enumerate() {
            let v = dot(w, x) + self.bias[k];
            if v > best_v {
                best = k;
                best_v = v;
            }
        }
        best
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Augmented Gram matrix `K[i][j] = x_i . x_j + 1`, row-major `n x n`.
pub(crate) fn gram(table: &FeatureTable) -> Vec<f64> {
    let n = table.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = dot(table.row(i), table.row(j)) + 1.0;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

/// Dual coordinate descent for one binary problem with labels in {-1, +1}.
///
/// Works on the Gram matrix: `f[i] = sum_j alpha_j y_j K_ij` is the decision
/// value of example `i`, updated in O(n) per coordinate step. Returns the
/// dual variables.
fn solve_binary(k: &[f64], y: &[f64], order: &[usize], p: &SvmParams) -> Vec<f64> {
    let n = y.len();
    let mut alpha = vec![0.0; n];
    let mut f = vec![0.0; n];
    for _ in 0..p.max_epochs {
        for &i in order {
            let qd = k[i * n + i];
            if qd <= 0.0 {
                continue;
            }
            let g = y[i] * f[i] - 1.0;
            let pg = if alpha[i] == 0.0 {
                g.min(0.0)
            } else if alpha[i] == p.c {
                g.max(0.0)
            } else {
                g
            };
            if pg.abs() > 1e-12 {
                let old = alpha[i];
                alpha[i] = (old - g / qd).clamp(0.0, p.c);
                let step = (alpha[i] - old) * y[i];
                let row = &k[i * n..(i + 1) * n];
                f.iter_mut().zip(row).for_each(|(fj, kij)| *fj += step * kij);
            }
        }

        let norm2: f64 = (0..n).map(|i| alpha[i] * y[i] * f[i]).sum();
        let hinge: f64 = (0..n).map(|i| (1.0 - y[i] * f[i]).max(0.0)).sum();
        let primal = 0.5 * norm2 + p.c * hinge;
        let dual = alpha.iter().sum::<f64>() - 0.5 * norm2;
        if primal - dual <= p.tol * primal.max(1.0) {
            break;
        }
    }
    alpha
}

/// Trains one classifier per class (a single one, mirrored, for two
/// classes). A table with only one class present yields a constant
/// predictor for that class.
pub fn train_linear(table: &FeatureTable, seed: u64) -> LinearModel {
    train_linear_with(table, seed, &SvmParams::default())
}

pub fn train_linear_with(table: &FeatureTable, seed: u64, params: &SvmParams) -> LinearModel {
    train_on_gram(table, &gram(table), seed, params)
}

/// As [`train_linear_with`] with the table's augmented Gram matrix supplied.
pub(crate) fn train_on_gram(
    table: &FeatureTable,
    k: &[f64],
    seed: u64,
    params: &SvmParams,
) -> LinearModel {
    let c = table.classes();
    let d = table.dim();
    let mut present = vec![false; c];
    table.labels().iter().for_each(|&l| present[l] = true);
    let n_present = present.iter().filter(|&&p| p).count();

    if n_present <= 1 {
        let only = present.iter().position(|&p| p).unwrap_or(0);
        let mut bias = vec![0.0; c];
        bias[only] = 1.0;
        return LinearModel {
            weights: vec![vec![0.0; d]; c],
            bias,
            c_reg: params.c,
        };
    }

    let mut order: Vec<usize> = (0..table.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let one_vs_rest = |class: usize| {
        let y: Vec<f64> = table
            .labels()
            .iter()
            .map(|&l| if l == class { 1.0 } else { -1.0 })
            .collect();
        let alpha = solve_binary(k, &y, &order, params);
        let mut w = vec![0.0; d];
        let mut b = 0.0;
        for (i, (&a, &yi)) in alpha.iter().zip(&y).enumerate() {
            if a != 0.0 {
                let s = a * yi;
                w.iter_mut().zip(table.row(i)).for_each(|(wj, xj)| *wj += s * xj);
                b += s;
            }
        }
        (w, b)
    };

    let (weights, bias) = if c == 2 {
        let (w, b) = one_vs_rest(0);
        let neg: Vec<f64> = w.iter().map(|v| -v).collect();
        (vec![w, neg], vec![b, -b])
    } else {
        (0..c).map(one_vs_rest).unzip()
    };
    LinearModel {
        weights,
        bias,
        c_reg: params.c,
    }
}

/// Percentage of rows whose predicted class matches the label.
pub fn accuracy(model: &LinearModel, table: &FeatureTable) -> f64 {
    if table.is_empty() {
        return 0.0;
    }
    let correct = (0..table.len())
        .filter(|&i| model.predict(table.row(i)) == table.labels()[i])
        .count();
    100.0 * correct as f64 / table.len() as f64
}
