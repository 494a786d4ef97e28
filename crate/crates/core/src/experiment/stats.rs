//! Two-sample Wilcoxon rank-sum test and run summaries.

use statrs::distribution::{ContinuousCDF, Normal};

use super::runner::{summaries_by_task, RunRow};
use super::ExperimentError;

/// Combined sample size up to which the p-value comes from the exact
/// permutation distribution of the rank sum.
pub const EXACT_LIMIT: usize = 20;

/// Significance level for verdicts.
pub const ALPHA: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The first sample is significantly larger.
    Better,
    /// The first sample is significantly smaller.
    Worse,
    Same,
}

impl Verdict {
    pub fn symbol(self) -> char {
        match self {
            Verdict::Better => '+',
            Verdict::Worse => '-',
            Verdict::Same => '=',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankSum {
    /// Rank sum of the first sample minus its null expectation; negates
    /// when the samples are swapped.
    pub statistic: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub exact: bool,
}

impl RankSum {
    pub fn verdict(&self, alpha: f64) -> Verdict {
        if self.p_value >= alpha || self.statistic == 0.0 {
            Verdict::Same
        } else if self.statistic > 0.0 {
            Verdict::Better
        } else {
            Verdict::Worse
        }
    }
}

/// Midranks (1-based) of the pooled values and the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        ties.push(j - i);
        i = j;
    }
    (ranks, ties)
}

/// Wilcoxon rank-sum test of `a` against `b`.
///
/// Small samples (`a.len() + b.len() <= EXACT_LIMIT`) use the exact null
/// distribution of the midrank sum, which stays valid with ties. Larger
/// samples use the normal approximation with tie-corrected variance and a
/// continuity correction.
pub fn wilcoxon_ranksum(a: &[f64], b: &[f64]) -> Result<RankSum, ExperimentError> {
    let (n, m) = (a.len(), b.len());
    if n < 2 || m < 2 {
        return Err(ExperimentError::Stats(format!(
            "each sample needs at least 2 values, got {n} and {m}"
        )));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(ExperimentError::Stats("samples contain NaN".into()));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let total = n + m;
    let (ranks, ties) = midranks(&pooled);
    let w: f64 = ranks[..n].iter().sum();
    let mean = n as f64 * (total + 1) as f64 / 2.0;
    let statistic = w - mean;

    if total <= EXACT_LIMIT {
        // Doubled midranks are integers, so the rank-sum distribution can be
        // counted exactly by subset-sum dynamic programming.
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let max_sum: usize = doubled.iter().sum();
        let mut counts = vec![vec![0f64; max_sum + 1]; n + 1];
        counts[0][0] = 1.0;
        for &r in &doubled {
            for k in (1..=n).rev() {
                let (lo, hi) = counts.split_at_mut(k);
                for s in (r..=max_sum).rev() {
                    hi[0][s] += lo[k - 1][s - r];
                }
            }
        }
        let observed = (2.0 * statistic).abs().round() as i64;
        let mean2 = n as i64 * (total as i64 + 1);
        let (mut extreme, mut all) = (0.0, 0.0);
        for (s, &c) in counts[n].iter().enumerate() {
            all += c;
            if (s as i64 - mean2).abs() >= observed {
                extreme += c;
            }
        }
        return Ok(RankSum {
            statistic,
            p_value: (extreme / all).min(1.0),
            exact: true,
        });
    }

    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>()
        / (total as f64 * (total as f64 - 1.0));
    let var = n as f64 * m as f64 / 12.0 * ((total + 1) as f64 - tie_term);
    let p_value = if var <= 0.0 {
        1.0
    } else {
        let z = ((statistic.abs() - 0.5).max(0.0)) / var.sqrt();
        let normal = Normal::new(0.0, 1.0).expect("standard normal");
        (2.0 * (1.0 - normal.cdf(z))).min(1.0)
    };
    Ok(RankSum {
        statistic,
        p_value,
        exact: false,
    })
}

/// Max, mean and sample standard deviation of per-run values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Summary {
    pub n: usize,
    pub max: f64,
    pub mean: f64,
    pub std: f64,
}

pub fn summarize(values: &[f64]) -> Summary {
    let n = values.len();
    if n == 0 {
        return Summary {
            n,
            max: f64::NAN,
            mean: f64::NAN,
            std: f64::NAN,
        };
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let std = if n > 1 {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    Summary {
        n,
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        mean,
        std,
    }
}

/// Per-task comparison of two result sets on test accuracy.
#[derive(Clone, Debug, PartialEq)]
pub struct Comparison {
    pub task: String,
    pub a: Summary,
    pub b: Summary,
    pub test: RankSum,
    pub verdict: Verdict,
}

/// Compares every task present in both row sets, in `a`'s task order.
pub fn compare_results(a: &[RunRow], b: &[RunRow]) -> Result<Vec<Comparison>, ExperimentError> {
    let acc = |rows: &[RunRow], task: &str| -> Vec<f64> {
        rows.iter().filter(|r| r.task == task).map(|r| r.test_accuracy).collect()
    };
    let mut out = Vec::new();
    for (task, sa) in summaries_by_task(a) {
        let vb = acc(b, &task);
        if vb.is_empty() {
            continue;
        }
        let test = wilcoxon_ranksum(&acc(a, &task), &vb)?;
        out.push(Comparison {
            verdict: test.verdict(ALPHA),
            a: sa,
            b: summarize(&vb),
            test,
            task,
        });
    }
    if out.is_empty() {
        return Err(ExperimentError::Stats("the result files share no task".into()));
    }
    Ok(out)
}
