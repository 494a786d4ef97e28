//! Wilcoxon rank-sum comparison of two accuracy samples.

use mtgp::experiment::{summarize, wilcoxon_ranksum, ALPHA};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = [91.2, 93.5, 90.8, 94.1, 92.7, 93.0];
    let b = [88.4, 89.9, 90.1, 87.6, 89.2, 90.8];
    for (name, s) in [("a", summarize(&a)), ("b", summarize(&b))] {
        println!("{name}: max {:.2} mean {:.2} +- {:.2} (n = {})", s.max, s.mean, s.std, s.n);
    }
    let test = wilcoxon_ranksum(&a, &b)?;
    println!(
        "statistic {:.1}  p {:.4} ({})  verdict {}",
        test.statistic,
        test.p_value,
        if test.exact { "exact" } else { "normal approximation" },
        test.verdict(ALPHA).symbol()
    );
    Ok(())
}
