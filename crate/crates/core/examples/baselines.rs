//! Runs the single-tree, two-tree and shared-population baselines on the
//! synthetic pair with a small budget.

use mtgp::data::{generate_synth_pair, SynthSpec};
use mtgp::multitask::{fgp_run, mffgp_run, mtfgp_run, EvoConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EvoConfig {
        pop_size: 20,
        generations: 4,
        seed: 3,
        ..EvoConfig::default()
    };
    let (a, b) = generate_synth_pair(&SynthSpec::orientation(), &SynthSpec::frequency())?;

    let (sol, record) = fgp_run(&a, &cfg)?;
    println!("FGP   task A test {:.2}  {}", record.test_accuracy[0], sol.task_tree);

    let (sol, record) = mtfgp_run(&a, &cfg)?;
    println!("MTFGP task A test {:.2}  {} trees", record.test_accuracy[0], sol.trees().len());

    let (_, _, record) = mffgp_run(&a, &b, &cfg)?;
    println!(
        "MFFGP task A test {:.2}  task B test {:.2}",
        record.test_accuracy[0], record.test_accuracy[1]
    );
    Ok(())
}
