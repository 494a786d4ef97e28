//! Evolves on 32x32 gratings and reuses the trees on a 48x48 version of
//! the same task, once per transfer mode.

use mtgp::data::{generate_synth_pair, SynthSpec};
use mtgp::multitask::{ksmtgp_run, transfer_evaluate, EvoConfig, TransferMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = EvoConfig {
        pop_size: 20,
        generations: 3,
        seed: 5,
        ..EvoConfig::default()
    };
    let (a, b) = generate_synth_pair(&SynthSpec::orientation(), &SynthSpec::frequency())?;
    let (sol_a, _, _) = ksmtgp_run(&a, &b, &cfg)?;

    let target = SynthSpec::orientation().with_size(48, 48).with_seed(99).generate()?;
    for mode in TransferMode::ALL {
        let acc = transfer_evaluate(&sol_a, &target, mode, cfg.seed)?;
        println!("{:<12} {acc:.2}", mode.name());
    }
    Ok(())
}
