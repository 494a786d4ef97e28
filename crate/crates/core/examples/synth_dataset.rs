//! Writes the synthetic orientation task as a PGM dataset and loads it
//! back.
//!
//! cargo run --example synth_dataset -- [dir]

use std::path::PathBuf;

use mtgp::data::{load_dataset, save_task, SynthSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("mtgp_synth_orientation"));
    let task = SynthSpec::orientation().generate()?;
    save_task(&task, &dir)?;
    let loaded = load_dataset(&dir)?.into_task();
    println!("wrote {} ({} classes)", dir.display(), loaded.classes);
    println!("train per class {:?}", loaded.train.class_counts(loaded.classes));
    println!("test per class  {:?}", loaded.test.class_counts(loaded.classes));
    let same = task.train.len() == loaded.train.len() && task.test.len() == loaded.test.len();
    println!("round trip sizes match: {same}");
    Ok(())
}
