//! Stratified k-fold accuracy of the linear SVM on raw pixels and on
//! fixed descriptors of the synthetic orientation task.

use mtgp::data::{raw_pixel_table, SynthSpec};
use mtgp::gp::{build_primitive_set, parse_tree};
use mtgp::learners::{accuracy, cv_accuracy, fit_normalizer, train_linear};
use mtgp::multitask::extract_table;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let task = SynthSpec::orientation().generate()?;
    let pset = build_primitive_set();
    let hog = parse_tree("Root2(HOG(Image), LBP(Image))", &pset)?;

    let raw = raw_pixel_table(&task.train, task.classes)?;
    let desc = extract_table(&[&hog], &task.train, task.classes)?;
    for (name, table) in [("raw pixels", &raw), ("HOG + LBP", &desc)] {
        let norm = fit_normalizer(table)?;
        println!("{name:<10} dim {:>4}  3-fold cv {:.2}", table.dim(), cv_accuracy(&norm.apply(table), 3, 7)?);
    }

    let norm = fit_normalizer(&desc)?;
    let model = train_linear(&norm.apply(&desc), 7);
    let test = norm.apply(&extract_table(&[&hog], &task.test, task.classes)?);
    println!("HOG + LBP held-out test accuracy {:.2}", accuracy(&model, &test));
    Ok(())
}
