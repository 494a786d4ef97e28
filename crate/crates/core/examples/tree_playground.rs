//! Parses a tree, evaluates it on an image, breeds a few offspring and
//! prints the DOT rendering of the first one.
//!
//! cargo run --example tree_playground -- "Root2(SIFT(Image), HOG(Gau(Image, 2)))"

use mtgp::experiment::export_dot;
use mtgp::gp::{build_primitive_set, eval_tree, parse_tree, subtree_crossover, subtree_mutation};
use mtgp::imageops::Image;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "Root2(SIFT(Image), HOG(Gabor(Sobel(Image), 1, 2)))".into());
    let pset = build_primitive_set();
    let tree = parse_tree(&text, &pset)?;
    let img = Image::from_fn(32, 32, |r, c| ((r * 7 + c * 3) % 11) as f64 / 10.0);
    let features = eval_tree(&tree, &img)?;
    println!("{tree}\n  size {} depth {} features {}", tree.size(), tree.depth(), features.dim());

    let other = parse_tree("Root3(LBP(Image), HOG(Med(Image)), SIFT(LoG1(Image)))", &pset)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (a, b) = subtree_crossover(&tree, &other, &mut rng);
    let m = subtree_mutation(&pset, &tree, &mut rng);
    for (label, t) in [("crossover a", &a), ("crossover b", &b), ("mutation", &m)] {
        println!("{label}: {t}");
    }
    print!("{}", export_dot(&a, "offspring"));
    Ok(())
}
