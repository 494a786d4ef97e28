//! Applies each filter to a synthetic grating and prints a few statistics,
//! then shows the fixed descriptor lengths for two image sizes.

use mtgp::imageops::{
    gabor, gaussian_derivative, gaussian_filter, hog_vec, laplacian, lbp_code_map, lbp_hist,
    log_filter, max_pool, rank_mean_filter, sift_vec, sobel, Image, RankKind, SobelMode,
};

fn grating(h: usize, w: usize) -> Image {
    Image::from_fn(h, w, |r, c| 0.5 + 0.4 * ((r + 2 * c) as f64 * 0.6).sin())
}

fn stats(img: &Image) -> (f64, f64, f64) {
    let px = img.pixels();
    let min = px.iter().copied().fold(f64::INFINITY, f64::min);
    let max = px.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (min, max, px.iter().sum::<f64>() / px.len() as f64)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let img = grating(32, 32);
    let filtered = [
        ("Gau(2)", gaussian_filter(&img, 2.0)?),
        ("GauD(1, 1, 0)", gaussian_derivative(&img, 1.0, 1, 0)?),
        ("Gabor(2, 3)", gabor(&img, 2, 3)?),
        ("Lap", laplacian(&img)?),
        ("LoG(1)", log_filter(&img, 1.0)?),
        ("Sobel", sobel(&img, SobelMode::Magnitude)?),
        ("Med", rank_mean_filter(&img, RankKind::Median)),
        ("LBP-F", lbp_code_map(&img)),
        ("MaxP(2, 4)", max_pool(&img, 2, 4)?),
    ];
    for (name, out) in &filtered {
        let (min, max, mean) = stats(out);
        println!("{name:<14} {:>2}x{:<2} min {min:>8.4} max {max:>8.4} mean {mean:>8.4}", out.height(), out.width());
    }
    for (h, w) in [(32, 32), (48, 64)] {
        let img = grating(h, w);
        println!(
            "{h}x{w}: SIFT {} HOG {} LBP {}",
            sift_vec(&img)?.dim(),
            hog_vec(&img)?.dim(),
            lbp_hist(&img)?.dim()
        );
    }
    Ok(())
}
