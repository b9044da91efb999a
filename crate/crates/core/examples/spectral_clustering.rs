//! Normalized spectral clustering of a planted affinity and label matching.

use curvelrr::clustering::{sca, spectral_cluster_detailed, Affinity, Labels};
use nalgebra::DMatrix;

fn main() -> curvelrr::Result<()> {
    let sizes = [10, 10, 10];
    let truth: Vec<usize> = sizes.iter().enumerate().flat_map(|(k, &s)| vec![k; s]).collect();
    let n = truth.len();
    let a = DMatrix::from_fn(n, n, |i, j| if truth[i] == truth[j] { 1.0 } else { 0.01 });
    let fit = spectral_cluster_detailed(&Affinity::new(a)?, 3, 7)?;

    let spectrum: Vec<String> = fit.laplacian_spectrum.iter().take(5).map(|v| format!("{v:.4}")).collect();
    println!("smallest Laplacian eigenvalues: {}", spectrum.join(" "));
    println!("predicted: {:?}", fit.labels.assignments());
    println!("SCA = {:.3}", sca(&fit.labels, &Labels::new(truth)?)?);

    let truth = Labels::new(vec![0, 0, 0, 1, 1, 1])?;
    let pred = Labels::new(vec![1, 1, 0, 0, 0, 0])?;
    println!("one point misplaced out of six: SCA = {:.4}", sca(&pred, &truth)?);
    Ok(())
}
