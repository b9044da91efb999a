//! Tangent-space Gram tensor of a small set of warped sine curves.

use curvelrr::curve::{to_srvf, SRVF_EPS};
use curvelrr::datagen::{gen_sine_clusters, WarpSpec};
use curvelrr::manifold::build_gram_tensor;

fn main() -> curvelrr::Result<()> {
    let ds = gen_sine_clusters(2, 4, 80, &WarpSpec::sine_default(3))?;
    let q = ds
        .curves
        .iter()
        .map(|c| to_srvf(c, SRVF_EPS))
        .collect::<curvelrr::Result<Vec<_>>>()?;
    let gram = build_gram_tensor(&q)?;

    println!("{} blocks of size {0}x{0}", gram.size());
    println!("max Frobenius norm {:.4}", gram.max_frobenius());
    println!("max spectral norm  {:.4}", gram.max_spectral());
    println!("min eigenvalue     {:.2e}", gram.min_eigenvalue());
    println!("max asymmetry      {:.2e}", gram.max_asymmetry());
    // Diagonal of B^0: squared lengths of the logs from curve 0.
    let b0 = gram.block(0);
    let lengths: Vec<String> = (0..gram.size()).map(|j| format!("{:.3}", b0[(j, j)].sqrt())).collect();
    println!("distances from curve 0 (label {}): {}", ds.truth.get(0), lengths.join(" "));
    Ok(())
}
