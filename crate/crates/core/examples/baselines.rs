//! The comparison methods on one warped sine dataset.

use curvelrr::baselines::{dtw_affinity, euclidean_lrr, flatten_all, kmeans, DtwConfig, LrrConfig, SigmaRule};
use curvelrr::clustering::{sca, spectral_cluster, symmetrize};
use curvelrr::datagen::{gen_sine_clusters, WarpSpec};

fn main() -> curvelrr::Result<()> {
    let ds = gen_sine_clusters(3, 20, 100, &WarpSpec::sine_default(5))?;
    let x = flatten_all(&ds.curves)?;

    let km = kmeans(&x, 3, 0)?;
    println!("k-means        SCA {:.1}%", 100.0 * sca(&km, &ds.truth)?);

    let dtw = dtw_affinity(&ds.curves, &DtwConfig::default(), SigmaRule::Median)?;
    let dl = spectral_cluster(&dtw, 3, 0)?;
    println!("DTW + spectral SCA {:.1}%", 100.0 * sca(&dl, &ds.truth)?);

    let report = euclidean_lrr(&x.transpose(), &LrrConfig::default())?;
    let ll = spectral_cluster(&symmetrize(&report.z)?, 3, 0)?;
    println!(
        "Euclidean LRR  SCA {:.1}% ({} iterations, converged {})",
        100.0 * sca(&ll, &ds.truth)?,
        report.iters,
        report.converged
    );
    Ok(())
}
