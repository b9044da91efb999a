//! Shifted and stretched copies of smooth random bases, clustered by curve
//! LRR and by Euclidean LRR.

use curvelrr::bench::{generate, run_method, GenerateParams, Method, PipelineConfig};
use curvelrr::clustering::sca;
use curvelrr::datagen::elastic_distance;

fn main() -> curvelrr::Result<()> {
    let ds = generate(&GenerateParams::warped_basis(3, 20, 100, 9))?;
    let first = |k| ds.truth.assignments().iter().position(|&l| l == k).unwrap();
    let (a, b, c) = (first(0), first(1), first(2));
    println!(
        "elastic distances between clusters: {:.3} {:.3} {:.3}",
        elastic_distance(&ds.curves[a], &ds.curves[b])?,
        elastic_distance(&ds.curves[a], &ds.curves[c])?,
        elastic_distance(&ds.curves[b], &ds.curves[c])?
    );
    for method in [Method::Lrr, Method::Clrr] {
        let out = run_method(method, &ds.curves, 3, &PipelineConfig::default(), 0)?;
        println!("{method:<5} SCA {:.1}%", 100.0 * sca(&out.labels, &ds.truth)?);
    }
    Ok(())
}
