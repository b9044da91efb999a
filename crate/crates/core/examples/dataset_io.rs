//! Generating datasets and round-tripping them through the on-disk format.

use curvelrr::datagen::{gen_warped_basis_clusters, well_separated_bases, WarpSpec, DEFAULT_BASIS_SEPARATION};
use curvelrr::io::{load_dataset, save_dataset};

fn main() -> curvelrr::Result<()> {
    let bases = well_separated_bases(3, 64, 2, DEFAULT_BASIS_SEPARATION, 11)?;
    let ds = gen_warped_basis_clusters(&bases, 5, &WarpSpec::basis_default(11))?;

    let dir = std::env::temp_dir().join("curvelrr-dataset-example");
    save_dataset(&ds, &dir)?;
    let back = load_dataset(&dir)?;
    println!("saved {} curves of {} samples in R^{} to {}", ds.len(), ds.samples(), ds.dim(), dir.display());
    println!("round trip exact: {}", back == ds);
    println!("meta: {}", serde_json::to_string(&back.meta).expect("meta serializes"));
    Ok(())
}
