//! A small repeated benchmark on progressively warped sine clusters.
//! Pass the number of repeats as the first argument (default 3).

use curvelrr::bench::{format_table, run_benchmark, GenerateParams, Method, PipelineConfig};

fn main() -> curvelrr::Result<()> {
    let repeats = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let params = GenerateParams::sine(3, 20, 100, 0);
    let results = run_benchmark(&params, &Method::ALL, repeats, &PipelineConfig::default())?;
    print!("{}", format_table(&results));
    Ok(())
}
