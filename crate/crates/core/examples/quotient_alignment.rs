//! Removing rotation and reparameterization: aligning one curve to the
//! orbit of another, and the quotient-space log map.

use std::f64::consts::PI;

use curvelrr::curve::{l2_distance, to_srvf, Curve, SRVF_EPS};
use curvelrr::manifold::{align_to_with, log_quotient, log_sphere, AlignConfig, Rotation, Warp};

fn main() -> curvelrr::Result<()> {
    let len = 150;
    let base = Curve::from_fn(len, 2, |t| vec![t, 0.3 * (3.0 * PI * t).sin()])?;
    let warp = Warp::from_fn(len, |t| t + 0.15 * (PI * t).sin())?;
    let q0 = to_srvf(&base, SRVF_EPS)?;

    // Same shape, different rotation and speed along the curve.
    let q1 = Rotation::planar(0.7).act_on_srvf(&warp.act_on_srvf(&q0)?)?;
    let q1 = curvelrr::curve::normalize_srvf(&q1)?;
    println!("L2 distance before alignment: {:.4}", l2_distance(&q0, &q1)?);

    let cfg = AlignConfig { iters: 4, ..AlignConfig::default() };
    let aligned = align_to_with(&q0, &q1, &cfg)?;
    for (k, d) in aligned.pass_distances.iter().enumerate() {
        println!("  after pass {k}: {d:.4}");
    }

    println!("|log on the sphere|   = {:.4}", log_sphere(&q0, &q1)?.norm());
    println!("|log in the quotient| = {:.4}", log_quotient(&q0, &q1)?.norm());
    Ok(())
}
