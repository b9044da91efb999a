//! Square-root velocity functions and the geometry of the unit sphere they
//! live on.

use std::f64::consts::PI;

use curvelrr::curve::{l2_inner, to_srvf, Curve, SRVF_EPS};
use curvelrr::manifold::{geodesic, log_sphere, sphere_angle};

fn main() -> curvelrr::Result<()> {
    let spiral = Curve::from_fn(200, 2, |t| {
        let r = 1.0 + t;
        vec![r * (2.0 * PI * t).cos(), r * (2.0 * PI * t).sin()]
    })?;
    let moved = Curve::new(spiral.samples() * 3.0 + nalgebra::DMatrix::from_element(200, 2, 5.0))?;

    let q0 = to_srvf(&spiral, SRVF_EPS)?;
    let q_moved = to_srvf(&moved, SRVF_EPS)?;
    println!("arc length of the spiral: {:.4}", spiral.arc_length());
    println!("||q|| = {:.12}", q0.norm());
    println!(
        "after scaling by 3 and translating: max SRVF difference {:.2e}",
        (q0.values() - q_moved.values()).amax()
    );

    let ellipse = Curve::from_fn(200, 2, |t| vec![2.0 * (2.0 * PI * t).cos(), (2.0 * PI * t).sin()])?;
    let q1 = to_srvf(&ellipse, SRVF_EPS)?;
    let theta = sphere_angle(&q0, &q1)?;
    let v = log_sphere(&q0, &q1)?;
    println!("angle between spiral and ellipse: {theta:.6} rad");
    println!("|log_q0(q1)| = {:.6}, <q0, v> = {:.1e}", v.norm(), v.tangency_defect());
    println!("<q0, q1> = {:.6}", l2_inner(&q0, &q1)?);

    for tau in [0.0, 0.25, 0.5, 1.0] {
        let p = geodesic(&q0, &q1, tau)?;
        println!("geodesic at tau = {tau}: angle to q0 {:.6}", sphere_angle(&q0, &p)?);
    }
    Ok(())
}
