//! Integrates the frame of a small circle traversed twice and reports closure,
//! the quaternion lift at the end, and the lifted sign.

use curvebound::classify::lifted_sign;
use curvebound::curve::{integrate_frames, total_curvature};
use curvebound::fixtures::circle;
use curvebound::geom3::Rotation;

fn main() {
    for k in 1..=3 {
        let c = circle(0.4, k, 512).unwrap();
        let fc = integrate_frames(&c);
        let z = fc.last_lift().coeffs();
        println!(
            "k={k}: length {:.6}, tot {:.6}, closure defect {:.2e}, lift(1) = [{:.3}, {:.3}, {:.3}, {:.3}], sign {}",
            c.length(),
            total_curvature(&c),
            fc.closure_defect(&Rotation::identity()),
            z[0],
            z[1],
            z[2],
            z[3],
            lifted_sign(&fc).unwrap()
        );
    }
}
