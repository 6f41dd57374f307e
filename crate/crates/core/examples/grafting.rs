//! Adds loops and grafts circular arcs while keeping the end frame fixed.

use curvebound::classify::lifted_sign;
use curvebound::curve::{integrate_frames, total_curvature};
use curvebound::fixtures::{perturbed_circle, Mode};
use curvebound::geom3::Rotation;
use curvebound::homotopy::{add_loops_fn, find_antipodal_pair, graft_antipodal, graft_quadruple, make_circle};
use std::f64::consts::PI;

fn report(name: &str, c: &curvebound::curve::CurveSamples) {
    let fc = integrate_frames(c);
    println!(
        "{name:<14} n {:>4}  tot {:>9.5}  closure {:.1e}  sign {:+}",
        c.n(),
        total_curvature(c),
        fc.closure_defect(&Rotation::identity()),
        lifted_sign(&fc).unwrap()
    );
}

fn main() {
    let c = perturbed_circle(0.3, 1, 128, &[Mode::new(2, 0.3, 0.1), Mode::new(3, 0.2, 0.7)]).unwrap();
    report("curve", &c);
    report("F_1", &add_loops_fn(&c, 1, 0.2, 8).unwrap());
    report("F_2", &add_loops_fn(&c, 2, 0.2, 8).unwrap());

    let p = find_antipodal_pair(&c, 2.4).unwrap();
    println!("antipodal caustic points at t = {:.4}, {:.4}", p.t1, p.t2);
    report("graft s=4pi", &graft_antipodal(&c, p.t1, p.t2, p.rho_a, p.rho_b, 4.0 * PI).unwrap());

    let circ = make_circle(0.3, 1, 0.0, 96).unwrap();
    let far = 0.3 + (-1.0f64 / 3.0).acos();
    let q = graft_quadruple(&circ, [0.0, 16.0 / 96.0, 32.0 / 96.0, 64.0 / 96.0], [far, 0.3, far, far], 0.1).unwrap();
    println!("quadruple weights {:?}, Newton residual {:.1e}", q.weights, q.residual);
    report("quadruple", &q.curve);
}
