//! Samples the two-parameter sphere family in L[-k, k] and checks membership.

use curvebound::convexity::fibonacci_direction;
use curvebound::curve::{check_membership, SpaceSpec};
use curvebound::geom3::UnitVec3;
use curvebound::homotopy::{exotic_f, exotic_sphere_family};

fn main() {
    let k1 = 1.2;
    let s = SpaceSpec::symmetric(k1).unwrap();
    let (mut members, mut worst) = (0, f64::INFINITY);
    for i in 0..40 {
        let p = UnitVec3::normalize(fibonacci_direction(i, 40)).unwrap();
        for c in [exotic_sphere_family(k1, &p, 256).unwrap(), exotic_f(k1, &p, 256).unwrap()] {
            let r = check_membership(&c, &s, 1e-6);
            members += r.member as usize;
            worst = worst.min(r.curvature_margin);
        }
    }
    println!("{members}/80 members of L[-{k1}, {k1}], smallest curvature margin {worst:.4}");
}
