//! Component counts and classification of circles traversed several times.

use curvebound::classify::{classify_curve, component_count, same_component, total_curvature_bound_check, ClassifyOptions};
use curvebound::curve::{CurvatureBound, SpaceSpec};
use curvebound::fixtures::circle;
use std::f64::consts::PI;

fn main() {
    for (a, b) in [(f64::NEG_INFINITY, f64::INFINITY), (0.0, f64::INFINITY), (1.0, f64::INFINITY), (-1.0, 1.0)] {
        let s = SpaceSpec::from_values(a, b).unwrap();
        println!("L[{}, {}]: {} components", s.kappa1, s.kappa2, component_count(&s));
    }
    let s = SpaceSpec::from_values(0.0, f64::INFINITY).unwrap();
    for k in 1..=6 {
        let r = classify_curve(&circle(PI / 4.0, k, 512).unwrap(), &s).unwrap();
        println!(
            "sigma_{k}: component {} of {}, nu {:?}, sign {}",
            r.component_index, r.n, r.rotation_number, r.lifted_sign
        );
    }
    let sig = |k| circle(PI / 4.0, k, 256).unwrap();
    println!("sigma_1 ~ sigma_3: {}", same_component(&sig(1), &sig(3), &s).unwrap());
    println!("sigma_2 ~ sigma_4: {}", same_component(&sig(2), &sig(4), &s).unwrap());
    let t = total_curvature_bound_check(&sig(3), CurvatureBound::new(0.0).unwrap(), &ClassifyOptions::default()).unwrap();
    println!("sigma_3: tot {:.4} <= {:.4}", t.tot, t.bound);
}
