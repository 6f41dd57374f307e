//! Bends the equator into the equator traversed three times and validates the
//! family in two symmetric spaces.

use curvebound::curve::SpaceSpec;
use curvebound::homotopy::{bending_bound, bending_family, uniform_grid, validate_homotopy, HomotopyPath};

fn main() {
    let grid = uniform_grid(64);
    let curves = bending_family(1, &grid, 1024).unwrap();
    println!("bending bound for k=1: {:.6}", bending_bound(1));
    for k1 in [1.05, 0.95] {
        let s = SpaceSpec::symmetric(k1).unwrap();
        let r = validate_homotopy(&HomotopyPath::new(s.clone(), grid.clone(), curves.clone()).unwrap(), &s);
        println!(
            "kappa1 = {k1}: pass {}, max |kappa| {:.5}, max step {:.4}, {} violations",
            r.pass,
            r.max_abs_kappa,
            r.step_metric.iter().copied().fold(0.0, f64::max),
            r.violations.len()
        );
    }
}
