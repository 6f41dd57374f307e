//! Translates a perturbed circle between spaces and back, and ingests a curve
//! from sampled points.

use curvebound::curve::{
    check_membership, curvature_from_points, integrate_frames, translate_curve, translate_space, SpaceSpec,
};
use curvebound::fixtures::{perturbed_circle, Mode};

fn main() {
    let s = SpaceSpec::from_values(-0.5, 4.0).unwrap();
    let c = perturbed_circle(0.8, 2, 256, &[Mode::new(3, 0.2, 0.1)]).unwrap();
    println!("member of L[{}, {}]: {}", s.kappa1, s.kappa2, check_membership(&c, &s, 1e-9).member);
    for theta in [-0.4, 0.1, s.rho2()] {
        let ct = translate_curve(&c, theta).unwrap();
        let st = translate_space(&s, theta).unwrap();
        let back = translate_curve(&ct, -theta).unwrap();
        let err = c.kappa().iter().zip(back.kappa()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        println!(
            "theta {theta:+.4}: space L[{:.4}, {:.4}], member {}, round-trip error {err:.1e}",
            st.kappa1.value(),
            st.kappa2.value(),
            check_membership(&ct, &st, 1e-9).member
        );
    }
    let pts = integrate_frames(&c).positions();
    let again = curvature_from_points(&pts[..c.n()]).unwrap();
    println!("re-ingested {} points, mean kappa {:.4}", again.n(), again.kappa().iter().sum::<f64>() / again.n() as f64);
}
