//! Regular and caustic bands of a curve, self-intersection class, and the
//! length of a crossing path.

use curvebound::bands::{
    band_self_intersections, caustic_band_and_caustic, meridian_path, min_crossing_length, regular_band,
};
use curvebound::curve::{integrate_frames, CurvatureBound, SpaceSpec};
use curvebound::fixtures::{perturbed_circle, Mode};
use std::f64::consts::PI;

fn main() {
    let s = SpaceSpec::symmetric(1.0).unwrap();
    let c = perturbed_circle(PI / 2.0, 1, 256, &[Mode::new(2, 0.3, 0.0)]).unwrap();
    let fc = integrate_frames(&c);
    let b = regular_band(&fc, &s, 32).unwrap();
    let rep = band_self_intersections(&b, 0.9 * b.max_cell_diameter()).unwrap();
    println!("regular band {}x{} samples, class {:?}", b.n() + 1, b.m() + 1, rep.class);
    let m = meridian_path(&fc, &s, 0.25, 100);
    println!("meridian crossing length {:.6} (pi - width = {:.6})", min_crossing_length(&b, &m, 1e-6).unwrap(), PI - s.width());

    let (cb, caustic) = caustic_band_and_caustic(&fc, CurvatureBound::new(-1.0).unwrap(), 16).unwrap();
    println!("caustic band {} samples, first caustic point {:?}", cb.all_points().len(), caustic.points[0].to_array());
}
