//! Origin location against the hull of a point cloud, a Steinitz simplex
//! witness, and the barycenter of the hemispheres containing a cap.

use curvebound::convexity::{hemisphere_set_barycenter, locate_origin, steinitz_simplex, OriginTag, PointCloud3};
use curvebound::geom3::Vec3;

fn main() {
    let octa = PointCloud3::new(vec![
        Vec3::x(),
        -Vec3::x(),
        Vec3::y(),
        -Vec3::y(),
        Vec3::z(),
        -Vec3::z(),
    ])
    .unwrap();
    let loc = locate_origin(&octa, 1e-8);
    println!("octahedron: {:?}, margin {:.3}", loc.tag, loc.margin);
    if loc.tag == OriginTag::Interior {
        let s = steinitz_simplex(&octa, &Vec3::zeros()).unwrap();
        println!("  simplex {:?} weights {:?}", s.indices, s.weights);
    }

    let cap: Vec<Vec3> = (0..12)
        .map(|i| {
            let a = i as f64 * std::f64::consts::PI / 6.0;
            Vec3::new(0.5 * a.cos(), 0.5 * a.sin(), 1.0).normalize()
        })
        .collect();
    let cloud = PointCloud3::new(cap).unwrap();
    let loc = locate_origin(&cloud, 1e-8);
    println!("cap: {:?}, separating direction {:?}", loc.tag, loc.direction().map(|h| h.to_array()));
    let h = hemisphere_set_barycenter(&cloud, true, 20_000).unwrap();
    println!("  hemisphere barycenter {:?}", h.to_array());
}
