//! Seeded generators shared by the integration targets.
#![allow(dead_code)]

use curvebound::curve::{cot, CurveSamples};
use curvebound::fixtures::{perturbed_circle, Mode};
use curvebound::geom3::{Rotation, UnitQuaternion, UnitVec3, Vec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

pub fn random_unit(rng: &mut ChaCha8Rng) -> UnitVec3 {
    loop {
        let v = Vec3::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return UnitVec3::normalize(v).unwrap();
        }
    }
}

pub fn random_quaternion(rng: &mut ChaCha8Rng) -> UnitQuaternion {
    loop {
        let c: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 && n <= 1.0 {
            return UnitQuaternion::normalize(c[0], c[1], c[2], c[3]).unwrap();
        }
    }
}

pub fn random_rotation(rng: &mut ChaCha8Rng) -> Rotation {
    random_quaternion(rng).to_rotation()
}

/// Random Fourier modes whose amplitudes sum to `budget`.
pub fn random_modes(rng: &mut ChaCha8Rng, count: usize, budget: f64) -> Vec<Mode> {
    let w: Vec<f64> = (0..count).map(|_| rng.random_range(0.2..1.0)).collect();
    let total: f64 = w.iter().sum();
    w.iter()
        .map(|x| Mode::new(rng.random_range(1..6), budget * x / total, rng.random_range(0.0..2.0 * PI)))
        .collect()
}

/// Circle of radius rho traversed k times, curvature perturbed by at most
/// `frac`·(cot rho − kappa_floor), closed, then rotated at random.
pub fn random_perturbed_circle(
    rng: &mut ChaCha8Rng,
    rho: f64,
    k: usize,
    n: usize,
    kappa_floor: f64,
    frac: f64,
) -> CurveSamples {
    let budget = frac * (cot(rho) - kappa_floor);
    let modes = random_modes(rng, 3, budget);
    perturbed_circle(rho, k, n, &modes).unwrap().rotated(&random_rotation(rng))
}
