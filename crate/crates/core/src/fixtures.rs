//! Deterministic sample curves: circles, perturbed circles, curves with
//! antipodal symmetry, and a curve that is neither condensed nor diffuse.

use crate::curve::{
    close_frame, cot, curvature_from_points, CurvatureBound, CurveError, CurveSamples,
};
use crate::geom3::{Rotation, UnitVec3, Vec3};
use nalgebra::Matrix3;
use std::f64::consts::PI;

/// One Fourier mode a·sin(2π f t + φ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub freq: usize,
    pub amp: f64,
    pub phase: f64,
}

impl Mode {
    pub fn new(freq: usize, amp: f64, phase: f64) -> Self {
        Self { freq, amp, phase }
    }
    fn eval(&self, t: f64) -> f64 {
        self.amp * (2.0 * PI * self.freq as f64 * t + self.phase).sin()
    }
}

/// Circle of radius ρ traversed k times, Φ(0) = I.
pub fn circle(rho: f64, k: usize, n: usize) -> Result<CurveSamples, CurveError> {
    CurveSamples::constant(2.0 * PI * k as f64 * rho.sin(), cot(rho), n, Rotation::identity())
}

/// Circle ×k with curvature noise Σ modes, closed up to Φ(1) = I.
pub fn perturbed_circle(rho: f64, k: usize, n: usize, modes: &[Mode]) -> Result<CurveSamples, CurveError> {
    let base = circle(rho, k, n)?;
    let kappa = (0..n)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            cot(rho) + modes.iter().map(|m| m.eval(t)).sum::<f64>()
        })
        .collect();
    let c = CurveSamples::new(base.v().to_vec(), kappa, Rotation::identity())?;
    close_frame(&c, &Rotation::identity())
}

/// diag(−1, −1, 1), the frame of π(k).
pub fn half_turn() -> Rotation {
    Rotation::new(Matrix3::from_diagonal(&Vec3::new(-1.0, -1.0, 1.0))).expect("rotation")
}

/// A closed curve with γ(t + ½) = −γ(t): the second half repeats the first
/// with curvature negated. `n` must be even.
pub fn antipodal_curve(n: usize, modes: &[Mode]) -> Result<CurveSamples, CurveError> {
    if n % 2 != 0 {
        return Err(CurveError::InvalidInput("antipodal curve needs even n".into()));
    }
    let half = n / 2;
    let kappa = (0..half)
        .map(|i| {
            let t = (i as f64 + 0.5) / n as f64;
            modes.iter().map(|m| m.eval(t)).sum::<f64>()
        })
        .collect();
    let h = CurveSamples::new(vec![PI; half], kappa, Rotation::identity())?;
    let h = close_frame(&h, &half_turn())?;
    let mut segs = h.segments();
    segs.extend(h.segments().into_iter().map(|(l, k)| (l, -k)));
    CurveSamples::from_segments(&segs, Rotation::identity())
}

/// A looping curve that drifts along the geodesic segments joining the north
/// pole to the three cube roots of unity on the equator. Its caustic band is
/// not in any closed hemisphere and has no antipodal points for ρ₀ = 0.25.
pub fn three_lobed_curve() -> Result<(CurveSamples, CurvatureBound), CurveError> {
    let north = Vec3::z();
    let root = |k: f64| {
        let a = 2.0 * PI * k / 3.0;
        Vec3::new(a.cos(), a.sin(), 0.0)
    };
    let stops = [root(0.0), north, root(1.0), north, root(2.0), north, root(0.0)];
    let (radius, loops, per_loop) = (0.06_f64, 18usize, 24usize);
    let mut e = Vec3::y();
    let mut points = Vec::new();
    for w in stops.windows(2) {
        let (a, b) = (w[0], w[1]);
        let axis = a.cross(&b).normalize();
        let span = a.dot(&b).clamp(-1.0, 1.0).acos();
        let steps = loops * per_loop;
        for s in 0..steps {
            let sigma = s as f64 / steps as f64;
            // drift stops at the vertices
            let frac = sigma - (2.0 * PI * sigma).sin() / (2.0 * PI);
            let r = Rotation::from_axis_angle(&axis, span * frac);
            let base = r.apply(&a);
            let ee = r.apply(&e);
            let ff = base.cross(&ee);
            let phi = 2.0 * PI * s as f64 / per_loop as f64;
            let p = base * radius.cos() + (ee * phi.cos() + ff * phi.sin()) * radius.sin();
            points.push(UnitVec3::normalize(p)?);
        }
        e = Rotation::from_axis_angle(&axis, span).apply(&e);
    }
    let c = curvature_from_points(&points)?;
    let q0 = c.q0().clone();
    Ok((close_frame(&c, &q0)?, CurvatureBound::from_rho(0.25)))
}
