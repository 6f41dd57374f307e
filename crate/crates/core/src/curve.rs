//! Admissible curves as piecewise-constant (speed, curvature) data with an
//! initial frame; frame and lift integration, membership, translation, total
//! curvature and reparametrization.

use crate::geom3::{
    circle_through, frame_step, quaternion_lifts, rotation_about_second_axis, Geom3Error,
    Rotation, UnitQuaternion, UnitVec3, Vec3,
};
use nalgebra::{Matrix3, SMatrix, Vector3};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CurveError {
    #[error("invalid curve data: {0}")]
    InvalidInput(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("translation by {theta} collapses interval {index} (radius {rho})")]
    DegenerateTranslation { theta: f64, index: usize, rho: f64 },
    #[error("frame closing did not converge (defect {defect:e})")]
    ClosingFailed { defect: f64 },
    #[error(transparent)]
    Geometry(#[from] Geom3Error),
}

/// Default number of intervals for constructors.
pub const DEFAULT_N: usize = 256;
/// Default closure tolerance on ‖Φ(1) − Q‖_F.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;
/// Smallest admissible number of intervals.
pub const MIN_INTERVALS: usize = 8;

/// Radius of curvature of a (possibly infinite) curvature value, in [0, π].
pub fn arccot(kappa: f64) -> f64 {
    1f64.atan2(kappa)
}

/// cot ρ, with cot 0 = +∞ and cot π = −∞.
pub fn cot(rho: f64) -> f64 {
    if rho == 0.0 {
        f64::INFINITY
    } else if rho == PI {
        f64::NEG_INFINITY
    } else if rho == PI / 2.0 {
        0.0
    } else {
        rho.cos() / rho.sin()
    }
}

/// A curvature bound, possibly ±∞.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CurvatureBound(f64);

impl CurvatureBound {
    pub const NEG_INF: CurvatureBound = CurvatureBound(f64::NEG_INFINITY);
    pub const POS_INF: CurvatureBound = CurvatureBound(f64::INFINITY);

    pub fn new(value: f64) -> Result<Self, CurveError> {
        if value.is_nan() {
            return Err(CurveError::InvalidSpace("curvature bound is NaN".into()));
        }
        Ok(Self(value))
    }
    pub fn from_rho(rho: f64) -> Self {
        Self(cot(rho))
    }
    pub fn value(self) -> f64 {
        self.0
    }
    pub fn rho(self) -> f64 {
        arccot(self.0)
    }
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl std::fmt::Display for CurvatureBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "+inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl serde::Serialize for CurvatureBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            s.serialize_f64(self.0)
        } else {
            s.serialize_str(&self.to_string())
        }
    }
}

impl std::str::FromStr for CurvatureBound {
    type Err = CurveError;
    fn from_str(s: &str) -> Result<Self, CurveError> {
        match s.trim() {
            "+inf" | "inf" => Ok(Self::POS_INF),
            "-inf" => Ok(Self::NEG_INF),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Self)
                .ok_or_else(|| CurveError::InvalidSpace(format!("bad curvature bound {t:?}"))),
        }
    }
}

/// The space of curves with κ₁ < κ < κ₂ and Φ(1) = q0·Q.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub kappa1: CurvatureBound,
    pub kappa2: CurvatureBound,
    pub boundary_frame: Rotation,
}

impl SpaceSpec {
    pub fn new(kappa1: CurvatureBound, kappa2: CurvatureBound) -> Result<Self, CurveError> {
        Self::with_frame(kappa1, kappa2, Rotation::identity())
    }

    pub fn with_frame(
        kappa1: CurvatureBound,
        kappa2: CurvatureBound,
        boundary_frame: Rotation,
    ) -> Result<Self, CurveError> {
        if !(kappa1.value() < kappa2.value()) {
            return Err(CurveError::InvalidSpace(format!(
                "need kappa1 < kappa2, got {kappa1} and {kappa2}"
            )));
        }
        Ok(Self {
            kappa1,
            kappa2,
            boundary_frame,
        })
    }

    /// Convenience constructor from plain floats (±∞ allowed).
    pub fn from_values(k1: f64, k2: f64) -> Result<Self, CurveError> {
        Self::new(CurvatureBound::new(k1)?, CurvatureBound::new(k2)?)
    }

    /// Symmetric space (−κ, κ).
    pub fn symmetric(kappa: f64) -> Result<Self, CurveError> {
        Self::from_values(-kappa, kappa)
    }

    pub fn rho1(&self) -> f64 {
        self.kappa1.rho()
    }
    pub fn rho2(&self) -> f64 {
        self.kappa2.rho()
    }
    /// ρ₁ − ρ₂ ∈ (0, π].
    pub fn width(&self) -> f64 {
        self.rho1() - self.rho2()
    }
    pub fn contains_curvature(&self, kappa: f64) -> bool {
        self.kappa1.value() < kappa && kappa < self.kappa2.value()
    }
}

impl serde::Serialize for SpaceSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("SpaceSpec", 3)?;
        st.serialize_field("kappa1", &self.kappa1)?;
        st.serialize_field("kappa2", &self.kappa2)?;
        st.serialize_field("boundary_frame", &self.boundary_frame.to_row_major())?;
        st.end()
    }
}

/// Piecewise-constant speed and curvature on the uniform grid i/n, plus Φ(0).
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSamples {
    v: Vec<f64>,
    kappa: Vec<f64>,
    q0: Rotation,
}

impl CurveSamples {
    pub fn new(v: Vec<f64>, kappa: Vec<f64>, q0: Rotation) -> Result<Self, CurveError> {
        if v.len() != kappa.len() {
            return Err(CurveError::InvalidInput(format!(
                "{} speeds but {} curvatures",
                v.len(),
                kappa.len()
            )));
        }
        if v.len() < MIN_INTERVALS {
            return Err(CurveError::InvalidInput(format!(
                "need at least {MIN_INTERVALS} intervals, got {}",
                v.len()
            )));
        }
        if let Some(i) = v.iter().position(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(CurveError::InvalidInput(format!(
                "speed v[{i}] = {} is not positive",
                v[i]
            )));
        }
        if let Some(i) = kappa.iter().position(|x| !x.is_finite()) {
            return Err(CurveError::InvalidInput(format!("curvature kappa[{i}] is not finite")));
        }
        Ok(Self { v, kappa, q0 })
    }

    /// Constant data: speed v and curvature κ on n intervals.
    pub fn constant(v: f64, kappa: f64, n: usize, q0: Rotation) -> Result<Self, CurveError> {
        Self::new(vec![v; n], vec![kappa; n], q0)
    }

    /// Builds from (arclength, curvature) pieces, one interval each.
    pub fn from_segments(segments: &[(f64, f64)], q0: Rotation) -> Result<Self, CurveError> {
        let n = segments.len() as f64;
        Self::new(
            segments.iter().map(|s| s.0 * n).collect(),
            segments.iter().map(|s| s.1).collect(),
            q0,
        )
    }

    /// (arclength, curvature) per interval.
    pub fn segments(&self) -> Vec<(f64, f64)> {
        let n = self.n() as f64;
        self.v.iter().zip(&self.kappa).map(|(v, k)| (v / n, *k)).collect()
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }
    pub fn v(&self) -> &[f64] {
        &self.v
    }
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }
    pub fn q0(&self) -> &Rotation {
        &self.q0
    }
    pub fn length(&self) -> f64 {
        self.v.iter().sum::<f64>() / self.n() as f64
    }

    /// Same data, new initial frame.
    pub fn with_q0(&self, q0: Rotation) -> Self {
        Self {
            v: self.v.clone(),
            kappa: self.kappa.clone(),
            q0,
        }
    }

    /// The curve rotated by R (Φ ↦ R·Φ).
    pub fn rotated(&self, r: &Rotation) -> Self {
        self.with_q0(r * &self.q0)
    }

    /// Per-interval radii of curvature.
    pub fn rho(&self) -> Vec<f64> {
        self.kappa.iter().map(|k| arccot(*k)).collect()
    }

    pub fn min_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(f64::INFINITY, f64::min)
    }
    pub fn max_kappa(&self) -> f64 {
        self.kappa.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// The curve followed by `other`, each on half of [0, 1] in proportion to interval counts.
    pub fn concat(&self, other: &CurveSamples) -> Result<Self, CurveError> {
        let mut segs = self.segments();
        segs.extend(other.segments());
        Self::from_segments(&segs, self.q0.clone())
    }

    /// Cyclic shift of the start to node `k`, with Φ(0) set to `q0`.
    pub fn shifted(&self, k: usize, q0: Rotation) -> Self {
        let n = self.n();
        let k = k % n;
        let mut v = self.v[k..].to_vec();
        v.extend_from_slice(&self.v[..k]);
        let mut kappa = self.kappa[k..].to_vec();
        kappa.extend_from_slice(&self.kappa[..k]);
        Self { v, kappa, q0 }
    }
}

/// A curve with its frames and lifted frames at the grid nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FramedCurve {
    pub base: CurveSamples,
    pub frames: Vec<Rotation>,
    pub lifts: Vec<UnitQuaternion>,
}

/// Lift of a frame with non-negative first coefficient.
pub fn standard_lift(q: &Rotation) -> UnitQuaternion {
    quaternion_lifts(q).0
}

pub fn integrate_frames(c: &CurveSamples) -> FramedCurve {
    let n = c.n();
    let dt = 1.0 / n as f64;
    let mut frames = Vec::with_capacity(n + 1);
    let mut lifts = Vec::with_capacity(n + 1);
    frames.push(c.q0.clone());
    lifts.push(standard_lift(&c.q0));
    for i in 0..n {
        let (r, z) = frame_step(c.v[i], c.v[i] * c.kappa[i], dt);
        frames.push(&frames[i] * &r);
        lifts.push(lifts[i] * z);
    }
    FramedCurve {
        base: c.clone(),
        frames,
        lifts,
    }
}

impl FramedCurve {
    pub fn n(&self) -> usize {
        self.base.n()
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let n = self.n();
        let x = t.clamp(0.0, 1.0) * n as f64;
        let i = (x.floor() as usize).min(n - 1);
        (i, (x - i as f64) / n as f64)
    }

    /// Φ(t) for t ∈ [0, 1], exact within the interval.
    pub fn frame_at(&self, t: f64) -> Rotation {
        let (i, dt) = self.locate(t);
        let (r, _) = frame_step(self.base.v[i], self.base.v[i] * self.base.kappa[i], dt);
        &self.frames[i] * &r
    }

    /// Φ̃(t) for t ∈ [0, 1].
    pub fn lift_at(&self, t: f64) -> UnitQuaternion {
        let (i, dt) = self.locate(t);
        let (_, z) = frame_step(self.base.v[i], self.base.v[i] * self.base.kappa[i], dt);
        self.lifts[i] * z
    }

    /// Frame at a periodic parameter (t mod 1), assuming the curve is closed.
    pub fn frame_at_periodic(&self, t: f64) -> Rotation {
        self.frame_at(t.rem_euclid(1.0))
    }

    pub fn positions(&self) -> Vec<UnitVec3> {
        self.frames.iter().map(|f| f.position()).collect()
    }
    pub fn tangents(&self) -> Vec<UnitVec3> {
        self.frames.iter().map(|f| f.tangent()).collect()
    }
    pub fn last_frame(&self) -> &Rotation {
        self.frames.last().expect("n ≥ 8")
    }
    pub fn last_lift(&self) -> &UnitQuaternion {
        self.lifts.last().expect("n ≥ 8")
    }

    /// ‖Φ(1) − q0·Q‖_F.
    pub fn closure_defect(&self, q: &Rotation) -> f64 {
        self.last_frame().distance(&(self.base.q0() * q))
    }

    /// max ‖ΦᵀΦ − I‖_F over nodes.
    pub fn max_orthogonality_defect(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| f.orthogonality_defect())
            .fold(0.0, f64::max)
    }

    /// max ‖π(Φ̃) − Φ‖_F over nodes.
    pub fn max_lift_defect(&self) -> f64 {
        self.frames
            .iter()
            .zip(&self.lifts)
            .map(|(f, z)| z.to_rotation().distance(f))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MembershipReport {
    pub closure_defect: f64,
    pub curvature_margin: f64,
    pub member: bool,
}

pub fn check_membership(c: &CurveSamples, s: &SpaceSpec, tol: f64) -> MembershipReport {
    let fc = integrate_frames(c);
    membership_of_framed(&fc, s, tol)
}

pub fn membership_of_framed(fc: &FramedCurve, s: &SpaceSpec, tol: f64) -> MembershipReport {
    let closure_defect = fc.closure_defect(&s.boundary_frame);
    let curvature_margin = curvature_margin(&fc.base, s);
    MembershipReport {
        closure_defect,
        curvature_margin,
        member: closure_defect <= tol && curvature_margin > 0.0,
    }
}

/// min over intervals of min(κ − κ₁, κ₂ − κ).
pub fn curvature_margin(c: &CurveSamples, s: &SpaceSpec) -> f64 {
    c.kappa
        .iter()
        .map(|k| (k - s.kappa1.value()).min(s.kappa2.value() - k))
        .fold(f64::INFINITY, f64::min)
}

/// Estimates (v, κ, q0) from a closed polygon of points on S².
pub fn curvature_from_points(points: &[UnitVec3]) -> Result<CurveSamples, CurveError> {
    let n = points.len();
    if n < 16 {
        return Err(CurveError::InvalidInput(format!("need at least 16 points, got {n}")));
    }
    for i in 0..n {
        let gap = points[i].distance(&points[(i + 1) % n]);
        if !(gap > 1e-6 && gap < 0.5) {
            return Err(CurveError::InvalidInput(format!(
                "gap {gap} between points {i} and {} outside (1e-6, 0.5)",
                (i + 1) % n
            )));
        }
    }
    let at = |i: isize| points[i.rem_euclid(n as isize) as usize];
    // signed curvature of the circle through each consecutive triple, centered at node i
    let node_kappa: Vec<f64> = (0..n as isize)
        .map(|i| {
            circle_through(&at(i - 1), &at(i), &at(i + 1))
                .map(|c| c.signed_curvature())
                .unwrap_or(0.0)
        })
        .collect::<Vec<_>>();
    let mut v = Vec::with_capacity(n);
    let mut kappa = Vec::with_capacity(n);
    for i in 0..n {
        let k = 0.5 * (node_kappa[i] + node_kappa[(i + 1) % n]);
        let rho = arccot(k);
        let chord = (at(i as isize + 1).vec() - at(i as isize).vec()).norm();
        let r = rho.sin();
        let arc = r * 2.0 * (chord / (2.0 * r)).min(1.0).asin();
        v.push(arc * n as f64);
        kappa.push(k);
    }
    let c0 = circle_through(&at(-1), &at(0), &at(1))?;
    let p0 = at(0).vec();
    let t0 = c0.left_center().vec().cross(&p0).normalize();
    let q0 = Rotation::from_columns(&p0, &t0, &p0.cross(&t0))?;
    CurveSamples::new(v, kappa, q0)
}

/// The translation γ_θ = cos θ·γ + sin θ·n.
pub fn translate_curve(c: &CurveSamples, theta: f64) -> Result<CurveSamples, CurveError> {
    let mut v = Vec::with_capacity(c.n());
    let mut kappa = Vec::with_capacity(c.n());
    for (i, (vi, ki)) in c.v.iter().zip(&c.kappa).enumerate() {
        let rho = arccot(*ki);
        let nr = rho - theta;
        let s = nr.sin();
        if !(nr > 0.0 && nr < PI) || s <= 1e-12 {
            return Err(CurveError::DegenerateTranslation {
                theta,
                index: i,
                rho,
            });
        }
        v.push(vi * s / rho.sin());
        kappa.push(nr.cos() / s);
    }
    CurveSamples::new(v, kappa, &c.q0 * &rotation_about_second_axis(theta))
}

/// Space of the translated curves: bounds shifted by −θ, Q ↦ R_θᵀ Q R_θ.
pub fn translate_space(s: &SpaceSpec, theta: f64) -> Result<SpaceSpec, CurveError> {
    let r = rotation_about_second_axis(theta);
    SpaceSpec::with_frame(
        CurvatureBound::from_rho(s.rho1() - theta),
        CurvatureBound::from_rho(s.rho2() - theta),
        &(&r.transpose() * &s.boundary_frame) * &r,
    )
}

/// Σ √(1+κ²)·v/n.
pub fn total_curvature(c: &CurveSamples) -> f64 {
    c.v.iter()
        .zip(&c.kappa)
        .map(|(v, k)| (1.0 + k * k).sqrt() * v)
        .sum::<f64>()
        / c.n() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parametrization {
    Arclength,
    Curvature,
}

/// Resamples onto n equal steps of arclength or total curvature. Each output
/// interval keeps the length and total curvature of the piece it covers.
pub fn reparametrize(c: &CurveSamples, mode: Parametrization) -> CurveSamples {
    let n = c.n();
    let segs = c.segments();
    let weight = |(l, k): (f64, f64)| match mode {
        Parametrization::Arclength => l,
        Parametrization::Curvature => l * (1.0 + k * k).sqrt(),
    };
    let total: f64 = segs.iter().map(|s| weight(*s)).sum();
    let step = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut idx = 0;
    // unused fraction of the current segment, in weight units
    let mut left = weight(segs[0]);
    for j in 0..n {
        let mut need = if j + 1 == n { f64::INFINITY } else { step };
        let (mut len, mut tot, mut turn) = (0.0, 0.0, 0.0);
        while need > 0.0 && idx < segs.len() {
            let (l, k) = segs[idx];
            let w = weight(segs[idx]);
            let take = need.min(left);
            let frac = if w > 0.0 { take / w } else { 1.0 };
            len += l * frac;
            tot += l * frac * (1.0 + k * k).sqrt();
            turn += l * frac * k;
            need -= take;
            left -= take;
            if left <= 1e-15 * total {
                idx += 1;
                if idx < segs.len() {
                    left = weight(segs[idx]);
                }
            }
        }
        let ratio = (tot / len).max(1.0);
        let k = (ratio * ratio - 1.0).max(0.0).sqrt() * if turn < 0.0 { -1.0 } else { 1.0 };
        out.push((len, k));
    }
    CurveSamples::from_segments(&out, c.q0.clone()).expect("pieces are positive")
}

/// Perturbs κ and log v by low-order Fourier modes so that Φ(1) = target.
pub fn close_frame(c: &CurveSamples, target: &Rotation) -> Result<CurveSamples, CurveError> {
    let n = c.n();
    let modes: Vec<[f64; 3]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            [1.0, t.cos(), t.sin()]
        })
        .collect();
    let build = |p: &SMatrix<f64, 6, 1>| -> CurveSamples {
        let mut v = c.v.clone();
        let mut kappa = c.kappa.clone();
        for i in 0..n {
            let m = modes[i];
            kappa[i] += p[0] * m[0] + p[1] * m[1] + p[2] * m[2];
            v[i] *= (p[3] * m[0] + p[4] * m[1] + p[5] * m[2]).exp();
        }
        CurveSamples {
            v,
            kappa,
            q0: c.q0.clone(),
        }
    };
    let residual = |cs: &CurveSamples| -> Vector3<f64> {
        (&target.transpose() * integrate_frames(cs).last_frame()).log()
    };
    let mut p = SMatrix::<f64, 6, 1>::zeros();
    let mut cur = build(&p);
    let mut r = residual(&cur);
    for _ in 0..60 {
        if r.norm() < 1e-13 {
            return Ok(cur);
        }
        let h = 1e-7;
        let mut jac = SMatrix::<f64, 3, 6>::zeros();
        for k in 0..6 {
            let mut q = p;
            q[k] += h;
            let rk = residual(&build(&q));
            jac.set_column(k, &((rk - r) / h));
        }
        let jjt: Matrix3<f64> = jac * jac.transpose();
        let Some(inv) = jjt.try_inverse() else {
            break;
        };
        let step = jac.transpose() * (inv * r);
        let mut lam = 1.0;
        loop {
            let q = p - step * lam;
            let cand = build(&q);
            let rc = residual(&cand);
            if rc.norm() < r.norm() || lam < 1e-4 {
                p = q;
                cur = cand;
                r = rc;
                break;
            }
            lam *= 0.5;
        }
    }
    if r.norm() < 1e-11 {
        Ok(cur)
    } else {
        Err(CurveError::ClosingFailed { defect: r.norm() })
    }
}

/// Positions γ(i/n) of a closed curve, without the repeated endpoint.
pub fn sample_points(c: &CurveSamples) -> Vec<UnitVec3> {
    let mut p = integrate_frames(c).positions();
    p.pop();
    p
}

/// Unit tangent t(i/n) at the nodes.
pub fn sample_tangents(c: &CurveSamples) -> Vec<Vec3> {
    integrate_frames(c).frames.iter().map(|f| f.col(1)).collect()
}
