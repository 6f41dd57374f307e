//! Explicit curves and homotopies: circles, the bending of the k-equator,
//! loop insertion, F_n, antipodal and quadruple grafts, the plane
//! normalization to a multiply traversed circle, the exotic sphere family,
//! and a validator for discrete homotopy paths.

use crate::classify::{plane_rotation_number, ClassifyError};
use crate::curve::{
    arccot, close_frame, cot, integrate_frames, membership_of_framed, reparametrize,
    CurveError, CurveSamples, FramedCurve, MembershipReport, Parametrization, SpaceSpec,
    DEFAULT_CLOSURE_TOL,
};
use crate::geom3::{
    circle_through, spherical_distance, Geom3Error, Rotation, UnitQuaternion, UnitVec3, Vec3,
};
use nalgebra::{Matrix3, Matrix4, Vector4};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomotopyError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("curvature bound {kappa1} does not exceed the bending bound {bound}")]
    Obstruction { kappa1: f64, bound: f64 },
    #[error("loop window around t0 = {t0} with eps = {eps} leaves (0, 1)")]
    WindowOverflow { t0: f64, eps: f64 },
    #[error("caustic points are not antipodal (defect {defect:e})")]
    NotAntipodal { defect: f64 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("Newton solve failed after {iterations} iterations (residual {residual:e})")]
    SolveFailed { residual: f64, iterations: usize },
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Geometry(#[from] Geom3Error),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

/// Consecutive curves of a valid path differ by less than this in the step metric.
pub const STEP_THRESHOLD: f64 = 0.5;

// ---------------------------------------------------------------- circles

/// Circle of radius ρ traversed k times, started `phase` radians around its
/// center; phase 0 gives Φ(0) = I.
pub fn make_circle(rho: f64, k: usize, phase: f64, n: usize) -> Result<CurveSamples, HomotopyError> {
    if !(rho > 0.0 && rho < PI) {
        return Err(HomotopyError::InvalidInput(format!("radius {rho} outside (0, pi)")));
    }
    if k == 0 {
        return Err(HomotopyError::InvalidInput("k must be at least 1".into()));
    }
    let center = Vec3::new(rho.cos(), 0.0, rho.sin());
    let q0 = Rotation::from_axis_angle(&center, phase);
    Ok(CurveSamples::constant(2.0 * PI * k as f64 * rho.sin(), cot(rho), n, q0)?)
}

/// Circles ×k with radius moving linearly from ρa to ρb.
pub fn circle_family(rho_a: f64, rho_b: f64, k: usize, s_grid: &[f64], n: usize) -> Result<Vec<CurveSamples>, HomotopyError> {
    s_grid
        .iter()
        .map(|s| make_circle((1.0 - s) * rho_a + s * rho_b, k, 0.0, n))
        .collect()
}

/// `steps` equally spaced values covering [0, 1].
pub fn uniform_grid(steps: usize) -> Vec<f64> {
    match steps {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..steps).map(|i| i as f64 / (steps - 1) as f64).collect(),
    }
}

// ---------------------------------------------------------------- bending

/// max |κ| over the bending of the k-equator: tan(π/(2k+2)).
pub fn bending_bound(k: usize) -> f64 {
    (PI / (2 * k + 2) as f64).tan()
}

/// Err(Obstruction) unless κ₁ exceeds the bending bound.
pub fn check_bending_space(k: usize, kappa1: f64) -> Result<(), HomotopyError> {
    let bound = bending_bound(k);
    if kappa1 > bound + 1e-12 {
        Ok(())
    } else {
        Err(HomotopyError::Obstruction { kappa1, bound })
    }
}

/// (arclength, signed curvature) of each of the 2k+2 arcs at angle α ∈ [0, π].
pub fn bending_arcs(k: usize, alpha: f64) -> Result<Vec<(f64, f64)>, HomotopyError> {
    if k == 0 {
        return Err(HomotopyError::InvalidInput("k must be at least 1".into()));
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(HomotopyError::InvalidInput(format!("bending angle {alpha} outside [0, pi]")));
    }
    let m = 2 * k + 2;
    let eq = |t: f64| {
        let a = 2.0 * PI * k as f64 * t;
        Vec3::new(a.cos(), a.sin(), 0.0)
    };
    let north = Vec3::z();
    let c = (k as f64 * PI / m as f64).cos();
    let mut arcs = Vec::with_capacity(m);
    for i in 0..m {
        let a = if i % 2 == 0 { alpha } else { -alpha };
        if a.sin().abs() < 1e-12 {
            let frac = if a.cos() > 0.0 { k as f64 } else { (k + 2) as f64 };
            arcs.push((2.0 * PI * frac / m as f64, 0.0));
            continue;
        }
        let p = UnitVec3::normalize(eq(i as f64 / m as f64))?;
        let p_next = UnitVec3::normalize(eq((i + 1) as f64 / m as f64))?;
        let q = eq((i as f64 + 0.5) / m as f64);
        let r = -c * a.cos() + (c * c * a.cos() * a.cos() + 1.0 - c * c).sqrt();
        let qa = UnitVec3::normalize(q * c + (q * a.cos() + north * a.sin()) * r)?;
        let circ = circle_through(&p, &qa, &p_next)?;
        let rad = circ.left_radius();
        arcs.push((rad.sin() * circ.swept_angle(&p, &p_next), cot(rad)));
    }
    Ok(arcs)
}

/// η_s: the bending of the k-equator at s ∈ [0, 1], n intervals split
/// evenly among the arcs, Φ(0) = I.
pub fn bend_k_equator(k: usize, s: f64, n: usize) -> Result<CurveSamples, HomotopyError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(HomotopyError::InvalidInput(format!("s = {s} outside [0, 1]")));
    }
    let arcs = bending_arcs(k, s * PI)?;
    let per = n.div_ceil(arcs.len()).max(1);
    let segs: Vec<(f64, f64)> = arcs
        .iter()
        .flat_map(|&(l, kap)| std::iter::repeat_n((l / per as f64, kap), per))
        .collect();
    Ok(CurveSamples::from_segments(&segs, Rotation::identity())?)
}

pub fn bending_family(k: usize, s_grid: &[f64], n: usize) -> Result<Vec<CurveSamples>, HomotopyError> {
    s_grid.iter().map(|s| bend_k_equator(k, *s, n)).collect()
}

// ---------------------------------------------------------------- loops

/// The curve restarted at parameter u ∈ [0, 1) with Φ(0) = I; the interval
/// containing u is split in two.
pub fn start_at(c: &CurveSamples, u: f64) -> Result<CurveSamples, HomotopyError> {
    let n = c.n();
    let u = u.rem_euclid(1.0);
    let x = u * n as f64;
    let i = (x.floor() as usize).min(n - 1);
    let frac = x - i as f64;
    let segs = c.segments();
    let mut out = Vec::with_capacity(n + 1);
    if frac > 1e-12 && frac < 1.0 - 1e-12 {
        out.push((segs[i].0 * (1.0 - frac), segs[i].1));
        out.extend_from_slice(&segs[i + 1..]);
        out.extend_from_slice(&segs[..i]);
        out.push((segs[i].0 * frac, segs[i].1));
    } else {
        let j = if frac >= 1.0 - 1e-12 { (i + 1) % n } else { i };
        out.extend_from_slice(&segs[j..]);
        out.extend_from_slice(&segs[..j]);
    }
    Ok(CurveSamples::from_segments(&out, Rotation::identity())?)
}

/// Inserts `loops` full circles of radius ρ1 at the grid node nearest t0.
/// The loops take max(8·loops, ⌈2εn⌉) new intervals.
pub fn insert_loops_at(c: &CurveSamples, t0: f64, loops: usize, eps: f64, rho1: f64) -> Result<CurveSamples, HomotopyError> {
    if !(rho1 > 0.0 && rho1 < PI) {
        return Err(HomotopyError::InvalidInput(format!("loop radius {rho1} outside (0, pi)")));
    }
    if !(eps >= 0.0 && t0 > 2.0 * eps && t0 < 1.0 - 2.0 * eps) {
        return Err(HomotopyError::WindowOverflow { t0, eps });
    }
    if loops == 0 {
        return Ok(c.clone());
    }
    let n = c.n();
    let node = ((t0 * n as f64).round() as usize).clamp(1, n - 1);
    let m = (8 * loops).max((2.0 * eps * n as f64).ceil() as usize);
    let piece = 2.0 * PI * loops as f64 * rho1.sin() / m as f64;
    let mut segs = c.segments();
    segs.splice(node..node, std::iter::repeat_n((piece, cot(rho1)), m));
    Ok(CurveSamples::from_segments(&segs, c.q0().clone())?)
}

fn lambda_matrix(v: f64, kappa: f64) -> Matrix3<f64> {
    let w = v * kappa;
    Matrix3::new(0.0, -v, 0.0, v, 0.0, -w, 0.0, w, 0.0)
}

/// F_n(γ)(t) = Φ_γ(t)·σ_n^{ρ1}(t) with γ first parametrized by curvature.
/// Returns the new curve, resolved on `refine`·n intervals and closed to
/// Φ_γ(1).
pub fn add_loops_fn(c: &CurveSamples, loops: usize, rho1: f64, refine: usize) -> Result<CurveSamples, HomotopyError> {
    if !(rho1 > 0.0 && rho1 < PI) {
        return Err(HomotopyError::InvalidInput(format!("loop radius {rho1} outside (0, pi)")));
    }
    if loops == 0 {
        return Ok(c.clone());
    }
    let base = reparametrize(c, Parametrization::Curvature);
    let end = integrate_frames(c).last_frame().clone();
    let n = base.n();
    let big = n * refine.max(1);
    let center = Vec3::new(rho1.cos(), 0.0, rho1.sin());
    let omega = 2.0 * PI * loops as f64;
    let mut v = Vec::with_capacity(big);
    let mut kappa = Vec::with_capacity(big);
    for j in 0..big {
        let t = (j as f64 + 0.5) / big as f64;
        let i = ((t * n as f64) as usize).min(n - 1);
        let lam = lambda_matrix(base.v()[i], base.kappa()[i]);
        let sig = Rotation::from_axis_angle(&center, omega * t).apply(&Vec3::x());
        let d1 = center.cross(&sig) * omega;
        let d2 = center.cross(&center.cross(&sig)) * (omega * omega);
        let f1 = lam * sig + d1;
        let f2 = lam * (lam * sig) + lam * d1 * 2.0 + d2;
        let speed = f1.norm();
        if speed < 1e-9 {
            return Err(HomotopyError::Precondition(format!(
                "F_n is singular near t = {t:.4}; increase the number of loops"
            )));
        }
        v.push(speed);
        kappa.push(sig.dot(&f1.cross(&f2)) / speed.powi(3));
    }
    let raw = CurveSamples::new(v, kappa, c.q0().clone())?;
    Ok(close_frame(&raw, &end)?)
}

// ---------------------------------------------------------------- grafts

/// C_γ(t_i, ρ) at grid node i.
pub fn caustic_point(fc: &FramedCurve, node: usize, rho: f64) -> Vec3 {
    let f = &fc.frames[node];
    f.col(0) * rho.cos() + f.col(2) * rho.sin()
}

fn node_of(n: usize, t: f64) -> Result<usize, HomotopyError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(HomotopyError::InvalidInput(format!("parameter {t} outside [0, 1]")));
    }
    Ok(((t * n as f64).round() as usize).min(n))
}

/// Parameters of an exactly antipodal pair of caustic band points.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AntipodalPair {
    pub t1: f64,
    pub rho_a: f64,
    pub t2: f64,
    pub rho_b: f64,
    pub defect: f64,
}

/// Scans node pairs for points C(tᵢ, ρa) = −C(tⱼ, ρb) with ρa, ρb ∈ (0, ρ0),
/// maximizing the distance of ρa, ρb from the ends of that interval.
pub fn find_antipodal_pair(c: &CurveSamples, rho0: f64) -> Option<AntipodalPair> {
    let fc = integrate_frames(c);
    let n = c.n();
    let mut best: Option<(f64, AntipodalPair)> = None;
    for i in 0..n {
        for j in i + 1..n {
            let d = fc.frames[i].col(1).cross(&fc.frames[j].col(1));
            if d.norm() < 1e-6 {
                continue;
            }
            let d = d.normalize();
            for x in [d, -d] {
                let fi = &fc.frames[i];
                let fj = &fc.frames[j];
                let ra = x.dot(&fi.col(2)).atan2(x.dot(&fi.col(0)));
                let rb = (-x).dot(&fj.col(2)).atan2((-x).dot(&fj.col(0)));
                let margin = ra.min(rho0 - ra).min(rb).min(rho0 - rb);
                if margin > 0.0 && best.as_ref().is_none_or(|b| margin > b.0) {
                    let defect = (caustic_point(&fc, i, ra) + caustic_point(&fc, j, rb)).norm();
                    best = Some((
                        margin,
                        AntipodalPair {
                            t1: i as f64 / n as f64,
                            rho_a: ra,
                            t2: j as f64 / n as f64,
                            rho_b: rb,
                            defect,
                        },
                    ));
                }
            }
        }
    }
    best.map(|b| b.1)
}

/// Acceptance tolerance for antipodality in [`graft_antipodal`].
pub const ANTIPODAL_TOL: f64 = 1e-6;

fn arc_pieces(sigma: f64, rho: f64) -> Vec<(f64, f64)> {
    let m = ((8.0 * sigma / PI).ceil() as usize).max(1);
    vec![(sigma * rho.sin() / m as f64, cot(rho)); m]
}

fn insert_arcs(c: &CurveSamples, arcs: &[(usize, f64, f64)]) -> Result<CurveSamples, HomotopyError> {
    if arcs.iter().all(|a| a.1 == 0.0) {
        return Ok(c.clone());
    }
    let segs = c.segments();
    let mut out = Vec::with_capacity(segs.len() + 64);
    let mut next = 0;
    let mut order: Vec<&(usize, f64, f64)> = arcs.iter().collect();
    order.sort_by_key(|a| a.0);
    for &&(node, sigma, rho) in &order {
        out.extend_from_slice(&segs[next..node]);
        next = node;
        if sigma > 0.0 {
            out.extend(arc_pieces(sigma, rho));
        }
    }
    out.extend_from_slice(&segs[next..]);
    Ok(CurveSamples::from_segments(&out, c.q0().clone())?)
}

/// Inserts arcs of radii ρa at t1 and ρb at t2, each with total curvature s.
pub fn graft_antipodal(c: &CurveSamples, t1: f64, t2: f64, rho_a: f64, rho_b: f64, s: f64) -> Result<CurveSamples, HomotopyError> {
    if !(s >= 0.0) {
        return Err(HomotopyError::InvalidInput(format!("graft size {s} is negative")));
    }
    for r in [rho_a, rho_b] {
        if !(r > 0.0 && r < PI) {
            return Err(HomotopyError::InvalidInput(format!("radius {r} outside (0, pi)")));
        }
    }
    let fc = integrate_frames(c);
    let (i, j) = (node_of(c.n(), t1)?, node_of(c.n(), t2)?);
    let defect = (caustic_point(&fc, i, rho_a) + caustic_point(&fc, j, rho_b)).norm();
    if defect > ANTIPODAL_TOL {
        return Err(HomotopyError::NotAntipodal { defect });
    }
    insert_arcs(c, &[(i, s, rho_a), (j, s, rho_b)])
}

/// Arc sizes found by the quadruple-graft solve.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadrupleGraft {
    pub curve: CurveSamples,
    pub sigma: [f64; 4],
    pub weights: [f64; 4],
    pub residual: f64,
    pub iterations: usize,
}

fn graft_product(chi: &[Vec3; 4], sigma: &[f64; 4]) -> UnitQuaternion {
    let mut q = UnitQuaternion::exp_imag(&(chi[0] * (sigma[0] / 2.0)));
    for i in 1..4 {
        q = q * UnitQuaternion::exp_imag(&(chi[i] * (sigma[i] / 2.0)));
    }
    q
}

fn full_sigma(x: &Vec3, s: f64) -> [f64; 4] {
    [x[0], x[1], x[2], s - x[0] - x[1] - x[2]]
}

/// Barycentric weights of 0 in the tetrahedron χ₁..χ₄.
pub fn origin_weights(chi: &[Vec3; 4]) -> Result<[f64; 4], HomotopyError> {
    let mut a = Matrix4::zeros();
    for (j, x) in chi.iter().enumerate() {
        a[(0, j)] = x.x;
        a[(1, j)] = x.y;
        a[(2, j)] = x.z;
        a[(3, j)] = 1.0;
    }
    let sol = a
        .lu()
        .solve(&Vector4::new(0.0, 0.0, 0.0, 1.0))
        .ok_or_else(|| HomotopyError::Precondition("caustic points are coplanar".into()))?;
    let w = [sol[0], sol[1], sol[2], sol[3]];
    if w.iter().any(|x| !(*x > 1e-9)) {
        return Err(HomotopyError::Precondition(format!(
            "origin is not interior to the hull of the caustic points (weights {w:?})"
        )));
    }
    Ok(w)
}

/// Inserts four arcs with Σσᵢ = s whose frame rotations cancel. Nodes are
/// taken nearest to the given parameters and processed in increasing order.
pub fn graft_quadruple(c: &CurveSamples, t: [f64; 4], rho: [f64; 4], s: f64) -> Result<QuadrupleGraft, HomotopyError> {
    if !(s >= 0.0) {
        return Err(HomotopyError::InvalidInput(format!("graft size {s} is negative")));
    }
    let fc = integrate_frames(c);
    let mut nodes = [0usize; 4];
    for i in 0..4 {
        nodes[i] = node_of(c.n(), t[i])?;
        if !(rho[i] > 0.0 && rho[i] < PI) {
            return Err(HomotopyError::InvalidInput(format!("radius {} outside (0, pi)", rho[i])));
        }
    }
    if nodes.windows(2).any(|w| w[0] > w[1]) {
        return Err(HomotopyError::InvalidInput("graft parameters must be non-decreasing".into()));
    }
    let chi: [Vec3; 4] = std::array::from_fn(|i| caustic_point(&fc, nodes[i], rho[i]));
    let weights = origin_weights(&chi)?;
    let residual_of = |x: &Vec3| graft_product(&chi, &full_sigma(x, s)).log();
    let mut x = Vec3::new(s * weights[0], s * weights[1], s * weights[2]);
    let mut r = residual_of(&x);
    let mut iterations = 0;
    const H: f64 = 1e-7;
    while r.norm() >= 1e-13 && iterations < 50 {
        iterations += 1;
        let mut jac = Matrix3::zeros();
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += H;
            xm[k] -= H;
            jac.set_column(k, &((residual_of(&xp) - residual_of(&xm)) / (2.0 * H)));
        }
        let Some(step) = jac.lu().solve(&(-r)) else {
            return Err(HomotopyError::SolveFailed { residual: r.norm(), iterations });
        };
        let mut damp = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let cand = x + step * damp;
            let rc = residual_of(&cand);
            if rc.norm() < r.norm() {
                x = cand;
                r = rc;
                accepted = true;
                break;
            }
            damp *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let sigma = full_sigma(&x, s);
    let q = graft_product(&chi, &sigma);
    let residual = q.distance(&UnitQuaternion::new(1.0, 0.0, 0.0, 0.0)?);
    if !(residual < 1e-10) {
        return Err(HomotopyError::SolveFailed { residual, iterations });
    }
    if sigma.iter().any(|x| *x < -1e-14) {
        return Err(HomotopyError::Precondition(format!("solution has a negative arc size: {sigma:?}")));
    }
    let sigma = sigma.map(|x| x.max(0.0));
    let arcs: Vec<(usize, f64, f64)> = (0..4).map(|i| (nodes[i], sigma[i], rho[i])).collect();
    Ok(QuadrupleGraft {
        curve: insert_arcs(c, &arcs)?,
        sigma,
        weights,
        residual,
        iterations,
    })
}

// ---------------------------------------------------------------- plane normalization

/// A closed plane polygon; the last vertex joins the first.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PlaneCurve(pub Vec<(f64, f64)>);

impl PlaneCurve {
    pub fn points(&self) -> &[(f64, f64)] {
        &self.0
    }
    fn edge(&self, i: usize) -> (f64, f64) {
        let n = self.0.len();
        let (a, b) = (self.0[i % n], self.0[(i + 1) % n]);
        (b.0 - a.0, b.1 - a.1)
    }
    pub fn length(&self) -> f64 {
        (0..self.0.len()).map(|i| hypot(self.edge(i))).sum()
    }
    /// Turning angle over mean adjacent edge length, per vertex.
    pub fn discrete_curvature(&self) -> Vec<f64> {
        let n = self.0.len();
        (0..n)
            .map(|i| {
                let a = self.edge(i + n - 1);
                let b = self.edge(i);
                let turn = (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1);
                turn / (0.5 * (hypot(a) + hypot(b)))
            })
            .collect()
    }
    pub fn min_curvature(&self) -> f64 {
        self.discrete_curvature().into_iter().fold(f64::INFINITY, f64::min)
    }
    /// Resampled to m vertices equally spaced in arclength, starting at vertex 0.
    pub fn resample(&self, m: usize) -> PlaneCurve {
        let n = self.0.len();
        let len = self.length();
        let mut out = Vec::with_capacity(m);
        let mut seg = 0;
        let mut acc = 0.0;
        for j in 0..m {
            let target = len * j as f64 / m as f64;
            while seg < n - 1 && acc + hypot(self.edge(seg)) < target {
                acc += hypot(self.edge(seg));
                seg += 1;
            }
            let e = self.edge(seg);
            let f = ((target - acc) / hypot(e)).clamp(0.0, 1.0);
            let p = self.0[seg];
            out.push((p.0 + f * e.0, p.1 + f * e.1));
        }
        PlaneCurve(out)
    }
    fn map(&self, f: impl Fn((f64, f64)) -> (f64, f64)) -> PlaneCurve {
        PlaneCurve(self.0.iter().map(|p| f(*p)).collect())
    }
}

fn hypot(p: (f64, f64)) -> f64 {
    p.0.hypot(p.1)
}

/// Deformation of a plane family to a circle traversed N times.
/// `curves[a][j]` is member a at `s_grid[j]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct PlaneHomotopy {
    pub s_grid: Vec<f64>,
    pub curves: Vec<Vec<PlaneCurve>>,
    pub rotation_number: i64,
    /// Radius of the final circle.
    pub radius: f64,
    pub min_curvature: f64,
}

/// Translation, shrinking and angle interpolation, each over a third of the
/// s-range with `steps` samples per stage. Input polygons are first resampled
/// to `m` vertices by arclength.
pub fn whitney_graustein_normalize(curves: &[PlaneCurve], kappa0: f64, steps: usize, m: usize) -> Result<PlaneHomotopy, HomotopyError> {
    if curves.is_empty() {
        return Err(HomotopyError::InvalidFamily("empty family".into()));
    }
    if !(kappa0 >= 0.0) || steps < 2 || m < 8 {
        return Err(HomotopyError::InvalidInput("need kappa0 >= 0, steps >= 2, m >= 8".into()));
    }
    let curves: Vec<PlaneCurve> = curves.iter().map(|c| c.resample(m)).collect();
    let rot: Vec<i64> = curves
        .iter()
        .map(|c| plane_rotation_number(c.points()).map(|r| r.number))
        .collect::<Result<_, _>>()?;
    let nn = rot[0];
    if rot.iter().any(|r| *r != nn) {
        return Err(HomotopyError::InvalidFamily(format!("mixed rotation numbers {rot:?}")));
    }
    if nn <= 0 {
        return Err(HomotopyError::InvalidFamily(format!("rotation number {nn} is not positive")));
    }
    let two_pi_n = 2.0 * PI * nn as f64;
    let l0 = curves.iter().map(|c| c.length()).fold(f64::INFINITY, f64::min);
    let rho0 = if kappa0 > 0.0 { 1.0 / kappa0 } else { f64::INFINITY };
    let r1 = 0.5 * (l0 / two_pi_n).min(rho0);
    let stage = uniform_grid(steps);
    let mut s_grid: Vec<f64> = stage.iter().map(|st| st / 3.0).collect();
    for st in &stage[1..] {
        s_grid.push((1.0 + st) / 3.0);
    }
    for st in &stage[1..] {
        s_grid.push((2.0 + st) / 3.0);
    }
    let mut out = Vec::with_capacity(curves.len());
    for c in &curves {
        let mut path = Vec::with_capacity(s_grid.len());
        let e0 = c.edge(0);
        let z = (e0.0 / hypot(e0), e0.1 / hypot(e0));
        let iz = (-z.1, z.0);
        let p0 = c.0[0];
        let shift = (iz.0 + p0.0, iz.1 + p0.1);
        for s in &stage {
            path.push(c.map(|p| (p.0 - s * shift.0, p.1 - s * shift.1)));
        }
        let moved = path.last().unwrap().clone();
        let base = moved.0[0];
        let len = moved.length();
        for s in &stage[1..] {
            let f = (1.0 - s) + s * two_pi_n * r1 / len;
            path.push(moved.map(|p| (base.0 + f * (p.0 - base.0), base.1 + f * (p.1 - base.1))));
        }
        let small = path.last().unwrap().clone();
        let l = small.length();
        // cumulative edge angles relative to edge 0
        let mut theta = Vec::with_capacity(m);
        let mut acc = 0.0;
        theta.push(0.0);
        for i in 1..m {
            let a = small.edge(i - 1);
            let b = small.edge(i);
            acc += (a.0 * b.1 - a.1 * b.0).atan2(a.0 * b.0 + a.1 * b.1);
            theta.push(acc);
        }
        let start = small.0[0];
        for s in &stage[1..] {
            let tau: Vec<(f64, f64)> = (0..m)
                .map(|i| {
                    let th = (1.0 - s) * theta[i] + s * two_pi_n * i as f64 / m as f64;
                    let (sn, cs) = th.sin_cos();
                    (l * (z.0 * cs - z.1 * sn), l * (z.0 * sn + z.1 * cs))
                })
                .collect();
            let mean = tau.iter().fold((0.0, 0.0), |a, t| (a.0 + t.0 / m as f64, a.1 + t.1 / m as f64));
            let mut p = start;
            let mut pts = Vec::with_capacity(m);
            for t in &tau {
                pts.push(p);
                p = (p.0 + (t.0 - mean.0) / m as f64, p.1 + (t.1 - mean.1) / m as f64);
            }
            path.push(PlaneCurve(pts));
        }
        out.push(path);
    }
    let min_curvature = out
        .iter()
        .flatten()
        .map(|c| c.min_curvature())
        .fold(f64::INFINITY, f64::min);
    Ok(PlaneHomotopy {
        s_grid,
        curves: out,
        rotation_number: nn,
        radius: r1,
        min_curvature,
    })
}

// ---------------------------------------------------------------- exotic family

fn check_exotic_kappa(kappa1: f64) -> Result<(), HomotopyError> {
    check_bending_space(1, kappa1)?;
    if kappa1 > 3f64.sqrt() {
        return Err(HomotopyError::InvalidInput(format!("kappa1 = {kappa1} exceeds sqrt(3)")));
    }
    Ok(())
}

fn polar(p: &UnitVec3) -> (f64, f64) {
    let alpha = p.z().clamp(-1.0, 1.0).acos();
    let theta = p.y().atan2(p.x()).rem_euclid(2.0 * PI);
    (alpha, theta)
}

/// Constant-speed curve through `arcs` (equal parameter share each) started
/// at parameter u; intervals straddling a corner carry the mean curvature and
/// the result is closed to Φ(1) = I.
fn restarted_arcs(arcs: &[(f64, f64)], u: f64, n: usize) -> Result<CurveSamples, HomotopyError> {
    let m = arcs.len() as f64;
    let total: f64 = arcs.iter().map(|a| a.0).sum();
    // ∫ κ over arc-parameter [0, x], x ∈ [0, 2]
    let prefix = |x: f64| {
        let k = (x * m).floor() as usize;
        let whole: f64 = (0..k).map(|i| arcs[i % arcs.len()].1).sum::<f64>() / m;
        whole + arcs[k % arcs.len()].1 * (x - k as f64 / m)
    };
    let u = u.rem_euclid(1.0);
    let kappa: Vec<f64> = (0..n)
        .map(|j| {
            let a = u + j as f64 / n as f64;
            (prefix(a + 1.0 / n as f64) - prefix(a)) * n as f64
        })
        .collect();
    let c = CurveSamples::new(vec![total; n], kappa, Rotation::identity())?;
    Ok(close_frame(&c, &Rotation::identity())?)
}

fn exotic_g_at(alpha: f64, theta: f64, n: usize) -> Result<CurveSamples, HomotopyError> {
    restarted_arcs(&bending_arcs(1, alpha)?, 1.0 - theta / (4.0 * PI), n)
}

/// g(p): the bending of the 1-equator at α = polar angle of p, restarted
/// θ/4π earlier (θ = azimuth) and normalized to Φ(0) = I. Members of
/// L_{−κ₁}^{+κ₁}(I) for 1 < κ₁ ≤ √3.
pub fn exotic_sphere_family(kappa1: f64, p: &UnitVec3, n: usize) -> Result<CurveSamples, HomotopyError> {
    check_exotic_kappa(kappa1)?;
    let (alpha, theta) = polar(p);
    exotic_g_at(alpha, theta, n)
}

/// Half-width in polar angle of the collar joining the two halves of f.
pub const EXOTIC_COLLAR: f64 = 0.1;

/// f = g # ḡ with ḡ(q) = γ₂ ∗ g(r q): the upper cap carries g with its
/// boundary sent to −N, the lower cap carries ḡ with its boundary sent to N,
/// and a collar around the equator reparametrizes the equator traversed
/// three times between the two boundary curves.
pub fn exotic_f(kappa1: f64, p: &UnitVec3, n: usize) -> Result<CurveSamples, HomotopyError> {
    check_exotic_kappa(kappa1)?;
    let (alpha, theta) = polar(p);
    let lo = PI / 2.0 - EXOTIC_COLLAR;
    let hi = PI / 2.0 + EXOTIC_COLLAR;
    if alpha <= lo {
        return exotic_g_at((alpha * PI / lo).min(PI), theta, n);
    }
    if alpha >= hi {
        let a = ((alpha - hi) * PI / (PI - hi)).clamp(0.0, PI);
        // r: reflection across the yz-plane
        let g = exotic_g_at(a, (PI - theta).rem_euclid(2.0 * PI), n)?;
        let gamma2 = CurveSamples::constant(4.0 * PI, 0.0, g.n(), Rotation::identity())?;
        return Ok(gamma2.concat(&g)?);
    }
    let lam = (alpha - lo) / (hi - lo);
    let half = n.div_ceil(2).max(4);
    let mut segs = vec![((3.0 + lam) * PI / half as f64, 0.0); half];
    segs.extend(std::iter::repeat_n(((3.0 - lam) * PI / half as f64, 0.0), half));
    Ok(CurveSamples::from_segments(&segs, Rotation::identity())?)
}

// ---------------------------------------------------------------- paths

/// A discrete path s ↦ γ_s in a space of curves.
#[derive(Debug, Clone, PartialEq)]
pub struct HomotopyPath {
    pub space: SpaceSpec,
    pub s_grid: Vec<f64>,
    pub curves: Vec<CurveSamples>,
    /// step_metric[j]: sup distance between curves j and j+1.
    pub step_metric: Vec<f64>,
}

impl HomotopyPath {
    pub fn new(space: SpaceSpec, s_grid: Vec<f64>, curves: Vec<CurveSamples>) -> Result<Self, HomotopyError> {
        if s_grid.len() != curves.len() {
            return Err(HomotopyError::InvalidInput(format!(
                "{} parameters for {} curves",
                s_grid.len(),
                curves.len()
            )));
        }
        if s_grid.windows(2).any(|w| !(w[0] < w[1])) || s_grid.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(HomotopyError::InvalidInput("s grid must increase within [0, 1]".into()));
        }
        let framed: Vec<FramedCurve> = curves.iter().map(integrate_frames).collect();
        let step_metric = framed.windows(2).map(|w| step_distance(&w[0], &w[1])).collect();
        Ok(Self {
            space,
            s_grid,
            curves,
            step_metric,
        })
    }
}

/// sup over the union of both grids of max(position distance, frame distance).
pub fn step_distance(a: &FramedCurve, b: &FramedCurve) -> f64 {
    let mut ts: Vec<f64> = (0..=a.n()).map(|i| i as f64 / a.n() as f64).collect();
    ts.extend((0..=b.n()).map(|i| i as f64 / b.n() as f64));
    ts.iter()
        .map(|t| {
            let (fa, fb) = (a.frame_at(*t), b.frame_at(*t));
            spherical_distance(&fa.col(0), &fb.col(0)).max(fa.distance(&fb))
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathViolation {
    CurvatureMargin { index: usize, margin: f64 },
    Closure { index: usize, defect: f64 },
    Step { index: usize, metric: f64 },
    LiftedSign { index: usize },
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct HomotopyReport {
    pub pass: bool,
    pub members: Vec<MembershipReport>,
    pub step_metric: Vec<f64>,
    pub threshold: f64,
    pub min_margin: f64,
    pub max_abs_kappa: f64,
    pub lifted_sign_constant: bool,
    pub violations: Vec<PathViolation>,
}

impl HomotopyReport {
    pub fn has_curvature_violation(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, PathViolation::CurvatureMargin { .. }))
    }
}

/// Membership of every curve in `s`, step sizes below [`STEP_THRESHOLD`],
/// and a constant end lift relative to the start lift.
pub fn validate_homotopy(path: &HomotopyPath, s: &SpaceSpec) -> HomotopyReport {
    validate_with(path, s, DEFAULT_CLOSURE_TOL, STEP_THRESHOLD)
}

pub fn validate_with(path: &HomotopyPath, s: &SpaceSpec, closure_tol: f64, threshold: f64) -> HomotopyReport {
    let framed: Vec<FramedCurve> = path.curves.iter().map(integrate_frames).collect();
    let members: Vec<MembershipReport> = framed.iter().map(|f| membership_of_framed(f, s, closure_tol)).collect();
    let mut violations = Vec::new();
    for (index, m) in members.iter().enumerate() {
        if !(m.curvature_margin > 0.0) {
            violations.push(PathViolation::CurvatureMargin { index, margin: m.curvature_margin });
        }
        if !(m.closure_defect <= closure_tol) {
            violations.push(PathViolation::Closure { index, defect: m.closure_defect });
        }
    }
    for (index, d) in path.step_metric.iter().enumerate() {
        if !(*d < threshold) {
            violations.push(PathViolation::Step { index, metric: *d });
        }
    }
    let rel: Vec<UnitQuaternion> = framed.iter().map(|f| *f.last_lift() * f.lifts[0].conj()).collect();
    let mut lifted_sign_constant = true;
    for (index, w) in rel.windows(2).enumerate() {
        if w[1].distance(&w[0]) > w[1].distance(&-w[0]) {
            lifted_sign_constant = false;
            violations.push(PathViolation::LiftedSign { index: index + 1 });
        }
    }
    let max_abs_kappa = path
        .curves
        .iter()
        .flat_map(|c| c.kappa().iter().map(|k| k.abs()))
        .fold(0.0, f64::max);
    HomotopyReport {
        pass: violations.is_empty(),
        min_margin: members.iter().map(|m| m.curvature_margin).fold(f64::INFINITY, f64::min),
        members,
        step_metric: path.step_metric.clone(),
        threshold,
        max_abs_kappa,
        lifted_sign_constant,
        violations,
    }
}

/// Radius of curvature used for inserted loops in L_{κ₀}^{+∞}: halfway to ρ₀.
pub fn default_loop_radius(kappa0: f64) -> f64 {
    arccot(kappa0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::lifted_sign;
    use crate::convexity::fibonacci_direction;
    use crate::curve::{total_curvature, CurvatureBound};
    use crate::fixtures::{perturbed_circle, Mode};

    fn closure(c: &CurveSamples) -> f64 {
        integrate_frames(c).closure_defect(&Rotation::identity())
    }

    #[test]
    fn circles() {
        let c = make_circle(PI / 2.0, 1, 0.0, 64).unwrap();
        assert!(closure(&c) < 1e-13);
        let c2 = make_circle(0.7, 2, 0.0, 64).unwrap();
        assert_eq!(lifted_sign(&integrate_frames(&c2)).unwrap(), 1);
        assert!(make_circle(PI, 1, 0.0, 64).is_err());
        // start moved along the same circle
        let c3 = make_circle(0.7, 1, 1.0, 64).unwrap();
        let a = integrate_frames(&c3);
        assert!(a.closure_defect(&Rotation::identity()) < 1e-12);
        assert!((c3.q0().col(0) - Vec3::x()).norm() > 0.1);
    }

    #[test]
    fn circle_interpolation_is_a_valid_path() {
        let s = SpaceSpec::from_values(0.0, f64::INFINITY).unwrap();
        let grid = uniform_grid(32);
        let curves = circle_family(0.4, 1.3, 2, &grid, 128).unwrap();
        let path = HomotopyPath::new(s.clone(), grid, curves).unwrap();
        let r = validate_homotopy(&path, &s);
        assert!(r.pass, "{:?}", r.violations);
    }

    #[test]
    fn bending_endpoints_and_bound() {
        for k in 1..=3 {
            let e0 = bend_k_equator(k, 0.0, 256).unwrap();
            assert!(e0.kappa().iter().all(|x| *x == 0.0));
            assert!((e0.length() - 2.0 * PI * k as f64).abs() < 1e-12);
            let e1 = bend_k_equator(k, 1.0, 256).unwrap();
            assert!((e1.length() - 2.0 * PI * (k + 2) as f64).abs() < 1e-12);
            for s in [0.1, 0.37, 0.5, 0.8] {
                let c = bend_k_equator(k, s, 256).unwrap();
                assert!(closure(&c) < 1e-9, "k={k} s={s} defect {}", closure(&c));
                assert!(c.max_kappa() <= bending_bound(k) + 1e-12);
            }
            let mid = bend_k_equator(k, 0.5, 256).unwrap();
            assert!((mid.max_kappa() - bending_bound(k)).abs() < 1e-9);
        }
        let arcs = bending_arcs(1, PI / 2.0).unwrap();
        for (l, kap) in arcs {
            assert!((kap.abs() - 1.0).abs() < 1e-12);
            assert!(l > 0.0);
        }
    }

    #[test]
    fn bending_validates_iff_wide_enough() {
        let grid = uniform_grid(32);
        let fam = bending_family(1, &grid, 256).unwrap();
        let wide = SpaceSpec::symmetric(1.1).unwrap();
        let path = HomotopyPath::new(wide.clone(), grid.clone(), fam.clone()).unwrap();
        assert!(validate_homotopy(&path, &wide).pass);
        let narrow = SpaceSpec::symmetric(0.9).unwrap();
        let r = validate_homotopy(&path, &narrow);
        assert!(!r.pass && r.has_curvature_violation());
        assert!(check_bending_space(1, 0.9).is_err());
    }

    #[test]
    fn start_at_keeps_shape() {
        let c = perturbed_circle(0.8, 1, 64, &[Mode::new(2, 0.2, 0.0)]).unwrap();
        let d = start_at(&c, 0.3).unwrap();
        assert_eq!(d.n(), 65);
        assert!((d.length() - c.length()).abs() < 1e-12);
        assert!((total_curvature(&d) - total_curvature(&c)).abs() < 1e-12);
        assert!(closure(&d) < 1e-9);
    }

    #[test]
    fn loop_insertion() {
        let c = make_circle(0.9, 1, 0.0, 128).unwrap();
        assert_eq!(insert_loops_at(&c, 0.5, 0, 0.0, 0.3).unwrap(), c);
        for loops in 1..=3 {
            let d = insert_loops_at(&c, 0.4, loops, 0.05, 0.3).unwrap();
            let fd = integrate_frames(&d);
            assert!(fd.closure_defect(&Rotation::identity()) < 1e-9);
            let s0 = lifted_sign(&integrate_frames(&c)).unwrap();
            let s1 = lifted_sign(&fd).unwrap();
            assert_eq!(s1, s0 * if loops % 2 == 0 { 1 } else { -1 });
            let dt = total_curvature(&d) - total_curvature(&c);
            assert!((dt - 2.0 * PI * loops as f64).abs() < 1e-9);
        }
        assert!(matches!(
            insert_loops_at(&c, 0.05, 1, 0.05, 0.3),
            Err(HomotopyError::WindowOverflow { .. })
        ));
    }

    #[test]
    fn fn_converges_to_loop_curvature() {
        let c = perturbed_circle(1.0, 1, 64, &[Mode::new(2, 0.2, 0.3)]).unwrap();
        let rho1 = 0.4;
        let mut last = f64::INFINITY;
        for loops in [8usize, 16, 32] {
            let f = add_loops_fn(&c, loops, rho1, 16).unwrap();
            let fd = integrate_frames(&f);
            assert!(fd.closure_defect(&Rotation::identity()) < 1e-9);
            assert_eq!(
                lifted_sign(&fd).unwrap(),
                lifted_sign(&integrate_frames(&c)).unwrap() * if loops % 2 == 0 { 1 } else { -1 }
            );
            let dev = f.kappa().iter().map(|k| (k - cot(rho1)).abs()).fold(0.0, f64::max);
            assert!(dev < last, "loops {loops}: {dev} !< {last}");
            last = dev;
        }
        assert_eq!(add_loops_fn(&c, 0, rho1, 4).unwrap(), c);
    }

    fn diffuse_fixture() -> (CurveSamples, f64) {
        let c = perturbed_circle(0.3, 1, 128, &[Mode::new(2, 0.3, 0.1), Mode::new(3, 0.2, 0.7)]).unwrap();
        (c, 2.4)
    }

    #[test]
    fn antipodal_graft() {
        let (c, rho0) = diffuse_fixture();
        let p = find_antipodal_pair(&c, rho0).unwrap();
        assert!(p.defect < 1e-12);
        let same = graft_antipodal(&c, p.t1, p.t2, p.rho_a, p.rho_b, 0.0).unwrap();
        assert_eq!(same, c);
        for s in [1.0, 4.0 * PI] {
            let g = graft_antipodal(&c, p.t1, p.t2, p.rho_a, p.rho_b, s).unwrap();
            let fg = integrate_frames(&g);
            let fc = integrate_frames(&c);
            assert!(fg.closure_defect(&Rotation::identity()) < 1e-8);
            assert!(fg.last_lift().distance(fc.last_lift()) < 1e-8);
            assert!((total_curvature(&g) - total_curvature(&c) - 2.0 * s).abs() < 1e-8);
            assert!(g.min_kappa() > cot(rho0));
        }
        let err = graft_antipodal(&c, p.t1, p.t2, p.rho_a + 0.1, p.rho_b, 1.0);
        assert!(matches!(err, Err(HomotopyError::NotAntipodal { .. })));
    }

    fn tetra_setup(c: &CurveSamples) -> ([f64; 4], [f64; 4]) {
        let n = c.n() as f64;
        let r = 0.3;
        let far = r + (-1.0f64 / 3.0).acos();
        ([0.0, 16.0 / n, 32.0 / n, 64.0 / n], [far, r, far, far])
    }

    #[test]
    fn quadruple_graft_symmetric() {
        let c = make_circle(0.3, 1, 0.0, 96).unwrap();
        let (t, rho) = tetra_setup(&c);
        let g0 = graft_quadruple(&c, t, rho, 0.0).unwrap();
        assert_eq!(g0.curve, c);
        let g = graft_quadruple(&c, t, rho, 1e-3).unwrap();
        for w in g.weights {
            assert!((w - 0.25).abs() < 1e-9);
        }
        for s in g.sigma {
            assert!((s / 1e-3 - 0.25).abs() < 1e-3, "{:?}", g.sigma);
        }
    }

    #[test]
    fn quadruple_graft_generic() {
        let c = perturbed_circle(0.3, 1, 96, &[Mode::new(2, 0.2, 0.4), Mode::new(3, 0.1, 0.0)]).unwrap();
        let (t, rho) = tetra_setup(&c);
        let g = graft_quadruple(&c, t, rho, 0.1).unwrap();
        assert!(g.residual < 1e-10);
        assert!(g.sigma.iter().all(|x| *x >= 0.0));
        let fg = integrate_frames(&g.curve);
        let fc = integrate_frames(&c);
        assert!(fg.closure_defect(&Rotation::identity()) < 1e-8);
        assert!(fg.last_lift().distance(fc.last_lift()) < 1e-8);
        assert!((total_curvature(&g.curve) - total_curvature(&c) - 0.1).abs() < 1e-8);
        let bad = graft_quadruple(&c, t, [0.3, 0.3, 0.3, 0.3], 0.1);
        assert!(matches!(bad, Err(HomotopyError::Precondition(_))));
    }

    fn ellipse(a: f64, b: f64, turns: usize, m: usize) -> PlaneCurve {
        PlaneCurve(
            (0..m)
                .map(|i| {
                    let t = 2.0 * PI * turns as f64 * i as f64 / m as f64;
                    (a * t.cos() + 3.0, b * t.sin() - 1.0)
                })
                .collect(),
        )
    }

    #[test]
    fn plane_normalization() {
        let fam = vec![ellipse(1.2, 1.0, 1, 400), ellipse(1.0, 1.0, 1, 400)];
        let h = whitney_graustein_normalize(&fam, 0.5, 8, 400).unwrap();
        assert_eq!(h.rotation_number, 1);
        assert!(h.min_curvature >= 0.5, "{}", h.min_curvature);
        for path in &h.curves {
            let end = path.last().unwrap();
            let k = end.discrete_curvature();
            assert!(k.iter().all(|x| (x - 1.0 / h.radius).abs() < 1e-6));
        }
        let mixed = vec![ellipse(1.2, 1.0, 1, 400), ellipse(1.0, 1.0, 2, 400)];
        assert!(matches!(
            whitney_graustein_normalize(&mixed, 0.5, 8, 400),
            Err(HomotopyError::InvalidFamily(_))
        ));
    }

    #[test]
    fn plane_normalization_of_circle_is_circle() {
        let fam = vec![ellipse(1.0, 1.0, 2, 256)];
        let h = whitney_graustein_normalize(&fam, 0.0, 4, 256).unwrap();
        assert_eq!(h.rotation_number, 2);
        for c in &h.curves[0] {
            let k = c.discrete_curvature();
            let k0 = k[0];
            assert!(k.iter().all(|x| (x - k0).abs() < 1e-6 * k0.abs().max(1.0)));
        }
    }

    #[test]
    fn exotic_family() {
        let kappa1 = 1.2;
        let s = SpaceSpec::symmetric(kappa1).unwrap();
        let north = UnitVec3::e3();
        let g = exotic_sphere_family(kappa1, &north, 128).unwrap();
        assert!(g.kappa().iter().all(|k| *k == 0.0));
        assert!((g.length() - 2.0 * PI).abs() < 1e-12);
        let gs = exotic_sphere_family(kappa1, &-north, 128).unwrap();
        assert!((gs.length() - 6.0 * PI).abs() < 1e-12);
        for i in 0..100 {
            let p = UnitVec3::normalize(fibonacci_direction(i, 100)).unwrap();
            for c in [exotic_sphere_family(kappa1, &p, 128).unwrap(), exotic_f(kappa1, &p, 128).unwrap()] {
                let r = membership_of_framed(&integrate_frames(&c), &s, 1e-9);
                assert!(r.member && r.curvature_margin > 0.0, "{p}: {r:?}");
            }
        }
        assert!(matches!(exotic_sphere_family(1.0, &north, 64), Err(HomotopyError::Obstruction { .. })));
        assert!(exotic_sphere_family(1.8, &north, 64).is_err());
    }

    #[test]
    fn exotic_f_is_continuous_across_seams() {
        let kappa1 = 1.5;
        let at = |alpha: f64, theta: f64| {
            let p = UnitVec3::new(theta.cos() * alpha.sin(), theta.sin() * alpha.sin(), alpha.cos()).unwrap();
            integrate_frames(&exotic_f(kappa1, &p, 256).unwrap())
        };
        let lo = PI / 2.0 - EXOTIC_COLLAR;
        let hi = PI / 2.0 + EXOTIC_COLLAR;
        for theta in [0.3, 2.0, 5.0] {
            assert!(step_distance(&at(lo - 1e-9, theta), &at(lo + 1e-9, theta)) < 1e-6);
            assert!(step_distance(&at(hi - 1e-9, theta), &at(hi + 1e-9, theta)) < 1e-6);
        }
        // g is single-valued across the seam θ = 0 ≡ 2π
        let g0 = integrate_frames(&exotic_sphere_family(kappa1, &UnitVec3::new(0.6, 1e-12, 0.8).unwrap(), 256).unwrap());
        let g1 = integrate_frames(&exotic_sphere_family(kappa1, &UnitVec3::new(0.6, -1e-12, 0.8).unwrap(), 256).unwrap());
        assert!(step_distance(&g0, &g1) < 1e-6);
    }

    #[test]
    fn validate_constant_path() {
        let s = SpaceSpec::from_values(0.0, f64::INFINITY).unwrap();
        let c = make_circle(1.0, 1, 0.0, 64).unwrap();
        let path = HomotopyPath::new(s.clone(), vec![0.0, 1.0], vec![c.clone(), c]).unwrap();
        let r = validate_homotopy(&path, &s);
        assert!(r.pass && r.step_metric[0] == 0.0);
        let bad = HomotopyPath::new(
            s.clone(),
            vec![0.0, 1.0],
            vec![make_circle(1.0, 1, 0.0, 64).unwrap(), make_circle(1.0, 2, 0.0, 64).unwrap()],
        )
        .unwrap();
        let r = validate_homotopy(&bad, &s);
        assert!(!r.pass);
        let _ = CurvatureBound::POS_INF;
    }
}
