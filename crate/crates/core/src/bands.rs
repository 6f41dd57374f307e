//! Regular and caustic bands B(t, θ) = cos θ·γ(t) + sin θ·n(t), the caustic,
//! the check curve, and band diagnostics (self-intersections, crossing
//! intervals, crossing lengths).

use crate::curve::{
    arccot, integrate_frames, membership_of_framed, CurvatureBound, CurveError, CurveSamples,
    FramedCurve, SpaceSpec, DEFAULT_CLOSURE_TOL,
};
use crate::geom3::{rotation_about_second_axis, Rotation, UnitVec3, Vec3};
use nalgebra::Matrix3;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BandError {
    #[error("curve is not a member of the space (closure defect {closure_defect:e}, curvature margin {curvature_margin:e})")]
    NotMember {
        closure_defect: f64,
        curvature_margin: f64,
    },
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("radius of curvature {rho} at interval {index} is not below {rho0}")]
    NotStrictlyInside { index: usize, rho: f64, rho0: f64 },
    #[error("grid too coarse: cell diameter {cell:e} exceeds 3·tol = {:e}", 3.0 * tol)]
    Resolution { cell: f64, tol: f64 },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// Default number of θ intervals.
pub const DEFAULT_M: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandKind {
    Regular,
    Caustic,
    /// Regular band over two periods in t.
    Extended,
}

/// Band values on a (t, θ) grid; `points[i][j]` is B(t_grid[i], theta_grid[j]).
#[derive(Debug, Clone, PartialEq)]
pub struct BandGrid {
    pub kind: BandKind,
    pub t_grid: Vec<f64>,
    pub theta_grid: Vec<f64>,
    pub points: Vec<Vec<UnitVec3>>,
    /// Index j with theta_grid[j] = 0.
    pub zero_row: usize,
}

impl BandGrid {
    pub fn n(&self) -> usize {
        self.t_grid.len() - 1
    }
    pub fn m(&self) -> usize {
        self.theta_grid.len() - 1
    }
    /// Row j as a polyline in t.
    pub fn row(&self, j: usize) -> Vec<UnitVec3> {
        self.points.iter().map(|col| col[j]).collect()
    }
    pub fn all_points(&self) -> Vec<Vec3> {
        self.points.iter().flatten().map(|p| p.vec()).collect()
    }
    /// Largest Euclidean distance between grid neighbours.
    pub fn max_cell_diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.points.len() {
            for j in 0..self.points[i].len() {
                let p = self.points[i][j].vec();
                if i + 1 < self.points.len() {
                    d = d.max((self.points[i + 1][j].vec() - p).norm());
                }
                if j + 1 < self.points[i].len() {
                    d = d.max((self.points[i][j + 1].vec() - p).norm());
                }
            }
        }
        d
    }
}

/// θ grid over [a, b] with m intervals and θ = 0 as a node (a ≤ 0 ≤ b).
pub fn theta_grid(a: f64, b: f64, m: usize) -> (Vec<f64>, usize) {
    let m = m.max(2);
    let mut neg = ((m as f64) * (-a) / (b - a)).round() as usize;
    if a < 0.0 {
        neg = neg.max(1);
    }
    if b > 0.0 {
        neg = neg.min(m - 1);
    }
    let pos = m - neg;
    let mut g = Vec::with_capacity(m + 1);
    for j in 0..neg {
        g.push(a * (1.0 - j as f64 / neg as f64));
    }
    for j in 0..=pos {
        g.push(b * j as f64 / pos as f64);
    }
    (g, neg)
}

/// (cos θ, 0, sin θ): B = Φ·this.
fn band_direction(theta: f64) -> Vec3 {
    Vec3::new(theta.cos(), 0.0, theta.sin())
}

/// Exact B(t, θ) from a framed curve.
pub fn band_point(fc: &FramedCurve, t: f64, theta: f64) -> UnitVec3 {
    UnitVec3::normalize(fc.frame_at(t).apply(&band_direction(theta))).expect("unit")
}

fn build_grid(fc: &FramedCurve, kind: BandKind, thetas: Vec<f64>, zero_row: usize, periods: usize) -> BandGrid {
    let n = fc.n();
    let mut t_grid = Vec::with_capacity(periods * n + 1);
    let mut points = Vec::with_capacity(periods * n + 1);
    let dirs: Vec<Vec3> = thetas.iter().map(|th| band_direction(*th)).collect();
    for p in 0..periods {
        for i in 0..n {
            t_grid.push(p as f64 + i as f64 / n as f64);
            points.push(column(&fc.frames[i], &dirs));
        }
    }
    t_grid.push(periods as f64);
    points.push(column(&fc.frames[n], &dirs));
    BandGrid {
        kind,
        t_grid,
        theta_grid: thetas,
        points,
        zero_row,
    }
}

fn column(f: &Rotation, dirs: &[Vec3]) -> Vec<UnitVec3> {
    dirs.iter()
        .map(|d| UnitVec3::normalize(f.apply(d)).expect("unit"))
        .collect()
}

fn require_member(fc: &FramedCurve, s: &SpaceSpec) -> Result<(), BandError> {
    let r = membership_of_framed(fc, s, DEFAULT_CLOSURE_TOL);
    if r.member {
        Ok(())
    } else {
        Err(BandError::NotMember {
            closure_defect: r.closure_defect,
            curvature_margin: r.curvature_margin,
        })
    }
}

/// Regular band over θ ∈ [ρ₁ − π, ρ₂].
pub fn regular_band(fc: &FramedCurve, s: &SpaceSpec, m: usize) -> Result<BandGrid, BandError> {
    require_member(fc, s)?;
    let (g, z) = theta_grid(s.rho1() - PI, s.rho2(), m);
    Ok(build_grid(fc, BandKind::Regular, g, z, 1))
}

/// Regular band tiled over t ∈ [0, 2].
pub fn extended_band(fc: &FramedCurve, s: &SpaceSpec, m: usize) -> Result<BandGrid, BandError> {
    require_member(fc, s)?;
    let (g, z) = theta_grid(s.rho1() - PI, s.rho2(), m);
    Ok(build_grid(fc, BandKind::Extended, g, z, 2))
}

/// Centers of the osculating circles, one per interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Caustic {
    pub points: Vec<UnitVec3>,
}

fn check_kappa0(kappa0: CurvatureBound) -> Result<f64, BandError> {
    let rho0 = kappa0.rho();
    if !(kappa0.is_finite() && rho0 > 0.0 && rho0 < PI) {
        return Err(BandError::InvalidSpace(format!(
            "caustic band needs a finite kappa0, got {kappa0}"
        )));
    }
    Ok(rho0)
}

/// Caustic χ = cos ρ·γ + sin ρ·n, constant on each interval.
pub fn caustic(fc: &FramedCurve) -> Caustic {
    let points = (0..fc.n())
        .map(|i| {
            let rho = arccot(fc.base.kappa()[i]);
            UnitVec3::normalize(fc.frames[i].apply(&band_direction(rho))).expect("unit")
        })
        .collect();
    Caustic { points }
}

/// Caustic band over θ ∈ [0, ρ₀] and the caustic.
pub fn caustic_band_and_caustic(
    fc: &FramedCurve,
    kappa0: CurvatureBound,
    m: usize,
) -> Result<(BandGrid, Caustic), BandError> {
    let rho0 = check_kappa0(kappa0)?;
    let margin = fc.base.min_kappa() - kappa0.value();
    if !(margin > 0.0) {
        return Err(BandError::NotMember {
            closure_defect: 0.0,
            curvature_margin: margin,
        });
    }
    let g: Vec<f64> = (0..=m.max(1)).map(|j| rho0 * j as f64 / m.max(1) as f64).collect();
    Ok((build_grid(fc, BandKind::Caustic, g, 0, 1), caustic(fc)))
}

/// γ̌ = C(·, ρ₀): speed v·sin(ρ₀ − ρ)/sin ρ, curvature cot(ρ₀ − ρ).
pub fn check_curve(fc: &FramedCurve, kappa0: CurvatureBound) -> Result<CurveSamples, BandError> {
    let rho0 = check_kappa0(kappa0)?;
    let c = &fc.base;
    let mut v = Vec::with_capacity(c.n());
    let mut kappa = Vec::with_capacity(c.n());
    for (i, (vi, ki)) in c.v().iter().zip(c.kappa()).enumerate() {
        let rho = arccot(*ki);
        if rho >= rho0 {
            return Err(BandError::NotStrictlyInside { index: i, rho, rho0 });
        }
        let d = rho0 - rho;
        v.push(vi * d.sin() / rho.sin());
        kappa.push(d.cos() / d.sin());
    }
    // tangent reverses: Φ̌ = Φ·R_{ρ₀}·diag(1, −1, −1)
    let flip = Rotation::new(Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))).expect("rotation");
    let q0 = &(c.q0() * &rotation_about_second_axis(rho0)) * &flip;
    Ok(CurveSamples::new(v, kappa, q0)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandSimplicity {
    Simple,
    QuasiSimple,
    Neither,
}

/// Two grid nodes with distinct parameters at distance < tol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandIntersection {
    pub i1: usize,
    pub j1: usize,
    pub i2: usize,
    pub j2: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfIntersectionReport {
    pub class: BandSimplicity,
    pub intersections: Vec<BandIntersection>,
}

/// Default self-intersection tolerance 3·(max speed)/n.
pub fn default_intersection_tol(c: &CurveSamples) -> f64 {
    3.0 * c.v().iter().copied().fold(0.0, f64::max) / c.n() as f64
}

/// Spatial-hash scan for near coincidences between distinct parameters.
pub fn band_self_intersections(b: &BandGrid, tol: f64) -> Result<SelfIntersectionReport, BandError> {
    let cell = b.max_cell_diameter();
    if cell > 3.0 * tol {
        return Err(BandError::Resolution { cell, tol });
    }
    // one period of columns, excluding the closing duplicate
    let period = match b.kind {
        BandKind::Extended => b.n() / 2,
        _ => b.n(),
    };
    let m = b.m();
    // arclength prefix along each row for the neighbour exclusion
    let prefix: Vec<Vec<f64>> = (0..=m)
        .map(|j| {
            let mut acc = vec![0.0; period + 1];
            for i in 0..period {
                acc[i + 1] = acc[i] + b.points[i][j].distance(&b.points[i + 1][j]);
            }
            acc
        })
        .collect();
    let row_gap = |j: usize, i1: usize, i2: usize| {
        let (a, c) = (i1.min(i2), i1.max(i2));
        let inner = prefix[j][c] - prefix[j][a];
        inner.min(prefix[j][period] - inner)
    };
    let key = |p: &Vec3| {
        (
            (p.x / tol).floor() as i64,
            (p.y / tol).floor() as i64,
            (p.z / tol).floor() as i64,
        )
    };
    let mut hash: HashMap<(i64, i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for i in 0..period {
        for j in 0..=m {
            hash.entry(key(&b.points[i][j].vec())).or_default().push((i, j));
        }
    }
    let mut out = Vec::new();
    for i in 0..period {
        for j in 0..=m {
            let p = b.points[i][j].vec();
            let (kx, ky, kz) = key(&p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        let Some(list) = hash.get(&(kx + dx, ky + dy, kz + dz)) else {
                            continue;
                        };
                        for &(i2, j2) in list {
                            if i2 <= i {
                                continue;
                            }
                            let d = (b.points[i2][j2].vec() - p).norm();
                            if d >= tol {
                                continue;
                            }
                            if row_gap(j, i, i2) <= 3.0 * tol || row_gap(j2, i, i2) <= 3.0 * tol {
                                continue;
                            }
                            out.push(BandIntersection {
                                i1: i,
                                j1: j,
                                i2,
                                j2,
                                distance: d,
                            });
                        }
                    }
                }
            }
        }
    }
    let boundary = |j: usize| j == 0 || j == m;
    let class = if out.is_empty() {
        BandSimplicity::Simple
    } else if out.iter().any(|x| !boundary(x.j1) && !boundary(x.j2)) {
        BandSimplicity::Neither
    } else {
        BandSimplicity::QuasiSimple
    };
    Ok(SelfIntersectionReport {
        class,
        intersections: out,
    })
}

/// A minimal parameter interval over which the band passes between the two
/// closed disks bounded by a great circle. `tau2` may exceed 1 across the seam.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CrossingInterval {
    pub tau1: f64,
    pub tau2: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Plus,
    Minus,
    Both,
    Straddle,
}

/// Crossing intervals of a band with respect to the great circle ⟨x, h⟩ = 0.
pub fn crossing_intervals(b: &BandGrid, normal: &UnitVec3) -> Vec<CrossingInterval> {
    const TOL: f64 = 1e-9;
    let h = normal.vec();
    let period = match b.kind {
        BandKind::Extended => b.n() / 2,
        _ => b.n(),
    };
    let span = b.t_grid[period] - b.t_grid[0];
    let sides: Vec<Side> = (0..period)
        .map(|i| {
            let (lo, hi) = b.points[i]
                .iter()
                .map(|p| p.vec().dot(&h))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, c), x| (a.min(x), c.max(x)));
            match (lo >= -TOL, hi <= TOL) {
                (true, true) => Side::Both,
                (true, false) => Side::Plus,
                (false, true) => Side::Minus,
                (false, false) => Side::Straddle,
            }
        })
        .collect();
    let anchors: Vec<usize> = (0..period).filter(|&i| sides[i] != Side::Straddle).collect();
    let mut out = Vec::new();
    for (k, &a) in anchors.iter().enumerate() {
        if sides[a] == Side::Both {
            out.push(CrossingInterval {
                tau1: b.t_grid[a],
                tau2: b.t_grid[a],
                degenerate: true,
            });
            continue;
        }
        let next = anchors[(k + 1) % anchors.len()];
        let opposite = matches!(
            (sides[a], sides[next]),
            (Side::Plus, Side::Minus) | (Side::Minus, Side::Plus)
        );
        if opposite {
            let mut tau2 = b.t_grid[next];
            if next <= a {
                tau2 += span;
            }
            out.push(CrossingInterval {
                tau1: b.t_grid[a],
                tau2,
                degenerate: false,
            });
        }
    }
    out.sort_by(|x, y| x.tau1.partial_cmp(&y.tau1).unwrap());
    out
}

fn distance_to_polyline(p: &Vec3, line: &[UnitVec3]) -> f64 {
    line.windows(2)
        .map(|w| {
            let a = w[0].vec();
            let ab = w[1].vec() - a;
            let l2 = ab.norm_squared();
            let t = if l2 > 0.0 { ((p - a).dot(&ab) / l2).clamp(0.0, 1.0) } else { 0.0 };
            (a + ab * t - p).norm()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Spherical length of a path joining the two boundary rows of the band.
pub fn min_crossing_length(b: &BandGrid, path: &[UnitVec3], tol: f64) -> Result<f64, BandError> {
    if path.len() < 2 {
        return Err(BandError::InvalidPath("path needs at least two points".into()));
    }
    let lower = b.row(0);
    let upper = b.row(b.m());
    let start = path[0].vec();
    let end = path[path.len() - 1].vec();
    let on = |p: &Vec3, line: &[UnitVec3]| distance_to_polyline(p, line) <= tol;
    let forward = on(&start, &lower) && on(&end, &upper);
    let backward = on(&start, &upper) && on(&end, &lower);
    if !(forward || backward) {
        return Err(BandError::InvalidPath(
            "endpoints must lie on the two distinct boundary curves".into(),
        ));
    }
    Ok(path.windows(2).map(|w| w[0].distance(&w[1])).sum())
}

/// θ ↦ B(t₀, θ) across the full band, with `samples` points.
pub fn meridian_path(fc: &FramedCurve, s: &SpaceSpec, t0: f64, samples: usize) -> Vec<UnitVec3> {
    let (a, c) = (s.rho1() - PI, s.rho2());
    (0..samples)
        .map(|k| band_point(fc, t0, a + (c - a) * k as f64 / (samples - 1) as f64))
        .collect()
}

/// Convenience: frames then regular band.
pub fn regular_band_of(c: &CurveSamples, s: &SpaceSpec, m: usize) -> Result<BandGrid, BandError> {
    regular_band(&integrate_frames(c), s, m)
}
