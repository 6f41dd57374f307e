//! Condensed/diffuse detection, rotation numbers, the lifted sign, component
//! counts and component classification.

use crate::bands::{band_point, caustic_band_and_caustic, BandError, BandGrid};
use crate::convexity::{
    hemisphere_set_barycenter, locate_origin, ConvexityError, OriginTag, PointCloud3,
    DEFAULT_BOUNDARY_TOL, DEFAULT_GRID_DIRS,
};
use crate::curve::{
    integrate_frames, membership_of_framed, total_curvature, translate_curve, translate_space,
    CurvatureBound, CurveError, CurveSamples, FramedCurve, SpaceSpec, DEFAULT_CLOSURE_TOL,
};
use crate::geom3::{stereographic, Geom3Error, UnitVec3, Vec3};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("curve is not a member of the space (closure defect {closure_defect:e}, curvature margin {curvature_margin:e})")]
    NotMember {
        closure_defect: f64,
        curvature_margin: f64,
    },
    #[error("condensed/diffuse tests are undefined for kappa0 = -inf")]
    UndefinedForSpace,
    #[error("resolution too coarse: {0}")]
    Resolution(String),
    #[error("rotation number undefined: curve is neither condensed nor non-diffuse")]
    Unclassifiable,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("internal inconsistency: {0}")]
    Anomaly(String),
    #[error(transparent)]
    Band(#[from] BandError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
    #[error(transparent)]
    Geometry(#[from] Geom3Error),
}

/// Witness margins below this count as boundary-condensed.
pub const BOUNDARY_CONDENSED_MARGIN: f64 = 1e-6;

/// Tunable resolution for the classification pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// θ intervals of the caustic band.
    pub m: usize,
    /// Size of the hemisphere direction lattice.
    pub grid_dirs: usize,
    pub closure_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            m: 64,
            grid_dirs: DEFAULT_GRID_DIRS,
            closure_tol: DEFAULT_CLOSURE_TOL,
        }
    }
}

impl ClassifyOptions {
    /// Defaults, with CURVEBOUND_GRID_DIRS overriding the lattice size.
    pub fn from_env() -> Self {
        let mut o = Self::default();
        if let Some(n) = std::env::var("CURVEBOUND_GRID_DIRS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|n| *n > 0)
        {
            o.grid_dirs = n;
        }
        o
    }
}

/// Number of components ⌊π/(ρ₁ − ρ₂)⌋ + 1.
pub fn component_count(s: &SpaceSpec) -> usize {
    let x = PI / s.width();
    let r = x.round();
    let fl = if (x - r).abs() < 1e-12 { r } else { x.floor() };
    fl as usize + 1
}

/// A curve translated into L_{κ₀}^{+∞}.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub curve: CurveSamples,
    pub space: SpaceSpec,
    /// Translation angle applied (ρ₂, or 0).
    pub theta: f64,
}

impl Reduction {
    pub fn kappa0(&self) -> CurvatureBound {
        self.space.kappa1
    }
    pub fn is_full_space(&self) -> bool {
        self.kappa0().value() == f64::NEG_INFINITY
    }
}

fn require_member(fc: &FramedCurve, s: &SpaceSpec, tol: f64) -> Result<(), ClassifyError> {
    let r = membership_of_framed(fc, s, tol);
    if r.member {
        Ok(())
    } else {
        Err(ClassifyError::NotMember {
            closure_defect: r.closure_defect,
            curvature_margin: r.curvature_margin,
        })
    }
}

/// Translation by ρ₂ into L_{κ₀}^{+∞} with κ₀ = cot(ρ₁ − ρ₂).
pub fn reduce_space(c: &CurveSamples, s: &SpaceSpec) -> Result<Reduction, ClassifyError> {
    require_member(&integrate_frames(c), s, DEFAULT_CLOSURE_TOL)?;
    reduce_unchecked(c, s)
}

fn reduce_unchecked(c: &CurveSamples, s: &SpaceSpec) -> Result<Reduction, ClassifyError> {
    if s.kappa2 == CurvatureBound::POS_INF {
        return Ok(Reduction {
            curve: c.clone(),
            space: s.clone(),
            theta: 0.0,
        });
    }
    let theta = s.rho2();
    let mut space = translate_space(s, theta)?;
    space.kappa2 = CurvatureBound::POS_INF;
    Ok(Reduction {
        curve: translate_curve(c, theta)?,
        space,
        theta,
    })
}

fn caustic_cloud(fc: &FramedCurve, kappa0: CurvatureBound, m: usize) -> Result<BandGrid, ClassifyError> {
    if !kappa0.is_finite() {
        return Err(ClassifyError::UndefinedForSpace);
    }
    Ok(caustic_band_and_caustic(fc, kappa0, m)?.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CondensedReport {
    pub condensed: bool,
    /// Condensed, but only up to a witness margin below [`BOUNDARY_CONDENSED_MARGIN`].
    pub boundary_condensed: bool,
    pub witness: Option<UnitVec3>,
    /// Signed distance from 0 to the hull of the band's boundary rows.
    pub margin: f64,
}

pub fn is_condensed(c: &CurveSamples, kappa0: CurvatureBound, m: usize) -> Result<CondensedReport, ClassifyError> {
    let band = caustic_cloud(&integrate_frames(c), kappa0, m)?;
    condensed_of_band(&band)
}

/// Points spanning the same cone as the band: each θ-segment is a great-circle
/// arc shorter than π, so its two boundary rows suffice.
fn cone_generators(band: &BandGrid) -> Vec<Vec3> {
    let span = band.theta_grid[band.m()] - band.theta_grid[0];
    if span < PI - 1e-9 {
        let mut pts: Vec<Vec3> = band.row(0).iter().map(|p| p.vec()).collect();
        pts.extend(band.row(band.m()).iter().map(|p| p.vec()));
        pts
    } else {
        band.all_points()
    }
}

fn condensed_of_band(band: &BandGrid) -> Result<CondensedReport, ClassifyError> {
    let cloud = PointCloud3::new(cone_generators(band))?;
    let loc = locate_origin(&cloud, DEFAULT_BOUNDARY_TOL);
    let condensed = loc.tag != OriginTag::Interior;
    Ok(CondensedReport {
        condensed,
        boundary_condensed: condensed && loc.margin < BOUNDARY_CONDENSED_MARGIN,
        witness: loc.direction(),
        margin: loc.margin,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffuseReport {
    pub diffuse: bool,
    /// Grid indices ((i, j), (k, l)) of the closest near-antipodal pair found.
    pub witness: Option<((usize, usize), (usize, usize))>,
    /// min |C(tᵢ,θⱼ) + C(t_k,θ_l)| among pairs within the search radius.
    pub min_distance: f64,
    pub tol: f64,
}

pub fn is_diffuse(c: &CurveSamples, kappa0: CurvatureBound, m: usize) -> Result<DiffuseReport, ClassifyError> {
    let band = caustic_cloud(&integrate_frames(c), kappa0, m)?;
    Ok(diffuse_of_band(&band, band.max_cell_diameter()))
}

/// Near-antipodal pair search by spatial hashing with cell size `tol`.
pub fn diffuse_of_band(band: &BandGrid, tol: f64) -> DiffuseReport {
    let n = band.n();
    let key = |p: &Vec3| {
        (
            (p.x / tol).floor() as i64,
            (p.y / tol).floor() as i64,
            (p.z / tol).floor() as i64,
        )
    };
    let mut hash: HashMap<(i64, i64, i64), Vec<(usize, usize)>> = HashMap::new();
    for i in 0..n {
        for (j, p) in band.points[i].iter().enumerate() {
            hash.entry(key(&p.vec())).or_default().push((i, j));
        }
    }
    let mut best = f64::INFINITY;
    let mut witness = None;
    for i in 0..n {
        for (j, p) in band.points[i].iter().enumerate() {
            let q = -p.vec();
            let (kx, ky, kz) = key(&q);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    for dz in -1..=1 {
                        if let Some(list) = hash.get(&(kx + dx, ky + dy, kz + dz)) {
                            for &(k, l) in list {
                                let d = (band.points[k][l].vec() - q).norm();
                                if d < best {
                                    best = d;
                                    witness = Some(((i, j), (k, l)));
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    DiffuseReport {
        diffuse: best <= tol,
        witness: if best <= tol { witness } else { None },
        min_distance: best,
        tol,
    }
}

/// Tangent winding of a closed plane polygon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaneRotation {
    pub number: i64,
    /// |total turning/2π − number|.
    pub defect: f64,
}

pub fn plane_rotation_number(points: &[(f64, f64)]) -> Result<PlaneRotation, ClassifyError> {
    let n = points.len();
    if n < 3 {
        return Err(ClassifyError::Resolution("need at least 3 points".into()));
    }
    let edge = |i: usize| {
        let a = points[i];
        let b = points[(i + 1) % n];
        (b.0 - a.0, b.1 - a.1)
    };
    let mut total = 0.0;
    for i in 0..n {
        let (ax, ay) = edge(i);
        let (bx, by) = edge((i + 1) % n);
        let turn = (ax * by - ay * bx).atan2(ax * bx + ay * by);
        if turn.abs() >= PI / 2.0 {
            return Err(ClassifyError::Resolution(format!(
                "tangent turns by {turn:.3} rad at vertex {}",
                (i + 1) % n
            )));
        }
        total += turn;
    }
    let x = total / (2.0 * PI);
    Ok(PlaneRotation {
        number: x.round() as i64,
        defect: (x - x.round()).abs(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuMode {
    Auto,
    Condensed,
    NonDiffuse,
}

/// Rotation number with the per-mode values that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationNumberReport {
    pub nu: i64,
    pub condensed_nu: Option<i64>,
    pub sheet_nu: Option<i64>,
    pub h_gamma: Option<UnitVec3>,
    pub annulus_point: Option<UnitVec3>,
}

/// h_γ: barycenter of closed hemispheres containing the caustic band.
pub fn barycenter_of_band(band: &BandGrid, grid_dirs: usize) -> Result<UnitVec3, ClassifyError> {
    Ok(hemisphere_set_barycenter(
        &PointCloud3::new(cone_generators(band))?,
        true,
        grid_dirs,
    )?)
}

/// ν = −(winding of the stereographic image from −h).
pub fn condensed_rotation_number(fc: &FramedCurve, h: &UnitVec3) -> Result<i64, ClassifyError> {
    let pts: Vec<(f64, f64)> = fc.frames[..fc.n()]
        .iter()
        .map(|f| stereographic(&f.position(), h))
        .collect::<Result<_, _>>()?;
    Ok(-plane_rotation_number(&pts)?.number)
}

/// Whether q lies on the caustic band: q is on the great circle spanned by
/// γ(t), n(t) exactly when ⟨q, t(t)⟩ = 0, at angle θ from γ(t).
pub fn caustic_band_contains(fc: &FramedCurve, rho0: f64, q: &Vec3) -> bool {
    let n = fc.n();
    (0..n).any(|i| {
        let (f0, f1) = (&fc.frames[i], &fc.frames[i + 1]);
        let (a, b) = (q.dot(&f0.col(1)), q.dot(&f1.col(1)));
        if a != 0.0 && (a > 0.0) == (b > 0.0) {
            return false;
        }
        let s = if a == b { 0.0 } else { a / (a - b) };
        let g = f0.col(0) * (1.0 - s) + f1.col(0) * s;
        let nn = f0.col(2) * (1.0 - s) + f1.col(2) * s;
        let theta = q.dot(&nn).atan2(q.dot(&g));
        (0.0..=rho0).contains(&theta)
    })
}

/// A point of the annulus between the caustic band C and −C on the great
/// circle through γ(0) and n(0).
pub fn annulus_point(fc: &FramedCurve, rho0: f64) -> Result<UnitVec3, ClassifyError> {
    const K: usize = 2000;
    // θ from ρ₀ − π (on −C) up to 0 (on C)
    let lo = rho0 - PI;
    let samples: Vec<Vec3> = (0..=K).map(|k| band_point(fc, 0.0, lo * (1.0 - k as f64 / K as f64)).vec()).collect();
    let in_c: Vec<bool> = samples.iter().map(|p| caustic_band_contains(fc, rho0, p)).collect();
    let first_c = in_c.iter().position(|x| *x).unwrap_or(K);
    let last_d = (0..first_c).rev().find(|&k| caustic_band_contains(fc, rho0, &-samples[k]));
    let gap_lo = last_d.map_or(0, |k| k + 1);
    if gap_lo >= first_c {
        return Err(ClassifyError::NotApplicable(
            "no point separates the caustic band from its antipode".into(),
        ));
    }
    Ok(UnitVec3::normalize(samples[(gap_lo + first_c - 1) / 2])?)
}

/// Half the number of strict sign changes of ⟨t, b⟩ around the curve.
pub fn sheet_rotation_number(fc: &FramedCurve, b: &UnitVec3) -> i64 {
    let vals: Vec<f64> = fc.frames[..fc.n()]
        .iter()
        .map(|f| f.col(1).dot(&b.vec()))
        .filter(|x| x.abs() > 1e-12)
        .collect();
    if vals.is_empty() {
        return 0;
    }
    let changes = (0..vals.len())
        .filter(|&i| (vals[i] > 0.0) != (vals[(i + 1) % vals.len()] > 0.0))
        .count();
    (changes / 2) as i64
}

pub fn rotation_number(
    c: &CurveSamples,
    kappa0: CurvatureBound,
    mode: NuMode,
    opts: &ClassifyOptions,
) -> Result<RotationNumberReport, ClassifyError> {
    let fc = integrate_frames(c);
    let band = caustic_cloud(&fc, kappa0, opts.m)?;
    rotation_number_of(&fc, &band, kappa0, mode, opts)
}

fn rotation_number_of(
    fc: &FramedCurve,
    band: &BandGrid,
    kappa0: CurvatureBound,
    mode: NuMode,
    opts: &ClassifyOptions,
) -> Result<RotationNumberReport, ClassifyError> {
    let want_c = matches!(mode, NuMode::Auto | NuMode::Condensed);
    let want_s = matches!(mode, NuMode::Auto | NuMode::NonDiffuse);
    let mut rep = RotationNumberReport {
        nu: 0,
        condensed_nu: None,
        sheet_nu: None,
        h_gamma: None,
        annulus_point: None,
    };
    if want_c && condensed_of_band(band)?.condensed {
        let h = barycenter_of_band(band, opts.grid_dirs)?;
        rep.condensed_nu = Some(condensed_rotation_number(fc, &h)?);
        rep.h_gamma = Some(h);
    }
    if want_s && !diffuse_of_band(band, band.max_cell_diameter()).diffuse {
        let b = annulus_point(fc, kappa0.rho())?;
        rep.sheet_nu = Some(sheet_rotation_number(fc, &b));
        rep.annulus_point = Some(b);
    }
    rep.nu = match (rep.condensed_nu, rep.sheet_nu) {
        (Some(a), Some(b)) if a != b => {
            return Err(ClassifyError::Anomaly(format!(
                "condensed rotation number {a} differs from sheet count {b}"
            )))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(ClassifyError::Unclassifiable),
    };
    Ok(rep)
}

/// +1 if Φ̃(1) = Φ̃(0), −1 if Φ̃(1) = −Φ̃(0).
pub fn lifted_sign(fc: &FramedCurve) -> Result<i8, ClassifyError> {
    let a = fc.lifts[0];
    let b = *fc.last_lift();
    let plus = b.distance(&a);
    let minus = b.distance(&-a);
    if plus.min(minus) > 0.5 {
        return Err(ClassifyError::Resolution(format!(
            "end lift is far from ±start lift ({plus:.3}, {minus:.3})"
        )));
    }
    Ok(if plus < minus { 1 } else { -1 })
}

fn parity(k: usize) -> i8 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ClassificationResult {
    pub space: SpaceSpec,
    pub condensed: bool,
    pub diffuse: bool,
    pub rotation_number: Option<i64>,
    pub lifted_sign: i8,
    pub component_index: usize,
    pub n: usize,
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

pub fn classify_curve(c: &CurveSamples, s: &SpaceSpec) -> Result<ClassificationResult, ClassifyError> {
    classify_curve_with(c, s, &ClassifyOptions::from_env())
}

pub fn classify_curve_with(
    c: &CurveSamples,
    s: &SpaceSpec,
    opts: &ClassifyOptions,
) -> Result<ClassificationResult, ClassifyError> {
    require_member(&integrate_frames(c), s, opts.closure_tol)?;
    let red = reduce_unchecked(c, s)?;
    let n = component_count(s);
    let fc = integrate_frames(&red.curve);
    let sign = lifted_sign(&fc)?;
    let mut diag = BTreeMap::new();
    diag.insert("kappa0".to_string(), serde_json::to_value(red.kappa0()).unwrap());
    diag.insert("translation".to_string(), red.theta.into());
    if red.is_full_space() {
        let index = if sign == -1 { 1 } else { 2 };
        return Ok(ClassificationResult {
            space: s.clone(),
            condensed: false,
            diffuse: false,
            rotation_number: None,
            lifted_sign: sign,
            component_index: index,
            n,
            diagnostics: diag,
        });
    }
    let band = caustic_cloud(&fc, red.kappa0(), opts.m)?;
    let cond = condensed_of_band(&band)?;
    let diff = diffuse_of_band(&band, band.max_cell_diameter());
    diag.insert("condensed_margin".into(), cond.margin.into());
    diag.insert("boundary_condensed".into(), cond.boundary_condensed.into());
    diag.insert("diffuse_min_distance".into(), finite_or_null(diff.min_distance));
    let nu = match rotation_number_of(&fc, &band, red.kappa0(), NuMode::Auto, opts) {
        Ok(r) => {
            if let Some(h) = r.h_gamma {
                diag.insert("h_gamma".into(), serde_json::to_value(h.to_array()).unwrap());
            }
            if let Some(b) = r.annulus_point {
                diag.insert("annulus_point".into(), serde_json::to_value(b.to_array()).unwrap());
            }
            diag.insert("nu_condensed".into(), serde_json::to_value(r.condensed_nu).unwrap());
            diag.insert("nu_sheet".into(), serde_json::to_value(r.sheet_nu).unwrap());
            Some(r.nu)
        }
        Err(ClassifyError::Unclassifiable) => None,
        Err(e) => return Err(e),
    };
    let direct = cond.condensed && !cond.boundary_condensed;
    let index = match nu {
        Some(v) if direct && v >= 1 && (v as usize) + 2 <= n => {
            let v = v as usize;
            if sign != parity(v) {
                return Err(ClassifyError::Anomaly(format!(
                    "condensed curve with rotation number {v} has lifted sign {sign}"
                )));
            }
            v
        }
        _ => {
            if sign == parity(n - 1) {
                n - 1
            } else {
                n
            }
        }
    };
    Ok(ClassificationResult {
        space: s.clone(),
        condensed: cond.condensed,
        diffuse: diff.diffuse,
        rotation_number: nu,
        lifted_sign: sign,
        component_index: index,
        n,
        diagnostics: diag,
    })
}

fn finite_or_null(x: f64) -> serde_json::Value {
    if x.is_finite() {
        x.into()
    } else {
        serde_json::Value::Null
    }
}

pub fn same_component(c1: &CurveSamples, c2: &CurveSamples, s: &SpaceSpec) -> Result<bool, ClassifyError> {
    let opts = ClassifyOptions::from_env();
    Ok(classify_curve_with(c1, s, &opts)?.component_index == classify_curve_with(c2, s, &opts)?.component_index)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TotalCurvatureBound {
    pub tot: f64,
    pub nu: i64,
    pub bound: f64,
    pub satisfied: bool,
    pub slack: f64,
}

/// tot(γ) against 4π·ν/cos²(ρ₀/2) for a non-diffuse curve of L_{κ₀}^{+∞}.
pub fn total_curvature_bound_check(
    c: &CurveSamples,
    kappa0: CurvatureBound,
    opts: &ClassifyOptions,
) -> Result<TotalCurvatureBound, ClassifyError> {
    let fc = integrate_frames(c);
    let band = caustic_cloud(&fc, kappa0, opts.m)?;
    if diffuse_of_band(&band, band.max_cell_diameter()).diffuse {
        return Err(ClassifyError::NotApplicable("curve is diffuse".into()));
    }
    let nu = rotation_number_of(&fc, &band, kappa0, NuMode::NonDiffuse, opts)?.nu;
    let tot = total_curvature(c);
    let half = kappa0.rho() / 2.0;
    let bound = 4.0 * PI * nu as f64 / (half.cos() * half.cos());
    Ok(TotalCurvatureBound {
        tot,
        nu,
        bound,
        satisfied: tot <= bound,
        slack: bound - tot,
    })
}
