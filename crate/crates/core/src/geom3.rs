//! Points of S², rotations in SO(3), unit quaternions in S³, the covering map
//! between them, projections, and exact exponential steps of the frame equation.

use nalgebra::{Matrix3, Vector3};
use std::fmt;
use std::ops::{Mul, Neg};

/// Plain 3-vector used for intermediate arithmetic.
pub type Vec3 = Vector3<f64>;

/// Unit-norm tolerance after normalization.
pub const UNIT_TOL: f64 = 1e-12;
/// Tolerance for products of already-normalized objects.
pub const PRODUCT_TOL: f64 = 1e-10;
/// Inputs farther than this from the unit sphere / SO(3) are rejected.
pub const INPUT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Geom3Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point lies within {tol:e} of the antipode of the projection pole")]
    SingularProjection { tol: f64 },
    #[error("degenerate circle: {0}")]
    DegenerateCircle(String),
}

/// A point of the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitVec3(Vec3);

impl UnitVec3 {
    /// Normalizes `v`; fails on (near) zero vectors.
    pub fn normalize(v: Vec3) -> Result<Self, Geom3Error> {
        let n = v.norm();
        if !(n > 1e-12) || !n.is_finite() {
            return Err(Geom3Error::InvalidInput(format!(
                "cannot normalize vector of norm {n:e}"
            )));
        }
        Ok(Self(v / n))
    }

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self, Geom3Error> {
        Self::normalize(Vec3::new(x, y, z))
    }

    /// Wraps a vector the caller knows to be unit; renormalizes anyway.
    pub(crate) fn from_unit(v: Vec3) -> Self {
        let n = v.norm();
        Self(v / n)
    }

    pub fn e1() -> Self {
        Self(Vec3::x())
    }
    pub fn e2() -> Self {
        Self(Vec3::y())
    }
    pub fn e3() -> Self {
        Self(Vec3::z())
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }
    pub fn vec(&self) -> Vec3 {
        self.0
    }
    pub fn to_array(&self) -> [f64; 3] {
        [self.0.x, self.0.y, self.0.z]
    }
    pub fn dot(&self, other: &UnitVec3) -> f64 {
        self.0.dot(&other.0)
    }
    /// Great-circle distance.
    pub fn distance(&self, other: &UnitVec3) -> f64 {
        spherical_distance(&self.0, &other.0)
    }
}

impl Neg for UnitVec3 {
    type Output = UnitVec3;
    fn neg(self) -> UnitVec3 {
        UnitVec3(-self.0)
    }
}

impl fmt::Display for UnitVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0.x, self.0.y, self.0.z)
    }
}

/// Angle between two nonzero vectors, stable near 0 and π.
pub fn spherical_distance(a: &Vec3, b: &Vec3) -> f64 {
    a.cross(b).norm().atan2(a.dot(b))
}

/// An element of SO(3). Columns of a frame are (position, tangent, normal).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Checks RᵀR = I and det R = 1 within `INPUT_TOL`.
    pub fn new(m: Matrix3<f64>) -> Result<Self, Geom3Error> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Geom3Error::InvalidInput("non-finite matrix entry".into()));
        }
        let defect = (m.transpose() * m - Matrix3::identity()).norm();
        let det = m.determinant();
        if defect > INPUT_TOL || (det - 1.0).abs() > INPUT_TOL {
            return Err(Geom3Error::InvalidInput(format!(
                "matrix not in SO(3): orthogonality defect {defect:e}, det {det}"
            )));
        }
        Ok(Self(m))
    }

    pub fn from_row_major(rows: &[f64; 9]) -> Result<Self, Geom3Error> {
        Self::new(Matrix3::from_row_slice(rows))
    }

    /// Frame with the given columns (γ, t, n).
    pub fn from_columns(a: &Vec3, b: &Vec3, c: &Vec3) -> Result<Self, Geom3Error> {
        Self::new(Matrix3::from_columns(&[*a, *b, *c]))
    }

    /// Rodrigues formula; `axis` need not be normalized, zero axis gives identity.
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.norm();
        if n == 0.0 || angle == 0.0 {
            return Self::identity();
        }
        let k = axis / n;
        let kx = skew(&k);
        let m = Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos());
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }
    pub fn to_row_major(&self) -> [f64; 9] {
        let m = &self.0;
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }
    pub fn col(&self, j: usize) -> Vec3 {
        self.0.column(j).into_owned()
    }
    pub fn position(&self) -> UnitVec3 {
        UnitVec3::from_unit(self.col(0))
    }
    pub fn tangent(&self) -> UnitVec3 {
        UnitVec3::from_unit(self.col(1))
    }
    pub fn normal(&self) -> UnitVec3 {
        UnitVec3::from_unit(self.col(2))
    }
    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }
    pub fn inverse(&self) -> Self {
        self.transpose()
    }
    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }
    pub fn apply_unit(&self, p: &UnitVec3) -> UnitVec3 {
        UnitVec3::from_unit(self.0 * p.0)
    }
    /// ‖self − other‖_F.
    pub fn distance(&self, other: &Rotation) -> f64 {
        (self.0 - other.0).norm()
    }
    /// ‖RᵀR − I‖_F.
    pub fn orthogonality_defect(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).norm()
    }
    /// Rotation vector ω with exp(skew ω) = self, |ω| ≤ π.
    pub fn log(&self) -> Vec3 {
        let z = quaternion_lifts(self).0;
        let z = if z.scalar() < 0.0 { -z } else { z };
        z.log() * 2.0
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

impl Mul for &Rotation {
    type Output = Rotation;
    fn mul(self, rhs: &Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// Matrix of x ↦ k × x.
pub fn skew(k: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0)
}

/// a + b·i + c·j + d·k with a² + b² + c² + d² = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl UnitQuaternion {
    /// Accepts coefficients within `INPUT_TOL` of the unit sphere and renormalizes.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Geom3Error> {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        if !n.is_finite() || (n - 1.0).abs() > INPUT_TOL {
            return Err(Geom3Error::InvalidInput(format!(
                "quaternion norm {n} is not 1"
            )));
        }
        Ok(Self::raw(a / n, b / n, c / n, d / n))
    }

    /// Normalizes any nonzero quaternion.
    pub fn normalize(a: f64, b: f64, c: f64, d: f64) -> Result<Self, Geom3Error> {
        let n = (a * a + b * b + c * c + d * d).sqrt();
        if !(n > 1e-12) || !n.is_finite() {
            return Err(Geom3Error::InvalidInput(format!(
                "cannot normalize quaternion of norm {n:e}"
            )));
        }
        Ok(Self::raw(a / n, b / n, c / n, d / n))
    }

    const fn raw(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const fn one() -> Self {
        Self::raw(1.0, 0.0, 0.0, 0.0)
    }
    pub const fn i() -> Self {
        Self::raw(0.0, 1.0, 0.0, 0.0)
    }
    pub const fn j() -> Self {
        Self::raw(0.0, 0.0, 1.0, 0.0)
    }
    pub const fn k() -> Self {
        Self::raw(0.0, 0.0, 0.0, 1.0)
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }
    pub fn scalar(&self) -> f64 {
        self.a
    }
    pub fn imag(&self) -> Vec3 {
        Vec3::new(self.b, self.c, self.d)
    }
    pub fn conj(&self) -> Self {
        Self::raw(self.a, -self.b, -self.c, -self.d)
    }
    pub fn norm_defect(&self) -> f64 {
        ((self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d).sqrt() - 1.0).abs()
    }
    /// Euclidean distance in R⁴.
    pub fn distance(&self, o: &UnitQuaternion) -> f64 {
        let [a, b, c, d] = self.coeffs();
        let [e, f, g, h] = o.coeffs();
        ((a - e).powi(2) + (b - f).powi(2) + (c - g).powi(2) + (d - h).powi(2)).sqrt()
    }

    /// exp of the imaginary quaternion x·i + y·j + z·k.
    pub fn exp_imag(v: &Vec3) -> Self {
        let t = v.norm();
        if t == 0.0 {
            return Self::one();
        }
        let s = t.sin() / t;
        Self::raw(t.cos(), s * v.x, s * v.y, s * v.z)
    }

    /// Imaginary log with exp(log) = self and |log| ≤ π.
    pub fn log(&self) -> Vec3 {
        let im = self.imag();
        let s = im.norm();
        if s == 0.0 {
            if self.a > 0.0 {
                return Vec3::zeros();
            }
            // −1: any axis works
            return Vec3::new(std::f64::consts::PI, 0.0, 0.0);
        }
        im * (s.atan2(self.a) / s)
    }

    /// The rotation v ↦ z v z̄ of the imaginary quaternions.
    pub fn to_rotation(&self) -> Rotation {
        rotation_from_quaternion(self)
    }

    /// Canonical sign: first nonzero coefficient positive.
    pub fn canonical(&self) -> Self {
        for x in self.coeffs() {
            if x > 0.0 {
                return *self;
            }
            if x < 0.0 {
                return -*self;
            }
        }
        *self
    }
}

impl Mul for UnitQuaternion {
    type Output = UnitQuaternion;
    fn mul(self, q: UnitQuaternion) -> UnitQuaternion {
        let (a1, b1, c1, d1) = (self.a, self.b, self.c, self.d);
        let (a2, b2, c2, d2) = (q.a, q.b, q.c, q.d);
        UnitQuaternion::raw(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Neg for UnitQuaternion {
    type Output = UnitQuaternion;
    fn neg(self) -> UnitQuaternion {
        UnitQuaternion::raw(-self.a, -self.b, -self.c, -self.d)
    }
}

impl fmt::Display for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.a, self.b, self.c, self.d)
    }
}

/// π(z): v ↦ z v z̄ restricted to imaginary quaternions, with i, j, k ↔ e₁, e₂, e₃.
pub fn rotation_from_quaternion(z: &UnitQuaternion) -> Rotation {
    let [a, b, c, d] = z.coeffs();
    Rotation(Matrix3::new(
        a * a + b * b - c * c - d * d,
        2.0 * (b * c - a * d),
        2.0 * (b * d + a * c),
        2.0 * (b * c + a * d),
        a * a - b * b + c * c - d * d,
        2.0 * (c * d - a * b),
        2.0 * (b * d - a * c),
        2.0 * (c * d + a * b),
        a * a - b * b - c * c + d * d,
    ))
}

/// π applied to raw coefficients, rejecting non-unit input.
pub fn rotation_from_coeffs(a: f64, b: f64, c: f64, d: f64) -> Result<Rotation, Geom3Error> {
    Ok(rotation_from_quaternion(&UnitQuaternion::new(a, b, c, d)?))
}

/// The two preimages ±z of R under π, canonical one first.
pub fn quaternion_lifts(r: &Rotation) -> (UnitQuaternion, UnitQuaternion) {
    let m = &r.0;
    let tr = m.trace();
    // Shepperd: pick the largest diagonal term of the 4×4 symmetric form
    let cands = [tr, m[(0, 0)], m[(1, 1)], m[(2, 2)]];
    let mut best = 0;
    for (idx, v) in cands.iter().enumerate() {
        if *v > cands[best] {
            best = idx;
        }
    }
    let (a, b, c, d) = match best {
        0 => {
            let s = (1.0 + tr).sqrt() * 2.0;
            (
                0.25 * s,
                (m[(2, 1)] - m[(1, 2)]) / s,
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(1, 0)] - m[(0, 1)]) / s,
            )
        }
        1 => {
            let s = (1.0 + m[(0, 0)] - m[(1, 1)] - m[(2, 2)]).sqrt() * 2.0;
            (
                (m[(2, 1)] - m[(1, 2)]) / s,
                0.25 * s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
            )
        }
        2 => {
            let s = (1.0 + m[(1, 1)] - m[(0, 0)] - m[(2, 2)]).sqrt() * 2.0;
            (
                (m[(0, 2)] - m[(2, 0)]) / s,
                (m[(0, 1)] + m[(1, 0)]) / s,
                0.25 * s,
                (m[(1, 2)] + m[(2, 1)]) / s,
            )
        }
        _ => {
            let s = (1.0 + m[(2, 2)] - m[(0, 0)] - m[(1, 1)]).sqrt() * 2.0;
            (
                (m[(1, 0)] - m[(0, 1)]) / s,
                (m[(0, 2)] + m[(2, 0)]) / s,
                (m[(1, 2)] + m[(2, 1)]) / s,
                0.25 * s,
            )
        }
    };
    let n = (a * a + b * b + c * c + d * d).sqrt();
    let z = UnitQuaternion::raw(a / n, b / n, c / n, d / n).canonical();
    (z, -z)
}

/// Lifts of a raw matrix, rejecting matrices outside SO(3).
pub fn quaternion_lifts_of_matrix(
    m: Matrix3<f64>,
) -> Result<(UnitQuaternion, UnitQuaternion), Geom3Error> {
    Ok(quaternion_lifts(&Rotation::new(m)?))
}

/// Exact exponentials for one step of Φ' = ΦΛ with constant speed `v` and
/// curvature density `w` = vκ: exp(dt·Λ) in SO(3) and exp(dt·(w·i + v·k)/2) in S³.
pub fn frame_step(v: f64, w: f64, dt: f64) -> (Rotation, UnitQuaternion) {
    let omega = Vec3::new(w, 0.0, v);
    let angle = omega.norm() * dt;
    let rot = Rotation::from_axis_angle(&omega, angle);
    let q = UnitQuaternion::exp_imag(&(omega * (dt / 2.0)));
    (rot, q)
}

/// Orthonormal (u, w) spanning the plane orthogonal to `pole`, with u × w = pole.
pub fn tangent_basis(pole: &UnitVec3) -> (Vec3, Vec3) {
    let p = pole.vec();
    let ax = [p.x.abs(), p.y.abs(), p.z.abs()];
    let helper = if ax[0] <= ax[1] && ax[0] <= ax[2] {
        Vec3::x()
    } else if ax[1] <= ax[2] {
        Vec3::y()
    } else {
        Vec3::z()
    };
    let u = (helper - p * helper.dot(&p)).normalize();
    let w = p.cross(&u);
    (u, w)
}

/// Stereographic projection from −pole onto the plane through 0 orthogonal to
/// pole. The chart is oriented as seen from the projection center −pole, so a
/// curve winding positively about `pole` has negative winding in the image.
pub fn stereographic(p: &UnitVec3, pole: &UnitVec3) -> Result<(f64, f64), Geom3Error> {
    const TOL: f64 = 1e-12;
    let denom = 1.0 + p.dot(pole);
    if denom <= TOL {
        return Err(Geom3Error::SingularProjection { tol: TOL });
    }
    let (u, w) = tangent_basis(pole);
    let x = p.vec().dot(&u) / denom;
    let y = -p.vec().dot(&w) / denom;
    Ok((x, y))
}

/// Inverse of [`stereographic`].
pub fn inverse_stereographic(x: f64, y: f64, pole: &UnitVec3) -> UnitVec3 {
    let (u, w) = tangent_basis(pole);
    let r2 = x * x + y * y;
    let v = (u * (2.0 * x) - w * (2.0 * y) + pole.vec() * (1.0 - r2)) / (1.0 + r2);
    UnitVec3::from_unit(v)
}

/// x ↦ x/|x|.
pub fn gnomic_project(x: &Vec3) -> Result<UnitVec3, Geom3Error> {
    if x.norm() <= 1e-12 {
        return Err(Geom3Error::InvalidInput(format!(
            "gnomic projection of vector of norm {:e}",
            x.norm()
        )));
    }
    UnitVec3::normalize(*x)
}

/// Traversal sense of a circle relative to the stored center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Center to the left of the traversal.
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// Oriented circle on S²; `center` is the side with radius ≤ π/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalCircle {
    pub center: UnitVec3,
    pub spherical_radius: f64,
    pub orientation: Orientation,
}

impl SphericalCircle {
    /// Signed geodesic curvature of the traversal.
    pub fn signed_curvature(&self) -> f64 {
        self.orientation.sign() / self.spherical_radius.tan()
    }
    /// Center lying to the left of the traversal.
    pub fn left_center(&self) -> UnitVec3 {
        match self.orientation {
            Orientation::Positive => self.center,
            Orientation::Negative => -self.center,
        }
    }
    /// Radius measured from [`Self::left_center`], in (0, π); this is the radius of curvature.
    pub fn left_radius(&self) -> f64 {
        match self.orientation {
            Orientation::Positive => self.spherical_radius,
            Orientation::Negative => std::f64::consts::PI - self.spherical_radius,
        }
    }
    /// Counterclockwise angle about the left center from `p` to `q`, in [0, 2π).
    pub fn swept_angle(&self, p: &UnitVec3, q: &UnitVec3) -> f64 {
        let c = self.left_center().vec();
        let pp = p.vec() - c * c.dot(&p.vec());
        let qq = q.vec() - c * c.dot(&q.vec());
        let ang = c.dot(&pp.cross(&qq)).atan2(pp.dot(&qq));
        if ang < 0.0 {
            ang + 2.0 * std::f64::consts::PI
        } else {
            ang
        }
    }
}

/// The circle through three points, oriented by the order p1 → p2 → p3.
pub fn circle_through(
    p1: &UnitVec3,
    p2: &UnitVec3,
    p3: &UnitVec3,
) -> Result<SphericalCircle, Geom3Error> {
    let (a, b, c) = (p1.vec(), p2.vec(), p3.vec());
    let min_gap = (a - b).norm().min((b - c).norm()).min((a - c).norm());
    if min_gap < 1e-12 {
        return Err(Geom3Error::DegenerateCircle("repeated point".into()));
    }
    let m = (b - a).cross(&(c - b));
    if m.norm() < 1e-14 {
        return Err(Geom3Error::DegenerateCircle("collinear points".into()));
    }
    // ccw about m̂, so m̂ is the left center
    let mh = m.normalize();
    let d = mh.dot(&a).clamp(-1.0, 1.0);
    let (center, radius, orientation) = if d >= 0.0 {
        (mh, d.acos(), Orientation::Positive)
    } else {
        (-mh, (-d).acos(), Orientation::Negative)
    };
    if !(radius > 0.0) {
        return Err(Geom3Error::DegenerateCircle("zero radius".into()));
    }
    Ok(SphericalCircle {
        center: UnitVec3::from_unit(center),
        spherical_radius: radius,
        orientation,
    })
}

/// R_θ: the frame change taking (γ, t, n) to (γ_θ, t, n_θ).
pub fn rotation_about_second_axis(theta: f64) -> Rotation {
    let (s, c) = theta.sin_cos();
    Rotation(Matrix3::new(c, 0.0, -s, 0.0, 1.0, 0.0, s, 0.0, c))
}
