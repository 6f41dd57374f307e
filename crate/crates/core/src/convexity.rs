//! Convex hulls in R³, origin location with separating witnesses, Steinitz
//! simplices, geodesic convexification, and barycenters of hemisphere sets.

use crate::geom3::{gnomic_project, tangent_basis, UnitVec3, Vec3};
use std::collections::HashMap;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvexityError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point lies outside the convex hull (distance {distance:e})")]
    NotInHull { distance: f64 },
    #[error("no {kind} hemisphere contains the point cloud")]
    NoHemisphere { kind: &'static str },
}

/// Default size of the hemisphere direction lattice.
pub const DEFAULT_GRID_DIRS: usize = 20_000;
/// Default half-width of the boundary band in [`locate_origin`].
pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-8;

/// A non-empty ordered set of points of R³.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud3(Vec<Vec3>);

impl PointCloud3 {
    pub fn new(points: Vec<Vec3>) -> Result<Self, ConvexityError> {
        if points.is_empty() {
            return Err(ConvexityError::InvalidInput("empty point cloud".into()));
        }
        if points.iter().any(|p| !p.iter().all(|x| x.is_finite())) {
            return Err(ConvexityError::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Self(points))
    }

    pub fn from_units(points: &[UnitVec3]) -> Result<Self, ConvexityError> {
        Self::new(points.iter().map(|p| p.vec()).collect())
    }

    pub fn points(&self) -> &[Vec3] {
        &self.0
    }
    pub fn len(&self) -> usize {
        self.0.len()
    }
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Triangle of a 3-dimensional hull with outward unit normal; the plane is ⟨normal, x⟩ = offset.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: [usize; 3],
    pub normal: Vec3,
    pub offset: f64,
}

/// Hull shape by affine dimension. Indices refer to the input cloud.
#[derive(Debug, Clone, PartialEq)]
pub enum HullShape {
    Point(usize),
    Segment([usize; 2]),
    /// Planar hull: plane ⟨normal, x⟩ = offset, ring counterclockwise about `normal`.
    Polygon {
        normal: Vec3,
        offset: f64,
        ring: Vec<usize>,
    },
    Polytope {
        facets: Vec<Facet>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    pub shape: HullShape,
    points: Vec<Vec3>,
}

impl ConvexHull {
    /// Affine dimension of the hull.
    pub fn dimension(&self) -> usize {
        match &self.shape {
            HullShape::Point(_) => 0,
            HullShape::Segment(_) => 1,
            HullShape::Polygon { .. } => 2,
            HullShape::Polytope { .. } => 3,
        }
    }

    /// Sorted, deduplicated vertex indices.
    pub fn vertices(&self) -> Vec<usize> {
        let mut v: Vec<usize> = match &self.shape {
            HullShape::Point(i) => vec![*i],
            HullShape::Segment(s) => s.to_vec(),
            HullShape::Polygon { ring, .. } => ring.clone(),
            HullShape::Polytope { facets } => facets.iter().flat_map(|f| f.vertices).collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn facets(&self) -> &[Facet] {
        match &self.shape {
            HullShape::Polytope { facets } => facets,
            _ => &[],
        }
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    /// Closest point of the hull to `x`.
    pub fn closest_point(&self, x: &Vec3) -> Vec3 {
        let pts = &self.points;
        match &self.shape {
            HullShape::Point(i) => pts[*i],
            HullShape::Segment([a, b]) => closest_on_segment(x, &pts[*a], &pts[*b]),
            HullShape::Polygon {
                normal,
                offset,
                ring,
            } => {
                let proj = x - normal * (normal.dot(x) - offset);
                if polygon_contains_in_plane(pts, ring, normal, &proj, 0.0) {
                    return proj;
                }
                let mut best = pts[ring[0]];
                let mut bd = f64::INFINITY;
                for k in 0..ring.len() {
                    let c = closest_on_segment(x, &pts[ring[k]], &pts[ring[(k + 1) % ring.len()]]);
                    let d = (c - x).norm();
                    if d < bd {
                        bd = d;
                        best = c;
                    }
                }
                best
            }
            HullShape::Polytope { facets } => {
                if facets.iter().all(|f| f.normal.dot(x) <= f.offset) {
                    return *x;
                }
                let mut best = *x;
                let mut bd = f64::INFINITY;
                for f in facets {
                    let [a, b, c] = f.vertices;
                    let q = closest_on_triangle(x, &pts[a], &pts[b], &pts[c]);
                    let d = (q - x).norm();
                    if d < bd {
                        bd = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    /// Membership within `tol`.
    pub fn contains(&self, x: &Vec3, tol: f64) -> bool {
        (self.closest_point(x) - x).norm() <= tol
    }

    /// Whether the ray {s·p : s > 0} meets the hull (within `tol`).
    pub fn ray_hits(&self, p: &Vec3, tol: f64) -> bool {
        match &self.shape {
            HullShape::Polytope { facets } => {
                let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
                for f in facets {
                    let a = f.normal.dot(p);
                    let c = f.offset + tol;
                    if a > 1e-15 {
                        hi = hi.min(c / a);
                    } else if a < -1e-15 {
                        lo = lo.max(c / a);
                    } else if c < 0.0 {
                        return false;
                    }
                }
                hi > 0.0 && lo <= hi
            }
            _ => {
                // lower-dimensional hulls: nearest point on the ray to the hull
                let dir = p.normalize();
                let mut s = 1.0;
                for _ in 0..200 {
                    let q = self.closest_point(&(dir * s));
                    s = q.dot(&dir).max(0.0);
                }
                let q = self.closest_point(&(dir * s));
                s > 0.0 && (q - dir * s).norm() <= tol
            }
        }
    }
}

fn closest_on_segment(x: &Vec3, a: &Vec3, b: &Vec3) -> Vec3 {
    let ab = b - a;
    let l2 = ab.norm_squared();
    if l2 == 0.0 {
        return *a;
    }
    let t = ((x - a).dot(&ab) / l2).clamp(0.0, 1.0);
    a + ab * t
}

// Ericson, closest point on triangle
fn closest_on_triangle(p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Vec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

fn polygon_contains_in_plane(pts: &[Vec3], ring: &[usize], normal: &Vec3, x: &Vec3, tol: f64) -> bool {
    (0..ring.len()).all(|k| {
        let a = pts[ring[k]];
        let b = pts[ring[(k + 1) % ring.len()]];
        // inward edge normal is normal × (b − a)
        let inward = normal.cross(&(b - a));
        let l = inward.norm();
        l == 0.0 || inward.dot(&(x - a)) / l >= -tol
    })
}

/// Andrew monotone chain on 2D coordinates; returns ccw ring of indices.
fn hull_2d(coords: &[(f64, f64)], idx: &[usize], eps: f64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..idx.len()).collect();
    order.sort_by(|&i, &j| {
        coords[i]
            .0
            .partial_cmp(&coords[j].0)
            .unwrap()
            .then(coords[i].1.partial_cmp(&coords[j].1).unwrap())
    });
    let cross = |o: usize, a: usize, b: usize| {
        (coords[a].0 - coords[o].0) * (coords[b].1 - coords[o].1)
            - (coords[a].1 - coords[o].1) * (coords[b].0 - coords[o].0)
    };
    let mut lower: Vec<usize> = Vec::new();
    for &i in &order {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], i) <= eps {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in order.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], i) <= eps {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.into_iter().map(|i| idx[i]).collect()
}

struct Face {
    v: [usize; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

fn make_face(pts: &[Vec3], v: [usize; 3]) -> Face {
    let n = (pts[v[1]] - pts[v[0]]).cross(&(pts[v[2]] - pts[v[0]]));
    let len = n.norm();
    let normal = if len > 0.0 { n / len } else { n };
    Face {
        v,
        normal,
        offset: normal.dot(&pts[v[0]]),
        outside: Vec::new(),
        alive: true,
    }
}

/// Convex hull of the cloud; lower-dimensional inputs yield lower-dimensional shapes.
pub fn convex_hull3(cloud: &PointCloud3) -> Result<ConvexHull, ConvexityError> {
    let pts = cloud.points().to_vec();
    if pts.is_empty() {
        return Err(ConvexityError::InvalidInput("empty point cloud".into()));
    }
    let scale = pts.iter().map(|p| p.norm()).fold(1.0_f64, f64::max);
    let eps = 1e-11 * scale;

    // initial simplex
    let a = (0..pts.len())
        .min_by(|&i, &j| pts[i].x.partial_cmp(&pts[j].x).unwrap())
        .unwrap();
    let b = far_from(&pts, |p| (p - pts[a]).norm());
    if (pts[b] - pts[a]).norm() <= eps {
        return Ok(ConvexHull {
            shape: HullShape::Point(a),
            points: pts,
        });
    }
    let dir = (pts[b] - pts[a]).normalize();
    let c = far_from(&pts, |p| (p - pts[a]).cross(&dir).norm());
    if (pts[c] - pts[a]).cross(&dir).norm() <= eps {
        let lo = (0..pts.len())
            .min_by(|&i, &j| pts[i].dot(&dir).partial_cmp(&pts[j].dot(&dir)).unwrap())
            .unwrap();
        let hi = (0..pts.len())
            .max_by(|&i, &j| pts[i].dot(&dir).partial_cmp(&pts[j].dot(&dir)).unwrap())
            .unwrap();
        return Ok(ConvexHull {
            shape: HullShape::Segment([lo, hi]),
            points: pts,
        });
    }
    let pn = (pts[b] - pts[a]).cross(&(pts[c] - pts[a])).normalize();
    let d = far_from(&pts, |p| (p - pts[a]).dot(&pn).abs());
    if (pts[d] - pts[a]).dot(&pn).abs() <= eps {
        let offset = pn.dot(&pts[a]);
        let u = dir;
        let w = pn.cross(&u);
        let coords: Vec<(f64, f64)> = pts.iter().map(|p| (p.dot(&u), p.dot(&w))).collect();
        let idx: Vec<usize> = (0..pts.len()).collect();
        let ring = hull_2d(&coords, &idx, eps * eps);
        return Ok(ConvexHull {
            shape: HullShape::Polygon {
                normal: pn,
                offset,
                ring,
            },
            points: pts,
        });
    }

    let mut faces: Vec<Face> = Vec::new();
    let centroid = (pts[a] + pts[b] + pts[c] + pts[d]) / 4.0;
    for tri in [[a, b, c], [a, b, d], [a, c, d], [b, c, d]] {
        let mut f = make_face(&pts, tri);
        if f.normal.dot(&centroid) > f.offset {
            f = make_face(&pts, [tri[0], tri[2], tri[1]]);
        }
        faces.push(f);
    }
    let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edges.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }
    for i in 0..pts.len() {
        if [a, b, c, d].contains(&i) {
            continue;
        }
        for f in faces.iter_mut() {
            if f.normal.dot(&pts[i]) - f.offset > eps {
                f.outside.push(i);
                break;
            }
        }
    }

    let mut stack: Vec<usize> = (0..faces.len()).collect();
    while let Some(fi) = stack.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let f = &faces[fi];
        let apex = *f
            .outside
            .iter()
            .max_by(|&&i, &&j| {
                (f.normal.dot(&pts[i]) - f.offset)
                    .partial_cmp(&(f.normal.dot(&pts[j]) - f.offset))
                    .unwrap()
            })
            .unwrap();
        let p = pts[apex];
        // visible region by flood fill
        let mut visible = vec![fi];
        let mut seen: HashMap<usize, bool> = HashMap::new();
        seen.insert(fi, true);
        let mut k = 0;
        while k < visible.len() {
            let g = visible[k];
            k += 1;
            for e in 0..3 {
                let (u, v) = (faces[g].v[e], faces[g].v[(e + 1) % 3]);
                if let Some(&h) = edges.get(&(v, u)) {
                    if seen.contains_key(&h) {
                        continue;
                    }
                    let vis = faces[h].normal.dot(&p) - faces[h].offset > eps;
                    seen.insert(h, vis);
                    if vis {
                        visible.push(h);
                    }
                }
            }
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &g in &visible {
            for e in 0..3 {
                let (u, v) = (faces[g].v[e], faces[g].v[(e + 1) % 3]);
                let h = edges[&(v, u)];
                if !seen.get(&h).copied().unwrap_or(false) {
                    horizon.push((u, v));
                }
            }
        }
        let mut orphans: Vec<usize> = Vec::new();
        for &g in &visible {
            faces[g].alive = false;
            orphans.append(&mut faces[g].outside);
            for e in 0..3 {
                let key = (faces[g].v[e], faces[g].v[(e + 1) % 3]);
                if edges.get(&key) == Some(&g) {
                    edges.remove(&key);
                }
            }
        }
        let first_new = faces.len();
        for (u, v) in horizon {
            let nf = make_face(&pts, [u, v, apex]);
            let id = faces.len();
            for e in 0..3 {
                edges.insert((nf.v[e], nf.v[(e + 1) % 3]), id);
            }
            faces.push(nf);
        }
        for q in orphans {
            if q == apex {
                continue;
            }
            for f in faces[first_new..].iter_mut() {
                if f.normal.dot(&pts[q]) - f.offset > eps {
                    f.outside.push(q);
                    break;
                }
            }
        }
        stack.extend(first_new..faces.len());
    }

    let facets = faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| Facet {
            vertices: f.v,
            normal: f.normal,
            offset: f.offset,
        })
        .collect();
    Ok(ConvexHull {
        shape: HullShape::Polytope { facets },
        points: pts,
    })
}

fn far_from(pts: &[Vec3], f: impl Fn(&Vec3) -> f64) -> usize {
    let mut best = 0;
    let mut bd = f64::NEG_INFINITY;
    for (i, p) in pts.iter().enumerate() {
        let d = f(p);
        if d > bd {
            bd = d;
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginTag {
    Interior,
    Boundary,
    Exterior,
}

/// At most four affinely independent cloud points with barycentric weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SteinitzSimplex {
    pub indices: Vec<usize>,
    pub vertices: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl SteinitzSimplex {
    pub fn dimension(&self) -> usize {
        self.indices.len() - 1
    }
    /// Σ wᵢ vᵢ.
    pub fn combination(&self) -> Vec3 {
        self.vertices
            .iter()
            .zip(&self.weights)
            .fold(Vec3::zeros(), |acc, (v, w)| acc + v * *w)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OriginWitness {
    /// Simplex of cloud points containing 0.
    Simplex(SteinitzSimplex),
    /// Direction h with ⟨p, h⟩ ≥ −tol on the whole cloud.
    Direction(UnitVec3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OriginLocation {
    pub tag: OriginTag,
    pub witness: OriginWitness,
    /// Distance from 0 to the hull when exterior, minus the depth of 0 when interior.
    pub margin: f64,
}

impl OriginLocation {
    pub fn direction(&self) -> Option<UnitVec3> {
        match &self.witness {
            OriginWitness::Direction(h) => Some(*h),
            OriginWitness::Simplex(_) => None,
        }
    }
}

/// Locates 0 relative to the convex hull of the cloud.
pub fn locate_origin(cloud: &PointCloud3, tol: f64) -> OriginLocation {
    let hull = convex_hull3(cloud).expect("cloud is non-empty");
    locate_origin_in_hull(&hull, tol)
}

/// [`locate_origin`] on an already computed hull.
pub fn locate_origin_in_hull(hull: &ConvexHull, tol: f64) -> OriginLocation {
    let zero = Vec3::zeros();
    let closest = hull.closest_point(&zero);
    let dist = closest.norm();
    if dist > tol {
        return OriginLocation {
            tag: OriginTag::Exterior,
            witness: OriginWitness::Direction(UnitVec3::from_unit(closest)),
            margin: dist,
        };
    }
    let fallback = |v: Vec3| {
        let (u, _) = tangent_basis(&UnitVec3::normalize(v).unwrap_or_else(|_| UnitVec3::e3()));
        UnitVec3::from_unit(u)
    };
    match &hull.shape {
        HullShape::Polytope { facets } => {
            let f = facets
                .iter()
                .min_by(|x, y| x.offset.partial_cmp(&y.offset).unwrap())
                .unwrap();
            if f.offset > tol {
                let simplex = steinitz_in_hull(hull, &zero).expect("origin is inside");
                OriginLocation {
                    tag: OriginTag::Interior,
                    witness: OriginWitness::Simplex(simplex),
                    margin: -f.offset,
                }
            } else {
                OriginLocation {
                    tag: OriginTag::Boundary,
                    witness: OriginWitness::Direction(UnitVec3::from_unit(-f.normal)),
                    margin: -f.offset.max(0.0).max(dist),
                }
            }
        }
        HullShape::Polygon { normal, offset, .. } => {
            let h = if *offset >= 0.0 { *normal } else { -normal };
            OriginLocation {
                tag: OriginTag::Boundary,
                witness: OriginWitness::Direction(UnitVec3::from_unit(h)),
                margin: dist,
            }
        }
        HullShape::Segment([a, b]) => OriginLocation {
            tag: OriginTag::Boundary,
            witness: OriginWitness::Direction(fallback(hull.point(*b) - hull.point(*a))),
            margin: dist,
        },
        HullShape::Point(_) => OriginLocation {
            tag: OriginTag::Boundary,
            witness: OriginWitness::Direction(UnitVec3::e3()),
            margin: dist,
        },
    }
}

/// Simplex of at most four cloud points whose convex hull contains `p`.
pub fn steinitz_simplex(cloud: &PointCloud3, p: &Vec3) -> Result<SteinitzSimplex, ConvexityError> {
    for (i, q) in cloud.points().iter().enumerate() {
        if (q - p).norm() <= 1e-12 {
            return Ok(SteinitzSimplex {
                indices: vec![i],
                vertices: vec![*q],
                weights: vec![1.0],
            });
        }
    }
    let hull = convex_hull3(cloud)?;
    steinitz_in_hull(&hull, p)
}

fn steinitz_in_hull(hull: &ConvexHull, p: &Vec3) -> Result<SteinitzSimplex, ConvexityError> {
    let scale = 1.0 + p.norm();
    let gap = (hull.closest_point(p) - p).norm();
    if gap > 1e-9 * scale {
        return Err(ConvexityError::NotInHull { distance: gap });
    }
    let pts = &hull.points;
    let (idx, w): (Vec<usize>, Vec<f64>) = match &hull.shape {
        HullShape::Point(i) => (vec![*i], vec![1.0]),
        HullShape::Segment([a, b]) => {
            let ab = pts[*b] - pts[*a];
            let t = ((p - pts[*a]).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
            (vec![*a, *b], vec![1.0 - t, t])
        }
        HullShape::Polygon { normal, ring, .. } => {
            let v0 = *ring
                .iter()
                .max_by(|&&i, &&j| (pts[i] - p).norm().partial_cmp(&(pts[j] - p).norm()).unwrap())
                .unwrap();
            let d = p - pts[v0];
            if d.norm() <= 1e-15 * scale {
                (vec![v0], vec![1.0])
            } else {
                // exit edge of the ray v0 + s d
                let mut best: Option<(f64, usize, usize)> = None;
                for k in 0..ring.len() {
                    let (a, b) = (ring[k], ring[(k + 1) % ring.len()]);
                    if a == v0 || b == v0 {
                        continue;
                    }
                    let outward = (pts[b] - pts[a]).cross(normal);
                    let den = outward.dot(&d);
                    if den <= 0.0 {
                        continue;
                    }
                    let s = outward.dot(&(pts[a] - pts[v0])) / den;
                    if s >= 1.0 - 1e-9 && best.is_none_or(|(bs, _, _)| s < bs) {
                        best = Some((s, a, b));
                    }
                }
                let (s, a, b) = best.ok_or(ConvexityError::NotInHull { distance: gap })?;
                let q = pts[v0] + d * s;
                let ab = pts[b] - pts[a];
                let t = ((q - pts[a]).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
                let lam = 1.0 / s;
                (vec![v0, a, b], vec![1.0 - lam, lam * (1.0 - t), lam * t])
            }
        }
        HullShape::Polytope { facets } => {
            let verts = hull.vertices();
            let v0 = *verts
                .iter()
                .max_by(|&&i, &&j| (pts[i] - p).norm().partial_cmp(&(pts[j] - p).norm()).unwrap())
                .unwrap();
            let d = p - pts[v0];
            if d.norm() <= 1e-15 * scale {
                (vec![v0], vec![1.0])
            } else {
                let mut best: Option<(f64, usize)> = None;
                for (fi, f) in facets.iter().enumerate() {
                    if f.vertices.contains(&v0) {
                        continue;
                    }
                    let den = f.normal.dot(&d);
                    if den <= 0.0 {
                        continue;
                    }
                    let s = (f.offset - f.normal.dot(&pts[v0])) / den;
                    if s >= 1.0 - 1e-9 && best.is_none_or(|(bs, _)| s < bs) {
                        best = Some((s, fi));
                    }
                }
                let (s, fi) = best.ok_or(ConvexityError::NotInHull { distance: gap })?;
                let q = pts[v0] + d * s;
                let [a, b, c] = facets[fi].vertices;
                let bw = triangle_barycentric(&q, &pts[a], &pts[b], &pts[c]);
                let lam = 1.0 / s;
                (
                    vec![v0, a, b, c],
                    vec![1.0 - lam, lam * bw[0], lam * bw[1], lam * bw[2]],
                )
            }
        }
    };
    // drop vanishing weights
    let total: f64 = w.iter().sum();
    let mut indices = Vec::new();
    let mut weights = Vec::new();
    for (i, wi) in idx.into_iter().zip(w) {
        let wi = wi / total;
        if wi > 1e-15 {
            indices.push(i);
            weights.push(wi);
        }
    }
    let s: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|x| *x /= s);
    let vertices = indices.iter().map(|&i| pts[i]).collect();
    Ok(SteinitzSimplex {
        indices,
        vertices,
        weights,
    })
}

fn triangle_barycentric(q: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> [f64; 3] {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = q - a;
    let d00 = v0.dot(&v0);
    let d01 = v0.dot(&v1);
    let d11 = v1.dot(&v1);
    let d20 = v2.dot(&v0);
    let d21 = v2.dot(&v1);
    let den = d00 * d11 - d01 * d01;
    let mut v = (d11 * d20 - d01 * d21) / den;
    let mut w = (d00 * d21 - d01 * d20) / den;
    v = v.max(0.0);
    w = w.max(0.0);
    let mut u = 1.0 - v - w;
    if u < 0.0 {
        let s = v + w;
        v /= s;
        w /= s;
        u = 0.0;
    }
    [u, v, w]
}

/// Geodesic convexification of a cloud on S².
#[derive(Debug, Clone, PartialEq)]
pub enum Convexification {
    /// Origin in the hull: the convexification is the whole sphere.
    WholeSphere,
    /// Gnomic projection of the hull.
    Projected(ConvexHull),
}

impl Convexification {
    pub fn contains(&self, p: &UnitVec3, tol: f64) -> bool {
        match self {
            Convexification::WholeSphere => true,
            Convexification::Projected(h) => h.ray_hits(&p.vec(), tol),
        }
    }
}

pub fn geodesic_convexification(cloud: &PointCloud3) -> Convexification {
    let hull = convex_hull3(cloud).expect("cloud is non-empty");
    match locate_origin_in_hull(&hull, DEFAULT_BOUNDARY_TOL).tag {
        OriginTag::Exterior => Convexification::Projected(hull),
        _ => Convexification::WholeSphere,
    }
}

/// Deterministic Fibonacci lattice point `i` of `n`.
pub fn fibonacci_direction(i: usize, n: usize) -> Vec3 {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = golden * i as f64;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Typical angular spacing of an `n`-point lattice.
pub fn lattice_spacing(n: usize) -> f64 {
    (4.0 * std::f64::consts::PI / n as f64).sqrt()
}

/// Extreme rays of cone(cloud) when the cloud lies in an open hemisphere
/// about some cheap direction; otherwise the whole cloud.
fn extreme_rays(points: &[Vec3]) -> Vec<Vec3> {
    let mean: Vec3 = points.iter().map(|p| p.normalize()).sum();
    if let Ok(h0) = UnitVec3::normalize(mean) {
        let h = h0.vec();
        if points.iter().all(|p| p.dot(&h) > 1e-9 * p.norm()) {
            let (u, w) = tangent_basis(&h0);
            let coords: Vec<(f64, f64)> = points
                .iter()
                .map(|p| {
                    let s = p.dot(&h);
                    (p.dot(&u) / s, p.dot(&w) / s)
                })
                .collect();
            let idx: Vec<usize> = (0..points.len()).collect();
            let ring = hull_2d(&coords, &idx, 0.0);
            if ring.len() >= 3 {
                return ring.into_iter().map(|i| points[i]).collect();
            }
        }
    }
    points.to_vec()
}

/// Gnomic projection of the barycenter of the lattice directions h with
/// ⟨p, h⟩ ≥ 0 (closed) or > 0 (open) for all cloud points.
pub fn hemisphere_set_barycenter(
    cloud: &PointCloud3,
    closed: bool,
    n_dirs: usize,
) -> Result<UnitVec3, ConvexityError> {
    if n_dirs == 0 {
        return Err(ConvexityError::InvalidInput("n_dirs must be positive".into()));
    }
    let kind = if closed { "closed" } else { "open" };
    let mut gens = extreme_rays(cloud.points());
    let mut sum = Vec3::zeros();
    let mut count = 0usize;
    for i in 0..n_dirs {
        let h = fibonacci_direction(i, n_dirs);
        let mut ok = true;
        for j in 0..gens.len() {
            let d = gens[j].dot(&h);
            if (closed && d < 0.0) || (!closed && d <= 0.0) {
                ok = false;
                gens.swap(0, j);
                break;
            }
        }
        if ok {
            sum += h;
            count += 1;
        }
    }
    if count == 0 {
        return Err(ConvexityError::NoHemisphere { kind });
    }
    gnomic_project(&sum).map_err(|_| ConvexityError::NoHemisphere { kind })
}

/// Accepted lattice directions (for diagnostics and tests).
pub fn accepted_directions(cloud: &PointCloud3, closed: bool, n_dirs: usize) -> Vec<Vec3> {
    (0..n_dirs)
        .map(|i| fibonacci_direction(i, n_dirs))
        .filter(|h| {
            cloud.points().iter().all(|p| {
                let d = p.dot(h);
                if closed {
                    d >= 0.0
                } else {
                    d > 0.0
                }
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom3::Rotation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_unit(rng: &mut ChaCha8Rng) -> Vec3 {
        loop {
            let v = Vec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 0.1 && n < 1.0 {
                return v / n;
            }
        }
    }

    fn octahedron() -> PointCloud3 {
        PointCloud3::new(vec![
            Vec3::x(),
            -Vec3::x(),
            Vec3::y(),
            -Vec3::y(),
            Vec3::z(),
            -Vec3::z(),
        ])
        .unwrap()
    }

    // brute-force facet check: every hull facet plane has all points on one side
    fn check_hull(cloud: &PointCloud3, hull: &ConvexHull) {
        for f in hull.facets() {
            for p in cloud.points() {
                assert!(f.normal.dot(p) <= f.offset + 1e-9);
            }
        }
    }

    #[test]
    fn octahedron_has_eight_facets() {
        let h = convex_hull3(&octahedron()).unwrap();
        assert_eq!(h.dimension(), 3);
        assert_eq!(h.facets().len(), 8);
        assert_eq!(h.vertices().len(), 6);
        check_hull(&octahedron(), &h);
    }

    #[test]
    fn random_tetrahedron_and_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let c = PointCloud3::new((0..4).map(|_| rand_unit(&mut rng)).collect()).unwrap();
            let h = convex_hull3(&c).unwrap();
            assert_eq!(h.facets().len(), 4);
            check_hull(&c, &h);
        }
        for n in [10, 50, 300] {
            let pts: Vec<Vec3> = (0..n)
                .map(|_| rand_unit(&mut rng) * rng.random_range(0.2..1.0))
                .collect();
            let c = PointCloud3::new(pts).unwrap();
            let h = convex_hull3(&c).unwrap();
            check_hull(&c, &h);
            // Euler: F = 2V − 4 for a triangulated sphere
            assert_eq!(h.facets().len(), 2 * h.vertices().len() - 4);
        }
    }

    #[test]
    fn degenerate_hulls() {
        let p = Vec3::new(0.3, 0.1, 0.2);
        let h = convex_hull3(&PointCloud3::new(vec![p; 5]).unwrap()).unwrap();
        assert_eq!(h.dimension(), 0);
        let h = convex_hull3(&PointCloud3::new(vec![p, p * 2.0, p * 3.0]).unwrap()).unwrap();
        assert_eq!(h.dimension(), 1);
        let sq = vec![Vec3::x(), Vec3::y(), -Vec3::x(), -Vec3::y(), Vec3::zeros()];
        let h = convex_hull3(&PointCloud3::new(sq).unwrap()).unwrap();
        assert_eq!(h.dimension(), 2);
        assert_eq!(h.vertices().len(), 4);
        assert!(convex_hull3(&PointCloud3(vec![])).is_err());
    }

    #[test]
    fn origin_location_examples() {
        let loc = locate_origin(&octahedron(), DEFAULT_BOUNDARY_TOL);
        assert_eq!(loc.tag, OriginTag::Interior);

        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let cap: Vec<Vec3> = (0..200)
            .map(|_| rand_unit(&mut rng))
            .filter(|p| p.z >= 0.1)
            .collect();
        let loc = locate_origin(&PointCloud3::new(cap).unwrap(), DEFAULT_BOUNDARY_TOL);
        assert_eq!(loc.tag, OriginTag::Exterior);
        assert!(loc.direction().unwrap().z() > 0.9);

        let roots: Vec<Vec3> = (0..3)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                Vec3::new(a.cos(), a.sin(), 0.0)
            })
            .collect();
        let loc = locate_origin(&PointCloud3::new(roots).unwrap(), DEFAULT_BOUNDARY_TOL);
        assert_eq!(loc.tag, OriginTag::Boundary);
    }

    // rejection oracle over random directions
    fn oracle_non_interior(pts: &[Vec3], rng: &mut ChaCha8Rng, tol: f64) -> bool {
        (0..20_000).any(|_| {
            let h = rand_unit(rng);
            pts.iter().all(|p| p.dot(&h) >= -tol)
        })
    }

    #[test]
    fn origin_location_matches_oracle_on_small_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..60 {
            let n = 3 + trial % 10;
            // bias toward a cap half of the time
            let bias = if trial % 2 == 0 { 0.0 } else { 0.6 };
            let pts: Vec<Vec3> = (0..n)
                .map(|_| (rand_unit(&mut rng) + Vec3::z() * bias).normalize())
                .collect();
            let loc = locate_origin(&PointCloud3::new(pts.clone()).unwrap(), DEFAULT_BOUNDARY_TOL);
            if loc.tag == OriginTag::Interior {
                assert!(loc.margin < -1e-3 || !oracle_non_interior(&pts, &mut rng, 0.0));
            } else {
                let h = loc.direction().unwrap().vec();
                assert!(pts.iter().all(|p| p.dot(&h) >= -DEFAULT_BOUNDARY_TOL));
            }
        }
    }

    #[test]
    fn steinitz_examples() {
        let c = octahedron();
        let s = steinitz_simplex(&c, &Vec3::x()).unwrap();
        assert_eq!(s.indices, vec![0]);
        let tet = vec![
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(1.0, -1.0, -1.0),
            Vec3::new(-1.0, 1.0, -1.0),
            Vec3::new(-1.0, -1.0, 1.0),
        ];
        let s = steinitz_simplex(&PointCloud3::new(tet).unwrap(), &Vec3::zeros()).unwrap();
        assert_eq!(s.dimension(), 3);
        for w in &s.weights {
            assert!((w - 0.25).abs() < 1e-12);
        }
        assert!(matches!(
            steinitz_simplex(&c, &Vec3::new(2.0, 0.0, 0.0)),
            Err(ConvexityError::NotInHull { .. })
        ));
    }

    // exhaustive oracle: some 4-subset contains p
    fn exhaustive_contains(pts: &[Vec3], p: &Vec3) -> bool {
        let n = pts.len();
        for a in 0..n {
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let m = nalgebra::Matrix3::from_columns(&[
                            pts[a] - pts[d],
                            pts[b] - pts[d],
                            pts[c] - pts[d],
                        ]);
                        if let Some(inv) = m.try_inverse() {
                            let x = inv * (p - pts[d]);
                            let w4 = 1.0 - x.sum();
                            if x.iter().all(|v| *v >= -1e-12) && w4 >= -1e-12 {
                                return true;
                            }
                        }
                    }
                }
            }
        }
        false
    }

    #[test]
    fn steinitz_random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let mut done = 0;
        while done < 20 {
            let pts: Vec<Vec3> = (0..20).map(|_| rand_unit(&mut rng)).collect();
            let cloud = PointCloud3::new(pts.clone()).unwrap();
            if locate_origin(&cloud, 1e-8).tag != OriginTag::Interior {
                continue;
            }
            assert!(exhaustive_contains(&pts, &Vec3::zeros()));
            let s = steinitz_simplex(&cloud, &Vec3::zeros()).unwrap();
            assert!(s.combination().norm() < 1e-9);
            assert!(s.weights.iter().all(|w| *w > 0.0));
            assert!((s.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            done += 1;
        }
    }

    #[test]
    fn convexification_examples() {
        let a = Vec3::new(1.0, 0.0, 0.0);
        let b = Vec3::new(0.99, 0.141, 0.0).normalize();
        let gc = geodesic_convexification(&PointCloud3::new(vec![a, b]).unwrap());
        let mid = UnitVec3::normalize(a + b).unwrap();
        assert!(gc.contains(&mid, 1e-9));
        assert!(!gc.contains(&UnitVec3::e2(), 1e-9));
        let gc = geodesic_convexification(&PointCloud3::new(vec![a, -a]).unwrap());
        assert_eq!(gc, Convexification::WholeSphere);
    }

    #[test]
    fn convexification_of_cap_is_inside_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let pts: Vec<Vec3> = (0..500)
            .map(|_| rand_unit(&mut rng))
            .filter(|p| p.z > 0.5)
            .collect();
        let gc = geodesic_convexification(&PointCloud3::new(pts.clone()).unwrap());
        assert!(matches!(gc, Convexification::Projected(_)));
        for _ in 0..2000 {
            let q = UnitVec3::from_unit(rand_unit(&mut rng));
            if gc.contains(&q, 1e-12) {
                assert!(q.z() > 0.5 - 1e-9);
            }
        }
        // every sample point and pairwise midpoints are members
        for w in pts.windows(2) {
            let m = UnitVec3::normalize(w[0] + w[1]).unwrap();
            assert!(gc.contains(&m, 1e-9));
        }
    }

    #[test]
    fn barycenter_examples() {
        let p = UnitVec3::new(0.3, -0.2, 0.9).unwrap();
        let h = hemisphere_set_barycenter(&PointCloud3::from_units(&[p]).unwrap(), false, 20_000).unwrap();
        assert!(h.distance(&p) < 2.0 * lattice_spacing(20_000));

        let pts: Vec<Vec3> = (0..24)
            .map(|k| {
                let a = k as f64 * std::f64::consts::PI / 12.0;
                Vec3::new(0.5 * a.cos(), 0.5 * a.sin(), 0.75f64.sqrt())
            })
            .collect();
        let h = hemisphere_set_barycenter(&PointCloud3::new(pts).unwrap(), true, 20_000).unwrap();
        assert!(h.distance(&UnitVec3::e3()) < 2.0 * lattice_spacing(20_000));
    }

    #[test]
    fn barycenter_of_two_orthogonal_points_matches_dense_oracle() {
        let c = PointCloud3::new(vec![Vec3::x(), Vec3::y()]).unwrap();
        let expect = UnitVec3::new(1.0, 1.0, 0.0).unwrap();
        let dense = hemisphere_set_barycenter(&c, true, 1_000_000).unwrap();
        assert!(dense.distance(&expect) < 1e-3);
        let coarse = hemisphere_set_barycenter(&c, true, 20_000).unwrap();
        assert!(coarse.distance(&dense) < 2.0 * lattice_spacing(20_000));
        let none = PointCloud3::new(vec![Vec3::x(), -Vec3::x(), Vec3::y(), -Vec3::y(), Vec3::z(), -Vec3::z()]).unwrap();
        assert!(matches!(
            hemisphere_set_barycenter(&none, true, 20_000),
            Err(ConvexityError::NoHemisphere { .. })
        ));
    }

    #[test]
    fn barycenter_equivariance_and_convexity() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let n = 20_000;
        for _ in 0..5 {
            let center = rand_unit(&mut rng);
            let pts: Vec<Vec3> = (0..30)
                .map(|_| (center * 2.0 + rand_unit(&mut rng)).normalize())
                .collect();
            let cloud = PointCloud3::new(pts.clone()).unwrap();
            let h = hemisphere_set_barycenter(&cloud, true, n).unwrap();
            let r = Rotation::from_axis_angle(&rand_unit(&mut rng), rng.random_range(0.0..3.0));
            let rotated = PointCloud3::new(pts.iter().map(|p| r.apply(p)).collect()).unwrap();
            let hr = hemisphere_set_barycenter(&rotated, true, n).unwrap();
            assert!(hr.distance(&r.apply_unit(&h)) < 2.0 * lattice_spacing(n));

            let acc = accepted_directions(&cloud, true, 4000);
            for _ in 0..200 {
                let a = acc[rng.random_range(0..acc.len())];
                let b = acc[rng.random_range(0..acc.len())];
                if (a + b).norm() < 1e-9 {
                    continue;
                }
                let m = (a + b).normalize();
                assert!(pts.iter().all(|p| p.dot(&m) >= -1e-12));
            }
        }
    }
}
