//! Convex bodies, subspace frames and projectors, planar shadows and
//! sections, and inertia tensors.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const FRAME_TOL: f64 = 1e-12;
const PROJECTOR_TOL: f64 = 1e-10;
/// Seed for the shuffle inside the minimal enclosing circle; any fixed value
/// keeps functional evaluation a pure function of its input.
const CIRCLE_SEED: u64 = 0x5eed_c1c1e;

#[derive(Serialize, Deserialize)]
struct BodyJson {
    dimension: usize,
    vertices: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct PointsJson {
    dimension: usize,
    points: Vec<Vec<f64>>,
}

fn check_points(dimension: usize, pts: &[Vec<f64>], what: &str) -> Result<()> {
    if dimension == 0 {
        return Err(Error::Validation("dimension must be positive".into()));
    }
    for (i, p) in pts.iter().enumerate() {
        if p.len() != dimension {
            return Err(Error::Validation(format!(
                "{what} {i} has {} coordinates, expected {dimension}",
                p.len()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("{what} {i} has a non-finite coordinate")));
        }
    }
    Ok(())
}

/// A polytope given by its vertices (any point list whose hull is the body).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodyJson", into = "BodyJson")]
pub struct ConvexBody {
    dimension: usize,
    vertices: Vec<DVector<f64>>,
}

impl TryFrom<BodyJson> for ConvexBody {
    type Error = Error;
    fn try_from(b: BodyJson) -> Result<Self> {
        ConvexBody::new(b.dimension, b.vertices)
    }
}

impl From<ConvexBody> for BodyJson {
    fn from(b: ConvexBody) -> Self {
        BodyJson {
            dimension: b.dimension,
            vertices: b.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

impl ConvexBody {
    /// Rejects bodies that do not affinely span their ambient space.
    pub fn new(dimension: usize, vertices: Vec<Vec<f64>>) -> Result<Self> {
        check_points(dimension, &vertices, "vertex")?;
        if vertices.len() < dimension + 1 {
            return Err(Error::Validation(format!(
                "a proper body in R^{dimension} needs at least {} vertices, got {}",
                dimension + 1,
                vertices.len()
            )));
        }
        let vertices: Vec<DVector<f64>> = vertices.into_iter().map(DVector::from_vec).collect();
        let diffs = DMatrix::from_fn(dimension, vertices.len() - 1, |r, c| {
            vertices[c + 1][r] - vertices[0][r]
        });
        let scale = diffs.amax().max(f64::MIN_POSITIVE);
        if diffs.rank(1e-9 * scale) < dimension {
            return Err(Error::Validation(format!(
                "vertices do not affinely span R^{dimension}"
            )));
        }
        Ok(ConvexBody { dimension, vertices })
    }

    /// `[0,1]^d`.
    pub fn cube(dimension: usize) -> Self {
        let vertices = (0..1usize << dimension)
            .map(|mask| (0..dimension).map(|i| ((mask >> i) & 1) as f64).collect())
            .collect();
        ConvexBody::new(dimension, vertices).expect("cube is proper")
    }

    /// `conv(±e_i)`.
    pub fn cross_polytope(dimension: usize) -> Self {
        let mut vertices = Vec::new();
        for i in 0..dimension {
            for s in [1.0, -1.0] {
                let mut v = vec![0.0; dimension];
                v[i] = s;
                vertices.push(v);
            }
        }
        ConvexBody::new(dimension, vertices).expect("cross-polytope is proper")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn vertices(&self) -> &[DVector<f64>] {
        &self.vertices
    }

    pub fn translated(&self, shift: &[f64]) -> Result<ConvexBody> {
        if shift.len() != self.dimension {
            return Err(Error::LengthMismatch { expected: self.dimension, found: shift.len() });
        }
        let s = DVector::from_column_slice(shift);
        Ok(ConvexBody {
            dimension: self.dimension,
            vertices: self.vertices.iter().map(|v| v + &s).collect(),
        })
    }
}

/// A finite point set, for inertia tensors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointsJson", into = "PointsJson")]
pub struct PointCloud {
    dimension: usize,
    points: Vec<DVector<f64>>,
}

impl TryFrom<PointsJson> for PointCloud {
    type Error = Error;
    fn try_from(p: PointsJson) -> Result<Self> {
        PointCloud::new(p.dimension, p.points)
    }
}

impl From<PointCloud> for PointsJson {
    fn from(p: PointCloud) -> Self {
        PointsJson {
            dimension: p.dimension,
            points: p.points.iter().map(|v| v.iter().copied().collect()).collect(),
        }
    }
}

impl PointCloud {
    pub fn new(dimension: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        check_points(dimension, &points, "point")?;
        if points.is_empty() {
            return Err(Error::Validation("point cloud is empty".into()));
        }
        Ok(PointCloud {
            dimension,
            points: points.into_iter().map(DVector::from_vec).collect(),
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[DVector<f64>] {
        &self.points
    }

    /// `Σ x xᵀ`.
    pub fn second_moment(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dimension, self.dimension);
        for x in &self.points {
            m.ger(1.0, x, x, 1.0);
        }
        m
    }
}

/// Orthonormal basis of an `n`-dimensional subspace, as the columns of a
/// `dim × n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GrassmannFrame {
    columns: DMatrix<f64>,
}

impl GrassmannFrame {
    pub fn new(columns: DMatrix<f64>) -> Result<Self> {
        if columns.ncols() == 0 || columns.ncols() > columns.nrows() {
            return Err(Error::Validation(format!(
                "a frame needs 1..={} columns, got {}",
                columns.nrows(),
                columns.ncols()
            )));
        }
        let gram = columns.transpose() * &columns;
        let err = (gram - DMatrix::identity(columns.ncols(), columns.ncols())).amax();
        if !(err <= FRAME_TOL) {
            return Err(Error::Validation(format!(
                "frame columns are not orthonormal (deviation {err:.3e})"
            )));
        }
        Ok(GrassmannFrame { columns })
    }

    /// Modified Gram–Schmidt on the columns of `m`.
    pub fn orthonormalize(m: &DMatrix<f64>) -> Result<Self> {
        let mut q = m.clone();
        for j in 0..q.ncols() {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
            let norm = q.column(j).norm();
            if !(norm > 1e-12) {
                return Err(Error::Validation("columns are linearly dependent".into()));
            }
            q.column_mut(j).unscale_mut(norm);
        }
        // a second pass restores orthogonality lost to cancellation
        for j in 0..q.ncols() {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
            let norm = q.column(j).norm();
            q.column_mut(j).unscale_mut(norm);
        }
        GrassmannFrame::new(q)
    }

    /// `span(e_1, ..., e_n)` in `R^dim`.
    pub fn standard(dim: usize, n: usize) -> Result<Self> {
        GrassmannFrame::new(DMatrix::identity(dim, n))
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    pub fn n(&self) -> usize {
        self.columns.ncols()
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    /// Orthonormal frame of the orthogonal complement, built by projecting
    /// out the current columns from whichever standard basis vector keeps the
    /// largest residual.
    pub fn complement(&self) -> GrassmannFrame {
        let dim = self.ambient_dim();
        let mut basis: Vec<DVector<f64>> =
            self.columns.column_iter().map(|c| c.clone_owned()).collect();
        let mut out = Vec::with_capacity(dim - self.n());
        while basis.len() < dim {
            let mut best: Option<(f64, DVector<f64>)> = None;
            for i in 0..dim {
                let mut v = DVector::zeros(dim);
                v[i] = 1.0;
                for _ in 0..2 {
                    for b in &basis {
                        let p = b.dot(&v);
                        v.axpy(-p, b, 1.0);
                    }
                }
                let norm = v.norm();
                if best.as_ref().is_none_or(|(n, _)| norm > *n) {
                    best = Some((norm, v));
                }
            }
            let (norm, v) = best.expect("dim > 0");
            let v = v / norm;
            basis.push(v.clone());
            out.push(v);
        }
        let cols = if out.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&out)
        };
        GrassmannFrame { columns: cols }
    }

    pub fn projector(&self) -> Projector {
        Projector {
            matrix: &self.columns * self.columns.transpose(),
        }
    }

    /// Coordinates of `x` in this frame.
    pub fn coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        self.columns.tr_mul(x)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.columns
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }
}

/// Orthogonal projection matrix onto a half-dimensional subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    matrix: DMatrix<f64>,
}

impl Projector {
    /// Checks `Aᵀ = A`, `A² = A` and `tr A = dim/2`.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let d = matrix.nrows();
        if d != matrix.ncols() || d == 0 || d % 2 == 1 {
            return Err(Error::Validation(format!(
                "projector must be square of even size, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let sym = (&matrix - matrix.transpose()).amax();
        let idem = (&matrix * &matrix - &matrix).amax();
        let tr = (matrix.trace() - (d / 2) as f64).abs();
        if !(sym <= PROJECTOR_TOL && idem <= PROJECTOR_TOL && tr <= PROJECTOR_TOL) {
            return Err(Error::Validation(format!(
                "not a rank-{} projector (symmetry {sym:.1e}, idempotence {idem:.1e}, trace {tr:.1e})",
                d / 2
            )));
        }
        Ok(Projector { matrix })
    }

    pub fn from_frame(f: &GrassmannFrame) -> Result<Self> {
        GrassmannFrame::new(f.columns.clone())?;
        Projector::new(f.projector().matrix)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `I - A`.
    pub fn complement(&self) -> Projector {
        let d = self.matrix.nrows();
        Projector {
            matrix: DMatrix::identity(d, d) - &self.matrix,
        }
    }
}

/// `(a11 - 1/2, a12, ..., a1d)`: first row of `A - I/2`, an odd map to
/// `R^d \ {0}`.
pub fn k_map(a: &Projector) -> DVector<f64> {
    let mut v: DVector<f64> = a.matrix.row(0).transpose();
    v[0] -= 0.5;
    v
}

/// The planar quantities compared between complementary shadows or sections.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    Area,
    Perimeter,
    Circumradius,
}

impl Functional {
    pub const ALL: [Functional; 3] = [Functional::Area, Functional::Perimeter, Functional::Circumradius];

    pub fn name(self) -> &'static str {
        match self {
            Functional::Area => "area",
            Functional::Perimeter => "perimeter",
            Functional::Circumradius => "circumradius",
        }
    }

    /// Parses a comma-separated list such as `area,perimeter`.
    pub fn parse_list(s: &str) -> Result<Vec<Functional>> {
        let list: Vec<Functional> = s
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_>>()?;
        if list.is_empty() {
            return Err(Error::InvalidInput("empty functional list".into()));
        }
        Ok(list)
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Functional::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown functional {s:?}")))
    }
}

/// Area, perimeter and minimal enclosing radius of a planar convex set.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PlanarValues {
    pub area: f64,
    pub perimeter: f64,
    pub circumradius: f64,
}

impl PlanarValues {
    pub fn get(&self, f: Functional) -> f64 {
        match f {
            Functional::Area => self.area,
            Functional::Perimeter => self.perimeter,
            Functional::Circumradius => self.circumradius,
        }
    }

    /// Convex hull of `points`, then its measurements.
    pub fn of_points(points: &[[f64; 2]]) -> PlanarValues {
        let hull = convex_hull(points);
        PlanarValues {
            area: polygon_area(&hull),
            perimeter: polygon_perimeter(&hull),
            circumradius: min_enclosing_circle(&hull).1,
        }
    }
}

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Monotone chain; counter-clockwise, without repeated or collinear points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut p: Vec<[f64; 2]> = points.to_vec();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &[f64; 2]>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

/// Shoelace formula; positive for counter-clockwise input.
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s
}

/// Boundary length; a segment counts both of its sides.
pub fn polygon_perimeter(poly: &[[f64; 2]]) -> f64 {
    match poly.len() {
        0 | 1 => 0.0,
        2 => 2.0 * dist(poly[0], poly[1]),
        m => (0..m).map(|i| dist(poly[i], poly[(i + 1) % m])).sum(),
    }
}

fn circle_two(a: [f64; 2], b: [f64; 2]) -> ([f64; 2], f64) {
    ([(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0], dist(a, b) / 2.0)
}

fn circle_three(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> ([f64; 2], f64) {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    if d.abs() < 1e-300 {
        // collinear: the farthest pair spans the circle
        let pairs = [(a, b), (a, c), (b, c)];
        let (p, q) = pairs
            .into_iter()
            .max_by(|x, y| dist(x.0, x.1).total_cmp(&dist(y.0, y.1)))
            .expect("three pairs");
        return circle_two(p, q);
    }
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    ([a[0] + ux, a[1] + uy], ux.hypot(uy))
}

/// Smallest enclosing circle by randomized incremental construction, with a
/// fixed shuffle seed so the result is reproducible.
pub fn min_enclosing_circle(points: &[[f64; 2]]) -> ([f64; 2], f64) {
    if points.is_empty() {
        return ([0.0, 0.0], 0.0);
    }
    let mut p = points.to_vec();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(CIRCLE_SEED));
    let inside = |c: &([f64; 2], f64), q: [f64; 2]| dist(c.0, q) <= c.1 * (1.0 + 1e-12) + 1e-15;
    let mut c = (p[0], 0.0);
    for i in 1..p.len() {
        if inside(&c, p[i]) {
            continue;
        }
        c = (p[i], 0.0);
        for j in 0..i {
            if inside(&c, p[j]) {
                continue;
            }
            c = circle_two(p[i], p[j]);
            for k in 0..j {
                if !inside(&c, p[k]) {
                    c = circle_three(p[i], p[j], p[k]);
                }
            }
        }
    }
    c
}

fn planar_frame_check(dimension: usize, f: &GrassmannFrame) -> Result<()> {
    if f.ambient_dim() != dimension {
        return Err(Error::LengthMismatch { expected: dimension, found: f.ambient_dim() });
    }
    if dimension != 4 || f.n() != 2 {
        return Err(Error::InvalidInput(format!(
            "planar functionals need 2-planes in R^4, got {}-planes in R^{dimension}",
            f.n()
        )));
    }
    Ok(())
}

/// Coordinates of the body's vertices projected onto the frame's plane.
pub fn project_vertices(c: &ConvexBody, f: &GrassmannFrame) -> Vec<[f64; 2]> {
    c.vertices
        .iter()
        .map(|v| {
            let z = f.coordinates(v);
            [z[0], z[1]]
        })
        .collect()
}

/// Area, perimeter and circumradius of the orthogonal projection of `c`
/// onto the 2-plane spanned by `f`.
pub fn shadow_functionals(c: &ConvexBody, f: &GrassmannFrame) -> Result<PlanarValues> {
    planar_frame_check(c.dimension, f)?;
    Ok(PlanarValues::of_points(&project_vertices(c, f)))
}

/// `α_i(shadow on V) − α_i(shadow on V⊥)` for each selected functional.
pub fn functional_vector(
    c: &ConvexBody,
    f: &GrassmannFrame,
    selection: &[Functional],
) -> Result<Vec<f64>> {
    if selection.is_empty() {
        return Err(Error::InvalidInput("empty functional selection".into()));
    }
    let v = shadow_functionals(c, f)?;
    let w = shadow_functionals(c, &f.complement())?;
    Ok(selection.iter().map(|&s| v.get(s) - w.get(s)).collect())
}

/// Facet `a·x <= b` with `‖a‖ = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfSpace {
    pub normal: DVector<f64>,
    pub offset: f64,
}

/// Vector orthogonal to the `d-1` rows of `m` (a `(d-1) × d` matrix), by
/// signed maximal minors.
fn generalized_cross(m: &DMatrix<f64>) -> DVector<f64> {
    let d = m.ncols();
    DVector::from_fn(d, |i, _| {
        let minor = m.clone().remove_column(i);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        sign * minor.determinant()
    })
}

fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Half-space description from the vertex list: every `d`-subset of
/// vertices whose hyperplane leaves all vertices on one side is a facet
/// candidate; duplicates are merged.
pub fn facets(c: &ConvexBody) -> Vec<HalfSpace> {
    let d = c.dimension;
    let v = &c.vertices;
    let scale = v.iter().map(|x| x.amax()).fold(0.0, f64::max).max(1.0);
    let eps = 1e-9 * scale;
    let mut out: Vec<HalfSpace> = Vec::new();
    for_each_subset(v.len(), d, |idx| {
        let rows = DMatrix::from_fn(d - 1, d, |r, col| v[idx[r + 1]][col] - v[idx[0]][col]);
        let mut a = generalized_cross(&rows);
        let norm = a.norm();
        if norm <= 1e-12 * scale.powi(d as i32 - 1) {
            return;
        }
        a /= norm;
        let b = a.dot(&v[idx[0]]);
        let (mut above, mut below) = (false, false);
        for x in v {
            let s = a.dot(x) - b;
            above |= s > eps;
            below |= s < -eps;
            if above && below {
                return;
            }
        }
        let h = if above {
            HalfSpace { normal: -a, offset: -b }
        } else {
            HalfSpace { normal: a, offset: b }
        };
        let dup = out.iter().any(|g| {
            (&g.normal - &h.normal).amax() < 1e-9 && (g.offset - h.offset).abs() < eps
        });
        if !dup {
            out.push(h);
        }
    });
    out
}

/// A body prepared for central sections: its facets, with the origin
/// strictly inside (all offsets positive).
#[derive(Clone, Debug)]
pub struct SectionBody {
    dimension: usize,
    facets: Vec<HalfSpace>,
}

impl SectionBody {
    pub fn new(c: &ConvexBody) -> Result<Self> {
        let facets = facets(c);
        let scale = c.vertices.iter().map(|x| x.amax()).fold(0.0, f64::max).max(1.0);
        if let Some(h) = facets.iter().find(|h| h.offset <= 1e-9 * scale) {
            return Err(Error::Validation(format!(
                "origin is not interior to the body (facet offset {:.3e})",
                h.offset
            )));
        }
        Ok(SectionBody { dimension: c.dimension, facets })
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    /// Vertices of the polygon `C ∩ V` in frame coordinates, counter-clockwise.
    ///
    /// In frame coordinates the section is `{z : c_i·z <= 1}` with
    /// `c_i = Fᵀa_i / b_i`; its vertices are dual to the edges of
    /// `conv{c_i}`.
    pub fn section_polygon(&self, f: &GrassmannFrame) -> Result<Vec<[f64; 2]>> {
        planar_frame_check(self.dimension, f)?;
        let dual: Vec<[f64; 2]> = self
            .facets
            .iter()
            .map(|h| {
                let z = f.coordinates(&h.normal) / h.offset;
                [z[0], z[1]]
            })
            .collect();
        let hull = convex_hull(&dual);
        if hull.len() < 3 {
            return Err(Error::Internal("section dual hull is degenerate".into()));
        }
        let m = hull.len();
        let mut poly = Vec::with_capacity(m);
        for i in 0..m {
            let (p, q) = (hull[i], hull[(i + 1) % m]);
            let det = p[0] * q[1] - p[1] * q[0];
            poly.push([(q[1] - p[1]) / det, (p[0] - q[0]) / det]);
        }
        Ok(poly)
    }

    pub fn section_functionals(&self, f: &GrassmannFrame) -> Result<PlanarValues> {
        Ok(PlanarValues::of_points(&self.section_polygon(f)?))
    }

    /// `α_i(C ∩ V) − α_i(C ∩ V⊥)`.
    pub fn functional_vector(&self, f: &GrassmannFrame, selection: &[Functional]) -> Result<Vec<f64>> {
        if selection.is_empty() {
            return Err(Error::InvalidInput("empty functional selection".into()));
        }
        let v = self.section_functionals(f)?;
        let w = self.section_functionals(&f.complement())?;
        Ok(selection.iter().map(|&s| v.get(s) - w.get(s)).collect())
    }
}

/// Coefficients of `det(A − λI)`, highest power first (leading entry
/// `(-1)^d`), by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &DMatrix<f64>) -> Vec<f64> {
    let d = a.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    // c[k] is the coefficient of λ^(d-k) in det(λI − A)
    let mut c = vec![1.0];
    let mut m = DMatrix::<f64>::zeros(d, d);
    for k in 1..=d {
        m = a * &m + &id * c[k - 1];
        let am = a * &m;
        c.push(-am.trace() / k as f64);
    }
    let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
    c.into_iter().map(|x| sign * x).collect()
}

/// `P M P` for `M = Σ x xᵀ`.
pub fn inertia_tensor(points: &PointCloud, p: &Projector) -> DMatrix<f64> {
    p.matrix() * points.second_moment() * p.matrix()
}

/// Coefficients of `λ^(2n−1), ..., λ^n` in `det(I_P − λI)`; the lower
/// ones vanish because `I_P` has rank at most `n`.
pub fn inertia_char_coeffs(points: &PointCloud, f: &GrassmannFrame) -> Result<Vec<f64>> {
    if f.ambient_dim() != points.dimension {
        return Err(Error::LengthMismatch { expected: points.dimension, found: f.ambient_dim() });
    }
    let cp = char_poly(&inertia_tensor(points, &f.projector()));
    Ok(cp[1..=f.n()].to_vec())
}

/// Coefficient differences between `V` and `V⊥`.
pub fn inertia_vector(points: &PointCloud, f: &GrassmannFrame) -> Result<Vec<f64>> {
    let a = inertia_char_coeffs(points, f)?;
    let b = inertia_char_coeffs(points, &f.complement())?;
    Ok(a.iter().zip(&b).map(|(x, y)| x - y).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::random_frame;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn body_validation() {
        assert!(ConvexBody::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(ConvexBody::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![2.0, 0.0]]).is_err());
        assert!(ConvexBody::new(2, vec![vec![0.0, 0.0], vec![1.0], vec![2.0, 1.0]]).is_err());
        assert!(ConvexBody::new(2, vec![vec![0.0, f64::NAN], vec![1.0, 0.0], vec![2.0, 1.0]]).is_err());
        assert!(ConvexBody::new(2, vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).is_ok());
        let json = r#"{"dimension":2,"vertices":[[0,0],[1,0],[0,1]]}"#;
        let b: ConvexBody = serde_json::from_str(json).unwrap();
        assert_eq!(serde_json::to_string(&b).unwrap(), r#"{"dimension":2,"vertices":[[0.0,0.0],[1.0,0.0],[0.0,1.0]]}"#);
        assert!(serde_json::from_str::<ConvexBody>(r#"{"dimension":2,"vertices":[[0,0]]}"#).is_err());
    }

    #[test]
    fn frame_and_projector_basics() {
        let f = GrassmannFrame::standard(4, 2).unwrap();
        let a = Projector::from_frame(&f).unwrap();
        assert_eq!(a.matrix(), &DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0])));
        assert_eq!(k_map(&a).as_slice(), &[0.5, 0.0, 0.0, 0.0]);
        let g = f.complement();
        let sum = a.matrix() + g.projector().matrix();
        assert!((sum - DMatrix::identity(4, 4)).amax() < 1e-15);
        assert!(GrassmannFrame::new(DMatrix::from_element(4, 2, 1.0)).is_err());
        assert!(Projector::new(DMatrix::identity(4, 4)).is_err());
    }

    #[test]
    fn random_projectors_satisfy_invariants() {
        let mut r = rng(1);
        for dim in [2, 4, 6, 8] {
            for _ in 0..200 {
                let f = random_frame(dim, dim / 2, &mut r);
                let a = Projector::from_frame(&f).unwrap();
                let c = f.complement();
                GrassmannFrame::new(c.columns().clone()).unwrap();
                let b = Projector::from_frame(&c).unwrap();
                assert!((a.matrix() + b.matrix() - DMatrix::identity(dim, dim)).amax() < 1e-12);
                assert!((a.matrix() * b.matrix()).amax() < 1e-12);
                let k = k_map(&a);
                assert!(k.norm() > 1e-9);
                assert!((k_map(&a.complement()) + &k).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn hull_examples() {
        let pts = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [0.5, 0.5], [0.5, 0.0], [1.0, 1.0]];
        let h = convex_hull(&pts);
        assert_eq!(h, vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(polygon_area(&h), 1.0);
        assert_eq!(polygon_perimeter(&h), 4.0);
        let seg = convex_hull(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]]);
        assert_eq!(seg.len(), 2);
        assert_eq!(polygon_area(&seg), 0.0);
        assert!(close(polygon_perimeter(&seg), 4.0 * 2f64.sqrt(), 1e-15));
        assert_eq!(convex_hull(&[[3.0, 4.0]]), vec![[3.0, 4.0]]);
    }

    #[test]
    fn circle_examples() {
        let (c, r) = min_enclosing_circle(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]);
        assert!(close(r, 2f64.sqrt() / 2.0, 1e-15) && close(c[0], 0.5, 1e-15));
        // obtuse triangle: the long side is a diameter
        let (_, r) = min_enclosing_circle(&[[-1.0, 0.0], [1.0, 0.0], [0.0, 0.1]]);
        assert!(close(r, 1.0, 1e-15));
        let (_, r) = min_enclosing_circle(&[[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]);
        assert!(close(r, 1.0 / 3f64.sqrt(), 1e-15));
        assert_eq!(min_enclosing_circle(&[[2.0, 3.0]]), ([2.0, 3.0], 0.0));
    }

    #[test]
    fn cube_and_cross_polytope_shadows() {
        let f = GrassmannFrame::standard(4, 2).unwrap();
        let v = shadow_functionals(&ConvexBody::cube(4), &f).unwrap();
        assert!(close(v.area, 1.0, 1e-15) && close(v.perimeter, 4.0, 1e-15));
        assert!(close(v.circumradius, 2f64.sqrt() / 2.0, 1e-15));
        let v = shadow_functionals(&ConvexBody::cross_polytope(4), &f).unwrap();
        assert!(close(v.area, 2.0, 1e-15) && close(v.perimeter, 4.0 * 2f64.sqrt(), 1e-14));
        assert!(close(v.circumradius, 1.0, 1e-15));
        let fv = functional_vector(&ConvexBody::cube(4), &f, &Functional::ALL).unwrap();
        assert!(fv.iter().all(|x| x.abs() < 1e-14));
        let wrong = GrassmannFrame::standard(6, 3).unwrap();
        assert!(shadow_functionals(&ConvexBody::cube(4), &wrong).is_err());
    }

    fn random_body(r: &mut ChaCha8Rng, m: usize) -> ConvexBody {
        use rand_distr::{Distribution, StandardNormal};
        let vs = (0..m)
            .map(|_| (0..4).map(|_| StandardNormal.sample(r)).collect())
            .collect();
        ConvexBody::new(4, vs).unwrap()
    }

    #[test]
    fn shadows_are_functions_of_the_subspace() {
        let mut r = rng(7);
        for _ in 0..50 {
            let c = random_body(&mut r, 20);
            let f = random_frame(4, 2, &mut r);
            let v = shadow_functionals(&c, &f).unwrap();
            let th: f64 = 0.7;
            let rot = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
            let g = GrassmannFrame::new(f.columns() * rot).unwrap();
            let w = shadow_functionals(&c, &g).unwrap();
            for s in Functional::ALL {
                assert!(close(v.get(s), w.get(s), 1e-9));
            }
            let fv = functional_vector(&c, &f, &Functional::ALL).unwrap();
            let gv = functional_vector(&c, &f.complement(), &Functional::ALL).unwrap();
            for (x, y) in fv.iter().zip(&gv) {
                assert!((x + y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rotating_body_and_frame_together_changes_nothing() {
        let mut r = rng(8);
        for _ in 0..20 {
            let c = random_body(&mut r, 15);
            let f = random_frame(4, 2, &mut r);
            let q = random_frame(4, 4, &mut r).columns().clone();
            let rotated = ConvexBody::new(
                4,
                c.vertices().iter().map(|v| (&q * v).iter().copied().collect()).collect(),
            )
            .unwrap();
            let g = GrassmannFrame::new(&q * f.columns()).unwrap();
            let (v, w) = (shadow_functionals(&c, &f).unwrap(), shadow_functionals(&rotated, &g).unwrap());
            for s in Functional::ALL {
                assert!(close(v.get(s), w.get(s), 1e-9));
            }
        }
    }

    #[test]
    fn cross_polytope_facets_and_sections() {
        let c = ConvexBody::cross_polytope(4);
        let fs = facets(&c);
        assert_eq!(fs.len(), 16);
        for h in &fs {
            assert!(close(h.offset, 0.5, 1e-12));
        }
        assert_eq!(facets(&ConvexBody::cube(4)).len(), 8);
        let s = SectionBody::new(&c).unwrap();
        let f = GrassmannFrame::standard(4, 2).unwrap();
        let v = s.section_functionals(&f).unwrap();
        assert!(close(v.area, 2.0, 1e-12) && close(v.circumradius, 1.0, 1e-12));
        // cube [0,1]^4 touches the origin
        assert!(SectionBody::new(&ConvexBody::cube(4)).is_err());
        let centred = ConvexBody::cube(4).translated(&[-0.5; 4]).unwrap();
        let s = SectionBody::new(&centred).unwrap();
        let v = s.section_functionals(&f).unwrap();
        assert!(close(v.area, 1.0, 1e-12) && close(v.perimeter, 4.0, 1e-12));
    }

    #[test]
    fn sections_match_brute_force_clipping() {
        // clip a large square by each facet restricted to the plane
        let mut r = rng(9);
        for _ in 0..20 {
            let c = random_body(&mut r, 25);
            let Ok(s) = SectionBody::new(&c) else { continue };
            let f = random_frame(4, 2, &mut r);
            let mut poly = vec![[-100.0, -100.0], [100.0, -100.0], [100.0, 100.0], [-100.0, 100.0]];
            for h in s.facets() {
                let a = f.coordinates(&h.normal);
                let val = |p: [f64; 2]| a[0] * p[0] + a[1] * p[1] - h.offset;
                let mut next = Vec::new();
                for i in 0..poly.len() {
                    let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
                    let (vp, vq) = (val(p), val(q));
                    if vp <= 0.0 {
                        next.push(p);
                    }
                    if (vp < 0.0) != (vq < 0.0) {
                        let t = vp / (vp - vq);
                        next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
                    }
                }
                poly = next;
            }
            let want = PlanarValues::of_points(&poly);
            let got = s.section_functionals(&f).unwrap();
            for fnl in Functional::ALL {
                assert!(close(want.get(fnl), got.get(fnl), 1e-9), "{fnl}");
            }
        }
    }

    #[test]
    fn char_poly_examples() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 0.0, 0.0]));
        assert_eq!(char_poly(&a), vec![1.0, -2.0, 1.0, 0.0, 0.0]);
        let b = DMatrix::from_row_slice(3, 3, &[2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, 5.0]);
        // -(λ-2)(λ-3)(λ-5)
        assert_eq!(char_poly(&b), vec![-1.0, 10.0, -31.0, 30.0]);
    }

    #[test]
    fn inertia_examples() {
        let pts = PointCloud::new(4, (0..4).map(|i| (0..4).map(|j| (i == j) as u8 as f64).collect()).collect()).unwrap();
        let f = GrassmannFrame::standard(4, 2).unwrap();
        assert_eq!(inertia_char_coeffs(&pts, &f).unwrap(), vec![-2.0, 1.0]);
        assert_eq!(inertia_vector(&pts, &f).unwrap(), vec![0.0, 0.0]);
        let mut r = rng(3);
        use rand::Rng;
        let raw: Vec<Vec<f64>> = (0..30).map(|_| (0..4).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
        let pts = PointCloud::new(4, raw.clone()).unwrap();
        let scaled = PointCloud::new(4, raw.iter().map(|p| p.iter().map(|x| 3.0 * x).collect()).collect()).unwrap();
        let f = random_frame(4, 2, &mut r);
        let a = inertia_char_coeffs(&pts, &f).unwrap();
        let b = inertia_char_coeffs(&scaled, &f).unwrap();
        assert!(close(b[0], 9.0 * a[0], 1e-9) && close(b[1], 81.0 * a[1], 1e-7));
        let cp = char_poly(&inertia_tensor(&pts, &f.projector()));
        assert!(cp[3].abs() < 1e-8 && cp[4].abs() < 1e-8);
        let ev = inertia_tensor(&pts, &f.projector()).symmetric_eigenvalues();
        let mut ev: Vec<f64> = ev.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        assert!(close(a[0], -(ev[2] + ev[3]), 1e-9) && close(a[1], ev[2] * ev[3], 1e-9));
    }

    #[test]
    fn functional_parsing() {
        assert_eq!(Functional::parse_list("area, circumradius").unwrap(), vec![Functional::Area, Functional::Circumradius]);
        assert!(Functional::parse_list("volume").is_err());
    }
}
