//! Simplex geometry: edge statistics, altitudes, thickness, circumspheres,
//! and the dimension-gradated quality classification (good simplices and
//! flakes).
//!
//! Two layers are exposed. The [`kernel`] functions work directly on vertex
//! coordinate lists and are what the hot loops use. The top-level functions
//! take an abstract [`Simplex`] plus anything implementing [`VertexSource`]
//! (a [`crate::net::Net`] or a plain point slice) and resolve coordinates
//! first, so periodic nets get unwrapped vertices for free.

use std::fmt;

use thiserror::Error;

/// Absolute geometric tolerance (inputs are assumed normalized so that the
/// sampling radius is of order one).
pub const TOL_GEOM: f64 = 1e-9;

/// Relative conditioning threshold: an affine frame whose pivoted residual
/// drops below `TOL_DEGEN` times its leading column norm is rank deficient.
pub const TOL_DEGEN: f64 = 1e-12;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum GeomError {
    #[error("vertex index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("simplex has repeated vertex {0}")]
    RepeatedVertex(usize),
    #[error("simplex must have at least one vertex")]
    EmptySimplex,
    #[error("vertex {0} is not in the simplex")]
    NotAVertex(usize),
    #[error("operation needs a simplex of dimension at least {needed}, got {got}")]
    DimensionTooLow { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("simplex has no circumsphere")]
    NoCircumsphere,
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
}

/// A point of ℝ^m.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(m: usize) -> Self {
        Point(vec![0.0; m])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn distance(&self, other: &Point) -> f64 {
        dist(&self.0, &other.0)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// An abstract simplex: a sorted set of distinct point indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(Vec<usize>);

impl Simplex {
    pub fn new(mut vertices: Vec<usize>) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::EmptySimplex);
        }
        vertices.sort_unstable();
        if let Some(w) = vertices.windows(2).find(|w| w[0] == w[1]) {
            return Err(GeomError::RepeatedVertex(w[0]));
        }
        Ok(Simplex(vertices))
    }

    /// Builds a simplex from indices already sorted and distinct.
    pub(crate) fn from_sorted(vertices: Vec<usize>) -> Self {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    /// The face opposite `v`, or `None` if `v` is not a vertex or the
    /// simplex is a single vertex.
    pub fn opposite(&self, v: usize) -> Option<Simplex> {
        let pos = self.position(v)?;
        if self.0.len() == 1 {
            return None;
        }
        let mut rest = self.0.clone();
        rest.remove(pos);
        Some(Simplex(rest))
    }

    /// The join with a vertex not already present.
    pub fn join(&self, v: usize) -> Result<Simplex, GeomError> {
        if self.contains(v) {
            return Err(GeomError::RepeatedVertex(v));
        }
        let mut all = self.0.clone();
        all.push(v);
        all.sort_unstable();
        Ok(Simplex(all))
    }

    /// Every non-empty face, ordered by dimension and then lexicographically.
    pub fn faces(&self) -> Vec<Simplex> {
        face_masks(self.0.len())
            .into_iter()
            .map(|mask| {
                Simplex(
                    self.0
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .map(|(_, &v)| v)
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Bitmasks over `n` local vertices for all non-empty faces, sorted by
/// face size then lexicographically on the selected positions.
pub(crate) fn face_masks(n: usize) -> Vec<u32> {
    assert!(n < 32, "face enumeration limited to 31 vertices");
    let mut masks: Vec<u32> = (1..(1u32 << n)).collect();
    masks.sort_by_key(|&mask| {
        let positions: Vec<u32> = (0..n as u32).filter(|i| mask & (1 << i) != 0).collect();
        (mask.count_ones(), positions)
    });
    masks
}

/// Something that can resolve a simplex into vertex coordinates.
pub trait VertexSource {
    fn ambient_dim(&self) -> usize;
    fn vertex_coords(&self, simplex: &Simplex) -> Result<Vec<Point>, GeomError>;
}

impl VertexSource for [Point] {
    fn ambient_dim(&self) -> usize {
        self.first().map_or(0, Point::dim)
    }

    fn vertex_coords(&self, simplex: &Simplex) -> Result<Vec<Point>, GeomError> {
        simplex
            .vertices()
            .iter()
            .map(|&i| {
                self.get(i).cloned().ok_or(GeomError::IndexOutOfRange {
                    index: i,
                    len: self.len(),
                })
            })
            .collect()
    }
}

impl VertexSource for Vec<Point> {
    fn ambient_dim(&self) -> usize {
        self.as_slice().ambient_dim()
    }

    fn vertex_coords(&self, simplex: &Simplex) -> Result<Vec<Point>, GeomError> {
        self.as_slice().vertex_coords(simplex)
    }
}

/// Circumscribing data of a simplex: the smallest circumscribing ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Circumdata {
    pub exists: bool,
    pub center: Point,
    pub radius: f64,
}

impl Circumdata {
    fn missing(m: usize) -> Self {
        Circumdata {
            exists: false,
            center: Point::origin(m),
            radius: f64::INFINITY,
        }
    }
}

pub fn edge_extremes<S: VertexSource + ?Sized>(simplex: &Simplex, src: &S) -> Result<(f64, f64), GeomError> {
    Ok(kernel::edge_extremes(&src.vertex_coords(simplex)?))
}

/// Distance from vertex `p` to the affine hull of the opposite face.
pub fn altitude<S: VertexSource + ?Sized>(p: usize, simplex: &Simplex, src: &S) -> Result<f64, GeomError> {
    let pos = simplex.position(p).ok_or(GeomError::NotAVertex(p))?;
    if simplex.dim() == 0 {
        return Err(GeomError::DimensionTooLow { needed: 1, got: 0 });
    }
    Ok(kernel::altitude(&src.vertex_coords(simplex)?, pos))
}

pub fn thickness<S: VertexSource + ?Sized>(simplex: &Simplex, src: &S) -> Result<f64, GeomError> {
    Ok(kernel::thickness(&src.vertex_coords(simplex)?))
}

pub fn circumsphere<S: VertexSource + ?Sized>(simplex: &Simplex, src: &S) -> Result<Circumdata, GeomError> {
    Ok(kernel::circumsphere(&src.vertex_coords(simplex)?))
}

/// Distance from `x` to the circumsphere `S(σ)`, the diametric sphere
/// intersected with the affine hull of σ.
pub fn point_to_circumsphere_distance<S: VertexSource + ?Sized>(
    x: &Point,
    simplex: &Simplex,
    src: &S,
) -> Result<f64, GeomError> {
    kernel::point_to_circumsphere_distance(x.coords(), &src.vertex_coords(simplex)?)
}

/// Sine of the dihedral angle between the facets opposite `p` and `q`,
/// computed as `D(p,σ) / D(p,σ_q)`.
pub fn dihedral_sin<S: VertexSource + ?Sized>(
    simplex: &Simplex,
    p: usize,
    q: usize,
    src: &S,
) -> Result<f64, GeomError> {
    let i = simplex.position(p).ok_or(GeomError::NotAVertex(p))?;
    let j = simplex.position(q).ok_or(GeomError::NotAVertex(q))?;
    kernel::dihedral_sin(&src.vertex_coords(simplex)?, i, j)
}

pub fn is_gamma_good<S: VertexSource + ?Sized>(simplex: &Simplex, gamma0: f64, src: &S) -> Result<bool, GeomError> {
    Ok(kernel::is_gamma_good(&src.vertex_coords(simplex)?, gamma0))
}

/// A minimal-dimension face of σ that is a Γ₀-flake, if σ is Γ₀-bad.
pub fn find_flake_face<S: VertexSource + ?Sized>(
    simplex: &Simplex,
    gamma0: f64,
    src: &S,
) -> Result<Option<Simplex>, GeomError> {
    let coords = src.vertex_coords(simplex)?;
    Ok(kernel::find_flake_face(&coords, gamma0)
        .map(|local| Simplex::from_sorted(local.into_iter().map(|i| simplex.vertices()[i]).collect())))
}

#[inline]
pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist2(a, b).sqrt()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Coordinate-level geometry on explicit vertex lists.
pub mod kernel {
    use super::{dist, dot, face_masks, norm, Circumdata, GeomError, Point, TOL_DEGEN, TOL_GEOM};

    /// Orthonormal frame of the affine hull of a vertex list, built by
    /// modified Gram–Schmidt with column pivoting and one re-orthogonalization
    /// pass. Columns are the edge vectors from the first vertex.
    pub struct AffineFrame {
        origin: Vec<f64>,
        basis: Vec<Vec<f64>>,
        // coef[c][l]: coefficient of edge column c on basis vector l
        coef: Vec<Vec<f64>>,
        half_norms2: Vec<f64>,
        pivots: Vec<usize>,
        columns: usize,
    }

    impl AffineFrame {
        pub fn new<P: AsRef<[f64]>>(verts: &[P]) -> Self {
            let origin = verts[0].as_ref().to_vec();
            let mut res: Vec<Vec<f64>> = verts[1..]
                .iter()
                .map(|v| v.as_ref().iter().zip(&origin).map(|(a, o)| a - o).collect())
                .collect();
            let columns = res.len();
            let half_norms2: Vec<f64> = res.iter().map(|c| 0.5 * dot(c, c)).collect();
            let mut coef = vec![Vec::with_capacity(columns); columns];
            let mut done = vec![false; columns];
            let mut basis: Vec<Vec<f64>> = Vec::with_capacity(columns);
            let mut pivots = Vec::with_capacity(columns);
            let lead = res.iter().map(|c| norm(c)).fold(0.0, f64::max);

            for _ in 0..columns {
                let mut best = None;
                let mut best_norm = -1.0;
                for (c, col) in res.iter().enumerate() {
                    if !done[c] {
                        let n = norm(col);
                        if n > best_norm {
                            best_norm = n;
                            best = Some(c);
                        }
                    }
                }
                let Some(c) = best else { break };
                if lead == 0.0 || best_norm <= TOL_DEGEN * lead {
                    break;
                }
                // second orthogonalization pass
                for (l, q) in basis.iter().enumerate() {
                    let r = dot(q, &res[c]);
                    for (x, qi) in res[c].iter_mut().zip(q) {
                        *x -= r * qi;
                    }
                    coef[c][l] += r;
                }
                let n = norm(&res[c]);
                if n <= TOL_DEGEN * lead {
                    break;
                }
                let q: Vec<f64> = res[c].iter().map(|x| x / n).collect();
                coef[c].push(n);
                done[c] = true;
                for i in 0..columns {
                    if !done[i] {
                        let r = dot(&q, &res[i]);
                        for (x, qi) in res[i].iter_mut().zip(&q) {
                            *x -= r * qi;
                        }
                        coef[i].push(r);
                    }
                }
                basis.push(q);
                pivots.push(c);
            }
            AffineFrame {
                origin,
                basis,
                coef,
                half_norms2,
                pivots,
                columns,
            }
        }

        pub fn rank(&self) -> usize {
            self.basis.len()
        }

        pub fn is_full_rank(&self) -> bool {
            self.basis.len() == self.columns
        }

        pub fn origin(&self) -> &[f64] {
            &self.origin
        }

        pub fn basis(&self) -> &[Vec<f64>] {
            &self.basis
        }

        /// Component of `x - origin` orthogonal to the frame.
        pub fn residual(&self, x: &[f64]) -> Vec<f64> {
            let mut v: Vec<f64> = x.iter().zip(&self.origin).map(|(a, o)| a - o).collect();
            for _ in 0..2 {
                for q in &self.basis {
                    let r = dot(q, &v);
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= r * qi;
                    }
                }
            }
            v
        }

        pub fn distance(&self, x: &[f64]) -> f64 {
            norm(&self.residual(x))
        }

        /// Orthogonal projection of `x` onto the affine hull.
        pub fn project(&self, x: &[f64]) -> Vec<f64> {
            let r = self.residual(x);
            x.iter().zip(&r).map(|(a, b)| a - b).collect()
        }

        /// Circumcenter (in the affine hull) and circumradius, when the frame
        /// has full rank.
        pub fn circumcenter(&self) -> Option<(Vec<f64>, f64)> {
            if !self.is_full_rank() {
                return None;
            }
            let k = self.pivots.len();
            let mut y = vec![0.0; k];
            for j in 0..k {
                let c = self.pivots[j];
                let mut rhs = self.half_norms2[c];
                for l in 0..j {
                    rhs -= self.coef[c][l] * y[l];
                }
                y[j] = rhs / self.coef[c][j];
            }
            let mut center = self.origin.clone();
            for (yl, q) in y.iter().zip(&self.basis) {
                for (ci, qi) in center.iter_mut().zip(q) {
                    *ci += yl * qi;
                }
            }
            let radius = dist(&center, &self.origin);
            Some((center, radius))
        }
    }

    /// Circumcenters of a growing vertex list, updated in O(m·k) per push.
    /// Gram–Schmidt runs in insertion order (no pivoting), so a prefix
    /// flagged degenerate stays degenerate for every extension.
    #[derive(Clone, Debug, Default)]
    pub struct SphereStack {
        origin: Vec<f64>,
        levels: Vec<Level>,
    }

    #[derive(Clone, Debug)]
    struct Level {
        q: Vec<f64>,
        y: f64,
        center: Vec<f64>,
        radius: f64,
        lead: f64,
        degenerate: bool,
    }

    impl SphereStack {
        pub fn new() -> Self {
            Self::default()
        }

        pub fn len(&self) -> usize {
            self.levels.len()
        }

        pub fn is_empty(&self) -> bool {
            self.levels.is_empty()
        }

        pub fn clear(&mut self) {
            self.levels.clear();
        }

        pub fn push(&mut self, v: &[f64]) {
            if self.levels.is_empty() {
                self.origin.clear();
                self.origin.extend_from_slice(v);
                self.levels.push(Level {
                    q: Vec::new(),
                    y: 0.0,
                    center: v.to_vec(),
                    radius: 0.0,
                    lead: 0.0,
                    degenerate: false,
                });
                return;
            }
            let prev = self.levels.last().expect("non-empty");
            let mut res: Vec<f64> = v.iter().zip(&self.origin).map(|(a, o)| a - o).collect();
            let half = 0.5 * dot(&res, &res);
            let lead = prev.lead.max(norm(&res));
            let mut level = Level {
                q: Vec::new(),
                y: 0.0,
                center: Vec::new(),
                radius: f64::INFINITY,
                lead,
                degenerate: true,
            };
            if !prev.degenerate {
                let mut coef = vec![0.0; self.levels.len()];
                for _ in 0..2 {
                    for (l, lv) in self.levels.iter().enumerate().skip(1) {
                        let r = dot(&lv.q, &res);
                        for (x, qi) in res.iter_mut().zip(&lv.q) {
                            *x -= r * qi;
                        }
                        coef[l] += r;
                    }
                }
                let rjj = norm(&res);
                if lead > 0.0 && rjj > TOL_DEGEN * lead {
                    let mut rhs = half;
                    for (l, lv) in self.levels.iter().enumerate().skip(1) {
                        rhs -= coef[l] * lv.y;
                    }
                    let y = rhs / rjj;
                    let q: Vec<f64> = res.iter().map(|x| x / rjj).collect();
                    let center: Vec<f64> = prev.center.iter().zip(&q).map(|(c, qi)| c + y * qi).collect();
                    let radius = dist(&center, &self.origin);
                    if radius.is_finite() {
                        level = Level {
                            q,
                            y,
                            center,
                            radius,
                            lead,
                            degenerate: false,
                        };
                    }
                }
            }
            self.levels.push(level);
        }

        pub fn pop(&mut self) {
            self.levels.pop();
        }

        /// Circumcenter and circumradius of the current vertex list.
        pub fn current(&self) -> Option<(&[f64], f64)> {
            let top = self.levels.last()?;
            (!top.degenerate).then_some((top.center.as_slice(), top.radius))
        }
    }

    pub fn edge_extremes<P: AsRef<[f64]>>(verts: &[P]) -> (f64, f64) {
        if verts.len() < 2 {
            return (0.0, 0.0);
        }
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for i in 0..verts.len() {
            for j in (i + 1)..verts.len() {
                let d = dist(verts[i].as_ref(), verts[j].as_ref());
                lo = lo.min(d);
                hi = hi.max(d);
            }
        }
        (lo, hi)
    }

    /// Altitude of local vertex `pos`; zero for a 0-simplex.
    pub fn altitude<P: AsRef<[f64]>>(verts: &[P], pos: usize) -> f64 {
        if verts.len() < 2 {
            return 0.0;
        }
        let rest: Vec<&[f64]> = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != pos)
            .map(|(_, v)| v.as_ref())
            .collect();
        AffineFrame::new(&rest).distance(verts[pos].as_ref())
    }

    pub fn thickness<P: AsRef<[f64]>>(verts: &[P]) -> f64 {
        let j = verts.len() - 1;
        if j == 0 {
            return 1.0;
        }
        let (_, diameter) = edge_extremes(verts);
        if diameter == 0.0 {
            return 0.0;
        }
        let min_alt = (0..verts.len())
            .map(|i| altitude(verts, i))
            .fold(f64::INFINITY, f64::min);
        min_alt / (j as f64 * diameter)
    }

    pub fn circumsphere<P: AsRef<[f64]>>(verts: &[P]) -> Circumdata {
        let m = verts[0].as_ref().len();
        if verts.len() == 1 {
            return Circumdata {
                exists: true,
                center: Point::new(verts[0].as_ref().to_vec()),
                radius: 0.0,
            };
        }
        if verts.len() > m + 1 {
            return Circumdata::missing(m);
        }
        match AffineFrame::new(verts).circumcenter() {
            Some((center, radius)) if radius.is_finite() => Circumdata {
                exists: true,
                center: Point::new(center),
                radius,
            },
            _ => Circumdata::missing(m),
        }
    }

    pub fn point_to_circumsphere_distance<P: AsRef<[f64]>>(x: &[f64], verts: &[P]) -> Result<f64, GeomError> {
        let frame = AffineFrame::new(verts);
        let (center, radius) = if verts.len() == 1 {
            (verts[0].as_ref().to_vec(), 0.0)
        } else {
            frame.circumcenter().ok_or(GeomError::NoCircumsphere)?
        };
        let proj = frame.project(x);
        let h = dist(x, &proj);
        let radial = dist(&proj, &center);
        if radial <= TOL_GEOM * 1e-3 {
            return Ok((h * h + radius * radius).sqrt());
        }
        let gap = radial - radius;
        Ok((h * h + gap * gap).sqrt())
    }

    pub fn dihedral_sin<P: AsRef<[f64]>>(verts: &[P], i: usize, j: usize) -> Result<f64, GeomError> {
        if verts.len() < 3 {
            return Err(GeomError::DimensionTooLow {
                needed: 2,
                got: verts.len().saturating_sub(1),
            });
        }
        if i == j {
            return Err(GeomError::Degenerate("dihedral needs two distinct vertices"));
        }
        let without_j: Vec<&[f64]> = verts
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != j)
            .map(|(_, v)| v.as_ref())
            .collect();
        let i_in_face = if i < j { i } else { i - 1 };
        let denom = altitude(&without_j, i_in_face);
        let (_, diameter) = edge_extremes(verts);
        if denom <= TOL_DEGEN * diameter.max(f64::MIN_POSITIVE) {
            return Err(GeomError::Degenerate(
                "vertex lies in the affine hull of its facet face",
            ));
        }
        Ok(altitude(verts, i) / denom)
    }

    /// Thickness of the face selected by `mask`.
    fn face_thickness<P: AsRef<[f64]>>(verts: &[P], mask: u32) -> f64 {
        let face: Vec<&[f64]> = verts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, v)| v.as_ref())
            .collect();
        thickness(&face)
    }

    pub fn is_gamma_good<P: AsRef<[f64]>>(verts: &[P], gamma0: f64) -> bool {
        find_flake_face(verts, gamma0).is_none()
    }

    /// Local positions of a minimal-dimension Γ₀-bad face (a flake), or
    /// `None` when every face is Γ₀-good.
    pub fn find_flake_face<P: AsRef<[f64]>>(verts: &[P], gamma0: f64) -> Option<Vec<usize>> {
        let n = verts.len();
        for mask in face_masks(n) {
            let j = mask.count_ones() as i32 - 1;
            if j < 2 {
                continue;
            }
            if face_thickness(verts, mask) < gamma0.powi(j) {
                return Some((0..n).filter(|i| mask & (1 << i) != 0).collect());
            }
        }
        None
    }

    /// Min thickness over faces of each dimension `0..=dim`.
    pub fn thickness_profile<P: AsRef<[f64]>>(verts: &[P]) -> Vec<f64> {
        let mut profile = vec![f64::INFINITY; verts.len()];
        for mask in face_masks(verts.len()) {
            let j = mask.count_ones() as usize - 1;
            let t = if j < 2 { 1.0 } else { face_thickness(verts, mask) };
            profile[j] = profile[j].min(t);
        }
        profile
    }
}
