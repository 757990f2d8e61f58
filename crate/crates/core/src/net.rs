//! Point nets: the container for a sample set with its sampling radius ε and
//! separation ratio μ₀, plus validation, contracted-hull membership, ball
//! sampling and synthetic net generation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::geom::{dist, dot, kernel::AffineFrame, GeomError, Point, Simplex, VertexSource, TOL_GEOM};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum NetError {
    #[error("net must contain at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("point {index} has dimension {got}, expected {expected}")]
    MixedDimension { index: usize, expected: usize, got: usize },
    #[error("point {0} has a non-finite coordinate")]
    NonFinite(usize),
    #[error("eps must be positive and finite, got {0}")]
    BadEps(f64),
    #[error("mu0 must lie in (0, 1], got {0}")]
    BadMu0(f64),
    #[error("periodic nets need eps < 1/2, got {0}")]
    PeriodicEps(f64),
    #[error("periodic point {0} has a coordinate outside [0, 1)")]
    OutsideTorus(usize),
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("rho_tilde must satisfy 0 <= rho_tilde <= mu0/4 = {max}, got {got}")]
    RhoOutOfRange { got: f64, max: f64 },
    #[error("probe count must be at least 1")]
    NoProbes,
    #[error("radius must be positive and finite, got {0}")]
    BadRadius(f64),
    #[error("test net generation failed: {0}")]
    Generation(String),
}

/// A finite point set in ℝ^m (or on the unit flat torus) tagged with its
/// sampling parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Net {
    points: Vec<Point>,
    m: usize,
    eps: f64,
    mu0: f64,
    periodic: bool,
}

impl Net {
    /// Structural checks only; separation and density are the job of
    /// [`validate_net`].
    pub fn new(points: Vec<Point>, eps: f64, mu0: f64, periodic: bool) -> Result<Self, NetError> {
        let m = points.first().map_or(0, Point::dim);
        if points.is_empty() {
            return Err(NetError::TooFewPoints { needed: 1, got: 0 });
        }
        if m == 0 {
            return Err(NetError::ZeroDimension);
        }
        for (i, p) in points.iter().enumerate() {
            if p.dim() != m {
                return Err(NetError::MixedDimension {
                    index: i,
                    expected: m,
                    got: p.dim(),
                });
            }
            if !p.is_finite() {
                return Err(NetError::NonFinite(i));
            }
            if periodic && p.coords().iter().any(|&c| !(0.0..1.0).contains(&c)) {
                return Err(NetError::OutsideTorus(i));
            }
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(NetError::BadEps(eps));
        }
        if !(mu0 > 0.0 && mu0 <= 1.0) {
            return Err(NetError::BadMu0(mu0));
        }
        if periodic && eps >= 0.5 {
            return Err(NetError::PeriodicEps(eps));
        }
        Ok(Net {
            points,
            m,
            eps,
            mu0,
            periodic,
        })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn mu0(&self) -> f64 {
        self.mu0
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// Same points under different sampling parameters.
    pub fn with_params(&self, eps: f64, mu0: f64) -> Result<Net, NetError> {
        Net::new(self.points.clone(), eps, mu0, self.periodic)
    }

    /// Vector from `a` to `b`, minimum-image on the torus.
    pub fn displacement(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let d = y - x;
                if self.periodic {
                    d - d.round()
                } else {
                    d
                }
            })
            .collect()
    }

    /// Metric distance between coordinates (minimum image when periodic).
    pub fn metric(&self, a: &[f64], b: &[f64]) -> f64 {
        if self.periodic {
            self.displacement(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
        } else {
            dist(a, b)
        }
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.metric(self.points[i].coords(), self.points[j].coords())
    }

    /// Copy of `b` moved to the periodic image nearest to `anchor`.
    pub fn unwrap_near(&self, anchor: &[f64], b: &[f64]) -> Point {
        if !self.periodic {
            return Point::new(b.to_vec());
        }
        let d = self.displacement(anchor, b);
        Point::new(anchor.iter().zip(&d).map(|(a, x)| a + x).collect())
    }

    /// Wraps coordinates into [0, 1) when periodic.
    pub fn wrap(&self, mut p: Point) -> Point {
        if self.periodic {
            for c in p.coords_mut() {
                let mut w = *c - c.floor();
                if w >= 1.0 {
                    w = 0.0;
                }
                *c = w;
            }
        }
        p
    }

    /// Indices `q != p` within `radius` of point `p`, ascending.
    pub fn within(&self, p: usize, radius: f64) -> Vec<usize> {
        let c = self.points[p].coords();
        (0..self.len())
            .filter(|&q| q != p && self.metric(c, self.points[q].coords()) < radius)
            .collect()
    }

    /// Replaces point `i`, skipping structural re-validation.
    pub(crate) fn set_point(&mut self, i: usize, p: Point) {
        self.points[i] = p;
    }

    pub(crate) fn set_params(&mut self, eps: f64, mu0: f64) {
        self.eps = eps;
        self.mu0 = mu0;
    }
}

impl VertexSource for Net {
    fn ambient_dim(&self) -> usize {
        self.m
    }

    /// In periodic mode vertices are unwrapped around the first vertex.
    fn vertex_coords(&self, simplex: &Simplex) -> Result<Vec<Point>, GeomError> {
        let raw = self.points.as_slice().vertex_coords(simplex)?;
        if !self.periodic {
            return Ok(raw);
        }
        let anchor = raw[0].coords().to_vec();
        Ok(raw.iter().map(|p| self.unwrap_near(&anchor, p.coords())).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NetReport {
    pub min_separation: f64,
    pub closest_pair: (usize, usize),
    pub measured_mu0: f64,
    pub separation_ok: bool,
    pub density_ok: bool,
    pub density_probe_count: usize,
    pub max_probe_gap: f64,
    /// D_ε(P) had no sampled interior; density holds vacuously.
    pub domain_empty: bool,
}

impl NetReport {
    pub fn passes(&self) -> bool {
        self.separation_ok && self.density_ok
    }
}

/// Exact separation check plus a Monte Carlo density check over D_ε(P).
pub fn validate_net(net: &Net, probes: usize, seed: u64) -> Result<NetReport, NetError> {
    if net.len() < 2 {
        return Err(NetError::TooFewPoints {
            needed: 2,
            got: net.len(),
        });
    }
    if probes == 0 {
        return Err(NetError::NoProbes);
    }
    let (min_separation, closest_pair) = min_separation(net);
    if min_separation == 0.0 {
        return Err(NetError::DuplicatePoints(closest_pair.0, closest_pair.1));
    }
    let measured_mu0 = min_separation / net.eps;
    let separation_ok = min_separation >= net.mu0 * net.eps;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let region = ProbeRegion::new(net);
    let mut max_gap: f64 = 0.0;
    let mut drawn = 0;
    let mut domain_empty = false;
    for _ in 0..probes {
        match region.draw(net, &mut rng) {
            Some(x) => {
                drawn += 1;
                let gap = net
                    .points
                    .iter()
                    .map(|p| net.metric(p.coords(), &x))
                    .fold(f64::INFINITY, f64::min);
                max_gap = max_gap.max(gap);
            }
            None => {
                domain_empty = true;
                break;
            }
        }
    }
    Ok(NetReport {
        min_separation,
        closest_pair,
        measured_mu0,
        separation_ok,
        density_ok: max_gap < net.eps,
        density_probe_count: drawn,
        max_probe_gap: max_gap,
        domain_empty,
    })
}

/// Exact minimum pairwise distance and the pair attaining it.
pub fn min_separation(net: &Net) -> (f64, (usize, usize)) {
    let mut best = (f64::INFINITY, (0, 0));
    for i in 0..net.len() {
        for j in (i + 1)..net.len() {
            let d = net.distance(i, j);
            if d < best.0 {
                best = (d, (i, j));
            }
        }
    }
    best
}

/// Uniform sampler over D_ε(P) by rejection from the bounding box.
struct ProbeRegion {
    hull: Option<ContractedHull>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ProbeRegion {
    const MAX_REJECTIONS: usize = 100_000;

    fn new(net: &Net) -> Self {
        if net.periodic {
            return ProbeRegion {
                hull: None,
                lo: vec![0.0; net.m],
                hi: vec![1.0; net.m],
            };
        }
        let hull = ContractedHull::new(net);
        let mut lo = vec![f64::INFINITY; net.m];
        let mut hi = vec![f64::NEG_INFINITY; net.m];
        for p in &net.points {
            for k in 0..net.m {
                lo[k] = lo[k].min(p[k] + net.eps);
                hi[k] = hi[k].max(p[k] - net.eps);
            }
        }
        ProbeRegion {
            hull: Some(hull),
            lo,
            hi,
        }
    }

    fn draw(&self, net: &Net, rng: &mut ChaCha8Rng) -> Option<Vec<f64>> {
        if self.lo.iter().zip(&self.hi).any(|(l, h)| l > h) {
            return None;
        }
        for _ in 0..Self::MAX_REJECTIONS {
            let x: Vec<f64> = self
                .lo
                .iter()
                .zip(&self.hi)
                .map(|(&l, &h)| if h > l { rng.random_range(l..h) } else { l })
                .collect();
            match &self.hull {
                None => return Some(x),
                Some(hull) if hull.contains(&x, net.eps) => return Some(x),
                _ => {}
            }
        }
        None
    }
}

/// The supporting hyperplanes of conv(P), used to decide membership in the
/// contracted hull D_ε(P).
#[derive(Clone, Debug)]
pub struct ContractedHull {
    /// (unit outward normal, offset): inside means `n·x <= offset`.
    planes: Vec<(Vec<f64>, f64)>,
    periodic: bool,
    full_dim: bool,
}

impl ContractedHull {
    pub fn new(net: &Net) -> Self {
        if net.periodic {
            return ContractedHull {
                planes: Vec::new(),
                periodic: true,
                full_dim: true,
            };
        }
        let m = net.m;
        let pts: Vec<&[f64]> = net.points.iter().map(|p| p.coords()).collect();
        let mut planes = Vec::new();
        if m == 1 {
            let lo = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let hi = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
            planes.push((vec![1.0], hi));
            planes.push((vec![-1.0], -lo));
            return ContractedHull {
                planes,
                periodic: false,
                full_dim: hi > lo,
            };
        }
        if pts.len() < m + 1 || AffineFrame::new(&pts).rank() < m {
            return ContractedHull {
                planes,
                periodic: false,
                full_dim: false,
            };
        }
        let scale = pts.iter().map(|p| dist(p, pts[0])).fold(0.0, f64::max).max(1.0);
        let tol = TOL_GEOM * scale;
        for subset in Combinations::new(pts.len(), m) {
            let verts: Vec<&[f64]> = subset.iter().map(|&i| pts[i]).collect();
            let Some(normal) = hyperplane_normal(&verts) else {
                continue;
            };
            let offset = dot(&normal, verts[0]);
            let mut above = false;
            let mut below = false;
            for p in &pts {
                let s = dot(&normal, p) - offset;
                above |= s > tol;
                below |= s < -tol;
                if above && below {
                    break;
                }
            }
            if above && below {
                continue;
            }
            if above {
                planes.push((normal.iter().map(|x| -x).collect(), -offset));
            } else {
                planes.push((normal, offset));
            }
        }
        ContractedHull {
            planes,
            periodic: false,
            full_dim: true,
        }
    }

    /// Signed distance to ∂conv(P): positive inside, negative outside
    /// (a lower bound on the true exterior distance).
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        if self.periodic {
            return f64::INFINITY;
        }
        if !self.full_dim {
            return f64::NEG_INFINITY;
        }
        self.planes
            .iter()
            .map(|(n, off)| off - dot(n, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64], eps: f64) -> bool {
        self.boundary_distance(x) >= eps
    }
}

/// Unit normal of the hyperplane through `m` points in ℝ^m, or `None` if
/// they do not span one.
fn hyperplane_normal(verts: &[&[f64]]) -> Option<Vec<f64>> {
    let m = verts[0].len();
    let frame = AffineFrame::new(verts);
    if frame.rank() + 1 != m {
        return None;
    }
    // project coordinate axes off the frame and keep the largest residual
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = 0.0;
    for k in 0..m {
        let mut e = verts[0].to_vec();
        e[k] += 1.0;
        let r = frame.residual(&e);
        let n = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > best_norm {
            best_norm = n;
            best = Some(r);
        }
    }
    let r = best?;
    Some(r.iter().map(|x| x / best_norm).collect())
}

/// True iff `x ∈ D_ε(P)`: inside conv(P) at distance at least ε from its
/// boundary. Always true on the torus.
pub fn in_contracted_hull(x: &Point, net: &Net) -> bool {
    ContractedHull::new(net).contains(x.coords(), net.eps)
}

/// A point drawn uniformly from the open ball `B(center, radius)`, wrapped
/// onto the torus when `periodic`.
pub fn sample_ball<R: Rng + ?Sized>(center: &Point, radius: f64, periodic: bool, rng: &mut R) -> Point {
    let m = center.dim();
    loop {
        let dir: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n == 0.0 || !n.is_finite() {
            continue;
        }
        let u: f64 = rng.random();
        let r = radius * u.powf(1.0 / m as f64);
        let coords: Vec<f64> = center.coords().iter().zip(&dir).map(|(c, d)| c + r * d / n).collect();
        if dist(&coords, center.coords()) >= radius {
            continue;
        }
        let mut p = Point::new(coords);
        if periodic {
            for c in p.coords_mut() {
                let mut w = *c - c.floor();
                if w >= 1.0 {
                    w = 0.0;
                }
                *c = w;
            }
        }
        return p;
    }
}

/// Returns `(eps', mu0')` for a perturbation of relative size `rho_tilde`.
pub fn perturbed_params(mu0: f64, eps: f64, rho_tilde: f64) -> Result<(f64, f64), NetError> {
    let max = mu0 / 4.0;
    if !(rho_tilde >= 0.0 && rho_tilde <= max) {
        return Err(NetError::RhoOutOfRange { got: rho_tilde, max });
    }
    Ok(((1.0 + rho_tilde) * eps, (mu0 - 2.0 * rho_tilde) / (1.0 + rho_tilde)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum TestNetKind {
    /// Unit lattice with each point moved uniformly inside a ball of radius
    /// `jitter` (< 1/2).
    JitteredGrid { jitter: f64 },
    /// Dart throwing with minimum distance `radius` in a cube of side
    /// `side` (estimated from the count target when `None`), followed by a
    /// fill pass that makes the set provably dense.
    PoissonDisk { radius: f64, side: Option<f64> },
}

/// Shrinks a measured ratio so that floating error in `mu0 * eps` can never
/// push it above the exact minimum separation.
const CERTIFIED_SHRINK: f64 = 1.0 - 1e-12;

/// Generates a synthetic net with ε and μ₀ taken from the construction:
/// ε from the covering argument of the generator and μ₀ from the exact
/// minimum separation.
pub fn generate_test_net(kind: &TestNetKind, m: usize, count: usize, seed: u64) -> Result<Net, NetError> {
    if m == 0 {
        return Err(NetError::ZeroDimension);
    }
    if count < 2 {
        return Err(NetError::TooFewPoints { needed: 2, got: count });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (points, eps) = match *kind {
        TestNetKind::JitteredGrid { jitter } => {
            if !(0.0..0.5).contains(&jitter) {
                return Err(NetError::Generation(format!("jitter {jitter} outside [0, 1/2)")));
            }
            let side = ((count as f64).powf(1.0 / m as f64).round() as usize).max(2);
            let total = side.pow(m as u32);
            let mut pts = Vec::with_capacity(total);
            for flat in 0..total {
                let mut rem = flat;
                let base: Vec<f64> = (0..m)
                    .map(|_| {
                        let c = (rem % side) as f64;
                        rem /= side;
                        c
                    })
                    .collect();
                let base = Point::new(base);
                pts.push(if jitter > 0.0 {
                    sample_ball(&base, jitter, false, &mut rng)
                } else {
                    base
                });
            }
            (pts, (m as f64).sqrt() / 2.0 + jitter + 1e-9)
        }
        TestNetKind::PoissonDisk { radius, side } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(NetError::BadRadius(radius));
            }
            poisson_disk(m, count, radius, side, &mut rng)?
        }
    };
    let probe = Net::new(points, eps, 1.0, false)?;
    let (sep, pair) = min_separation(&probe);
    if sep == 0.0 {
        return Err(NetError::DuplicatePoints(pair.0, pair.1));
    }
    let mu0 = (sep / eps * CERTIFIED_SHRINK).min(1.0);
    probe.with_params(eps, mu0)
}

fn poisson_disk(
    m: usize,
    count: usize,
    r: f64,
    side: Option<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Point>, f64), NetError> {
    // dart throwing saturates well before one point per (1.2 r)^m
    let side = side.unwrap_or_else(|| (count as f64).powf(1.0 / m as f64) * 1.5 * r);
    let ball_vol = crate::perturb::unit_ball_volume(m) * (r / 2.0).powi(m as i32);
    let packing_max = (side + r).powi(m as i32) / ball_vol;
    if (count as f64) > packing_max {
        return Err(NetError::Generation(format!(
            "{count} points with separation {r} cannot fit in a cube of side {side}"
        )));
    }
    let mut pts: Vec<Point> = Vec::new();
    let accepts = |pts: &[Point], x: &[f64]| pts.iter().all(|p| dist(p.coords(), x) >= r);
    let max_failures = 1000 * count.max(10);
    let mut failures = 0;
    while pts.len() < count && failures < max_failures {
        let x: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..=side)).collect();
        if accepts(&pts, &x) {
            pts.push(Point::new(x));
            failures = 0;
        } else {
            failures += 1;
        }
    }
    if pts.len() < count {
        return Err(NetError::Generation(format!(
            "dart throwing stalled at {} of {count} points",
            pts.len()
        )));
    }
    // fill pass: every lattice probe ends up within r of some point
    let h = r / 4.0;
    let steps = (side / h).ceil() as usize + 1;
    let total = steps.pow(m as u32);
    for flat in 0..total {
        let mut rem = flat;
        let x: Vec<f64> = (0..m)
            .map(|_| {
                let c = ((rem % steps) as f64 * h).min(side);
                rem /= steps;
                c
            })
            .collect();
        if accepts(&pts, &x) {
            pts.push(Point::new(x));
        }
    }
    Ok((pts, r + h * (m as f64).sqrt() / 2.0 + 1e-9))
}

/// Lexicographic k-subsets of `0..n`.
pub(crate) struct Combinations {
    n: usize,
    idx: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub(crate) fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            done: k > n || k == 0,
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.idx.clone();
        let k = self.idx.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.idx[i] < self.n - k + i {
                self.idx[i] += 1;
                for j in (i + 1)..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(side: usize, spacing: f64, m: usize) -> Vec<Point> {
        let total = side.pow(m as u32);
        (0..total)
            .map(|flat| {
                let mut rem = flat;
                Point::new(
                    (0..m)
                        .map(|_| {
                            let c = (rem % side) as f64 * spacing;
                            rem /= side;
                            c
                        })
                        .collect(),
                )
            })
            .collect()
    }

    #[test]
    fn validate_unit_grid() {
        let net = Net::new(grid(5, 1.0, 2), 0.75, 1.0, false).unwrap();
        let rep = validate_net(&net, 2000, 1).unwrap();
        assert_eq!(rep.min_separation, 1.0);
        assert!(rep.density_ok);
        assert!(rep.separation_ok);
        assert!(rep.max_probe_gap <= 2f64.sqrt() / 2.0 + 1e-12);
    }

    #[test]
    fn duplicate_points_rejected() {
        let net = Net::new(vec![Point::from([0.5, 0.5]), Point::from([0.5, 0.5])], 1.0, 1.0, false).unwrap();
        assert_eq!(validate_net(&net, 10, 0), Err(NetError::DuplicatePoints(0, 1)));
    }

    #[test]
    fn removed_point_leaves_a_gap() {
        let mut pts = grid(9, 1.0, 2);
        // drop the centre (4,4): the hole has covering radius 1 there
        pts.retain(|p| !(p[0] == 4.0 && p[1] == 4.0));
        let net = Net::new(pts, 0.8, 1.0, false).unwrap();
        let rep = validate_net(&net, 20_000, 3).unwrap();
        assert!(!rep.density_ok);
        assert!(rep.max_probe_gap > 0.8);
    }

    #[test]
    fn contracted_hull_cases() {
        let net = Net::new(grid(11, 1.0, 2), 1.0, 1.0, false).unwrap();
        assert!(in_contracted_hull(&Point::from([5.0, 5.0]), &net));
        assert!(!in_contracted_hull(&Point::from([0.5, 5.0]), &net));
        assert!(!in_contracted_hull(&Point::from([-3.0, 5.0]), &net));
        let hull = ContractedHull::new(&net);
        assert!((hull.boundary_distance(&[5.0, 5.0]) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn contracted_hull_monotone_in_eps() {
        let net = Net::new(grid(6, 1.0, 3), 1.0, 1.0, false).unwrap();
        let hull = ContractedHull::new(&net);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..6.0)).collect();
            for (e1, e2) in [(0.5, 1.0), (1.0, 2.0), (0.1, 0.3)] {
                if hull.contains(&x, e2) {
                    assert!(hull.contains(&x, e1));
                }
            }
        }
    }

    #[test]
    fn sample_ball_quarter_area() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let c = Point::from([0.3, -0.2]);
        let n = 100_000;
        let mut inner = 0usize;
        let mut mean_r = 0.0;
        for _ in 0..n {
            let x = sample_ball(&c, 2.0, false, &mut rng);
            let r = x.distance(&c);
            assert!(r < 2.0);
            mean_r += r;
            if r < 1.0 {
                inner += 1;
            }
        }
        let frac = inner as f64 / n as f64;
        let sd = (0.25 * 0.75 / n as f64).sqrt();
        assert!((frac - 0.25).abs() <= 3.0 * sd, "fraction {frac}");
        let mean = mean_r / n as f64;
        assert!((mean - 2.0 * 2.0 / 3.0).abs() <= 0.01 * 4.0 / 3.0);
    }

    #[test]
    fn sample_ball_is_deterministic() {
        let c = Point::from([0.0, 0.0, 0.0]);
        let a: Vec<Point> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..20).map(|_| sample_ball(&c, 1.0, false, &mut rng)).collect()
        };
        let b: Vec<Point> = {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            (0..20).map(|_| sample_ball(&c, 1.0, false, &mut rng)).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn perturbed_params_cases() {
        assert_eq!(perturbed_params(1.0, 1.0, 0.25).unwrap(), (1.25, 0.4));
        assert_eq!(perturbed_params(0.8, 2.0, 0.0).unwrap(), (2.0, 0.8));
        assert!(matches!(
            perturbed_params(1.0, 1.0, 0.3),
            Err(NetError::RhoOutOfRange { .. })
        ));
    }

    #[test]
    fn jittered_grid_separation() {
        let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100, 7).unwrap();
        assert_eq!(net.len(), 100);
        let (sep, _) = min_separation(&net);
        assert!(sep >= 0.6);
        assert!(net.mu0() * net.eps() <= sep);
        let again = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100, 7).unwrap();
        assert_eq!(net, again);
        assert!(validate_net(&net, 5000, 1).unwrap().passes());
    }

    #[test]
    fn poisson_disk_separation() {
        let r = 0.3;
        let net = generate_test_net(&TestNetKind::PoissonDisk { radius: r, side: None }, 2, 60, 11).unwrap();
        let (sep, _) = min_separation(&net);
        assert!(sep >= r);
        assert!(validate_net(&net, 5000, 2).unwrap().passes());
        let err = generate_test_net(
            &TestNetKind::PoissonDisk {
                radius: 1.0,
                side: Some(1.0),
            },
            2,
            500,
            1,
        );
        assert!(matches!(err, Err(NetError::Generation(_))));
    }

    #[test]
    fn periodic_metric_wraps() {
        let net = Net::new(vec![Point::from([0.05, 0.5]), Point::from([0.95, 0.5])], 0.3, 0.3, true).unwrap();
        assert!((net.distance(0, 1) - 0.1).abs() < 1e-12);
        assert!(Net::new(vec![Point::from([1.0, 0.5])], 0.3, 0.3, true).is_err());
        assert!(Net::new(vec![Point::from([0.1, 0.5])], 0.6, 0.3, true).is_err());
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(6, 3).count(), 20);
        assert_eq!(Combinations::new(3, 3).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }
}
