//! Brute-force Delaunay complexes, the restricted complex over D_ε(P),
//! protection measurement and output certification.

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{kernel, Point, Simplex, TOL_GEOM};
use crate::net::{Combinations, ContractedHull, Net};
use crate::perturb::AlgoParams;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DelaunayError {
    #[error("need at least {needed} points for a Delaunay complex, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("simplex {0} has no circumsphere")]
    NoCircumsphere(Simplex),
    #[error("restricted simplex {simplex} has circumradius {radius} >= eps = {eps}; the net is not eps-dense")]
    CircumradiusBound { simplex: Simplex, radius: f64, eps: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelaunaySimplex {
    pub simplex: Simplex,
    pub center: Point,
    pub radius: f64,
    /// Another sample point lies on the circumsphere within `TOL_GEOM`.
    pub cospherical: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelaunayComplex {
    pub m: usize,
    /// Top-dimensional simplices in lexicographic order.
    pub simplices: Vec<DelaunaySimplex>,
    /// Some circumsphere carries more than m+1 sample points.
    pub degenerate: bool,
}

impl DelaunayComplex {
    fn from_parts(m: usize, mut simplices: Vec<DelaunaySimplex>) -> Self {
        simplices.sort_by(|a, b| a.simplex.cmp(&b.simplex));
        let degenerate = simplices.iter().any(|s| s.cospherical);
        DelaunayComplex {
            m,
            simplices,
            degenerate,
        }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn simplex_set(&self) -> Vec<Simplex> {
        self.simplices.iter().map(|s| s.simplex.clone()).collect()
    }
}

/// Tests one vertex subset; `None` when it is not Delaunay.
fn test_subset(net: &Net, vertices: Vec<usize>) -> Option<DelaunaySimplex> {
    let simplex = Simplex::from_sorted(vertices);
    let coords = crate::geom::VertexSource::vertex_coords(net, &simplex).ok()?;
    let circ = kernel::circumsphere(&coords);
    if !circ.exists {
        return None;
    }
    let c = circ.center.coords();
    let mut cospherical = false;
    for q in 0..net.len() {
        if simplex.contains(q) {
            continue;
        }
        let d = net.metric(net.point(q).coords(), c);
        if d < circ.radius - TOL_GEOM {
            return None;
        }
        if d <= circ.radius + TOL_GEOM {
            cospherical = true;
        }
    }
    Some(DelaunaySimplex {
        simplex,
        center: circ.center,
        radius: circ.radius,
        cospherical,
    })
}

/// All m-simplices with an empty open circumball, by exhaustive enumeration
/// of (m+1)-subsets. Periodic nets use [`build_delaunay_local`] with a 2ε
/// diameter cap since whole-torus subsets have no canonical unwrapping.
pub fn build_delaunay(net: &Net) -> Result<DelaunayComplex, DelaunayError> {
    let m = net.dim();
    if net.len() < m + 1 {
        return Err(DelaunayError::TooFewPoints {
            needed: m + 1,
            got: net.len(),
        });
    }
    if net.is_periodic() {
        return build_delaunay_local(net, 2.0 * net.eps());
    }
    let subsets: Vec<Vec<usize>> = Combinations::new(net.len(), m + 1).collect();
    let found: Vec<DelaunaySimplex> = subsets.into_par_iter().filter_map(|s| test_subset(net, s)).collect();
    Ok(DelaunayComplex::from_parts(m, found))
}

/// Delaunay m-simplices whose vertices are pairwise closer than
/// `max_diameter`. With `max_diameter = 2ε` this contains every simplex the
/// restricted complex can keep.
pub fn build_delaunay_local(net: &Net, max_diameter: f64) -> Result<DelaunayComplex, DelaunayError> {
    let m = net.dim();
    if net.len() < m + 1 {
        return Err(DelaunayError::TooFewPoints {
            needed: m + 1,
            got: net.len(),
        });
    }
    let near: Vec<Vec<usize>> = (0..net.len())
        .map(|i| net.within(i, max_diameter).into_iter().filter(|&j| j > i).collect())
        .collect();
    let found: Vec<DelaunaySimplex> = (0..net.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut out = Vec::new();
            let mut chosen = vec![i];
            cliques(net, &near[i], max_diameter, m + 1, &mut chosen, &mut |subset| {
                if let Some(s) = test_subset(net, subset.to_vec()) {
                    out.push(s);
                }
            });
            out
        })
        .collect();
    Ok(DelaunayComplex::from_parts(m, found))
}

/// Extends `chosen` by ascending candidates that stay within `bound` of
/// every chosen vertex, calling `f` on each set of size `size`.
fn cliques<F: FnMut(&[usize])>(
    net: &Net,
    candidates: &[usize],
    bound: f64,
    size: usize,
    chosen: &mut Vec<usize>,
    f: &mut F,
) {
    if chosen.len() == size {
        f(chosen);
        return;
    }
    for (k, &c) in candidates.iter().enumerate() {
        if chosen.iter().all(|&v| net.distance(v, c) < bound) {
            chosen.push(c);
            cliques(net, &candidates[k + 1..], bound, size, chosen, f);
            chosen.pop();
        }
    }
}

/// The m-simplices whose circumcenter lies in D_ε(P) (all of them on the
/// torus). Every kept simplex must have circumradius below ε.
pub fn restricted(dc: &DelaunayComplex, net: &Net) -> Result<DelaunayComplex, DelaunayError> {
    let hull = ContractedHull::new(net);
    let mut kept = Vec::new();
    for s in &dc.simplices {
        if hull.contains(s.center.coords(), net.eps()) {
            if s.radius >= net.eps() {
                return Err(DelaunayError::CircumradiusBound {
                    simplex: s.simplex.clone(),
                    radius: s.radius,
                    eps: net.eps(),
                });
            }
            kept.push(s.clone());
        }
    }
    Ok(DelaunayComplex::from_parts(dc.m, kept))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtectionRecord {
    pub simplex: Simplex,
    /// `min_{q ∉ σ} d(q, C(σ)) − R(σ)`; infinite if σ holds every point.
    pub protection: f64,
    /// The nearest non-incident point attaining the protection.
    pub nearest: Option<usize>,
    pub restricted: bool,
}

pub fn protection(simplex: &Simplex, net: &Net) -> Result<ProtectionRecord, DelaunayError> {
    protection_with(simplex, net, &ContractedHull::new(net))
}

/// As [`protection`], reusing a prebuilt hull.
pub fn protection_with(simplex: &Simplex, net: &Net, hull: &ContractedHull) -> Result<ProtectionRecord, DelaunayError> {
    let coords = crate::geom::VertexSource::vertex_coords(net, simplex)
        .map_err(|_| DelaunayError::NoCircumsphere(simplex.clone()))?;
    let circ = kernel::circumsphere(&coords);
    if !circ.exists {
        return Err(DelaunayError::NoCircumsphere(simplex.clone()));
    }
    let c = circ.center.coords();
    let mut best = (f64::INFINITY, None);
    for q in 0..net.len() {
        if simplex.contains(q) {
            continue;
        }
        let gap = net.metric(net.point(q).coords(), c) - circ.radius;
        if gap < best.0 {
            best = (gap, Some(q));
        }
    }
    Ok(ProtectionRecord {
        simplex: simplex.clone(),
        protection: best.0,
        nearest: best.1,
        restricted: hull.contains(c, net.eps()),
    })
}

/// Quality thresholds a certified net must meet.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertParams {
    pub gamma0: f64,
    /// Required protection: every restricted simplex needs protection > δ.
    pub delta: f64,
}

impl From<&AlgoParams> for CertParams {
    fn from(p: &AlgoParams) -> Self {
        CertParams {
            gamma0: p.gamma0,
            delta: p.delta,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimplexCert {
    pub simplex: Simplex,
    /// Minimum thickness over faces of each dimension.
    pub thickness_profile: Vec<f64>,
    pub good: bool,
    pub protection: f64,
    pub radius: f64,
}

impl SimplexCert {
    pub fn passes(&self, params: &CertParams) -> bool {
        self.good && self.protection > params.delta
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CertStatus {
    Pass,
    Fail {
        witness: Simplex,
        reason: String,
    },
    /// Cospherical input; certification refused.
    NonGeneric,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertReport {
    pub status: CertStatus,
    pub params: CertParams,
    pub delaunay_count: usize,
    pub restricted: Vec<SimplexCert>,
    /// Minimum protection over restricted simplices (infinite if none).
    pub min_protection: f64,
    /// Minimum top-dimensional thickness over restricted simplices.
    pub min_thickness: f64,
}

impl CertReport {
    pub fn passed(&self) -> bool {
        self.status == CertStatus::Pass
    }
}

/// Checks that every restricted Delaunay m-simplex is Γ₀-good and
/// δ-protected.
pub fn certify(net: &Net, params: &CertParams) -> Result<CertReport, DelaunayError> {
    let dc = build_delaunay_local(net, 2.0 * net.eps())?;
    let empty = CertReport {
        status: CertStatus::NonGeneric,
        params: *params,
        delaunay_count: dc.len(),
        restricted: Vec::new(),
        min_protection: f64::INFINITY,
        min_thickness: f64::INFINITY,
    };
    if dc.degenerate {
        return Ok(empty);
    }
    let rdc = restricted(&dc, net)?;
    let hull = ContractedHull::new(net);
    let certs: Vec<SimplexCert> = rdc
        .simplices
        .par_iter()
        .map(|s| {
            let coords = crate::geom::VertexSource::vertex_coords(net, &s.simplex).expect("valid simplex");
            let rec = protection_with(&s.simplex, net, &hull)?;
            Ok(SimplexCert {
                simplex: s.simplex.clone(),
                thickness_profile: kernel::thickness_profile(&coords),
                good: kernel::is_gamma_good(&coords, params.gamma0),
                protection: rec.protection,
                radius: s.radius,
            })
        })
        .collect::<Result<_, DelaunayError>>()?;
    let min_protection = certs.iter().map(|c| c.protection).fold(f64::INFINITY, f64::min);
    let min_thickness = certs
        .iter()
        .map(|c| *c.thickness_profile.last().expect("non-empty"))
        .fold(f64::INFINITY, f64::min);
    let status = match certs.iter().find(|c| !c.passes(params)) {
        None => CertStatus::Pass,
        Some(c) => CertStatus::Fail {
            witness: c.simplex.clone(),
            reason: if !c.good {
                format!("not {}-good", params.gamma0)
            } else {
                format!("protection {:e} <= delta {:e}", c.protection, params.delta)
            },
        },
    };
    Ok(CertReport {
        status,
        restricted: certs,
        min_protection,
        min_thickness,
        ..empty
    })
}
