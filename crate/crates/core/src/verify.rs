//! Independent checks on perturbed nets: forbidden-configuration search,
//! the hoop property, and the symmetry property of forbidden
//! configurations.
//!
//! Balls circumscribing a k-simplex σ in ℝ^m have centers `C(σ) + t` with
//! `t` normal to aff(σ) and radius `sqrt(R(σ)² + |t|²)`. For a point `p`,
//! `d(p, C)² − R²` is affine in `t` and only its component along the normal
//! part of `p − C(σ)` matters, so the best ball under a radius cap has a
//! closed form; [`best_ball`] uses it and [`best_ball_numeric`] searches the
//! full normal space as a cross-check.

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{dist, dot, kernel, norm, Point, Simplex, VertexSource, TOL_GEOM};
use crate::net::Net;
use crate::perturb::AlgoParams;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum VerifyError {
    #[error("symmetry check needs delta0 <= 1/4, got {0}")]
    Delta0TooLarge(f64),
    #[error("simplex {0} is not certified as a forbidden configuration: {1}")]
    NotCertified(Simplex, &'static str),
    #[error("simplex {0} is too small for this check")]
    TooSmall(Simplex),
    #[error(transparent)]
    Geom(#[from] crate::geom::GeomError),
}

/// Parameters defining forbidden configurations in a perturbed net.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ForbidParams {
    pub gamma0: f64,
    pub delta0: f64,
    pub eps_prime: f64,
    pub mu0_prime: f64,
}

impl ForbidParams {
    /// Uses the net's own ε and μ₀ as ε′ and μ₀′.
    pub fn for_net(net: &Net, gamma0: f64, delta0: f64) -> Self {
        ForbidParams {
            gamma0,
            delta0,
            eps_prime: net.eps(),
            mu0_prime: net.mu0(),
        }
    }

    /// δ = δ₀ μ₀′ ε′.
    pub fn delta(&self) -> f64 {
        self.delta0 * self.mu0_prime * self.eps_prime
    }

    /// Every forbidden configuration has diameter below `(2 + δ₀μ₀′) ε′`.
    pub fn diameter_bound(&self) -> f64 {
        (2.0 + self.delta0 * self.mu0_prime) * self.eps_prime
    }
}

impl From<&AlgoParams> for ForbidParams {
    fn from(p: &AlgoParams) -> Self {
        ForbidParams {
            gamma0: p.gamma0,
            delta0: p.delta0,
            eps_prime: p.eps_prime,
            mu0_prime: p.mu0_prime,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForbiddenWitness {
    pub tau: Simplex,
    pub certifying_vertex: usize,
    pub ball_center: Point,
    pub ball_radius: f64,
    /// `|d(p, C) − R| − δ`; non-positive for a witness.
    pub slack: f64,
    /// Dimension of the facet opposite the certifying vertex.
    pub k: usize,
}

/// A ball circumscribing a simplex, chosen to bring a point close to its
/// boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BallFit {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `|d(p, C) − R|`.
    pub gap: f64,
}

/// Normal data of `p` relative to a facet: circumcenter `c`, circumradius
/// `r`, a unit normal `u` pointing towards `p`, in-hull offset `a` and
/// normal height `h`.
struct NormalData {
    c: Vec<f64>,
    r: f64,
    u: Option<Vec<f64>>,
    a: f64,
    h: f64,
    normal_dim: usize,
}

fn normal_data(p: &[f64], facet: &[Vec<f64>]) -> Option<NormalData> {
    let frame = kernel::AffineFrame::new(facet);
    let (c, r) = if facet.len() == 1 {
        (facet[0].clone(), 0.0)
    } else {
        frame.circumcenter()?
    };
    let m = p.len();
    let normal_dim = m - frame.rank();
    // the residual itself, not p − proj, keeps u orthogonal when h is tiny
    let hv = frame.residual(p);
    let proj: Vec<f64> = p.iter().zip(&hv).map(|(x, y)| x - y).collect();
    let h = norm(&hv);
    let a = dist(&proj, &c);
    let u = if normal_dim == 0 {
        None
    } else if h > TOL_GEOM * 1e-3 {
        Some(hv.iter().map(|x| x / h).collect())
    } else {
        normal_basis(&frame, m).into_iter().next()
    };
    Some(NormalData {
        c,
        r,
        u,
        a,
        h,
        normal_dim,
    })
}

/// Orthonormal basis of the directions normal to the frame.
fn normal_basis(frame: &kernel::AffineFrame, m: usize) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut axes: Vec<(f64, Vec<f64>)> = (0..m)
        .map(|k| {
            let mut e = frame.origin().to_vec();
            e[k] += 1.0;
            let r = frame.residual(&e);
            (norm(&r), r)
        })
        .collect();
    axes.sort_by(|x, y| y.0.total_cmp(&x.0));
    for (_, mut v) in axes {
        for _ in 0..2 {
            for b in &basis {
                let d = dot(b, &v);
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= d * bi;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            basis.push(v.iter().map(|x| x / n).collect());
        }
        if basis.len() + frame.rank() == m {
            break;
        }
    }
    basis
}

/// The circumscribing ball of `facet` with radius at most `r_lim` that
/// minimizes `|d(p, C) − R|`, or `None` if the facet has no circumsphere or
/// its smallest circumscribing ball already exceeds `r_lim`.
pub fn best_ball(p: &[f64], facet: &[Vec<f64>], r_lim: f64) -> Option<BallFit> {
    let nd = normal_data(p, facet)?;
    if nd.r > r_lim {
        return None;
    }
    let Some(u) = nd.u.as_ref().filter(|_| nd.normal_dim > 0) else {
        let gap = (dist(p, &nd.c) - nd.r).abs();
        return Some(BallFit {
            center: nd.c,
            radius: nd.r,
            gap,
        });
    };
    // d² − R² = a² + h² − r² − 2hs along the normal direction u
    let s_max = (r_lim * r_lim - nd.r * nd.r).max(0.0).sqrt();
    let s = if nd.h > 0.0 {
        ((nd.a * nd.a + nd.h * nd.h - nd.r * nd.r) / (2.0 * nd.h)).clamp(-s_max, s_max)
    } else {
        s_max
    };
    let center: Vec<f64> = nd.c.iter().zip(u).map(|(c, ui)| c + s * ui).collect();
    let radius = (nd.r * nd.r + s * s).sqrt();
    let gap = (dist(p, &center) - radius).abs();
    Some(BallFit { center, radius, gap })
}

/// Multi-start Nelder–Mead search over the full normal space for the same
/// problem as [`best_ball`]; `2·(m−k)+1` starts.
pub fn best_ball_numeric(p: &[f64], facet: &[Vec<f64>], r_lim: f64) -> Option<BallFit> {
    let frame = kernel::AffineFrame::new(facet);
    let (c, r) = if facet.len() == 1 {
        (facet[0].clone(), 0.0)
    } else {
        frame.circumcenter()?
    };
    if r > r_lim {
        return None;
    }
    let m = p.len();
    let basis = normal_basis(&frame, m);
    let dim = basis.len();
    let eval_center = |t: &[f64]| -> Vec<f64> {
        let mut x = c.clone();
        for (tj, b) in t.iter().zip(&basis) {
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi += tj * bi;
            }
        }
        x
    };
    let objective = |t: &[f64]| -> f64 {
        let rad = (r * r + dot(t, t)).sqrt();
        let gap = (dist(p, &eval_center(t)) - rad).abs();
        gap + 1e3 * (rad - r_lim).max(0.0)
    };
    if dim == 0 {
        let gap = (dist(p, &c) - r).abs();
        return Some(BallFit {
            center: c,
            radius: r,
            gap,
        });
    }
    let s_max = (r_lim * r_lim - r * r).max(0.0).sqrt();
    let mut starts = vec![vec![0.0; dim]];
    for j in 0..dim {
        for sign in [-1.0, 1.0] {
            let mut t = vec![0.0; dim];
            t[j] = sign * 0.5 * s_max;
            starts.push(t);
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for start in starts {
        let t = nelder_mead(&objective, start, 0.25 * s_max.max(1e-3), 1e-12, 4000);
        let rad = (r * r + dot(&t, &t)).sqrt();
        if rad > r_lim * (1.0 + 1e-12) {
            continue;
        }
        let val = objective(&t);
        if best.as_ref().is_none_or(|(b, _)| val < *b) {
            best = Some((val, t));
        }
    }
    let (_, t) = best?;
    let center = eval_center(&t);
    let radius = (r * r + dot(&t, &t)).sqrt();
    let gap = (dist(p, &center) - radius).abs();
    Some(BallFit { center, radius, gap })
}

fn nelder_mead<F: Fn(&[f64]) -> f64>(f: &F, x0: Vec<f64>, step: f64, tol: f64, max_iter: usize) -> Vec<f64> {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.clone()];
    for j in 0..n {
        let mut x = x0.clone();
        x[j] += step;
        simplex.push(x);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| f(x)).collect();
    for _ in 0..max_iter {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();
        let spread = simplex.iter().map(|x| dist(x, &simplex[0])).fold(0.0, f64::max);
        if values[n] - values[0] <= tol && spread <= tol {
            break;
        }
        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|x| x[k]).sum::<f64>() / n as f64)
            .collect();
        let along = |coef: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(c, w)| c + coef * (w - c))
                .collect()
        };
        let xr = along(-1.0);
        let fr = f(&xr);
        if fr < values[0] {
            let xe = along(-2.0);
            let fe = f(&xe);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let xc = if fr < values[n] { along(-0.5) } else { along(0.5) };
            let fc = f(&xc);
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(a, b)| a + 0.5 * (b - a))
                        .collect();
                    values[i] = f(&shrunk);
                    simplex[i] = shrunk;
                }
            }
        }
    }
    let best = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .expect("non-empty");
    simplex[best].clone()
}

/// Whether every face of size ≥ 3 and at most `max_size` that contains the
/// last vertex is good.
fn new_faces_good(coords: &[Vec<f64>], gamma0: f64, max_size: usize) -> bool {
    let n = coords.len();
    let last = 1u32 << (n - 1);
    let mut face: Vec<&[f64]> = Vec::with_capacity(n);
    (last..(1u32 << n)).all(|mask| {
        let size = mask.count_ones() as usize;
        if size < 3 || size > max_size {
            return true;
        }
        face.clear();
        face.extend((0..n).filter(|i| mask & (1 << i) != 0).map(|i| coords[i].as_slice()));
        kernel::thickness(&face) >= gamma0.powi(size as i32 - 1)
    })
}

fn witness_for(
    tau: &Simplex,
    coords: &[Vec<f64>],
    pos: usize,
    params: &ForbidParams,
    r_lim: f64,
) -> Option<ForbiddenWitness> {
    let facet: Vec<Vec<f64>> = coords
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pos)
        .map(|(_, c)| c.clone())
        .collect();
    let fit = best_ball(&coords[pos], &facet, r_lim)?;
    let delta = params.delta();
    (fit.gap <= delta).then(|| ForbiddenWitness {
        tau: tau.clone(),
        certifying_vertex: tau.vertices()[pos],
        ball_center: Point::new(fit.center),
        ball_radius: fit.radius,
        slack: fit.gap - delta,
        k: coords.len() - 2,
    })
}

/// Every forbidden configuration in `net`, one witness per (τ, certifying
/// vertex) pair, in lexicographic order.
pub fn find_all_forbidden(net: &Net, params: &ForbidParams) -> Vec<ForbiddenWitness> {
    let m = net.dim();
    let bound = params.diameter_bound();
    let delta = params.delta();
    // strict R < ε′
    let r_lim = params.eps_prime * (1.0 - 1e-12);
    let reach = 2.0 * params.eps_prime + delta;
    let mut all: Vec<ForbiddenWitness> = (0..net.len())
        .into_par_iter()
        .flat_map_iter(|root| {
            let anchor = net.point(root).coords().to_vec();
            let up: Vec<usize> = net.within(root, bound).into_iter().filter(|&j| j > root).collect();
            let around = net.within(root, reach);
            let mut found = Vec::new();
            let mut chosen = vec![root];
            let mut coords = vec![anchor.clone()];
            search(
                net,
                params,
                &anchor,
                &up,
                &around,
                bound,
                r_lim,
                m,
                &mut chosen,
                &mut coords,
                &mut found,
            );
            found
        })
        .collect();
    all.sort_by(|a, b| (&a.tau, a.certifying_vertex).cmp(&(&b.tau, b.certifying_vertex)));
    all.dedup_by(|a, b| a.tau == b.tau && a.certifying_vertex == b.certifying_vertex);
    all
}

#[allow(clippy::too_many_arguments)]
fn search(
    net: &Net,
    params: &ForbidParams,
    anchor: &[f64],
    candidates: &[usize],
    around: &[usize],
    bound: f64,
    r_lim: f64,
    m: usize,
    chosen: &mut Vec<usize>,
    coords: &mut Vec<Vec<f64>>,
    found: &mut Vec<ForbiddenWitness>,
) {
    for (k, &c) in candidates.iter().enumerate() {
        let cc = net.unwrap_near(anchor, net.point(c).coords()).into_coords();
        if coords.iter().any(|x| dist(x, &cc) >= bound) {
            continue;
        }
        chosen.push(c);
        coords.push(cc);
        let good = coords.len() < 3 || new_faces_good(coords, params.gamma0, coords.len());
        if good {
            if coords.len() == m + 1 {
                extend_top(net, params, anchor, around, r_lim, chosen, coords, found);
            } else {
                search(
                    net,
                    params,
                    anchor,
                    &candidates[k + 1..],
                    around,
                    bound,
                    r_lim,
                    m,
                    chosen,
                    coords,
                    found,
                );
            }
        } else if kernel::find_flake_face(coords, params.gamma0).map(|f| f.len()) == Some(coords.len()) {
            let mut sorted: Vec<(usize, Vec<f64>)> = chosen.iter().copied().zip(coords.iter().cloned()).collect();
            sorted.sort_by_key(|(i, _)| *i);
            let tau = Simplex::from_sorted(sorted.iter().map(|(i, _)| *i).collect());
            let local: Vec<Vec<f64>> = sorted.into_iter().map(|(_, c)| c).collect();
            for pos in 0..local.len() {
                if let Some(w) = witness_for(&tau, &local, pos, params, r_lim) {
                    found.push(w);
                }
            }
        }
        coords.pop();
        chosen.pop();
    }
}

/// Forbidden (m+1)-simplices: a good m-simplex σ with circumradius below ε′
/// and a point within δ of its circumsphere, with every other facet good.
#[allow(clippy::too_many_arguments)]
fn extend_top(
    net: &Net,
    params: &ForbidParams,
    anchor: &[f64],
    around: &[usize],
    r_lim: f64,
    chosen: &[usize],
    coords: &[Vec<f64>],
    found: &mut Vec<ForbiddenWitness>,
) {
    let circ = kernel::circumsphere(coords);
    if !circ.exists || circ.radius > r_lim {
        return;
    }
    let delta = params.delta();
    for &q in around {
        if chosen.contains(&q) {
            continue;
        }
        let qc = net.unwrap_near(anchor, net.point(q).coords()).into_coords();
        let gap = (dist(&qc, circ.center.coords()) - circ.radius).abs();
        if gap > delta {
            continue;
        }
        let mut all = coords.to_vec();
        all.push(qc);
        // σ is good, so τ is a flake iff the other facets are good; τ itself
        // is degenerate in ℝ^m
        if !new_faces_good(&all, params.gamma0, all.len() - 1) {
            continue;
        }
        let mut ids = chosen.to_vec();
        ids.push(q);
        ids.sort_unstable();
        found.push(ForbiddenWitness {
            tau: Simplex::from_sorted(ids),
            certifying_vertex: q,
            ball_center: circ.center.clone(),
            ball_radius: circ.radius,
            slack: gap - delta,
            k: coords.len() - 1,
        });
    }
}

/// The first forbidden configuration in canonical (τ, vertex) order.
pub fn find_forbidden(net: &Net, params: &ForbidParams) -> Option<ForbiddenWitness> {
    find_all_forbidden(net, params).into_iter().next()
}

/// Forbidden configurations with at least one vertex in `incident`.
pub fn find_forbidden_incident(net: &Net, params: &ForbidParams, incident: &[usize]) -> Vec<ForbiddenWitness> {
    find_all_forbidden(net, params)
        .into_iter()
        .filter(|w| w.tau.vertices().iter().any(|v| incident.contains(v)))
        .collect()
}

/// Whether every vertex of τ lies within `α₀ R(τ_p)` of the circumsphere of
/// its opposite facet.
pub fn hoop_check<S: VertexSource + ?Sized>(tau: &Simplex, alpha0: f64, src: &S) -> Result<bool, VerifyError> {
    if tau.len() < 3 {
        return Err(VerifyError::TooSmall(tau.clone()));
    }
    let coords = src.vertex_coords(tau)?;
    Ok(hoop_check_coords(&coords, alpha0))
}

pub fn hoop_check_coords<P: AsRef<[f64]>>(coords: &[P], alpha0: f64) -> bool {
    (0..coords.len()).all(|i| {
        let facet: Vec<&[f64]> = coords
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, c)| c.as_ref())
            .collect();
        let circ = kernel::circumsphere(&facet);
        if !circ.exists {
            return false;
        }
        match kernel::point_to_circumsphere_distance(coords[i].as_ref(), &facet) {
            Ok(d) => d <= alpha0 * circ.radius,
            Err(_) => false,
        }
    })
}

/// The certifying pair of a forbidden configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Certifier {
    pub vertex: usize,
    pub center: Point,
    pub radius: f64,
}

impl From<&ForbiddenWitness> for Certifier {
    fn from(w: &ForbiddenWitness) -> Self {
        Certifier {
            vertex: w.certifying_vertex,
            center: w.ball_center.clone(),
            radius: w.ball_radius,
        }
    }
}

/// Checks that every vertex q of a certified forbidden configuration lies
/// close to some small circumscribing ball of its opposite facet:
/// `R_q ≤ (1 + 3δ₀/(μ₀′Γ₀^k)) R` and
/// `d(q, ∂B_q) ≤ 6δ₀/(μ₀′²Γ₀^k) · s(τ_q)`.
pub fn symmetry_check<S: VertexSource + ?Sized>(
    tau: &Simplex,
    certifier: &Certifier,
    params: &ForbidParams,
    src: &S,
) -> Result<bool, VerifyError> {
    if params.delta0 > 0.25 {
        return Err(VerifyError::Delta0TooLarge(params.delta0));
    }
    if tau.len() < 3 {
        return Err(VerifyError::TooSmall(tau.clone()));
    }
    let coords: Vec<Vec<f64>> = src.vertex_coords(tau)?.into_iter().map(Point::into_coords).collect();
    symmetry_check_coords(tau, &coords, certifier, params)
}

pub fn symmetry_check_coords(
    tau: &Simplex,
    coords: &[Vec<f64>],
    certifier: &Certifier,
    params: &ForbidParams,
) -> Result<bool, VerifyError> {
    let not_certified = |why| Err(VerifyError::NotCertified(tau.clone(), why));
    if kernel::find_flake_face(coords, params.gamma0).map(|f| f.len()) != Some(coords.len()) {
        return not_certified("not a flake");
    }
    let Some(pos) = tau.position(certifier.vertex) else {
        return not_certified("certifying vertex not in simplex");
    };
    let scale = certifier.radius.max(1.0);
    for (i, c) in coords.iter().enumerate() {
        if i != pos && (dist(c, certifier.center.coords()) - certifier.radius).abs() > TOL_GEOM * scale {
            return not_certified("ball does not circumscribe the facet");
        }
    }
    if certifier.radius >= params.eps_prime {
        return not_certified("ball radius not below eps'");
    }
    let gap = (dist(&coords[pos], certifier.center.coords()) - certifier.radius).abs();
    if gap > params.delta() * (1.0 + 1e-9) + 1e-15 {
        return not_certified("certifying vertex farther than delta from the ball");
    }
    let k = coords.len() as i32 - 2;
    let gk = params.gamma0.powi(k);
    let r_bound = (1.0 + 3.0 * params.delta0 / (params.mu0_prime * gk)) * certifier.radius;
    let d_coef = 6.0 * params.delta0 / (params.mu0_prime * params.mu0_prime * gk);
    for q in 0..coords.len() {
        if q == pos {
            continue;
        }
        let facet: Vec<Vec<f64>> = coords
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != q)
            .map(|(_, c)| c.clone())
            .collect();
        let (s, _) = kernel::edge_extremes(&facet);
        match best_ball(&coords[q], &facet, r_bound) {
            Some(fit) if fit.gap <= d_coef * s => {}
            _ => return Ok(false),
        }
    }
    Ok(true)
}
