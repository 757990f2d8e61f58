//! The randomized one-pass perturbation: neighbourhoods, candidate
//! simplices, the good-perturbation predicate and the sequential driver.

mod params;
mod precision;

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geom::{dist, kernel, Point, Simplex};
use crate::net::{perturbed_params, sample_ball, Net, NetError};

pub use params::{
    ball_volume_ratio, derive_params, forbidden_volume_bound, hoop_alpha0, k_constant, unit_ball_volume, AlgoParams,
    Mode, Overrides, DEFAULT_EVAL_TOL, DEFAULT_RETRY_CAP,
};
pub use precision::{precision_report, Pow2, PrecisionReport};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum PerturbError {
    #[error("{code}: {message}")]
    Param { code: &'static str, message: String },
    #[error("point {index} found no good perturbation within {cap} trials")]
    RetryCap {
        index: usize,
        cap: u64,
        trace: Box<RunTrace>,
    },
    #[error(transparent)]
    Net(#[from] NetError),
}

impl PerturbError {
    pub fn code(&self) -> &'static str {
        match self {
            PerturbError::Param { code, .. } => code,
            PerturbError::RetryCap { .. } => "RETRY_CAP",
            PerturbError::Net(_) => "INPUT_NET",
        }
    }
}

/// Audit record of one perturbation run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    /// Trials per point; the unperturbed position counts as trial 1.
    pub retries: Vec<u64>,
    pub displacements: Vec<f64>,
    /// Candidate simplices emitted for each point's neighbourhood.
    pub candidates: Vec<u64>,
    pub seed: u64,
    /// Sum over points of candidates × trials.
    pub total_predicate_evals: u64,
    pub wall_time: Duration,
}

impl RunTrace {
    fn new(seed: u64) -> Self {
        RunTrace {
            retries: Vec::new(),
            displacements: Vec::new(),
            candidates: Vec::new(),
            seed,
            total_predicate_evals: 0,
            wall_time: Duration::ZERO,
        }
    }

    pub fn mean_retries(&self) -> f64 {
        if self.retries.is_empty() {
            return 0.0;
        }
        self.retries.iter().sum::<u64>() as f64 / self.retries.len() as f64
    }

    pub fn max_displacement(&self) -> f64 {
        self.displacements.iter().copied().fold(0.0, f64::max)
    }
}

/// The indices `q != p` with `d(p, q) < (3 + μ₀/2) ε`.
pub fn neighborhood(p: usize, net: &Net, params: &AlgoParams) -> Vec<usize> {
    net.within(p, params.neighborhood_radius())
}

/// Coordinates of a neighbourhood, unwrapped around an anchor point.
struct Local {
    indices: Vec<usize>,
    coords: Vec<Vec<f64>>,
    adjacent: Vec<Vec<bool>>,
}

impl Local {
    fn new(anchor: &[f64], np: &[usize], net: &Net, params: &AlgoParams) -> Self {
        let coords: Vec<Vec<f64>> = np
            .iter()
            .map(|&q| net.unwrap_near(anchor, net.point(q).coords()).into_coords())
            .collect();
        let bound = params.diameter_bound();
        let adjacent = (0..coords.len())
            .map(|i| {
                (0..coords.len())
                    .map(|j| i != j && dist(&coords[i], &coords[j]) < bound)
                    .collect()
            })
            .collect();
        Local {
            indices: np.to_vec(),
            coords,
            adjacent,
        }
    }

    /// Depth-first enumeration of the candidate simplices. The callback
    /// receives local positions and the circumsphere, if any.
    fn for_each_candidate<F: FnMut(&[usize], Option<(&[f64], f64)>)>(&self, params: &AlgoParams, mut f: F) {
        let mut stack = kernel::SphereStack::new();
        let mut chosen = Vec::with_capacity(params.m + 1);
        for start in 0..self.coords.len() {
            stack.push(&self.coords[start]);
            chosen.push(start);
            self.grow(params, &mut stack, &mut chosen, &mut f);
            chosen.pop();
            stack.pop();
        }
    }

    fn grow<F: FnMut(&[usize], Option<(&[f64], f64)>)>(
        &self,
        params: &AlgoParams,
        stack: &mut kernel::SphereStack,
        chosen: &mut Vec<usize>,
        f: &mut F,
    ) {
        if chosen.len() == params.m + 1 {
            return;
        }
        let last = *chosen.last().expect("non-empty");
        for next in (last + 1)..self.coords.len() {
            if !chosen.iter().all(|&c| self.adjacent[c][next]) {
                continue;
            }
            chosen.push(next);
            stack.push(&self.coords[next]);
            let sphere = stack.current();
            let mut descend = true;
            let mut emit = !params.m_simplices_only || chosen.len() == params.m + 1;
            if params.prune_p2 {
                if let Some((_, r)) = sphere {
                    if r >= 2.0 * params.eps {
                        emit = false;
                    }
                }
            }
            if params.prune_p4 && chosen.len() >= 3 {
                let verts: Vec<&[f64]> = chosen.iter().map(|&c| self.coords[c].as_slice()).collect();
                if !kernel::is_gamma_good(&verts, params.gamma0) {
                    // every superset contains this bad face
                    emit = false;
                    descend = false;
                }
            }
            if emit {
                f(chosen, sphere);
            }
            if descend {
                self.grow(params, stack, chosen, f);
            }
            stack.pop();
            chosen.pop();
        }
    }
}

/// The candidate simplices S_p over the neighbour set `np`, in the current
/// positions of `net`: subsets of size 2..=m+1 under the diameter bound.
pub fn candidate_simplices(np: &[usize], net: &Net, params: &AlgoParams) -> Vec<Simplex> {
    if np.is_empty() {
        return Vec::new();
    }
    let anchor = net.point(np[0]).coords().to_vec();
    let local = Local::new(&anchor, np, net, params);
    let mut out = Vec::new();
    local.for_each_candidate(params, |chosen, _| {
        let mut v: Vec<usize> = chosen.iter().map(|&c| local.indices[c]).collect();
        v.sort_unstable();
        out.push(Simplex::new(v).expect("distinct indices"));
    });
    out
}

/// Spheres of the candidates around one point that can come within the
/// rejection band of any position in the perturbation ball.
struct SphereSet {
    centers: Vec<f64>,
    radii: Vec<f64>,
    m: usize,
    emitted: u64,
}

impl SphereSet {
    fn build(anchor: &[f64], np: &[usize], net: &Net, params: &AlgoParams, reach: f64) -> Self {
        let local = Local::new(anchor, np, net, params);
        let mut set = SphereSet {
            centers: Vec::new(),
            radii: Vec::new(),
            m: params.m,
            emitted: 0,
        };
        local.for_each_candidate(params, |_, sphere| {
            set.emitted += 1;
            if let Some((c, r)) = sphere {
                if (dist(anchor, c) - r).abs() <= reach {
                    set.centers.extend_from_slice(c);
                    set.radii.push(r);
                }
            }
        });
        set
    }

    fn min_gap(&self, x: &[f64]) -> f64 {
        self.radii
            .iter()
            .enumerate()
            .map(|(i, r)| (dist(x, &self.centers[i * self.m..(i + 1) * self.m]) - r).abs())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Smallest `|d(x, C(σ)) − R(σ)|` over the candidates built from `np` in
/// the current positions, with `p` itself excluded. Infinite when no
/// candidate has a circumsphere.
pub fn min_candidate_gap(x: &Point, p: usize, np: &[usize], current: &Net, params: &AlgoParams) -> f64 {
    let np: Vec<usize> = np.iter().copied().filter(|&q| q != p).collect();
    let anchor = current.point(p).coords();
    let x_local = current.unwrap_near(anchor, x.coords());
    SphereSet::build(anchor, &np, current, params, f64::INFINITY).min_gap(x_local.coords())
}

/// Whether moving `p` to `x` creates no candidate sphere within the
/// rejection band `2α₀ε + eval_tol`. The neighbourhood is taken in the
/// positions of `current`.
pub fn good_perturbation(x: &Point, p: usize, current: &Net, params: &AlgoParams) -> bool {
    let np = neighborhood(p, current, params);
    min_candidate_gap(x, p, &np, current, params) > params.rejection_band()
}

/// Perturbs every point in index order. Each point first tries its own
/// position, then uniform samples from `B(p_i, ρ̃ε)` until the good
/// perturbation predicate accepts or the retry cap is reached.
pub fn perturb_all(net: &Net, params: &AlgoParams, seed: u64) -> Result<(Net, RunTrace), PerturbError> {
    let started = Instant::now();
    if params.m != net.dim() {
        return Err(PerturbError::Param {
            code: "PARAM_DIM",
            message: format!("parameters are for m = {}, net has m = {}", params.m, net.dim()),
        });
    }
    if net.is_periodic() && params.neighborhood_radius() >= 0.5 {
        return Err(PerturbError::Param {
            code: "PARAM_PERIODIC",
            message: format!(
                "neighbourhood radius {} must stay below half the period",
                params.neighborhood_radius()
            ),
        });
    }
    let (eps_prime, mu0_prime) = perturbed_params(params.mu0, params.eps, params.rho_tilde)?;
    let neighborhoods: Vec<Vec<usize>> = (0..net.len()).map(|i| neighborhood(i, net, params)).collect();
    let band = params.rejection_band();
    let radius = params.perturbation_radius();

    let mut current = net.clone();
    let mut trace = RunTrace::new(seed);
    for (i, np) in neighborhoods.iter().enumerate() {
        let anchor = net.point(i).coords().to_vec();
        let spheres = SphereSet::build(&anchor, np, &current, params, radius + band);
        let center = Point::new(anchor.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);

        let mut trials = 1u64;
        let mut x = center.clone();
        while spheres.min_gap(x.coords()) <= band {
            if trials >= params.retry_cap || radius == 0.0 {
                trace.retries.push(trials);
                trace.candidates.push(spheres.emitted);
                trace.total_predicate_evals += spheres.emitted * trials;
                trace.wall_time = started.elapsed();
                return Err(PerturbError::RetryCap {
                    index: i,
                    cap: params.retry_cap,
                    trace: Box::new(trace),
                });
            }
            x = sample_ball(&center, radius, false, &mut rng);
            trials += 1;
        }
        trace.retries.push(trials);
        trace.displacements.push(dist(x.coords(), &anchor));
        trace.candidates.push(spheres.emitted);
        trace.total_predicate_evals += spheres.emitted * trials;
        current.set_point(i, current.wrap(x));
    }
    current.set_params(eps_prime, mu0_prime);
    trace.wall_time = started.elapsed();
    Ok((current, trace))
}
