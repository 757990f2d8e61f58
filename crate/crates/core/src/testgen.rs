//! Seeded generators for adversarial geometry: random simplices, Γ₀-flakes
//! and forbidden configurations. Every generated object is checked against
//! its definition before being returned.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::geom::{dist, dot, kernel, norm};
use crate::verify::{best_ball, ForbidParams};

/// Gaussian vector in ℝ^m.
pub fn gaussian<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v = gaussian(m, rng);
        let n = norm(&v);
        if n > 1e-6 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Random orthonormal basis of ℝ^m.
pub fn random_frame<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    while basis.len() < m {
        let mut v = gaussian(m, rng);
        for _ in 0..2 {
            for b in &basis {
                let d = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let n = norm(&v);
        if n > 1e-3 {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    basis
}

/// `k+1` points uniform in `[-1, 1]^m`.
pub fn random_simplex<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    (0..=k)
        .map(|_| (0..m).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

/// A random simplex whose points are close to a lower-dimensional flat, so
/// that bad faces of every dimension show up.
pub fn random_squashed_simplex<R: Rng + ?Sized>(m: usize, k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut pts = random_simplex(m, k, rng);
    let frame = random_frame(m, rng);
    let axis = &frame[0];
    let squash: f64 = 10f64.powf(rng.random_range(-4.0..0.0));
    for p in &mut pts {
        let d = dot(p, axis);
        p.iter_mut().zip(axis).for_each(|(x, a)| *x -= (1.0 - squash) * d * a);
    }
    pts
}

fn combine(origin: &[f64], dirs: &[&Vec<f64>], coefs: &[f64]) -> Vec<f64> {
    let mut x = origin.to_vec();
    for (d, c) in dirs.iter().zip(coefs) {
        x.iter_mut().zip(d.iter()).for_each(|(xi, di)| *xi += c * di);
    }
    x
}

/// A Γ₀-flake of dimension `k+1` in ℝ^m built on a Γ₀-good k-facet, with
/// the apex at small height over a point near the facet's circumsphere.
/// When `k == m` the apex lies in the facet's hull and the flake is
/// degenerate. Returns `None` if no flake was produced in `attempts` tries.
pub fn random_flake<R: Rng + ?Sized>(
    m: usize,
    k: usize,
    gamma0: f64,
    attempts: usize,
    rng: &mut R,
) -> Option<Vec<Vec<f64>>> {
    assert!((1..=m).contains(&k));
    for _ in 0..attempts {
        let frame = random_frame(m, rng);
        let (flat, normal) = frame.split_at(k);
        let flat: Vec<&Vec<f64>> = flat.iter().collect();
        let origin = gaussian(m, rng);
        let facet: Vec<Vec<f64>> = (0..=k)
            .map(|_| {
                let coefs = unit_vector(k, rng);
                combine(&origin, &flat, &coefs)
            })
            .collect();
        if !kernel::is_gamma_good(&facet, gamma0) {
            continue;
        }
        let (_, diam) = kernel::edge_extremes(&facet);
        let radial: f64 = rng.random_range(0.7..1.3);
        let dir = unit_vector(k, rng);
        let coefs: Vec<f64> = dir.iter().map(|d| d * radial).collect();
        let mut apex = combine(&origin, &flat, &coefs);
        if k < m {
            let bound = (k + 1) as f64 * gamma0.powi(k as i32 + 1) * diam;
            let h = rng.random_range(0.0..1.0) * bound;
            let n = &normal[rng.random_range(0..normal.len())];
            apex.iter_mut().zip(n).for_each(|(x, y)| *x += h * y);
        }
        let mut tau = facet;
        tau.push(apex);
        if kernel::find_flake_face(&tau, gamma0).map(|f| f.len()) == Some(tau.len()) {
            return Some(tau);
        }
    }
    None
}

/// Parameters for one sampled forbidden-configuration instance, with ε = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfigParams {
    pub m: usize,
    pub mu0: f64,
    pub rho_tilde: f64,
    pub gamma0: f64,
    pub delta0: f64,
}

impl ConfigParams {
    pub fn forbid(&self) -> ForbidParams {
        let eps_prime = 1.0 + self.rho_tilde;
        ForbidParams {
            gamma0: self.gamma0,
            delta0: self.delta0,
            eps_prime,
            mu0_prime: (self.mu0 - 2.0 * self.rho_tilde) / eps_prime,
        }
    }

    /// Random parameters satisfying `Γ₀ ≤ 2μ₀²/75` and `δ₀ = Γ₀^(m+1)`.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mu0 = rng.random_range(0.7..=1.0);
        let rho_tilde = rng.random_range(0.0..=mu0 / 4.0);
        let choices: &[f64] = if m <= 2 {
            &[1e-4, 1e-3, 1e-2]
        } else {
            &[1e-3, 5e-3, 1e-2]
        };
        let gamma0 = choices[rng.random_range(0..choices.len())];
        debug_assert!(gamma0 <= 2.0 * mu0 * mu0 / 75.0);
        ConfigParams {
            m,
            mu0,
            rho_tilde,
            gamma0,
            delta0: gamma0.powi(m as i32 + 1),
        }
    }
}

/// A forbidden configuration: a flake `coords` whose last vertex lies
/// within δ of the ball `(center, radius)` circumscribing the other
/// vertices, with `radius < ε′` and all edges at least `μ₀′ε′`.
#[derive(Clone, Debug)]
pub struct ForbiddenConfig {
    pub params: ConfigParams,
    pub coords: Vec<Vec<f64>>,
    pub center: Vec<f64>,
    pub radius: f64,
    /// Dimension of the facet opposite the last vertex.
    pub k: usize,
}

impl ForbiddenConfig {
    pub fn certifying(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn facet(&self) -> &[Vec<f64>] {
        &self.coords[..self.coords.len() - 1]
    }

    /// Checks the full definition; the generator only returns instances for
    /// which this holds.
    pub fn verify(&self) -> bool {
        let fp = self.params.forbid();
        let (short, _) = kernel::edge_extremes(&self.coords);
        if short < fp.mu0_prime * fp.eps_prime {
            return false;
        }
        if kernel::find_flake_face(&self.coords, fp.gamma0).map(|f| f.len()) != Some(self.coords.len()) {
            return false;
        }
        if self.radius >= fp.eps_prime {
            return false;
        }
        let scale = self.radius.max(1.0);
        if self
            .facet()
            .iter()
            .any(|v| (dist(v, &self.center) - self.radius).abs() > 1e-9 * scale)
        {
            return false;
        }
        let apex = &self.coords[self.certifying()];
        (dist(apex, &self.center) - self.radius).abs() <= fp.delta()
            && best_ball(apex, self.facet(), fp.eps_prime * (1.0 - 1e-12)).is_some_and(|b| b.gap <= fp.delta())
    }
}

/// A forbidden configuration whose facet has dimension `k`, with
/// `2 ≤ k ≤ m`. Facets of dimension one cannot occur: a thin triangle with
/// its apex near the 0-sphere of its base would violate the separation.
pub fn random_forbidden<R: Rng + ?Sized>(
    params: ConfigParams,
    k: usize,
    attempts: usize,
    rng: &mut R,
) -> Option<ForbiddenConfig> {
    let m = params.m;
    assert!((2..=m).contains(&k));
    let fp = params.forbid();
    let (eps_p, mu_p, delta) = (fp.eps_prime, fp.mu0_prime, fp.delta());
    let r_top = eps_p * (1.0 - 1e-9);
    for _ in 0..attempts {
        let frame = random_frame(m, rng);
        let (flat, normal) = frame.split_at(k);
        let flat: Vec<&Vec<f64>> = flat.iter().collect();
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = rng.random_range(0.6 * eps_p..r_top);
        let facet: Vec<Vec<f64>> = (0..=k)
            .map(|_| {
                let u: Vec<f64> = unit_vector(k, rng).into_iter().map(|x| x * r).collect();
                combine(&c, &flat, &u)
            })
            .collect();
        let (short, _) = kernel::edge_extremes(&facet);
        if short < mu_p * eps_p || !kernel::is_gamma_good(&facet, fp.gamma0) {
            continue;
        }
        // an apex direction well away from the facet vertices
        let local: Vec<Vec<f64>> = facet
            .iter()
            .map(|v| flat.iter().map(|d| dot(d, v) - dot(d, &c)).collect())
            .collect();
        let w = (0..32)
            .map(|_| unit_vector(k, rng))
            .max_by(|a, b| {
                let score = |u: &Vec<f64>| {
                    let x: Vec<f64> = u.iter().map(|t| t * r).collect();
                    local.iter().map(|v| dist(v, &x)).fold(f64::INFINITY, f64::min)
                };
                score(a).total_cmp(&score(b))
            })
            .expect("non-empty");
        let (apex, center, radius) = if k == m {
            let eta = rng.random_range(-0.99..0.99) * delta;
            let u: Vec<f64> = w.iter().map(|x| x * (r + eta)).collect();
            (combine(&c, &flat, &u), c.clone(), r)
        } else {
            let n = {
                let coefs = unit_vector(normal.len(), rng);
                let dirs: Vec<&Vec<f64>> = normal.iter().collect();
                combine(&vec![0.0; m], &dirs, &coefs)
            };
            let s_max = (r_top * r_top - r * r).sqrt();
            let s = rng.random_range(-s_max..=s_max);
            let h_max = (k + 1) as f64 * fp.gamma0.powi(k as i32 + 1) * mu_p * eps_p;
            let h = rng.random_range(0.01..0.99) * h_max;
            // the apex c + ρw + hn lies on the sphere about c + sn through the facet
            let rho2 = r * r + 2.0 * h * s - h * h;
            if rho2 <= 0.0 {
                continue;
            }
            let rho = rho2.sqrt() + rng.random_range(-0.49..0.49) * delta;
            let u: Vec<f64> = w.iter().map(|x| x * rho).collect();
            let mut apex = combine(&c, &flat, &u);
            apex.iter_mut().zip(&n).for_each(|(x, y)| *x += h * y);
            let center: Vec<f64> = c.iter().zip(&n).map(|(ci, ni)| ci + s * ni).collect();
            (apex, center, (r * r + s * s).sqrt())
        };
        let mut coords = facet;
        coords.push(apex);
        let cfg = ForbiddenConfig {
            params,
            coords,
            center,
            radius,
            k,
        };
        if cfg.verify() {
            return Some(cfg);
        }
    }
    None
}

/// One shell-and-ball geometry: sphere `(center, radius)`, shell
/// half-width `beta`, and the ball `B(p, rho)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShellGeometry {
    pub center: Vec<f64>,
    pub radius: f64,
    pub beta: f64,
    pub p: Vec<f64>,
    pub rho: f64,
}

impl ShellGeometry {
    /// A random geometry with `rho < radius − beta` and `p` close enough to
    /// the sphere that the ball meets the shell.
    pub fn sample<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let radius = rng.random_range(0.5..3.0);
        let beta = rng.random_range(0.005..0.2) * radius;
        let rho = rng.random_range(0.05..0.999) * (radius - beta);
        let center = vec![0.0; m];
        let offset = radius + rng.random_range(-1.0..1.0) * rho;
        let p: Vec<f64> = unit_vector(m, rng).into_iter().map(|x| x * offset).collect();
        ShellGeometry {
            center,
            radius,
            beta,
            p,
            rho,
        }
    }

    /// Monte Carlo estimate of `vol(B(p, ρ) ∩ shell)` with its standard
    /// error, from `samples` uniform draws in the ball.
    pub fn volume_mc<R: Rng + ?Sized>(&self, samples: usize, rng: &mut R) -> (f64, f64) {
        let m = self.p.len();
        let mut hits = 0usize;
        for _ in 0..samples {
            let dir = unit_vector(m, rng);
            let r = self.rho * rng.random::<f64>().powf(1.0 / m as f64);
            let x: Vec<f64> = self.p.iter().zip(&dir).map(|(p, d)| p + r * d).collect();
            if (dist(&x, &self.center) - self.radius).abs() <= self.beta {
                hits += 1;
            }
        }
        let ball = crate::perturb::unit_ball_volume(m) * self.rho.powi(m as i32);
        let f = hits as f64 / samples as f64;
        (f * ball, ball * (f * (1.0 - f) / samples as f64).sqrt())
    }
}
