use std::fmt;

use crate::net::perturbed_params;

use super::PerturbError;

/// Default cap on sampling attempts per point.
pub const DEFAULT_RETRY_CAP: u64 = 100_000;
/// Default widening of the rejection band.
pub const DEFAULT_EVAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// All constants derived from the net parameters; termination is
    /// guaranteed in expectation.
    Theoretical,
    /// Γ₀ (and optionally δ₀, α₀) supplied by the caller.
    Practical,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Theoretical => "theoretical",
            Mode::Practical => "practical",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub gamma0: Option<f64>,
    pub delta0: Option<f64>,
    pub alpha0: Option<f64>,
    pub retry_cap: Option<u64>,
    pub eval_tol: Option<f64>,
    /// Accept δ₀ > Γ₀^(m+1). The run then carries no theoretical guarantee
    /// and is judged by certification alone.
    pub allow_loose_delta0: bool,
    /// Drop candidate simplices whose circumradius is at least 2ε.
    pub prune_p2: bool,
    /// Drop candidate simplices that are not Γ₀-good.
    pub prune_p4: bool,
    /// Only emit m-simplices as candidates.
    pub m_simplices_only: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoParams {
    pub m: usize,
    pub mu0: f64,
    pub eps: f64,
    pub rho_tilde: f64,
    pub mode: Mode,
    pub gamma0: f64,
    pub delta0: f64,
    pub alpha0: f64,
    /// δ = δ₀ μ₀′ ε′.
    pub delta: f64,
    pub eps_prime: f64,
    pub mu0_prime: f64,
    pub k: f64,
    pub e1: f64,
    pub e: f64,
    pub gamma: f64,
    /// Expected trials per point, `1/(1−γ)`; infinite when γ ≥ 1.
    pub t: f64,
    pub retry_cap: u64,
    pub eval_tol: f64,
    pub prune_p2: bool,
    pub prune_p4: bool,
    pub m_simplices_only: bool,
}

impl AlgoParams {
    /// Radius of the neighbourhood N_p.
    pub fn neighborhood_radius(&self) -> f64 {
        (3.0 + self.mu0 / 2.0) * self.eps
    }

    /// Diameter bound a candidate simplex must stay under.
    pub fn diameter_bound(&self) -> f64 {
        2.5 * (1.0 + self.delta0 * self.mu0 / 2.0) * self.eps
    }

    /// Half-width of the rejection band around a candidate sphere.
    pub fn rejection_band(&self) -> f64 {
        2.0 * self.alpha0 * self.eps + self.eval_tol
    }

    /// Radius of the perturbation ball.
    pub fn perturbation_radius(&self) -> f64 {
        self.rho_tilde * self.eps
    }
}

/// Volume of the unit ball in ℝ^j, by the two-step recurrence
/// `V_j = (2π/j) V_{j−2}`.
pub fn unit_ball_volume(j: usize) -> f64 {
    match j {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / j as f64 * unit_ball_volume(j - 2),
    }
}

/// `V_{m−1}/V_m`.
pub fn ball_volume_ratio(m: usize) -> f64 {
    assert!(m >= 1);
    unit_ball_volume(m - 1) / unit_ball_volume(m)
}

/// `K = (V_{m−1}/V_m) (8/μ₀)^(m²) (16/μ₀)^(m+4)`.
pub fn k_constant(m: usize, mu0: f64) -> f64 {
    let m_i = m as i32;
    ball_volume_ratio(m) * (8.0 / mu0).powi(m_i * m_i) * (16.0 / mu0).powi(m_i + 4)
}

/// The hoop parameter tied to Γ₀: `α₀ = 2 (16/μ₀)³ Γ₀`.
pub fn hoop_alpha0(mu0: f64, gamma0: f64) -> f64 {
    2.0 * (16.0 / mu0).powi(3) * gamma0
}

pub fn derive_params(
    m: usize,
    mu0: f64,
    eps: f64,
    rho_tilde: f64,
    mode: Mode,
    overrides: &Overrides,
) -> Result<AlgoParams, PerturbError> {
    if m == 0 {
        return Err(PerturbError::Param {
            code: "PARAM_DIM",
            message: "dimension must be at least 1".into(),
        });
    }
    if !(mu0 > 0.0 && mu0 <= 1.0) {
        return Err(PerturbError::Param {
            code: "PARAM_MU0",
            message: format!("mu0 must lie in (0, 1], got {mu0}"),
        });
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(PerturbError::Param {
            code: "PARAM_EPS",
            message: format!("eps must be positive and finite, got {eps}"),
        });
    }
    let (eps_prime, mu0_prime) = perturbed_params(mu0, eps, rho_tilde).map_err(|e| PerturbError::Param {
        code: "PARAM_RHO",
        message: e.to_string(),
    })?;
    let m_i = m as i32;
    let k = k_constant(m, mu0);
    let e1 = (8.0 / mu0).powi(m_i);
    let e = 2.0 * (8.0 / mu0).powi(m_i * m_i + m_i);

    let (gamma0, delta0, gamma, t) = match mode {
        Mode::Theoretical => {
            if overrides.gamma0.is_some() || overrides.delta0.is_some() {
                return Err(PerturbError::Param {
                    code: "PARAM_MODE",
                    message: "gamma0/delta0 overrides are only accepted in practical mode".into(),
                });
            }
            if rho_tilde <= 0.0 {
                return Err(PerturbError::Param {
                    code: "PARAM_RHO",
                    message: "theoretical mode needs rho_tilde > 0".into(),
                });
            }
            let gamma0 = rho_tilde / (2.0 * k);
            (gamma0, gamma0.powi(m_i + 1), 0.5, 2.0)
        }
        Mode::Practical => {
            let gamma0 = overrides.gamma0.ok_or_else(|| PerturbError::Param {
                code: "PARAM_GAMMA0",
                message: "practical mode needs a gamma0 override".into(),
            })?;
            if !(gamma0 > 0.0 && gamma0 <= 1.0) {
                return Err(PerturbError::Param {
                    code: "PARAM_GAMMA0",
                    message: format!("gamma0 must lie in (0, 1], got {gamma0}"),
                });
            }
            let limit = gamma0.powi(m_i + 1);
            let delta0 = overrides.delta0.unwrap_or(limit);
            if !(delta0 > 0.0 && delta0.is_finite()) {
                return Err(PerturbError::Param {
                    code: "PARAM_DELTA0",
                    message: format!("delta0 must be positive, got {delta0}"),
                });
            }
            if delta0 > limit && !overrides.allow_loose_delta0 {
                return Err(PerturbError::Param {
                    code: "PARAM_DELTA0",
                    message: format!("delta0 {delta0} exceeds gamma0^(m+1) = {limit}"),
                });
            }
            let gamma = if rho_tilde > 0.0 {
                k * gamma0 / rho_tilde
            } else {
                f64::INFINITY
            };
            let t = if gamma < 1.0 {
                1.0 / (1.0 - gamma)
            } else {
                f64::INFINITY
            };
            (gamma0, delta0, gamma, t)
        }
    };

    let alpha0 = match (mode, overrides.alpha0) {
        (_, Some(a)) => {
            if !(a >= 0.0 && a.is_finite()) {
                return Err(PerturbError::Param {
                    code: "PARAM_ALPHA0",
                    message: format!("alpha0 must be non-negative and finite, got {a}"),
                });
            }
            a
        }
        (Mode::Theoretical, None) => hoop_alpha0(mu0, gamma0),
        // The hoop formula gives α₀ ≫ 1 for any Γ₀ a caller would pick by
        // hand, which rejects every position; use the flake altitude scale.
        (Mode::Practical, None) => gamma0.powi(m_i).max(delta0),
    };
    let eval_tol = overrides.eval_tol.unwrap_or(DEFAULT_EVAL_TOL);
    if !(eval_tol >= 0.0 && eval_tol.is_finite()) {
        return Err(PerturbError::Param {
            code: "PARAM_EVAL_TOL",
            message: format!("eval_tol must be non-negative, got {eval_tol}"),
        });
    }
    let retry_cap = overrides.retry_cap.unwrap_or(DEFAULT_RETRY_CAP);
    if retry_cap == 0 {
        return Err(PerturbError::Param {
            code: "PARAM_RETRY_CAP",
            message: "retry cap must be at least 1".into(),
        });
    }

    Ok(AlgoParams {
        m,
        mu0,
        eps,
        rho_tilde,
        mode,
        gamma0,
        delta0,
        alpha0,
        delta: delta0 * mu0_prime * eps_prime,
        eps_prime,
        mu0_prime,
        k,
        e1,
        e,
        gamma,
        t,
        retry_cap,
        eval_tol,
        prune_p2: overrides.prune_p2,
        prune_p4: overrides.prune_p4,
        m_simplices_only: overrides.m_simplices_only,
    })
}

/// Upper bound on the volume of the part of a β-shell around a sphere that
/// meets a ball of radius ρ: `V_{m−1} (πρ/2)^(m−1) · 2β`.
pub fn forbidden_volume_bound(rho: f64, beta: f64, m: usize) -> f64 {
    assert!(m >= 1);
    unit_ball_volume(m - 1) * (std::f64::consts::PI * rho / 2.0).powi(m as i32 - 1) * 2.0 * beta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((unit_ball_volume(2) - std::f64::consts::PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_ball_volume(4) - std::f64::consts::PI.powi(2) / 2.0).abs() < 1e-14);
        for m in 1..=6 {
            assert!(ball_volume_ratio(m) <= 2f64.powi(m as i32), "m = {m}");
        }
    }

    #[test]
    fn k_for_plane() {
        // (2/π)·8⁴·16⁶ evaluated independently in integer arithmetic
        let exact = 2.0 / std::f64::consts::PI * (4096u64 * 16_777_216u64) as f64;
        let k = k_constant(2, 1.0);
        assert!((k - exact).abs() / exact < 1e-14);
        assert!((k / 4.3745e10 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn theoretical_gamma_and_t() {
        for (m, mu0, rho) in [(2, 1.0, 0.25), (3, 0.8, 0.1), (2, 0.6, 0.05)] {
            let p = derive_params(m, mu0, 1.0, rho, Mode::Theoretical, &Overrides::default()).unwrap();
            assert_eq!(p.gamma, 0.5);
            assert_eq!(p.t, 2.0);
            assert!((p.k * p.gamma0 / p.rho_tilde - 0.5).abs() < 1e-15);
            assert_eq!(p.delta0, p.gamma0.powi(m as i32 + 1));
            assert_eq!(p.alpha0, hoop_alpha0(mu0, p.gamma0));
        }
    }

    #[test]
    fn e1_for_unit_mu() {
        let p = derive_params(2, 1.0, 1.0, 0.25, Mode::Theoretical, &Overrides::default()).unwrap();
        assert_eq!(p.e1, 64.0);
        assert_eq!(p.e, 2.0 * 8f64.powi(6));
    }

    #[test]
    fn practical_delta0_limit() {
        let mut o = Overrides {
            gamma0: Some(1e-2),
            delta0: Some(1e-6),
            ..Overrides::default()
        };
        let err = derive_params(3, 0.9, 1.0, 0.2, Mode::Practical, &o).unwrap_err();
        assert!(matches!(
            err,
            PerturbError::Param {
                code: "PARAM_DELTA0",
                ..
            }
        ));
        o.allow_loose_delta0 = true;
        let p = derive_params(3, 0.9, 1.0, 0.2, Mode::Practical, &o).unwrap();
        assert_eq!(p.delta0, 1e-6);
        assert!(derive_params(3, 0.9, 1.0, 0.2, Mode::Practical, &Overrides::default()).is_err());
    }

    #[test]
    fn rho_out_of_range() {
        let err = derive_params(2, 1.0, 1.0, 0.3, Mode::Theoretical, &Overrides::default()).unwrap_err();
        assert!(matches!(err, PerturbError::Param { code: "PARAM_RHO", .. }));
    }

    #[test]
    fn volume_bound_values() {
        let v = forbidden_volume_bound(0.25, 0.01, 2);
        assert!((v - 2.0 * (std::f64::consts::PI * 0.25 / 2.0) * 0.02).abs() < 1e-15);
        assert!((v - 0.015708).abs() < 1e-6);
        assert_eq!(forbidden_volume_bound(0.25, 0.0, 3), 0.0);
    }
}
