//! Floating-point precision budget for running the perturbation with
//! ρ̃ = μ₀/4. All quantities are stored as base-2 logarithms because they
//! underflow `f64` quickly as m grows.

/// One reported quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pow2 {
    pub log2: f64,
}

impl Pow2 {
    pub fn value(&self) -> f64 {
        self.log2.exp2()
    }

    /// The exponent when it is an integer.
    pub fn exact_exponent(&self) -> Option<i64> {
        (self.log2.fract() == 0.0).then_some(self.log2 as i64)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrecisionReport {
    pub m: usize,
    pub mu0: f64,
    /// Upper limit on α₀ + e_α/2.
    pub z: Pow2,
    /// Termination needs e_α strictly below this.
    pub e_alpha_limit: Pow2,
    /// The evaluation error allowed when α₀ = Z/2.
    pub e_alpha: Pow2,
    pub alpha0: Pow2,
    pub gamma0: Pow2,
    pub delta0: Pow2,
    /// The insphere evaluation must err by less than this.
    pub e_s: Pow2,
}

pub fn precision_report(m: usize, mu0: f64) -> PrecisionReport {
    assert!(m >= 1 && mu0 > 0.0 && mu0 <= 1.0);
    let mf = m as f64;
    // α₀ = a Γ₀ ties the hoop width to the flake parameter
    let log_a = 1.0 + 3.0 * (16.0 / mu0).log2();
    // K without the ball-volume ratio, which is below one for m ≤ 5
    let log_k = mf * mf * (8.0 / mu0).log2() + (mf + 4.0) * (16.0 / mu0).log2();
    let log_rho = (mu0 / 4.0).log2();
    let z = log_a + log_rho - log_k;
    let alpha0 = z - 1.0;
    let e_alpha = z - 1.0;
    // α_L = α₀ − e_α/2 = Z/4 and Γ₀ = α_L / a
    let gamma0 = z - 2.0 - log_a;
    let delta0 = (mf + 1.0) * gamma0;
    let e_s = -(mf + 3.0) + (mf * mf / 2.0 + 1.5 * mf + 1.0) * gamma0;
    PrecisionReport {
        m,
        mu0,
        z: Pow2 { log2: z },
        e_alpha_limit: Pow2 { log2: z + 1.0 },
        e_alpha: Pow2 { log2: e_alpha },
        alpha0: Pow2 { log2: alpha0 },
        gamma0: Pow2 { log2: gamma0 },
        delta0: Pow2 { log2: delta0 },
        e_s: Pow2 { log2: e_s },
    }
}
