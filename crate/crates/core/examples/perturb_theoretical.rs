//! Theoretical-mode perturbation of a planar jittered grid: every constant
//! is derived from the measured μ₀ with ρ̃ = μ₀/4.
//!
//! cargo run --release --example perturb_theoretical

use delta_forge::delaunay::{certify, CertParams};
use delta_forge::net::{generate_test_net, validate_net, TestNetKind};
use delta_forge::perturb::{derive_params, perturb_all, Mode, Overrides};
use delta_forge::verify::{find_all_forbidden, ForbidParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100, 1)?;
    let params = derive_params(
        2,
        net.mu0(),
        net.eps(),
        net.mu0() / 4.0,
        Mode::Theoretical,
        &Overrides::default(),
    )?;
    println!(
        "mu0 = {:.4}  K = {:.4e}  Gamma0 = {:.4e}",
        net.mu0(),
        params.k,
        params.gamma0
    );
    println!(
        "delta0 = {:.4e}  alpha0 = {:.4e}  gamma = {}  T = {}",
        params.delta0, params.alpha0, params.gamma, params.t
    );

    let (out, trace) = perturb_all(&net, &params, 42)?;
    println!(
        "mean trials {:.3} (expected at most {})",
        trace.mean_retries(),
        params.t
    );

    let check = validate_net(&out, 10_000, 3)?;
    println!(
        "output separation {:.4} >= mu0' eps' = {:.4}: {}",
        check.min_separation,
        params.mu0_prime * params.eps_prime,
        check.separation_ok
    );

    let cert = certify(&out, &CertParams::from(&params))?;
    println!(
        "certification {:?}: {} restricted triangles, min thickness {:.4}, min protection {:.3e} (delta = {:.3e})",
        cert.status,
        cert.restricted.len(),
        cert.min_thickness,
        cert.min_protection,
        params.delta
    );
    let witnesses = find_all_forbidden(&out, &ForbidParams::from(&params));
    println!("forbidden configurations: {}", witnesses.len());
    Ok(())
}
