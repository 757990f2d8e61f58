//! Practical-mode perturbation of a jittered 5×5×5 lattice in ℝ³ with
//! Γ₀ = 10⁻² and δ₀ = 10⁻⁶, followed by certification and an exhaustive
//! forbidden-configuration search.
//!
//! cargo run --release --example perturb_practical_3d

use std::time::Instant;

use delta_forge::delaunay::{certify, CertParams};
use delta_forge::net::{generate_test_net, TestNetKind};
use delta_forge::perturb::{derive_params, perturb_all, Mode, Overrides};
use delta_forge::verify::{find_all_forbidden, ForbidParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.15 }, 3, 125, 2024)?;
    println!(
        "input: n = {}, eps = {:.4}, mu0 = {:.4}",
        net.len(),
        net.eps(),
        net.mu0()
    );

    let overrides = Overrides {
        gamma0: Some(1e-2),
        delta0: Some(1e-6),
        allow_loose_delta0: true,
        retry_cap: Some(100_000),
        ..Overrides::default()
    };
    let params = derive_params(3, net.mu0(), net.eps(), net.mu0() / 4.0, Mode::Practical, &overrides)?;
    println!(
        "alpha0 = {:e}, rejection band = {:e}, delta = {:e}",
        params.alpha0,
        params.rejection_band(),
        params.delta
    );

    let start = Instant::now();
    let (out, trace) = perturb_all(&net, &params, 7)?;
    println!(
        "perturbed in {:.2?}: mean trials {:.3}, max trials {}, max displacement {:.4}",
        start.elapsed(),
        trace.mean_retries(),
        trace.retries.iter().max().unwrap(),
        trace.max_displacement()
    );

    let start = Instant::now();
    let cert = certify(&out, &CertParams::from(&params))?;
    println!(
        "certify in {:.2?}: {:?}, {} restricted tetrahedra, min thickness {:e}, min protection {:e}",
        start.elapsed(),
        cert.status,
        cert.restricted.len(),
        cert.min_thickness,
        cert.min_protection
    );

    let start = Instant::now();
    let witnesses = find_all_forbidden(&out, &ForbidParams::from(&params));
    println!(
        "forbidden search in {:.2?}: {} witnesses",
        start.elapsed(),
        witnesses.len()
    );
    Ok(())
}
