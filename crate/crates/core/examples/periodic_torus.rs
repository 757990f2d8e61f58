//! Perturbing a net on the flat unit torus; distances use the minimum
//! image, so simplices may wrap across the boundary.
//!
//! cargo run --example periodic_torus

use delta_forge::delaunay::{certify, CertParams};
use delta_forge::geom::Point;
use delta_forge::net::{min_separation, Net};
use delta_forge::perturb::{derive_params, perturb_all, Mode, Overrides};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let side = 8;
    let h = 1.0 / side as f64;
    let points: Vec<Point> = (0..side * side)
        .map(|i| Point::from([(i % side) as f64 * h, (i / side) as f64 * h]))
        .collect();
    // the square lattice is cocircular everywhere; spacing h covers the
    // cell centres, so it is an h-net with μ₀ = 1
    let eps = h;
    let net = Net::new(points, eps, 1.0, true)?;
    let before = certify(
        &net,
        &CertParams {
            gamma0: 0.05,
            delta: 0.0,
        },
    )?;
    println!("lattice on the torus: {:?}", before.status);

    let overrides = Overrides {
        gamma0: Some(0.05),
        ..Overrides::default()
    };
    let params = derive_params(2, net.mu0(), eps, net.mu0() / 4.0, Mode::Practical, &overrides)?;
    let (out, trace) = perturb_all(&net, &params, 99)?;
    println!(
        "perturbed: mean trials {:.3}, min separation {:.4} (needs {:.4})",
        trace.mean_retries(),
        min_separation(&out).0,
        params.mu0_prime * params.eps_prime
    );
    let cert = certify(&out, &CertParams::from(&params))?;
    println!(
        "after: {:?}, {} triangles (a triangulated torus has 2V = {}), min protection {:.3e}",
        cert.status,
        cert.restricted.len(),
        2 * out.len(),
        cert.min_protection
    );
    Ok(())
}
