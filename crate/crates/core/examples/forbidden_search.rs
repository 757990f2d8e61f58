//! Forbidden configurations: a cocircular square, generated adversarial
//! instances, and the hoop and symmetry properties they satisfy.
//!
//! cargo run --example forbidden_search

use delta_forge::geom::{Point, Simplex};
use delta_forge::net::Net;
use delta_forge::perturb::hoop_alpha0;
use delta_forge::testgen::{random_forbidden, ConfigParams};
use delta_forge::verify::{find_all_forbidden, hoop_check_coords, symmetry_check_coords, Certifier, ForbidParams};
use rand::SeedableRng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let square = Net::new(
        vec![
            Point::from([0.0, 0.0]),
            Point::from([1.0, 0.0]),
            Point::from([0.0, 1.0]),
            Point::from([1.0, 1.0]),
        ],
        1.0,
        1.0,
        false,
    )?;
    for gamma0 in [0.9, 0.45] {
        let found = find_all_forbidden(&square, &ForbidParams::for_net(&square, gamma0, 0.01));
        println!("square, Gamma0 = {gamma0}: {} witnesses", found.len());
        if let Some(w) = found.first() {
            println!(
                "  first: {} certified by vertex {} (facet dim {}), ball radius {:.4}, slack {:.2e}",
                w.tau, w.certifying_vertex, w.k, w.ball_radius, w.slack
            );
        }
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let (mut hoop, mut sym, total) = (0, 0, 200);
    for i in 0..total {
        let k = 2 + i % 2;
        let p = ConfigParams::sample(3, &mut rng);
        let cfg = random_forbidden(p, k, 100_000, &mut rng).ok_or("generator gave up")?;
        if hoop_check_coords(&cfg.coords, hoop_alpha0(p.mu0, p.gamma0)) {
            hoop += 1;
        }
        let tau = Simplex::new((0..cfg.coords.len()).collect())?;
        let cert = Certifier {
            vertex: cfg.certifying(),
            center: Point::new(cfg.center.clone()),
            radius: cfg.radius,
        };
        if symmetry_check_coords(&tau, &cfg.coords, &cert, &p.forbid())? {
            sym += 1;
        }
    }
    println!("generated configurations in R^3: hoop {hoop}/{total}, symmetry {sym}/{total}");
    Ok(())
}
