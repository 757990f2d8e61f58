//! Delaunay complex, restriction to the interior, and protection of a
//! planar net.
//!
//! cargo run --example delaunay

use delta_forge::delaunay::{build_delaunay, protection, restricted};
use delta_forge::net::{generate_test_net, TestNetKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let net = generate_test_net(&TestNetKind::JitteredGrid { jitter: 0.25 }, 2, 49, 3)?;
    let dc = build_delaunay(&net)?;
    println!("{} Delaunay triangles (degenerate: {})", dc.len(), dc.degenerate);
    let inner = restricted(&dc, &net)?;
    println!("{} with circumradius below eps = {:.4}", inner.len(), net.eps());
    let mut worst = None;
    for s in &inner.simplices {
        let rec = protection(&s.simplex, &net)?;
        if worst.as_ref().is_none_or(|(p, _, _)| rec.protection < *p) {
            worst = Some((rec.protection, s.simplex.clone(), rec.nearest));
        }
    }
    if let Some((p, s, q)) = worst {
        println!("least protected: {s}, protection {p:.4e}, nearest outside point {q:?}");
    }
    Ok(())
}
