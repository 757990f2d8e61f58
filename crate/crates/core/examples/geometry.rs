//! Simplex geometry: thickness, circumspheres, altitudes and flakes.
//!
//! cargo run --example geometry

use delta_forge::geom::{self, Point, Simplex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = 3f64.sqrt() / 2.0;
    let pts = vec![
        Point::from([0.0, 0.0]),
        Point::from([1.0, 0.0]),
        Point::from([0.5, h]),
        Point::from([0.5, 0.02]),
        Point::from([1.0, 1.0]),
        Point::from([0.0, 1.0]),
    ];
    let tri = Simplex::new(vec![0, 1, 2])?;
    let circ = geom::circumsphere(&tri, &pts)?;
    println!(
        "equilateral {tri}: thickness {:.4}, circumradius {:.4}",
        geom::thickness(&tri, &pts)?,
        circ.radius
    );
    println!("  0.5-good: {}", geom::is_gamma_good(&tri, 0.5, &pts)?);

    let flat = Simplex::new(vec![0, 1, 3])?;
    println!("flat {flat}: thickness {:.4}", geom::thickness(&flat, &pts)?);
    println!(
        "  flake face at Gamma0 = 0.3: {:?}",
        geom::find_flake_face(&flat, 0.3, &pts)?.map(|s| s.to_string())
    );
    println!("  altitude of vertex 3: {:.4}", geom::altitude(3, &flat, &pts)?);

    let square = Simplex::new(vec![0, 1, 4, 5])?;
    let c = geom::circumsphere(&square, &pts)?;
    println!(
        "square {square}: circumsphere exists {}, radius {:.4}",
        c.exists, c.radius
    );
    let x = Point::from([2.0, 0.5]);
    println!(
        "  distance from (2, 0.5) to the circumcircle of {tri}: {:.4}",
        geom::point_to_circumsphere_distance(&x, &tri, &pts)?
    );
    Ok(())
}
