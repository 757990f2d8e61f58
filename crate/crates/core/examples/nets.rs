//! Generate, validate and save test nets.
//!
//! cargo run --example nets -- [output-dir]
//!
//! Writes `grid2d.net`, `poisson2d.net` and `grid3d.net` into the output
//! directory (default: the system temp dir) for use with the CLI.

use std::path::PathBuf;

use delta_forge::io::write_net;
use delta_forge::net::{generate_test_net, validate_net, TestNetKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&dir)?;
    let jobs = [
        ("grid2d.net", TestNetKind::JitteredGrid { jitter: 0.2 }, 2, 100),
        (
            "poisson2d.net",
            TestNetKind::PoissonDisk {
                radius: 1.0,
                side: None,
            },
            2,
            80,
        ),
        ("grid3d.net", TestNetKind::JitteredGrid { jitter: 0.15 }, 3, 125),
    ];
    for (name, kind, m, n) in jobs {
        let net = generate_test_net(&kind, m, n, 5)?;
        let report = validate_net(&net, 10_000, 1)?;
        let path = dir.join(name);
        write_net(&path, &net)?;
        println!(
            "{}: m = {m}, n = {}, eps = {:.4}, mu0 = {:.4}, separation ok {}, density ok {} (max gap {:.4}{})",
            path.display(),
            net.len(),
            net.eps(),
            net.mu0(),
            report.separation_ok,
            report.density_ok,
            report.max_probe_gap,
            if report.domain_empty { ", empty interior" } else { "" }
        );
    }
    Ok(())
}
