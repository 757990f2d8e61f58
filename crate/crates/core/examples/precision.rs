//! Floating-point budget for running the algorithm with ρ̃ = μ₀/4.
//!
//! cargo run --example precision

use delta_forge::perturb::precision_report;

fn main() {
    for m in 2..=4 {
        let r = precision_report(m, 1.0);
        println!(
            "m = {m}: Z = 2^{}, e_alpha < 2^{}, Gamma0 = 2^{}, delta0 = 2^{}, e_S = 2^{:.1}",
            r.z.log2, r.e_alpha_limit.log2, r.gamma0.log2, r.delta0.log2, r.e_s.log2
        );
    }
    let r = precision_report(2, 0.5);
    println!(
        "m = 2, mu0 = 1/2: Gamma0 = 2^{:.1}, delta0 = 2^{:.1}",
        r.gamma0.log2, r.delta0.log2
    );
}
