//! Density-evolution design of a length-8 polar code on the (0.05, 0.15)
//! channel: the classic rate-1/2 information set {4, 6, 7, 8}.
//!
//! Run with `cargo run --release --example design_length8`.

use bscq_polar::{polar_de, polar_de_exact, select_design, ChannelParams, SelectMode};
use num_complex::Complex64;

fn main() {
    let w = ChannelParams::new(0.05, Complex64::new(0.15, 0.0)).unwrap();

    let mc = polar_de(w, 3, 10_000, 1);
    let exact = polar_de_exact(w, 3, 1 << 18).unwrap();
    println!("index   ε (MC, M=10⁴)   ε (exact)");
    for (i, (m, e)) in mc.epsilons.iter().zip(&exact).enumerate() {
        println!("{:>5} {:>15.6} {:>11.6}", i + 1, m, e);
    }

    let design = select_design(&mc, SelectMode::FixedK(4)).unwrap();
    println!("\nrate-1/2 information set: {:?}", design.info_set);
    println!("union bound Σε = {:.4}", design.bound);

    let ub_target = select_design(
        &mc,
        SelectMode::TargetUnionBound {
            target: 0.1,
            factor: 1.0,
        },
    )
    .unwrap();
    println!(
        "largest K with Σε ≤ 0.1: K = {} (rate {:.3})",
        ub_target.info_set.len(),
        ub_target.info_set.len() as f64 / 8.0
    );

    println!(
        "\nJSON artifact:\n{}",
        serde_json::to_string_pretty(&design).unwrap()
    );
}
