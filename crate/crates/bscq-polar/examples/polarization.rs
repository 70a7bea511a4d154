//! Polarization under paired-measurement decoding: sorted per-index error
//! curves sharpen as the depth grows.
//!
//! Run with `cargo run --release --example polarization`.

use bscq_polar::{polar_de, ChannelParams};
use num_complex::Complex64;

fn main() {
    let w = ChannelParams::new(0.08, Complex64::new(0.05, 0.0)).unwrap();
    let m = 3000;
    println!("(δ, γ) = (0.08, 0.05), M = {m}");
    println!("  n      N    frac ε<0.01   frac ε<1e-4   median ε");
    for n in 7..=11usize {
        let de = polar_de(w, n, m, 1);
        let mut eps = de.epsilons;
        eps.sort_by(f64::total_cmp);
        let len = eps.len() as f64;
        let frac = |cut: f64| eps.iter().filter(|&&e| e < cut).count() as f64 / len;
        println!(
            "{n:>3} {:>6} {:>12.4} {:>13.4} {:>10.2e}",
            eps.len(),
            frac(0.01),
            frac(1e-4),
            eps[eps.len() / 2]
        );
    }
}
