//! Canonical channel parameters, Helstrom discrimination and capacity.
//!
//! Run with `cargo run --release --example channel_basics`.

use bscq_polar::{helstrom, psc_to_bscq, ChannelParams};
use num_complex::Complex64;

fn main() {
    // a qubit BSCQ channel in canonical form
    let w = ChannelParams::new(0.08, Complex64::new(0.05, 0.0)).unwrap();
    println!("channel (δ, γ) = ({}, {})", w.delta(), w.gamma());
    println!("capacity       = {:.6} bits", w.capacity());

    // the Helstrom measurement between the two outputs errs with rate δ
    let h = helstrom(&w.density(0), &w.density(1), 0.5).unwrap();
    println!("helstrom error = {:.6}", 1.0 - h.success_prob);

    // canonicalization relabels the output basis when δ > 1/2
    let relabeled = ChannelParams::new(0.74, Complex64::new(0.0, 0.0)).unwrap();
    println!(
        "raw 0.74 canonicalizes to δ = {} (flip = {})",
        relabeled.delta(),
        relabeled.flip()
    );

    // pure-state channels embed at the purity boundary γ² = δ(1−δ)
    println!("\n    θ        δ        γ     capacity");
    for k in 0..=6 {
        let theta = std::f64::consts::FRAC_PI_2 * k as f64 / 6.0;
        let p = psc_to_bscq(theta).unwrap();
        println!(
            "{theta:8.4} {:8.4} {:8.4} {:9.4}",
            p.delta(),
            p.gamma(),
            p.capacity()
        );
    }
}
