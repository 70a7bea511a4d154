//! Sampled deferred-measurement decoding: block error rates of short polar
//! codes with Wilson confidence intervals.
//!
//! Run with `cargo run --release --example block_error`.

use bscq_polar::cli::{block_error_pmbpqm, FrozenMode};
use bscq_polar::ChannelParams;
use num_complex::Complex64;

fn main() {
    let trials = 2000;
    println!("N = 8, rate 1/2, δ = 0.05, info set {{4,6,7,8}}, {trials} trials");
    println!("gamma   block error    95% Wilson");
    for &g in &[0.0, 0.05, 0.1, 0.15, 0.18, 0.2, 0.215] {
        let w = ChannelParams::new(0.05, Complex64::new(g, 0.0)).unwrap();
        let row = block_error_pmbpqm(&w, 3, &[4, 6, 7, 8], trials, 1, FrozenMode::Random).unwrap();
        println!(
            "{g:5.3}   {:11.5}   [{:.5}, {:.5}]",
            row.block_error, row.wilson_lo, row.wilson_hi
        );
    }

    println!("\nN = 8, rate 1/4, δ = 0.1, info set {{7,8}}");
    for &g in &[0.0, 0.15, 0.297] {
        let w = ChannelParams::new(0.1, Complex64::new(g, 0.0)).unwrap();
        let row = block_error_pmbpqm(&w, 3, &[7, 8], trials, 2, FrozenMode::Random).unwrap();
        println!(
            "{g:5.3}   {:11.5}   [{:.5}, {:.5}]",
            row.block_error, row.wilson_lo, row.wilson_hi
        );
    }
}
