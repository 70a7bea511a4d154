//! The successive bitwise Helstrom baseline against the deferred-measurement
//! decoder on the same code.
//!
//! Run with `cargo run --release --example bitwise_helstrom`.

use bscq_polar::cli::{block_error_helstrom, block_error_pmbpqm, FrozenMode};
use bscq_polar::ChannelParams;
use num_complex::Complex64;

fn main() {
    let trials = 1500;
    println!("N = 8, rate 1/4, δ = 0.1, {trials} trials per point");
    println!("gamma   pm-bpqm     bitwise helstrom");
    for &g in &[0.0, 0.1, 0.2, 0.297] {
        let w = ChannelParams::new(0.1, Complex64::new(g, 0.0)).unwrap();
        let pm = block_error_pmbpqm(&w, 3, &[7, 8], trials, 5, FrozenMode::Random).unwrap();
        let hel = block_error_helstrom(&w, 3, &[7, 8], trials, 5, FrozenMode::Random).unwrap();
        println!("{g:5.3}   {:9.5}   {:9.5}", pm.block_error, hel.block_error);
    }
}
