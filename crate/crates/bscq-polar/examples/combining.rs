//! Paired-measurement channel combining: branch parameters and the node
//! unitaries, checked against the joint Helstrom error.
//!
//! Run with `cargo run --release --example combining`.

use bscq_polar::{bit_combine, bit_unitary, check_combine, check_unitary, ChannelParams};
use num_complex::Complex64;

fn ch(d: f64, g: f64) -> ChannelParams {
    ChannelParams::new(d, Complex64::new(g, 0.0)).unwrap()
}

fn show(label: &str, upd: &bscq_polar::BranchUpdate) {
    println!("{label}");
    for (j, b) in upd.branches.iter().enumerate() {
        println!(
            "  branch {j}: p = {:.6}  (δ, γ) = ({:.6}, {:.6})  flip={} sign={}",
            b.p,
            b.params.delta(),
            b.params.gamma(),
            b.flip,
            b.sign
        );
    }
    println!("  expected error = {:.8}", upd.expected_error());
}

fn main() {
    let w = ch(0.1, 0.2);
    let w2 = ch(0.2, 0.1);

    show("W ⊞ W' (check node):", &check_combine(&w, &w2));
    show("W ⊛ W' (bit node):", &bit_combine(&w, &w2));

    // classical closure: γ = 0 reproduces the BSC formulas
    let c = check_combine(&ch(0.1, 0.0), &ch(0.2, 0.0));
    println!(
        "\nBSC ⊞ BSC error = {:.4} (classical δ+δ'−2δδ' = {:.4})",
        c.expected_error(),
        0.1 + 0.2 - 2.0 * 0.1 * 0.2
    );

    // the check unitary is constant; the bit unitary tracks its parameters
    println!("\ncheck unitary C:");
    let cm = check_unitary().matrix;
    for r in 0..4 {
        println!(
            "  [{:7.4} {:7.4} {:7.4} {:7.4}]",
            cm[(r, 0)].re,
            cm[(r, 1)].re,
            cm[(r, 2)].re,
            cm[(r, 3)].re
        );
    }
    println!("bit unitary V(δ,γ,δ',γ'):");
    let vm = bit_unitary(&w, &w2).matrix;
    for r in 0..4 {
        println!(
            "  [{:7.4} {:7.4} {:7.4} {:7.4}]",
            vm[(r, 0)].re,
            vm[(r, 1)].re,
            vm[(r, 2)].re,
            vm[(r, 3)].re
        );
    }
}
