//! A walkthrough of one deferred-measurement decode at length 4: node
//! operations, conditional parameter lists, and the final decisions.
//!
//! Run with `cargo run --release --example deferred_measurement`.

use bscq_polar::decoder::{bnop, bnop_inv, cnop, cnop_inv, polar_encode};
use bscq_polar::sim::ConditionalParams;
use bscq_polar::{ChannelParams, QuantumState};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let w = ChannelParams::new(0.1, Complex64::new(0.2, 0.0)).unwrap();
    let u = [0u8, 1, 1, 0];
    let x = polar_encode(&u, 2).unwrap();
    println!("input u = {u:?}  codeword x = {x:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut state = QuantumState::sample_channel_output(&w, &x, &mut rng).unwrap();
    let cps: Vec<ConditionalParams> = (0..4).map(|q| ConditionalParams::fresh(q, &w)).collect();

    // level 1: check-node operations on the qubit pairs
    let c0 = cnop(&mut state, 0, 1, &cps[0], &cps[1]).unwrap();
    let c2 = cnop(&mut state, 2, 3, &cps[2], &cps[3]).unwrap();
    println!("\nafter CNOP(1,2) and CNOP(3,4):");
    println!("  qubit 1 reliability list = {:?}", c0.reliability);
    for (m, e) in c0.entries.iter().enumerate() {
        println!(
            "  config {m}: (δ, γ) = ({:.6}, {:.6}) flip={} sign={}",
            e.delta, e.gamma, e.flip, e.sign
        );
    }

    // level 2: the two pair leaders combine; reliability stays coherent
    let top = cnop(&mut state, 0, 2, &c0, &c2).unwrap();
    println!(
        "\nafter CNOP(1,3): qubit 1 conditions on {:?} ({} configurations)",
        top.reliability,
        top.config_count()
    );

    // the decision qubit for u1 is qubit 1; its designed error is the
    // probability-weighted Helstrom error of its conditional channels
    let p_wrong = state.prob_of(0, u[0]).unwrap();
    println!("designed error for u1 = {:.6}", 1.0 - p_wrong);

    // undo everything; the register returns to the channel output exactly
    cnop_inv(&mut state, 0, 2, &c0, &c2).unwrap();
    cnop_inv(&mut state, 0, 1, &cps[0], &cps[1]).unwrap();
    cnop_inv(&mut state, 2, 3, &cps[2], &cps[3]).unwrap();
    let mut reference =
        QuantumState::sample_channel_output(&w, &x, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    println!(
        "\nround-trip distance to the original register: {:.2e}",
        state.distance(&reference)
    );

    // bit-node operations work the same way and are likewise invertible
    let b0 = bnop(&mut state, 0, 1, &cps[0], &cps[1]).unwrap();
    println!(
        "\nBNOP(1,2) branch parameters: (δ,γ) = ({:.6},{:.6}) and ({:.6},{:.6})",
        b0.entries[0].delta, b0.entries[0].gamma, b0.entries[1].delta, b0.entries[1].gamma
    );
    bnop_inv(&mut state, 0, 1, &cps[0], &cps[1]).unwrap();
    reference =
        QuantumState::sample_channel_output(&w, &x, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    println!(
        "round-trip distance after BNOP/BNOP⁻¹: {:.2e}",
        state.distance(&reference)
    );
}
