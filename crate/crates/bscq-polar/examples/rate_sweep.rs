//! Achievable rate versus coherence under a union-bound block-error target:
//! the paired-measurement design against the measure-first baseline.
//!
//! Run with `cargo run --release --example rate_sweep` (a couple of minutes;
//! pass a smaller depth as an argument for a quick look, e.g. `-- 8`).

use bscq_polar::cli::{admissible_gamma_grid, cmd_rate_sweep};

fn main() {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(10);
    let delta = 0.07;
    let gammas = admissible_gamma_grid(delta, 10);
    let mut csv = Vec::new();
    let rows = cmd_rate_sweep(delta, &gammas, n, 10_000, 1, 0.1, &mut csv).unwrap();
    println!("δ = {delta}, N = {}, union-bound target 0.1", 1usize << n);
    println!("gamma    rate(UB)  rate(NCUB)  rate(MF)");
    for r in rows {
        println!(
            "{:6.4}  {:8.4}  {:9.4}  {:8.4}",
            r.gamma, r.rate_ub, r.rate_ncub, r.rate_mf_ub
        );
    }
}
