//! Experiment drivers behind the command-line interface.
//!
//! Every function here produces plot-ready data: CSV for sweeps and curves,
//! JSON for code designs. Output embeds the seed, the sample/trial counts
//! and a version tag, and reruns with the same seed are byte-identical.
//! Confidence intervals on Monte-Carlo estimates are 95% Wilson scores.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::ChannelParams;
use crate::de::{
    mf_design, polar_de, polar_de_exact, select_design, stream_rng, DesignResult, SelectMode,
};
use crate::decoder::{decode, polar_encode, BitwiseHelstromDecoder, CodeSpec, DecodeMode};
use crate::psc::{psc_channel_output, psc_de_exact, psc_decode};
use crate::sim::QuantumState;
use crate::stats::wilson;
use crate::Error;

/// Version tag embedded in every artifact.
pub const VERSION_TAG: &str = concat!("bscq-polar/", env!("CARGO_PKG_VERSION"));

/// Union-bound flavor used for rate selection.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    /// Classical union bound, `Σ ε_i`.
    Ub,
    /// Non-commutative union bound, `4 Σ ε_i`.
    Ncub,
}

impl Bound {
    pub fn factor(self) -> f64 {
        match self {
            Bound::Ub => 1.0,
            Bound::Ncub => 4.0,
        }
    }
}

/// How frozen values are drawn in block-error trials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrozenMode {
    /// Fresh uniform values every trial.
    Random,
    /// All frozen bits set to one.
    Ones,
    /// All frozen bits set to zero.
    Zeros,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecoderKind {
    Pmbpqm,
    Helstrom,
}

fn channel(delta: f64, gamma: f64) -> Result<ChannelParams, Error> {
    ChannelParams::new(delta, num_complex::Complex64::new(gamma, 0.0))
}

fn preamble(out: &mut impl Write, seed_txt: &str) -> Result<(), Error> {
    writeln!(out, "# {VERSION_TAG} {seed_txt}")?;
    Ok(())
}

/// Capacity of `(delta, γ)` over a γ grid. Rows: `delta,gamma,capacity`.
pub fn cmd_capacity(delta: f64, gammas: &[f64], out: &mut impl Write) -> Result<(), Error> {
    preamble(out, "deterministic")?;
    writeln!(out, "delta,gamma,capacity")?;
    for &g in gammas {
        let w = channel(delta, g)?;
        writeln!(out, "{delta},{g},{}", w.capacity())?;
    }
    Ok(())
}

/// Design a code by Monte-Carlo density evolution and write the
/// `DesignResult` as JSON. `select` picks the information set.
pub fn cmd_design(
    delta: f64,
    gamma: f64,
    n: usize,
    m_samples: usize,
    seed: u64,
    select: SelectMode,
    out: &mut impl Write,
) -> Result<DesignResult, Error> {
    let w = channel(delta, gamma)?;
    let base = polar_de(w, n, m_samples, seed);
    let design = select_design(&base, select)?;
    let mut value = serde_json::to_value(&design).expect("serializable");
    value["version"] = serde_json::Value::String(VERSION_TAG.into());
    writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap())?;
    Ok(design)
}

/// One row of the rate-vs-γ sweep.
#[derive(Clone, Debug)]
pub struct RateRow {
    pub gamma: f64,
    pub rate_ub: f64,
    pub rate_ncub: f64,
    pub rate_mf_ub: f64,
}

/// Achievable rate under a block-error target for the PM-BPQM design (UB
/// and NCUB selection) against the measure-first baseline.
/// Rows: `gamma,rate_ub,rate_ncub,rate_mf_ub`.
pub fn cmd_rate_sweep(
    delta: f64,
    gammas: &[f64],
    n: usize,
    m_samples: usize,
    seed: u64,
    target: f64,
    out: &mut impl Write,
) -> Result<Vec<RateRow>, Error> {
    preamble(out, &format!("seed={seed} M={m_samples} target={target}"))?;
    writeln!(out, "gamma,rate_ub,rate_ncub,rate_mf_ub")?;
    let block_len = (1usize << n) as f64;
    let mut rows = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let w = channel(delta, g)?;
        let de = polar_de(w, n, m_samples, seed);
        let k_ub = select_design(
            &de,
            SelectMode::TargetUnionBound {
                target,
                factor: Bound::Ub.factor(),
            },
        )?
        .info_set
        .len();
        let k_ncub = select_design(
            &de,
            SelectMode::TargetUnionBound {
                target,
                factor: Bound::Ncub.factor(),
            },
        )?
        .info_set
        .len();
        let mf = mf_design(delta, n, m_samples, seed);
        let k_mf = select_design(
            &mf,
            SelectMode::TargetUnionBound {
                target,
                factor: Bound::Ub.factor(),
            },
        )?
        .info_set
        .len();
        let row = RateRow {
            gamma: g,
            rate_ub: k_ub as f64 / block_len,
            rate_ncub: k_ncub as f64 / block_len,
            rate_mf_ub: k_mf as f64 / block_len,
        };
        writeln!(
            out,
            "{},{},{},{}",
            row.gamma, row.rate_ub, row.rate_ncub, row.rate_mf_ub
        )?;
        rows.push(row);
    }
    Ok(rows)
}

/// Sorted per-index error curves over a range of depths.
/// Rows: `n,index_fraction,epsilon` with indices sorted by ε.
pub fn cmd_polarization(
    delta: f64,
    gamma: f64,
    n_list: &[usize],
    m_samples: usize,
    seed: u64,
    out: &mut impl Write,
) -> Result<Vec<(usize, f64)>, Error> {
    preamble(out, &format!("seed={seed} M={m_samples}"))?;
    writeln!(out, "n,index_fraction,epsilon")?;
    let w = channel(delta, gamma)?;
    let mut good_fractions = Vec::new();
    for &n in n_list {
        let de = polar_de(w, n, m_samples, seed);
        let mut eps = de.epsilons;
        eps.sort_by(f64::total_cmp);
        let len = eps.len() as f64;
        let good = eps.iter().filter(|&&e| e < 0.01).count() as f64 / len;
        good_fractions.push((n, good));
        for (rank, e) in eps.iter().enumerate() {
            writeln!(out, "{n},{},{e}", (rank + 1) as f64 / len)?;
        }
    }
    Ok(good_fractions)
}

/// One row of the DE-versus-decoder comparison.
#[derive(Clone, Debug)]
pub struct DeSimRow {
    pub bit_index: usize,
    pub de_error: f64,
    pub sim_error: f64,
}

/// Exact-enumeration density evolution against the genie-mode decoder on a
/// qubit BSCQ channel. Rows: `bit_index,de_error,sim_error`.
pub fn cmd_de_vs_sim_bscq(
    delta: f64,
    gamma: f64,
    n: usize,
    out: &mut impl Write,
) -> Result<Vec<DeSimRow>, Error> {
    if n > 3 {
        return Err(Error::ResourceGuard(
            "exact DE-vs-decoder comparison is limited to n <= 3".into(),
        ));
    }
    let w = channel(delta, gamma)?;
    let de = polar_de_exact(w, n, 1 << 20)?;
    let sim = genie_bit_errors(&w, n)?;
    preamble(out, "exact")?;
    writeln!(out, "bit_index,de_error,sim_error")?;
    let mut rows = Vec::with_capacity(de.len());
    for (i, (d, s)) in de.iter().zip(&sim).enumerate() {
        writeln!(out, "{},{d},{s}", i + 1)?;
        rows.push(DeSimRow {
            bit_index: i + 1,
            de_error: *d,
            sim_error: *s,
        });
    }
    Ok(rows)
}

/// θ-domain variant over a list of pure-state-channel angles at depth `n`.
/// Rows: `theta,bit_index,de_error,sim_error`.
pub fn cmd_de_vs_sim_psc(
    thetas: &[f64],
    n: usize,
    out: &mut impl Write,
) -> Result<Vec<(f64, Vec<DeSimRow>)>, Error> {
    preamble(out, "exact")?;
    writeln!(out, "theta,bit_index,de_error,sim_error")?;
    let mut all = Vec::new();
    for &theta in thetas {
        let de = psc_de_exact(theta, n, 1 << 20)?;
        let len = 1usize << n;
        let mut state = psc_channel_output(theta, &vec![0; len])?;
        let spec = CodeSpec::new(n, vec![crate::decoder::BitRule::Info; len])?;
        let trace = psc_decode::<rand::rngs::ThreadRng>(
            &mut state,
            &spec,
            theta,
            DecodeMode::Genie(&vec![0; len]),
        )?;
        let mut rows = Vec::with_capacity(len);
        for (i, (d, p)) in de.iter().zip(&trace.bit_error_probs).enumerate() {
            let s = p.unwrap();
            writeln!(out, "{theta},{},{d},{s}", i + 1)?;
            rows.push(DeSimRow {
                bit_index: i + 1,
                de_error: *d,
                sim_error: s,
            });
        }
        all.push((theta, rows));
    }
    Ok(all)
}

/// Designed per-bit genie errors of the all-information length-`2^n` code.
pub fn genie_bit_errors(w: &ChannelParams, n: usize) -> Result<Vec<f64>, Error> {
    let len = 1usize << n;
    let mut state = QuantumState::exact_channel_output(w, &vec![0; len])?;
    let spec = CodeSpec::new(n, vec![crate::decoder::BitRule::Info; len])?;
    let trace = crate::decoder::decode_genie(&mut state, &spec, w, &vec![0; len])?;
    Ok(trace.bit_error_probs.iter().map(|p| p.unwrap()).collect())
}

/// Result of one block-error measurement.
#[derive(Clone, Debug)]
pub struct BlockErrorRow {
    pub gamma: f64,
    pub block_error: f64,
    pub trials: u64,
    pub errors: u64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub seed: u64,
}

fn draw_word<R: Rng>(len: usize, info_mask: &[bool], frozen: FrozenMode, rng: &mut R) -> Vec<u8> {
    (0..len)
        .map(|k| {
            if info_mask[k] {
                rng.gen_range(0..2u8)
            } else {
                match frozen {
                    FrozenMode::Random => rng.gen_range(0..2u8),
                    FrozenMode::Ones => 1,
                    FrozenMode::Zeros => 0,
                }
            }
        })
        .collect()
}

/// Monte-Carlo block error of the deferred-measurement decoder for the code
/// with the given information set (1-based).
pub fn block_error_pmbpqm(
    w: &ChannelParams,
    n: usize,
    info_set: &[usize],
    trials: u64,
    seed: u64,
    frozen: FrozenMode,
) -> Result<BlockErrorRow, Error> {
    let len = 1usize << n;
    let mut info_mask = vec![false; len];
    for &i in info_set {
        if i == 0 || i > len {
            return Err(Error::KTooLarge { k: i, n: len });
        }
        info_mask[i - 1] = true;
    }
    let errors = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t, 0xb10c);
            let u = draw_word(len, &info_mask, frozen, &mut rng);
            let spec = CodeSpec::for_trial(n, info_set, &u).expect("valid");
            let x = polar_encode(&u, n).expect("valid");
            let mut state = QuantumState::sample_channel_output(w, &x, &mut rng).expect("guarded");
            let trace =
                decode(&mut state, &spec, w, DecodeMode::Sampled(&mut rng)).expect("decodes");
            (trace.u_hat != u) as u64
        })
        .sum::<u64>();
    Ok(summarize(w.gamma(), errors, trials, seed))
}

/// Monte-Carlo block error of the successive bitwise Helstrom baseline.
pub fn block_error_helstrom(
    w: &ChannelParams,
    n: usize,
    info_set: &[usize],
    trials: u64,
    seed: u64,
    frozen: FrozenMode,
) -> Result<BlockErrorRow, Error> {
    let len = 1usize << n;
    let mut info_mask = vec![false; len];
    for &i in info_set {
        if i == 0 || i > len {
            return Err(Error::KTooLarge { k: i, n: len });
        }
        info_mask[i - 1] = true;
    }
    let dec = BitwiseHelstromDecoder::new(*w, n, info_set)?;
    let errors = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t, 0x4e15);
            let u = draw_word(len, &info_mask, frozen, &mut rng);
            let x = polar_encode(&u, n).expect("valid");
            let state = QuantumState::exact_channel_output(w, &x).expect("guarded");
            let trace = dec.decode(&state, &u, &mut rng).expect("decodes");
            (trace.u_hat != u) as u64
        })
        .sum::<u64>();
    Ok(summarize(w.gamma(), errors, trials, seed))
}

fn summarize(gamma: f64, errors: u64, trials: u64, seed: u64) -> BlockErrorRow {
    let ci = wilson(errors, trials, 1.96);
    BlockErrorRow {
        gamma,
        block_error: errors as f64 / trials as f64,
        trials,
        errors,
        wilson_lo: ci.lo,
        wilson_hi: ci.hi,
        seed,
    }
}

/// Block-error sweep over γ for a fixed `(delta, K)` code. The information
/// set is designed per γ from exact enumeration when `n ≤ 3`, falling back
/// to Monte-Carlo DE. Rows:
/// `gamma,block_error,trials,seed,wilson_lo,wilson_hi,errors,ub,ncub`.
#[allow(clippy::too_many_arguments)]
pub fn cmd_block_error(
    delta: f64,
    gammas: &[f64],
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
    decoder: DecoderKind,
    frozen: FrozenMode,
    m_samples: usize,
    out: &mut impl Write,
) -> Result<Vec<BlockErrorRow>, Error> {
    preamble(out, &format!("seed={seed} trials={trials}"))?;
    writeln!(
        out,
        "gamma,block_error,trials,seed,wilson_lo,wilson_hi,errors,ub,ncub"
    )?;
    let mut rows = Vec::with_capacity(gammas.len());
    for &g in gammas {
        let w = channel(delta, g)?;
        let de = match polar_de_exact(w, n, 1 << 18) {
            Ok(epsilons) => DesignResult {
                n,
                block_len: 1 << n,
                delta: w.delta(),
                gamma: w.gamma(),
                m_samples: 0, // exact enumeration
                seed,
                epsilons,
                info_set: Vec::new(),
                frozen_mask: vec![true; 1 << n],
                bound: 0.0,
                bound_kind: "ub".into(),
                target: None,
            },
            Err(_) => polar_de(w, n, m_samples, seed),
        };
        let design = select_design(&de, SelectMode::FixedK(k))?;
        let row = match decoder {
            DecoderKind::Pmbpqm => {
                block_error_pmbpqm(&w, n, &design.info_set, trials, seed, frozen)?
            }
            DecoderKind::Helstrom => {
                block_error_helstrom(&w, n, &design.info_set, trials, seed, frozen)?
            }
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            row.gamma,
            row.block_error,
            row.trials,
            row.seed,
            row.wilson_lo,
            row.wilson_hi,
            row.errors,
            design.bound,
            4.0 * design.bound
        )?;
        rows.push(row);
    }
    Ok(rows)
}

/// Evenly spaced γ grid from 0 to slightly inside the purity bound.
pub fn admissible_gamma_grid(delta: f64, points: usize) -> Vec<f64> {
    let gmax = (delta * (1.0 - delta)).sqrt() * 0.995;
    (0..points)
        .map(|k| gmax * k as f64 / (points - 1).max(1) as f64)
        .collect()
}

/// The published table angles for the length-4 pure-state experiment.
pub fn psc_table_thetas() -> Vec<f64> {
    (0..9)
        .map(|k| std::f64::consts::FRAC_PI_2 - 0.1 * k as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn capacity_csv_schema_and_determinism() {
        let mut a = Vec::new();
        cmd_capacity(0.1, &[0.0, 0.1, 0.2], &mut a).unwrap();
        let mut b = Vec::new();
        cmd_capacity(0.1, &[0.0, 0.1, 0.2], &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        let mut lines = text.lines();
        assert!(lines.next().unwrap().starts_with("# bscq-polar/"));
        assert_eq!(lines.next().unwrap(), "delta,gamma,capacity");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[0], "0.1");
        assert_abs_diff_eq!(
            row[2].parse::<f64>().unwrap(),
            crate::channel::ChannelParams::new(0.1, num_complex::Complex64::new(0.0, 0.0))
                .unwrap()
                .capacity(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn design_json_schema() {
        let mut buf = Vec::new();
        let d = cmd_design(0.1, 0.0, 2, 300, 5, SelectMode::FixedK(2), &mut buf).unwrap();
        assert_eq!(d.info_set.len(), 2);
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        for key in [
            "n", "N", "delta", "gamma", "M", "seed", "epsilons", "info_set", "version",
        ] {
            assert!(v.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(v["N"].as_u64().unwrap(), 4);
        assert_eq!(v["epsilons"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn de_vs_sim_bscq_rows_agree() {
        let mut buf = Vec::new();
        let rows = cmd_de_vs_sim_bscq(0.1, 0.2, 2, &mut buf).unwrap();
        assert_eq!(rows.len(), 4);
        for r in rows {
            assert_abs_diff_eq!(r.de_error, r.sim_error, epsilon = 1e-9);
        }
    }

    #[test]
    fn block_error_codeword_symmetry() {
        // channel symmetry makes the rate invariant to the transmitted word
        let w = channel(0.1, 0.2).unwrap();
        let trials = 2500;
        let zeros = {
            let len = 4usize;
            let errors: u64 = (0..trials)
                .map(|t| {
                    let mut rng = crate::de::stream_rng(3, t, 0xeeee);
                    let u = vec![0u8; len];
                    let spec = CodeSpec::for_trial(2, &[3, 4], &u).unwrap();
                    let x = polar_encode(&u, 2).unwrap();
                    let mut state = QuantumState::sample_channel_output(&w, &x, &mut rng).unwrap();
                    let trace =
                        decode(&mut state, &spec, &w, DecodeMode::Sampled(&mut rng)).unwrap();
                    (trace.u_hat != u) as u64
                })
                .sum();
            errors as f64 / trials as f64
        };
        let random = block_error_pmbpqm(&w, 2, &[3, 4], trials, 3, FrozenMode::Random)
            .unwrap()
            .block_error;
        let sigma = (random.max(1e-3) * (1.0 - random) / trials as f64).sqrt();
        assert!(
            (zeros - random).abs() < 4.0 * sigma + 1e-9,
            "all-zeros {zeros} vs random words {random}"
        );
    }

    #[test]
    fn block_error_deterministic_and_parallel_invariant() {
        let w = channel(0.05, 0.15).unwrap();
        let a = block_error_pmbpqm(&w, 2, &[3, 4], 300, 11, FrozenMode::Random).unwrap();
        let b = block_error_pmbpqm(&w, 2, &[3, 4], 300, 11, FrozenMode::Random).unwrap();
        assert_eq!(a.errors, b.errors);

        // thread-count independence
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool
            .install(|| block_error_pmbpqm(&w, 2, &[3, 4], 300, 11, FrozenMode::Random).unwrap());
        assert_eq!(a.errors, c.errors);
    }
}
