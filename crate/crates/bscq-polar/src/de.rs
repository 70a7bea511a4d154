//! Monte-Carlo density evolution and polar code design.
//!
//! Distributions over qubit channel parameters are approximated by bags of
//! `M` samples (population dynamics). The polar effective-channel recursion
//! `W_N^(2i-1) = W ⊞ W`, `W_N^(2i) = W ⊛ W` is evaluated depth-first, so the
//! per-index expected Helstrom errors `ε_i` come out in decoding order using
//! O(n·M) memory. An exact enumeration mode carries whole branch trees with
//! exact probabilities instead of sampling; it is the oracle the Monte-Carlo
//! path and the deferred-measurement decoder are checked against.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelParams;
use crate::combine::{bit_combine, check_combine};
use crate::Error;

/// Derive an independent, scheduling-independent RNG stream from a master
/// seed and two counters (update step, element index).
pub(crate) fn stream_rng(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix(mix(mix(seed, 0x9e37_79b9_7f4a_7c15), a), b))
}

fn mix(state: u64, v: u64) -> u64 {
    let mut z = state ^ v.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A multiset of `M` channel-parameter samples approximating a distribution
/// over channels.
#[derive(Clone, Debug)]
pub struct Bag {
    pub samples: Vec<ChannelParams>,
    /// Master RNG stream identifier for updates applied to this bag.
    pub seed_tag: u64,
}

impl Bag {
    /// Bag of `m` identical samples.
    pub fn constant(w: ChannelParams, m: usize, seed_tag: u64) -> Self {
        Self {
            samples: vec![w; m],
            seed_tag,
        }
    }

    /// Mean Helstrom error of the population.
    pub fn mean_error(&self) -> f64 {
        // summed in index order so the result is independent of threading
        self.samples.iter().map(|w| w.error_rate()).sum::<f64>() / self.samples.len() as f64
    }
}

#[derive(Clone, Copy)]
enum NodeUpdate {
    Check,
    Bit,
}

fn bag_update(b: &Bag, step: u64, kind: NodeUpdate) -> Bag {
    let m = b.samples.len();
    let mut perm: Vec<usize> = (0..m).collect();
    perm.shuffle(&mut stream_rng(b.seed_tag, step, u64::MAX));
    let samples: Vec<ChannelParams> = (0..m)
        .into_par_iter()
        .map(|j| {
            let w = &b.samples[j];
            let w2 = &b.samples[perm[j]];
            let upd = match kind {
                NodeUpdate::Check => check_combine(w, w2),
                NodeUpdate::Bit => bit_combine(w, w2),
            };
            let u: f64 = stream_rng(b.seed_tag, step, j as u64).gen();
            let pick = if u < upd.branches[0].p { 0 } else { 1 };
            upd.branches[pick].params
        })
        .collect();
    Bag {
        samples,
        seed_tag: b.seed_tag,
    }
}

/// Check-node update: each sample is ⊞-combined with a uniformly permuted
/// partner and one branch is kept with its branch probability. Randomness
/// comes from streams derived from `(b.seed_tag, step, element)`, so the
/// result is reproducible and independent of scheduling.
pub fn bag_check_update(b: &Bag, step: u64) -> Bag {
    bag_update(b, step, NodeUpdate::Check)
}

/// Bit-node update; identical to [`bag_check_update`] with ⊛ combining.
pub fn bag_bit_update(b: &Bag, step: u64) -> Bag {
    bag_update(b, step, NodeUpdate::Bit)
}

/// Frozen-set selection rule.
#[derive(Clone, Copy, Debug)]
pub enum SelectMode {
    /// Exactly `k` information indices (smallest ε).
    FixedK(usize),
    /// Largest `K` such that `factor · Σ_{K smallest} ε ≤ target`.
    /// `factor = 1` is the classical union bound, `factor = 4` the
    /// non-commutative union bound.
    TargetUnionBound { target: f64, factor: f64 },
}

/// Output of a polar design run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DesignResult {
    pub n: usize,
    #[serde(rename = "N")]
    pub block_len: usize,
    pub delta: f64,
    pub gamma: f64,
    #[serde(rename = "M")]
    pub m_samples: usize,
    pub seed: u64,
    /// Expected per-index Helstrom errors, decoding order.
    pub epsilons: Vec<f64>,
    /// Selected information indices, 1-based decoding order, ascending.
    pub info_set: Vec<usize>,
    /// `frozen_mask[i]` is true iff 1-based index `i+1` is frozen.
    pub frozen_mask: Vec<bool>,
    /// Union-bound value `factor · Σ_{info} ε` for the selected set.
    pub bound: f64,
    /// Bound kind: "ub" or "ncub".
    pub bound_kind: String,
    /// Block-error target used by [`SelectMode::TargetUnionBound`], if any.
    pub target: Option<f64>,
}

/// Monte-Carlo density evolution for a length-`2^n` polar code over `w`.
///
/// Returns per-index expected errors in decoding order; the information set
/// is left empty (see [`select_design`]). Deterministic for a given seed,
/// independent of thread count.
pub fn polar_de(w: ChannelParams, n: usize, m_samples: usize, seed: u64) -> DesignResult {
    assert!(n >= 1, "need at least one polarization level");
    assert!(m_samples > 0);
    let root = Bag::constant(w, m_samples, seed);
    let mut epsilons = Vec::with_capacity(1 << n);
    let mut counter = 0u64;
    recurse_mc(&root, n, &mut counter, &mut epsilons);
    DesignResult {
        n,
        block_len: 1 << n,
        delta: w.delta(),
        gamma: w.gamma(),
        m_samples,
        seed,
        epsilons,
        info_set: Vec::new(),
        frozen_mask: vec![true; 1 << n],
        bound: 0.0,
        bound_kind: "ub".into(),
        target: None,
    }
}

fn recurse_mc(bag: &Bag, levels_left: usize, counter: &mut u64, out: &mut Vec<f64>) {
    if levels_left == 0 {
        out.push(bag.mean_error());
        return;
    }
    *counter += 1;
    let check = bag_check_update(bag, *counter);
    recurse_mc(&check, levels_left - 1, counter, out);
    drop(check);
    *counter += 1;
    let bit = bag_bit_update(bag, *counter);
    recurse_mc(&bit, levels_left - 1, counter, out);
}

/// Measure-first baseline: a classical polar design for the BSC induced by
/// Helstrom-measuring every output qubit individually. Identical pipeline on
/// the channel `(δ, 0)`.
pub fn mf_design(delta: f64, n: usize, m_samples: usize, seed: u64) -> DesignResult {
    let w = ChannelParams::from_raw_real(delta, 0.0);
    polar_de(w, n, m_samples, seed)
}

/// Exact branch-tree enumeration of the same recursion: distributions carry
/// exact probabilities instead of samples. The distribution size is capped;
/// exceeding the cap is a resource error (depth and purity decide growth).
pub fn polar_de_exact(w: ChannelParams, n: usize, max_support: usize) -> Result<Vec<f64>, Error> {
    let root = vec![(1.0, w)];
    let mut out = Vec::with_capacity(1 << n);
    recurse_exact(&root, n, max_support, &mut out)?;
    Ok(out)
}

type Dist = Vec<(f64, ChannelParams)>;

fn combine_dist(dist: &Dist, bit_node: bool, max_support: usize) -> Result<Dist, Error> {
    let mut next: Dist = Vec::new();
    for &(pa, ca) in dist {
        for &(pb, cb) in dist {
            let upd = if bit_node {
                bit_combine(&ca, &cb)
            } else {
                check_combine(&ca, &cb)
            };
            for b in &upd.branches {
                let p = pa * pb * b.p;
                if p > 1e-300 {
                    next.push((p, b.params));
                }
            }
        }
    }
    // merge numerically identical channels to keep the support small
    next.sort_by(|a, b| {
        (a.1.delta(), a.1.gamma())
            .partial_cmp(&(b.1.delta(), b.1.gamma()))
            .unwrap()
    });
    let mut merged: Dist = Vec::new();
    for (p, c) in next {
        match merged.last_mut() {
            Some((mp, mc))
                if (mc.delta() - c.delta()).abs() <= 1e-12
                    && (mc.gamma() - c.gamma()).abs() <= 1e-12 =>
            {
                *mp += p;
            }
            _ => merged.push((p, c)),
        }
    }
    if merged.len() > max_support {
        return Err(Error::ResourceGuard(format!(
            "exact enumeration support {} exceeds cap {}",
            merged.len(),
            max_support
        )));
    }
    Ok(merged)
}

fn recurse_exact(
    dist: &Dist,
    levels_left: usize,
    max_support: usize,
    out: &mut Vec<f64>,
) -> Result<(), Error> {
    if levels_left == 0 {
        out.push(dist.iter().map(|(p, c)| p * c.error_rate()).sum());
        return Ok(());
    }
    let check = combine_dist(dist, false, max_support)?;
    recurse_exact(&check, levels_left - 1, max_support, out)?;
    drop(check);
    let bit = combine_dist(dist, true, max_support)?;
    recurse_exact(&bit, levels_left - 1, max_support, out)
}

/// Select an information set from per-index errors. Ties in ε break toward
/// the lower index.
pub fn select_design(base: &DesignResult, mode: SelectMode) -> Result<DesignResult, Error> {
    let n_len = base.epsilons.len();
    let mut order: Vec<usize> = (0..n_len).collect();
    order.sort_by(|&a, &b| {
        base.epsilons[a]
            .partial_cmp(&base.epsilons[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let (k, factor, target) = match mode {
        SelectMode::FixedK(k) => {
            if k > n_len {
                return Err(Error::KTooLarge { k, n: n_len });
            }
            (k, 1.0, None)
        }
        SelectMode::TargetUnionBound { target, factor } => {
            let mut sum = 0.0;
            let mut k = 0;
            for &idx in &order {
                if factor * (sum + base.epsilons[idx]) > target {
                    break;
                }
                sum += base.epsilons[idx];
                k += 1;
            }
            (k, factor, Some(target))
        }
    };
    let mut info: Vec<usize> = order[..k].iter().map(|&i| i + 1).collect();
    info.sort_unstable();
    let mut mask = vec![true; n_len];
    for &i in &info {
        mask[i - 1] = false;
    }
    let bound = factor * info.iter().map(|&i| base.epsilons[i - 1]).sum::<f64>();
    Ok(DesignResult {
        info_set: info,
        frozen_mask: mask,
        bound,
        bound_kind: if factor > 1.0 { "ncub" } else { "ub" }.into(),
        target,
        ..base.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn ch(d: f64, g: f64) -> ChannelParams {
        ChannelParams::new(d, Complex64::new(g, 0.0)).unwrap()
    }

    #[test]
    fn useless_fixed_point() {
        let b = Bag::constant(ch(0.5, 0.0), 500, 1);
        for (step, upd) in [(1, true), (2, false)] {
            let nb = if upd {
                bag_check_update(&b, step)
            } else {
                bag_bit_update(&b, step)
            };
            assert!(nb
                .samples
                .iter()
                .all(|w| (w.error_rate() - 0.5).abs() < 1e-12));
        }
    }

    #[test]
    fn classical_check_update() {
        let b = Bag::constant(ch(0.1, 0.0), 400, 2);
        let nb = bag_check_update(&b, 1);
        for w in &nb.samples {
            assert_abs_diff_eq!(w.error_rate(), 0.18, epsilon = 1e-12);
        }
    }

    #[test]
    fn classical_bit_update_two_valued() {
        let b = Bag::constant(ch(0.1, 0.0), 4000, 3);
        let nb = bag_bit_update(&b, 1);
        let agree = 0.01f64 / 0.82;
        let mut n_agree = 0usize;
        for w in &nb.samples {
            if (w.error_rate() - agree).abs() < 1e-12 {
                n_agree += 1;
            } else {
                assert_abs_diff_eq!(w.error_rate(), 0.5, epsilon = 1e-12);
            }
        }
        // empirical frequency of the agree branch within 3σ of 0.82
        let sigma = (0.82f64 * 0.18 / 4000.0).sqrt();
        assert!((n_agree as f64 / 4000.0 - 0.82).abs() < 3.0 * sigma + 1e-9);
    }

    #[test]
    fn psc_bag_updates() {
        let theta = 1.1f64;
        let w = crate::channel::psc_to_bscq(theta).unwrap();
        let b = Bag::constant(w, 3000, 4);

        // bit update is deterministic on pure inputs
        let nb = bag_bit_update(&b, 1);
        let want = crate::channel::psc_to_bscq((theta.cos() * theta.cos()).acos()).unwrap();
        for s in &nb.samples {
            assert_abs_diff_eq!(s.delta(), want.delta(), epsilon = 1e-12);
        }

        // check update takes exactly the two θ-branch values; for equal
        // inputs the disagree branch lands on θ₁ = π/2, a noiseless channel
        let nc = bag_check_update(&b, 2);
        let c = theta.cos();
        let e0 = {
            let t0 = ((2.0 * c) / (1.0 + c * c)).acos();
            (1.0 - t0.sin()) / 2.0
        };
        let p0 = (1.0 + c * c) / 2.0;
        let mut n0 = 0usize;
        for s in &nc.samples {
            if (s.error_rate() - e0).abs() < 1e-10 {
                n0 += 1;
            } else {
                assert_abs_diff_eq!(s.error_rate(), 0.0, epsilon = 1e-10);
            }
        }
        let sigma = (p0 * (1.0 - p0) / 3000.0).sqrt();
        assert!((n0 as f64 / 3000.0 - p0).abs() < 3.0 * sigma + 1e-9);
    }

    #[test]
    fn trivial_designs() {
        let r = polar_de(ch(0.5, 0.0), 1, 200, 9);
        assert_abs_diff_eq!(r.epsilons[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.epsilons[1], 0.5, epsilon = 1e-12);

        let r = mf_design(0.0, 2, 200, 9);
        assert!(r.epsilons.iter().all(|&e| e < 1e-12));
    }

    #[test]
    fn determinism() {
        let a = polar_de(ch(0.1, 0.2), 3, 500, 42);
        let b = polar_de(ch(0.1, 0.2), 3, 500, 42);
        assert_eq!(a.epsilons, b.epsilons);
        let c = polar_de(ch(0.1, 0.2), 3, 500, 43);
        assert_ne!(a.epsilons, c.epsilons);
    }

    #[test]
    fn mc_matches_exact_enumeration() {
        let w = ch(0.1, 0.15);
        let m = 20_000;
        let exact = polar_de_exact(w, 2, 1 << 16).unwrap();
        let mc = polar_de(w, 2, m, 7);
        for (e, s) in exact.iter().zip(&mc.epsilons) {
            let tol = 4.0 * (e * (1.0 - e) / m as f64).sqrt() + 1e-9;
            assert!(
                (e - s).abs() < tol,
                "exact {e} vs mc {s} beyond tolerance {tol}"
            );
        }
    }

    #[test]
    fn exact_enumeration_psc_anchor() {
        // depth-2 all-bit path of the pure-state channel at the published
        // anchor angle
        let theta = 1.0707963267949f64;
        let w = crate::channel::psc_to_bscq(theta).unwrap();
        let eps = polar_de_exact(w, 2, 1 << 12).unwrap();
        assert_abs_diff_eq!(eps[3], 0.000698252791343723, epsilon = 1e-9);
        // u4 error has the closed form (1 − √(1 − cos⁸θ))/2
        let c8 = theta.cos().powi(8);
        assert_abs_diff_eq!(eps[3], (1.0 - (1.0 - c8).sqrt()) / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn select_design_rules() {
        let base = DesignResult {
            n: 2,
            block_len: 4,
            delta: 0.1,
            gamma: 0.0,
            m_samples: 1,
            seed: 0,
            epsilons: vec![0.4, 0.01, 0.02, 0.001],
            info_set: vec![],
            frozen_mask: vec![true; 4],
            bound: 0.0,
            bound_kind: "ub".into(),
            target: None,
        };
        let d = select_design(&base, SelectMode::FixedK(2)).unwrap();
        assert_eq!(d.info_set, vec![2, 4]);
        assert_abs_diff_eq!(d.bound, 0.011, epsilon = 1e-15);

        let d = select_design(
            &base,
            SelectMode::TargetUnionBound {
                target: 0.1,
                factor: 1.0,
            },
        )
        .unwrap();
        assert_eq!(d.info_set, vec![2, 3, 4]);

        // NCUB admits fewer indices at the same target
        let d4 = select_design(
            &base,
            SelectMode::TargetUnionBound {
                target: 0.1,
                factor: 4.0,
            },
        )
        .unwrap();
        assert_eq!(d4.info_set, vec![2, 4]);
        assert_abs_diff_eq!(d4.bound, 4.0 * 0.011, epsilon = 1e-15);

        assert!(select_design(&base, SelectMode::FixedK(5)).is_err());
    }

    #[test]
    fn children_error_ordering_on_averages() {
        // classical oracle: the check child degrades, the bit child never
        // degrades, on population averages
        let b = Bag::constant(ch(0.11, 0.0), 6000, 12);
        let parent = b.mean_error();
        let check = bag_check_update(&b, 1).mean_error();
        let bit = bag_bit_update(&b, 2).mean_error();
        let noise = 3.0 * (parent * (1.0 - parent) / 6000.0).sqrt();
        assert!(check >= parent - noise);
        assert!(bit <= parent + noise);
    }
}
