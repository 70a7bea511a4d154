//! Pure-state-channel decoding in the θ domain.
//!
//! A pure-state channel emits `|±θ⟩ = cos(θ/2)|0⟩ ± sin(θ/2)|1⟩`. Its
//! combining rules close over θ: the check node is the parameter-free
//! `CNOT` with branch angles `θ_j^⊞`, the bit node is the unitary `V(θ,θ')`
//! with closed-form entries `a±, b±` and the single output angle
//! `θ^⊛ = arccos(cos θ cos θ')`. The decoder mirrors the general BSCQ
//! recursion with σz corrections and σx-basis decisions; it is unitarily
//! equivalent to the BSCQ decoder through the per-qubit basis change
//! `σx·H`, which maps `|±θ⟩` onto the canonical `(δ, γ) =
//! ((1−sin θ)/2, cos θ/2)` channel pair.

use num_complex::Complex64;
use rand::Rng;

use crate::decoder::{polar_encode, BitRule, CodeSpec, DecodeMode, DecodeTrace};
use crate::sim::{real_gate, Gate4, QuantumState, MAX_PURE_QUBITS};
use crate::Error;

type C = Complex64;

/// Check-node branch angles and probabilities for input angles `(ta, tb)`:
/// `p₀ = (1 + cos ta cos tb)/2`, `θ₀ = arccos((ca+cb)/(1+ca·cb))`,
/// `θ₁ = arccos((ca−cb)/(1−ca·cb))`.
pub fn psc_check_branches(ta: f64, tb: f64) -> [(f64, f64); 2] {
    let (ca, cb) = (ta.cos(), tb.cos());
    let branch = |p: f64, num: f64, den: f64| {
        if den.abs() < 1e-15 || p < 1e-15 {
            (p.max(0.0), std::f64::consts::FRAC_PI_2)
        } else {
            (p, (num / den).clamp(-1.0, 1.0).acos())
        }
    };
    [
        branch((1.0 + ca * cb) / 2.0, ca + cb, 1.0 + ca * cb),
        branch((1.0 - ca * cb) / 2.0, ca - cb, 1.0 - ca * cb),
    ]
}

/// Bit-node output angle `θ^⊛ = arccos(cos ta cos tb)` (deterministic).
pub fn psc_bit_theta(ta: f64, tb: f64) -> f64 {
    (ta.cos() * tb.cos()).clamp(-1.0, 1.0).acos()
}

/// `CNOT` with the pair leader as control; the pure-state check unitary.
pub fn psc_check_gate() -> Gate4 {
    real_gate([
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ])
}

/// Bit-node unitary `V(θ,θ')` with entries
/// `a± = (cos((θ−θ')/2) ± cos((θ+θ')/2)) / (√2·√(1+cosθcosθ'))` and
/// `b± = (sin((θ+θ')/2) ∓ sin((θ−θ')/2)) / (√2·√(1−cosθcosθ'))`;
/// degenerate denominators fall back to an orthonormal completion carrying
/// no amplitude.
pub fn psc_bit_gate(ta: f64, tb: f64) -> Gate4 {
    let cc = ta.cos() * tb.cos();
    let half = |x: f64| x / 2.0;
    let (ap, am) = if 1.0 + cc > 1e-14 {
        let den = (2.0 * (1.0 + cc)).sqrt();
        (
            (half(ta - tb).cos() + half(ta + tb).cos()) / den,
            (half(ta - tb).cos() - half(ta + tb).cos()) / den,
        )
    } else {
        (1.0, 0.0)
    };
    let (bp, bm) = if 1.0 - cc > 1e-14 {
        let den = (2.0 * (1.0 - cc)).sqrt();
        (
            (half(ta + tb).sin() - half(ta - tb).sin()) / den,
            (half(ta + tb).sin() + half(ta - tb).sin()) / den,
        )
    } else {
        (1.0, 0.0)
    };
    real_gate([
        [ap, 0.0, 0.0, am],
        [am, 0.0, 0.0, -ap],
        [0.0, bp, bm, 0.0],
        [0.0, bm, -bp, 0.0],
    ])
}

/// Product state `⊗_i |(−1)^{x_i} θ⟩`.
pub fn psc_channel_output(theta: f64, codeword: &[u8]) -> Result<QuantumState, Error> {
    let n = codeword.len();
    if n > MAX_PURE_QUBITS {
        return Err(Error::ResourceGuard(format!(
            "{n} qubits exceeds the pure-state cap {MAX_PURE_QUBITS}"
        )));
    }
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let mut amps = vec![C::new(0.0, 0.0); 1 << n];
    for (idx, amp) in amps.iter_mut().enumerate() {
        let mut prod = 1.0;
        for (q, &x) in codeword.iter().enumerate() {
            let bit = (idx >> (n - 1 - q)) & 1;
            let sign = if x & 1 == 1 { -1.0 } else { 1.0 };
            prod *= if bit == 0 { c } else { sign * s };
        }
        *amp = C::new(prod, 0.0);
    }
    QuantumState::from_amplitudes(amps)
}

/// Conditional angle bookkeeping: one angle per configuration of the
/// reliability qubits (same layout as the BSCQ conditional lists).
#[derive(Clone, Debug)]
struct CondThetas {
    reliability: Vec<usize>,
    thetas: Vec<f64>,
}

impl CondThetas {
    fn fresh(theta: f64) -> Self {
        Self {
            reliability: Vec::new(),
            thetas: vec![theta],
        }
    }
}

enum PscNode {
    Check,
    Bit,
}

fn psc_bookkeeping(cp_i: &CondThetas, cp_j: &CondThetas, j: usize, kind: PscNode) -> CondThetas {
    let mut reliability = Vec::with_capacity(cp_i.reliability.len() + cp_j.reliability.len() + 1);
    reliability.extend_from_slice(&cp_i.reliability);
    reliability.extend_from_slice(&cp_j.reliability);
    reliability.push(j);
    let mut thetas = Vec::with_capacity(cp_i.thetas.len() * cp_j.thetas.len() * 2);
    for &ti in &cp_i.thetas {
        for &tj in &cp_j.thetas {
            match kind {
                PscNode::Check => {
                    let br = psc_check_branches(ti, tj);
                    thetas.push(br[0].1);
                    thetas.push(br[1].1);
                }
                PscNode::Bit => {
                    thetas.push(psc_bit_theta(ti, tj));
                    // the reliability qubit ends in |0⟩; the odd configuration
                    // carries no design weight
                    thetas.push(std::f64::consts::FRAC_PI_2);
                }
            }
        }
    }
    CondThetas {
        reliability,
        thetas,
    }
}

fn hadamard() -> [[C; 2]; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [C::new(h, 0.0), C::new(h, 0.0)],
        [C::new(h, 0.0), C::new(-h, 0.0)],
    ]
}

fn sigma_z() -> [[C; 2]; 2] {
    [
        [C::new(1.0, 0.0), C::new(0.0, 0.0)],
        [C::new(0.0, 0.0), C::new(-1.0, 0.0)],
    ]
}

struct PscCtx<'a, R: Rng> {
    mode: DecodeMode<'a, R>,
    probs: Vec<Option<f64>>,
    cursor: usize,
}

/// Decode a pure-state-channel register at angle `theta`.
///
/// Decisions are σx-basis measurements of the decision qubit; corrections
/// are `σz^û`. Genie mode records each information bit's designed error and
/// never collapses, so its probabilities match the θ-domain density
/// evolution exactly.
pub fn psc_decode<R: Rng>(
    state: &mut QuantumState,
    spec: &CodeSpec,
    theta: f64,
    mode: DecodeMode<'_, R>,
) -> Result<DecodeTrace, Error> {
    let len = spec.block_len();
    if state.n_qubits() != len {
        return Err(Error::StateSpecMismatch {
            state_qubits: state.n_qubits(),
            code_bits: len,
        });
    }
    if let DecodeMode::Genie(u) = &mode {
        if u.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: u.len(),
            });
        }
    }
    let qubits: Vec<usize> = (0..len).collect();
    let cps: Vec<CondThetas> = (0..len).map(|_| CondThetas::fresh(theta)).collect();
    let mut ctx = PscCtx {
        mode,
        probs: Vec::with_capacity(len),
        cursor: 0,
    };
    let u_hat = psc_recurse(state, &qubits, cps, &spec.rules, &mut ctx)?;
    let x_hat = polar_encode(&u_hat, spec.n)?;
    Ok(DecodeTrace {
        u_hat,
        x_hat,
        bit_error_probs: ctx.probs,
    })
}

fn apply_psc_bitnode(
    state: &mut QuantumState,
    i: usize,
    j: usize,
    cp_i: &CondThetas,
    cp_j: &CondThetas,
    adjoint: bool,
) -> Result<(), Error> {
    let mut blocks = Vec::with_capacity(cp_i.thetas.len() * cp_j.thetas.len());
    for &ti in &cp_i.thetas {
        for &tj in &cp_j.thetas {
            let g = psc_bit_gate(ti, tj);
            blocks.push(if adjoint { crate::sim::adjoint4(&g) } else { g });
        }
    }
    state.apply_conditional_two_qubit(i, j, &cp_i.reliability, &cp_j.reliability, &blocks)
}

fn psc_recurse<R: Rng>(
    state: &mut QuantumState,
    qubits: &[usize],
    cps: Vec<CondThetas>,
    rules: &[BitRule],
    ctx: &mut PscCtx<'_, R>,
) -> Result<Vec<u8>, Error> {
    if qubits.len() == 1 {
        return psc_base(state, qubits[0], rules[0], ctx).map(|u| vec![u]);
    }
    let half = qubits.len() / 2;
    let odd: Vec<usize> = qubits.iter().copied().step_by(2).collect();
    let cnot = psc_check_gate();
    let cnot_adj = crate::sim::adjoint4(&cnot);

    let mut check_cps = Vec::with_capacity(half);
    for k in 0..half {
        state.apply_two_qubit(&cnot, qubits[2 * k], qubits[2 * k + 1])?;
        check_cps.push(psc_bookkeeping(
            &cps[2 * k],
            &cps[2 * k + 1],
            qubits[2 * k + 1],
            PscNode::Check,
        ));
    }
    let mut u_hat = psc_recurse(state, &odd, check_cps, &rules[..half], ctx)?;
    for k in 0..half {
        state.apply_two_qubit(&cnot_adj, qubits[2 * k], qubits[2 * k + 1])?;
    }

    let mut bit_cps = Vec::with_capacity(half);
    for k in 0..half {
        apply_psc_bitnode(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
            false,
        )?;
        bit_cps.push(psc_bookkeeping(
            &cps[2 * k],
            &cps[2 * k + 1],
            qubits[2 * k + 1],
            PscNode::Bit,
        ));
    }
    let u_bot = psc_recurse(state, &odd, bit_cps, &rules[half..], ctx)?;
    for k in 0..half {
        apply_psc_bitnode(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
            true,
        )?;
    }
    u_hat.extend(u_bot);
    Ok(u_hat)
}

fn psc_base<R: Rng>(
    state: &mut QuantumState,
    q: usize,
    rule: BitRule,
    ctx: &mut PscCtx<'_, R>,
) -> Result<u8, Error> {
    let position = ctx.cursor;
    ctx.cursor += 1;
    let h = hadamard();
    let u_hat = match (&mut ctx.mode, rule) {
        (DecodeMode::Genie(u), _) => {
            let y = u[position] & 1;
            if matches!(rule, BitRule::Info) {
                // error = 1 − ⟨ψ| Π_{(−1)^y} |ψ⟩ in the σx basis
                state.apply_one_qubit(&h, q)?;
                let err = 1.0 - state.prob_of(q, y)?;
                state.apply_one_qubit(&h, q)?;
                ctx.probs.push(Some(err));
            } else {
                ctx.probs.push(None);
            }
            y
        }
        (DecodeMode::Sampled(rng), BitRule::Info) => {
            state.apply_one_qubit(&h, q)?;
            let (outcome, _) = state.measure_qubit(q, rng)?;
            state.apply_one_qubit(&h, q)?;
            ctx.probs.push(None);
            outcome
        }
        (DecodeMode::Sampled(_), BitRule::Frozen0) => {
            ctx.probs.push(None);
            0
        }
        (DecodeMode::Sampled(_), BitRule::Frozen1) => {
            ctx.probs.push(None);
            1
        }
    };
    if u_hat & 1 == 1 {
        state.apply_one_qubit(&sigma_z(), q)?;
    }
    Ok(u_hat)
}

/// Exact θ-domain density evolution: per-index designed error probabilities
/// `(1 − sin θ)/2` averaged over the branch tree, decoding order.
pub fn psc_de_exact(theta: f64, n: usize, max_support: usize) -> Result<Vec<f64>, Error> {
    let mut out = Vec::with_capacity(1 << n);
    psc_exact_recurse(&[(1.0, theta)], n, max_support, &mut out)?;
    Ok(out)
}

fn psc_exact_recurse(
    dist: &[(f64, f64)],
    levels_left: usize,
    max_support: usize,
    out: &mut Vec<f64>,
) -> Result<(), Error> {
    if levels_left == 0 {
        out.push(dist.iter().map(|(p, t)| p * (1.0 - t.sin()) / 2.0).sum());
        return Ok(());
    }
    let combine = |bit_node: bool| -> Result<Vec<(f64, f64)>, Error> {
        let mut next: Vec<(f64, f64)> = Vec::new();
        for &(pa, ta) in dist {
            for &(pb, tb) in dist {
                if bit_node {
                    next.push((pa * pb, psc_bit_theta(ta, tb)));
                } else {
                    for (p, t) in psc_check_branches(ta, tb) {
                        if p > 1e-300 {
                            next.push((pa * pb * p, t));
                        }
                    }
                }
            }
        }
        next.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (p, t) in next {
            match merged.last_mut() {
                Some((mp, mt)) if (*mt - t).abs() <= 1e-12 => *mp += p,
                _ => merged.push((p, t)),
            }
        }
        if merged.len() > max_support {
            return Err(Error::ResourceGuard(format!(
                "theta-domain enumeration support {} exceeds cap {}",
                merged.len(),
                max_support
            )));
        }
        Ok(merged)
    };
    let check = combine(false)?;
    psc_exact_recurse(&check, levels_left - 1, max_support, out)?;
    drop(check);
    let bit = combine(true)?;
    psc_exact_recurse(&bit, levels_left - 1, max_support, out)
}
