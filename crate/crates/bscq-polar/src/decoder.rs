//! Deferred-measurement successive-cancellation decoding of polar codes on
//! qubit BSCQ channels, plus a successive bitwise Helstrom baseline.
//!
//! The decoder is a classical recursion controlling the quantum register:
//! check-node operations combine adjacent qubit pairs (decision into the
//! pair leader, reliability left coherent in the partner), the first half of
//! the input bits is decoded recursively, the check operations are inverted,
//! and the same happens with bit-node operations for the second half. Base
//! cases measure a single decision qubit (information bits) or substitute
//! the known value (frozen bits), and in both cases flip the qubit so later
//! stages see the all-zeros convention; conjugating those flips through the
//! inverted node unitaries reproduces the classical partial-sum corrections
//! automatically.
//!
//! Since reliability qubits are never measured, every node operation after
//! the first level is conditional on them; the conditional parameter lists
//! (`ConditionalParams`) enumerate the channel seen by a decision qubit for
//! every computational configuration of its reliability qubits. In genie
//! mode decisions are not measured at all: every bit is treated as frozen to
//! its true value and the would-be error probability is recorded, which is
//! exactly the designed effective channel that density evolution tracks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::channel::{helstrom, ChannelParams, DensityMatrix};
use crate::combine::{bit_branches_raw, canonicalize, check_branches_raw, check_matrix, RawBranch};
use crate::sim::{real_gate, CondEntry, ConditionalParams, Gate4, QuantumState};
use crate::Error;

/// Per-position decoding rule, decoding order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BitRule {
    Info,
    Frozen0,
    Frozen1,
}

impl BitRule {
    pub fn frozen(value: u8) -> Self {
        if value & 1 == 1 {
            BitRule::Frozen1
        } else {
            BitRule::Frozen0
        }
    }
}

/// A polar code: `N = 2^n` positions with their decoding rules.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    pub n: usize,
    pub rules: Vec<BitRule>,
}

impl CodeSpec {
    pub fn new(n: usize, rules: Vec<BitRule>) -> Result<Self, Error> {
        if rules.len() != 1 << n {
            return Err(Error::LengthMismatch {
                expected: 1 << n,
                got: rules.len(),
            });
        }
        Ok(Self { n, rules })
    }

    /// Rules for a trial: positions in `info_set` (1-based) are information
    /// bits, the rest are frozen to the corresponding entries of `u`.
    pub fn for_trial(n: usize, info_set: &[usize], u: &[u8]) -> Result<Self, Error> {
        let len = 1usize << n;
        if u.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: u.len(),
            });
        }
        let mut rules = vec![BitRule::Info; len];
        let info: std::collections::HashSet<usize> = info_set.iter().copied().collect();
        for (pos, rule) in rules.iter_mut().enumerate() {
            if !info.contains(&(pos + 1)) {
                *rule = BitRule::frozen(u[pos]);
            }
        }
        Ok(Self { n, rules })
    }

    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    pub fn info_positions(&self) -> Vec<usize> {
        self.rules
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, BitRule::Info))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Decoder output.
#[derive(Clone, Debug)]
pub struct DecodeTrace {
    /// Hard decisions in input (decoding) order.
    pub u_hat: Vec<u8>,
    /// Re-encoded hard decisions in output order.
    pub x_hat: Vec<u8>,
    /// Genie mode only: designed per-bit error probability at information
    /// positions.
    pub bit_error_probs: Vec<Option<f64>>,
}

/// How decisions are made.
pub enum DecodeMode<'a, R: Rng> {
    /// Honest Born-rule measurements with collapse.
    Sampled(&'a mut R),
    /// No collapse: every position is treated as frozen to the true input
    /// word and the would-be decision error probability is recorded.
    Genie(&'a [u8]),
}

/// Polar transform `x = u·G_N` over GF(2), `G_N = B_N G_2^{⊗n}`
/// (bit-reversal times the Kronecker kernel). `G_N` is an involution.
pub fn polar_encode(u: &[u8], n: usize) -> Result<Vec<u8>, Error> {
    let len = 1usize << n;
    if u.len() != len {
        return Err(Error::LengthMismatch {
            expected: len,
            got: u.len(),
        });
    }
    // bit-reversal permutation of the inputs
    let mut x = vec![0u8; len];
    for (i, &b) in u.iter().enumerate() {
        let mut r = 0usize;
        for k in 0..n {
            r |= ((i >> k) & 1) << (n - 1 - k);
        }
        x[r] = b & 1;
    }
    // kernel butterfly: x ← x · G_2^{⊗n}
    let mut width = 1usize;
    while width < len {
        for block in (0..len).step_by(2 * width) {
            for k in 0..width {
                x[block + k] ^= x[block + width + k];
            }
        }
        width *= 2;
    }
    Ok(x)
}

fn check_gate() -> Gate4 {
    real_gate(check_matrix())
}

fn check_gate_adjoint() -> Gate4 {
    crate::sim::adjoint4(&check_gate())
}

#[derive(Clone, Copy)]
enum NodeKindInner {
    Check,
    Bit,
}

/// Parameter-list bookkeeping shared by CNOP and BNOP: the new conditional
/// list for the pair leader is `L(i) ++ L(j) ++ [j]` and the entries
/// enumerate branch parameters over `(m_i, m_j, a)` lexicographically.
fn combine_bookkeeping(
    cp_i: &ConditionalParams,
    cp_j: &ConditionalParams,
    j: usize,
    kind: NodeKindInner,
) -> ConditionalParams {
    let mut reliability = Vec::with_capacity(cp_i.reliability.len() + cp_j.reliability.len() + 1);
    reliability.extend_from_slice(&cp_i.reliability);
    reliability.extend_from_slice(&cp_j.reliability);
    reliability.push(j);
    let mut entries = Vec::with_capacity(cp_i.entries.len() * cp_j.entries.len() * 2);
    for ei in &cp_i.entries {
        let (di, gi) = ei.raw();
        for ej in &cp_j.entries {
            let (dj, gj) = ej.raw();
            let (raw, flip): ([RawBranch; 2], bool) = match kind {
                // the fixed check basis keeps the convention of its inputs:
                // branches land on the flipped side iff the inputs agree
                NodeKindInner::Check => (check_branches_raw(di, gi, dj, gj), !(ei.flip ^ ej.flip)),
                // bit-node branches always sit on the flipped side (their
                // eigenvalue is non-negative for the actual state)
                NodeKindInner::Bit => (bit_branches_raw(di, gi, dj, gj), true),
            };
            let upd = canonicalize(raw, flip);
            for b in &upd.branches {
                entries.push(CondEntry {
                    delta: b.params.delta(),
                    gamma: b.params.gamma(),
                    flip: b.flip,
                    sign: b.sign,
                });
            }
        }
    }
    ConditionalParams {
        owner: cp_i.owner,
        reliability,
        entries,
    }
}

/// Check-node operation: apply the (parameter-free) check unitary on
/// `(i, j)` and return the updated conditional parameters for `i`.
pub fn cnop(
    state: &mut QuantumState,
    i: usize,
    j: usize,
    cp_i: &ConditionalParams,
    cp_j: &ConditionalParams,
) -> Result<ConditionalParams, Error> {
    state.apply_two_qubit(&check_gate(), i, j)?;
    Ok(combine_bookkeeping(cp_i, cp_j, j, NodeKindInner::Check))
}

/// Inverse of [`cnop`] (bookkeeping is discarded; callers keep the
/// pre-combine lists).
pub fn cnop_inv(
    state: &mut QuantumState,
    i: usize,
    j: usize,
    _cp_i: &ConditionalParams,
    _cp_j: &ConditionalParams,
) -> Result<(), Error> {
    state.apply_two_qubit(&check_gate_adjoint(), i, j)
}

/// Bit-node operation: apply the conditional bit-node unitary on `(i, j)`
/// and return the updated conditional parameters for `i`.
pub fn bnop(
    state: &mut QuantumState,
    i: usize,
    j: usize,
    cp_i: &ConditionalParams,
    cp_j: &ConditionalParams,
) -> Result<ConditionalParams, Error> {
    state.apply_conditional_bitnode(i, j, cp_i, cp_j, false)?;
    Ok(combine_bookkeeping(cp_i, cp_j, j, NodeKindInner::Bit))
}

/// Inverse of [`bnop`], rebuilt from the same pre-combine lists.
pub fn bnop_inv(
    state: &mut QuantumState,
    i: usize,
    j: usize,
    cp_i: &ConditionalParams,
    cp_j: &ConditionalParams,
) -> Result<(), Error> {
    state.apply_conditional_bitnode(i, j, cp_i, cp_j, true)
}

struct ScCtx<'a, R: Rng> {
    mode: DecodeMode<'a, R>,
    probs: Vec<Option<f64>>,
    cursor: usize,
}

/// Decode a state prepared from a codeword of `spec`'s length.
///
/// `w` is the channel every code qubit was transmitted over. In sampled
/// mode, decisions are physical measurements; in genie mode the true input
/// word drives frozen-style corrections and `bit_error_probs` records every
/// information bit's designed error probability.
pub fn decode<R: Rng>(
    state: &mut QuantumState,
    spec: &CodeSpec,
    w: &ChannelParams,
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
    let cps: Vec<ConditionalParams> = qubits
        .iter()
        .map(|&q| ConditionalParams::fresh(q, w))
        .collect();
    let mut ctx = ScCtx {
        mode,
        probs: Vec::with_capacity(len),
        cursor: 0,
    };
    let u_hat = sc_recurse(state, &qubits, cps, &spec.rules, &mut ctx)?;
    let x_hat = polar_encode(&u_hat, spec.n)?;
    Ok(DecodeTrace {
        u_hat,
        x_hat,
        bit_error_probs: ctx.probs,
    })
}

/// Convenience wrappers fixing the mode.
pub fn decode_genie(
    state: &mut QuantumState,
    spec: &CodeSpec,
    w: &ChannelParams,
    true_u: &[u8],
) -> Result<DecodeTrace, Error> {
    decode::<rand::rngs::ThreadRng>(state, spec, w, DecodeMode::Genie(true_u))
}

pub fn decode_sampled<R: Rng>(
    state: &mut QuantumState,
    spec: &CodeSpec,
    w: &ChannelParams,
    rng: &mut R,
) -> Result<DecodeTrace, Error> {
    decode(state, spec, w, DecodeMode::Sampled(rng))
}

fn sc_recurse<R: Rng>(
    state: &mut QuantumState,
    qubits: &[usize],
    cps: Vec<ConditionalParams>,
    rules: &[BitRule],
    ctx: &mut ScCtx<'_, R>,
) -> Result<Vec<u8>, Error> {
    if qubits.len() == 1 {
        return base_case(state, qubits[0], &cps[0], rules[0], ctx).map(|u| vec![u]);
    }
    let half = qubits.len() / 2;
    let odd: Vec<usize> = qubits.iter().copied().step_by(2).collect();

    let mut check_cps = Vec::with_capacity(half);
    for k in 0..half {
        check_cps.push(cnop(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
        )?);
    }
    let mut u_hat = sc_recurse(state, &odd, check_cps, &rules[..half], ctx)?;
    for k in 0..half {
        cnop_inv(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
        )?;
    }

    let mut bit_cps = Vec::with_capacity(half);
    for k in 0..half {
        bit_cps.push(bnop(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
        )?);
    }
    let u_bot = sc_recurse(state, &odd, bit_cps, &rules[half..], ctx)?;
    for k in 0..half {
        bnop_inv(
            state,
            qubits[2 * k],
            qubits[2 * k + 1],
            &cps[2 * k],
            &cps[2 * k + 1],
        )?;
    }
    u_hat.extend(u_bot);
    Ok(u_hat)
}

fn base_case<R: Rng>(
    state: &mut QuantumState,
    q: usize,
    cp: &ConditionalParams,
    rule: BitRule,
    ctx: &mut ScCtx<'_, R>,
) -> Result<u8, Error> {
    // canonicalization keeps the σx convention uniform across configurations
    let flip = cp.entries[0].flip;
    debug_assert!(cp.entries.iter().all(|e| e.flip == flip));
    let position = ctx.cursor;
    ctx.cursor += 1;

    let u_hat = match (&mut ctx.mode, rule) {
        (DecodeMode::Genie(u), _) => {
            let y = u[position] & 1;
            if matches!(rule, BitRule::Info) {
                let p_match = state.prob_of(q, y)?;
                let err = if flip { 1.0 - p_match } else { p_match };
                ctx.probs.push(Some(err));
            } else {
                debug_assert_eq!(y, if rule == BitRule::Frozen1 { 1 } else { 0 });
                ctx.probs.push(None);
            }
            y
        }
        (DecodeMode::Sampled(rng), BitRule::Info) => {
            let (outcome, _) = state.measure_qubit(q, rng)?;
            ctx.probs.push(None);
            if flip {
                outcome
            } else {
                outcome ^ 1
            }
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
    state.apply_x_conditional(u_hat, q)?;
    Ok(u_hat)
}

/// Successive bitwise Helstrom decoder: for each information bit in order,
/// the two hypothesis densities (conditioned on decisions so far, frozen
/// values known, undecided information bits averaged with uniform priors)
/// are discriminated by a Helstrom measurement applied to the residual
/// state.
///
/// Projectors depend only on the bit position and the u-values known at
/// that point, so they are cached and shared across trials (and threads)
/// even when frozen values are redrawn per trial.
type ProjectorCache =
    std::sync::Mutex<std::collections::HashMap<(usize, u64), std::sync::Arc<DMatrix<f64>>>>;

pub struct BitwiseHelstromDecoder {
    w: ChannelParams,
    n: usize,
    info_mask: Vec<bool>,
    cache: ProjectorCache,
}

impl BitwiseHelstromDecoder {
    /// `info_set` holds 1-based information positions in decoding order.
    pub fn new(w: ChannelParams, n: usize, info_set: &[usize]) -> Result<Self, Error> {
        let len = 1usize << n;
        if len > crate::sim::MAX_DENSITY_QUBITS {
            return Err(Error::ResourceGuard(format!(
                "bitwise Helstrom decoding is limited to {} qubits",
                crate::sim::MAX_DENSITY_QUBITS
            )));
        }
        let mut info_mask = vec![false; len];
        for &i in info_set {
            if i == 0 || i > len {
                return Err(Error::KTooLarge { k: i, n: len });
            }
            info_mask[i - 1] = true;
        }
        Ok(Self {
            w,
            n,
            info_mask,
            cache: std::sync::Mutex::new(std::collections::HashMap::new()),
        })
    }

    /// Bits of `u` known when deciding `pos`: everything before it plus the
    /// frozen values after it.
    fn known_key(&self, pos: usize, u: &[u8]) -> u64 {
        let mut key = 0u64;
        for (k, &b) in u.iter().enumerate() {
            if k < pos || (k > pos && !self.info_mask[k]) {
                key = (key << 1) | b as u64;
            }
        }
        key
    }

    /// Average output density over undecided information bits given the
    /// known part of `u` and the hypothesis `u[pos] = b`.
    fn hypothesis_density(&self, pos: usize, u_known: &[u8], b: u8) -> DMatrix<Complex64> {
        let len = 1usize << self.n;
        let future_info: Vec<usize> = (pos + 1..len).filter(|&k| self.info_mask[k]).collect();
        let size = 1usize << len;
        let mut acc = DMatrix::<Complex64>::zeros(size, size);
        let weight = 1.0 / (1u64 << future_info.len()) as f64;
        for assign in 0..(1u64 << future_info.len()) {
            let mut u = u_known.to_vec();
            u[pos] = b;
            for (t, &k) in future_info.iter().enumerate() {
                u[k] = ((assign >> t) & 1) as u8;
            }
            let x = polar_encode(&u, self.n).expect("length checked");
            let state = QuantumState::exact_channel_output(&self.w, &x).expect("guarded");
            let d = state.density_entries().unwrap();
            for r in 0..size {
                for c in 0..size {
                    acc[(r, c)] += d[r * size + c] * weight;
                }
            }
        }
        acc
    }

    fn projector(&self, pos: usize, u: &[u8]) -> std::sync::Arc<DMatrix<f64>> {
        let key = (pos, self.known_key(pos, u));
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let rho0 = DensityMatrix::new(self.hypothesis_density(pos, u, 0)).unwrap();
        let rho1 = DensityMatrix::new(self.hypothesis_density(pos, u, 1)).unwrap();
        let h = helstrom(&rho0, &rho1, 0.5).unwrap();
        let real = DMatrix::from_fn(
            h.guess0_projector.nrows(),
            h.guess0_projector.ncols(),
            |r, c| h.guess0_projector[(r, c)].re,
        );
        let arc = std::sync::Arc::new(real);
        self.cache.lock().unwrap().insert(key, arc.clone());
        arc
    }

    /// Decode one transmitted word. `state` must be the exact density output
    /// for the codeword encoded from `u_template`'s frozen values (its
    /// information positions are ignored by the decoder).
    pub fn decode<R: Rng>(
        &self,
        state: &QuantumState,
        u_template: &[u8],
        rng: &mut R,
    ) -> Result<DecodeTrace, Error> {
        let len = 1usize << self.n;
        if state.n_qubits() != len {
            return Err(Error::StateSpecMismatch {
                state_qubits: state.n_qubits(),
                code_bits: len,
            });
        }
        if u_template.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: u_template.len(),
            });
        }
        let dim = 1usize << len;
        let entries = state.density_entries().ok_or_else(|| {
            Error::InvalidConfig("bitwise decoder needs the density backend".into())
        })?;
        let mut rho = DMatrix::<f64>::from_fn(dim, dim, |r, c| entries[r * dim + c].re);
        let mut u_hat: Vec<u8> = u_template.to_vec();
        for pos in 0..len {
            if !self.info_mask[pos] {
                continue;
            }
            let proj = self.projector(pos, &u_hat);
            let p0 = (&*proj * &rho).trace().clamp(0.0, 1.0);
            let guess0 = rng.gen::<f64>() < p0;
            u_hat[pos] = if guess0 { 0 } else { 1 };
            let pi: DMatrix<f64> = if guess0 {
                (*proj).clone()
            } else {
                DMatrix::identity(dim, dim) - &*proj
            };
            rho = &pi * rho * &pi;
            let tr = rho.trace().max(1e-300);
            rho /= tr;
        }
        let x_hat = polar_encode(&u_hat, self.n)?;
        Ok(DecodeTrace {
            u_hat,
            x_hat,
            bit_error_probs: vec![None; len],
        })
    }
}

/// One-shot wrapper over [`BitwiseHelstromDecoder`] taking a per-trial code
/// spec (frozen values included in the rules).
pub fn bitwise_helstrom_decode<R: Rng>(
    state: &QuantumState,
    spec: &CodeSpec,
    w: &ChannelParams,
    rng: &mut R,
) -> Result<DecodeTrace, Error> {
    let info_set: Vec<usize> = spec.info_positions().iter().map(|&p| p + 1).collect();
    let template: Vec<u8> = spec
        .rules
        .iter()
        .map(|r| if *r == BitRule::Frozen1 { 1 } else { 0 })
        .collect();
    BitwiseHelstromDecoder::new(*w, spec.n, &info_set)?.decode(state, &template, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::psc_to_bscq;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ch(d: f64, g: f64) -> ChannelParams {
        ChannelParams::new(d, Complex64::new(g, 0.0)).unwrap()
    }

    #[test]
    fn encode_matches_kernel_matrix() {
        // length-4 transform rows: e_1 G_4 = (1,0,0,0), e_2 G_4 = (1,0,1,0),
        // e_3 G_4 = (1,1,0,0), e_4 G_4 = (1,1,1,1)
        let rows = [[1, 0, 0, 0], [1, 0, 1, 0], [1, 1, 0, 0], [1, 1, 1, 1]];
        for (i, row) in rows.iter().enumerate() {
            let mut u = vec![0u8; 4];
            u[i] = 1;
            let x = polar_encode(&u, 2).unwrap();
            assert_eq!(x, row.to_vec());
        }
        assert_eq!(polar_encode(&[0; 4], 2).unwrap(), vec![0; 4]);
        assert!(polar_encode(&[0; 3], 2).is_err());
    }

    #[test]
    fn encode_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..=5 {
            for _ in 0..20 {
                let u: Vec<u8> = (0..1usize << n).map(|_| rng.gen_range(0..2u8)).collect();
                let x = polar_encode(&u, n).unwrap();
                let back = polar_encode(&x, n).unwrap();
                assert_eq!(u, back);
            }
        }
    }

    #[test]
    fn noiseless_roundtrip() {
        // a noiseless channel decodes any word exactly in sampled mode
        let w = ch(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in 1..=3usize {
            let len = 1 << n;
            for _ in 0..10 {
                let u: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
                let x = polar_encode(&u, n).unwrap();
                let mut state = QuantumState::sample_channel_output(&w, &x, &mut rng).unwrap();
                let spec = CodeSpec::new(n, vec![BitRule::Info; len]).unwrap();
                let trace = decode_sampled(&mut state, &spec, &w, &mut rng).unwrap();
                assert_eq!(trace.u_hat, u);
                assert_eq!(trace.x_hat, x);
            }
        }
    }

    #[test]
    fn all_frozen_roundtrip_returns_state() {
        // with every bit frozen the decode is a pure unitary round trip up
        // to the known output-order flips
        let w = ch(0.12, 0.2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 2usize;
        let len = 1usize << n;
        let u: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
        let x = polar_encode(&u, n).unwrap();
        let state0 = QuantumState::sample_channel_output(&w, &x, &mut rng).unwrap();
        let mut state = state0.clone();
        let rules: Vec<BitRule> = u.iter().map(|&b| BitRule::frozen(b)).collect();
        let spec = CodeSpec::new(n, rules).unwrap();
        let trace = decode_sampled(&mut state, &spec, &w, &mut rng).unwrap();
        assert_eq!(trace.u_hat, u);
        // the net effect of the base-case flips is σx^{x_k} on each qubit
        for (q, &bit) in x.iter().enumerate() {
            state.apply_x_conditional(bit, q).unwrap();
        }
        assert!(state.distance(&state0) < 1e-10);
    }

    #[test]
    fn genie_matches_exact_de_small() {
        // n = 1, 2: genie per-bit errors equal exact enumeration
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=2usize {
            for _ in 0..5 {
                let d: f64 = rng.gen_range(0.02..0.45);
                let g: f64 = rng.gen_range(0.0..(d * (1.0 - d)).sqrt() * 0.98);
                let w = ch(d, g);
                let de = crate::de::polar_de_exact(w, n, 1 << 16).unwrap();
                let len = 1usize << n;
                let state = QuantumState::exact_channel_output(&w, &vec![0; len]).unwrap();
                let spec = CodeSpec::new(n, vec![BitRule::Info; len]).unwrap();
                let mut s = state.clone();
                let trace = decode_genie(&mut s, &spec, &w, &vec![0; len]).unwrap();
                for (i, e) in de.iter().enumerate() {
                    let got = trace.bit_error_probs[i].unwrap();
                    assert_abs_diff_eq!(got, *e, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn genie_codeword_invariance() {
        // designed per-bit errors must not depend on the transmitted word
        let w = ch(0.1, 0.21);
        let n = 2usize;
        let len = 1usize << n;
        let spec = CodeSpec::new(n, vec![BitRule::Info; len]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);

        let mut zero_state = QuantumState::exact_channel_output(&w, &vec![0; len]).unwrap();
        let base = decode_genie(&mut zero_state, &spec, &w, &vec![0; len]).unwrap();
        for _ in 0..8 {
            let u: Vec<u8> = (0..len).map(|_| rng.gen_range(0..2u8)).collect();
            let x = polar_encode(&u, n).unwrap();
            let mut state = QuantumState::exact_channel_output(&w, &x).unwrap();
            let trace = decode_genie(&mut state, &spec, &w, &u).unwrap();
            for (a, b) in base.bit_error_probs.iter().zip(&trace.bit_error_probs) {
                assert_abs_diff_eq!(a.unwrap(), b.unwrap(), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn psc_genie_anchor_depth2() {
        // the depth-2 pure-state anchor reproduced through the BSCQ decoder
        let theta = 1.0707963267949f64;
        let w = psc_to_bscq(theta).unwrap();
        let state = QuantumState::exact_channel_output(&w, &[0; 4]).unwrap();
        let spec = CodeSpec::new(2, vec![BitRule::Info; 4]).unwrap();
        let mut s = state.clone();
        let trace = decode_genie(&mut s, &spec, &w, &[0; 4]).unwrap();
        assert_abs_diff_eq!(
            trace.bit_error_probs[3].unwrap(),
            0.000698252791343723,
            epsilon = 1e-9
        );
    }

    #[test]
    fn frozen_monotonicity() {
        // freezing one more bit never hurts the remaining information bits
        let w = ch(0.08, 0.15);
        let n = 2usize;
        let len = 1usize << n;
        let all_info = CodeSpec::new(n, vec![BitRule::Info; len]).unwrap();
        let state = QuantumState::exact_channel_output(&w, &vec![0; len]).unwrap();
        let mut s = state.clone();
        let base = decode_genie(&mut s, &all_info, &w, &vec![0; len]).unwrap();

        for frozen_pos in 0..len - 1 {
            let mut rules = vec![BitRule::Info; len];
            rules[frozen_pos] = BitRule::Frozen0;
            let spec = CodeSpec::new(n, rules).unwrap();
            let mut s = state.clone();
            let trace = decode_genie(&mut s, &spec, &w, &vec![0; len]).unwrap();
            for i in 0..len {
                if i == frozen_pos {
                    assert!(trace.bit_error_probs[i].is_none());
                } else {
                    // genie already conditions on correct decisions, so the
                    // designed channels coincide
                    assert_abs_diff_eq!(
                        trace.bit_error_probs[i].unwrap(),
                        base.bit_error_probs[i].unwrap(),
                        epsilon = 1e-9
                    );
                }
            }
        }
    }

    #[test]
    fn bitwise_helstrom_basics() {
        let w = ch(0.1, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);

        // all-frozen code: no measurements, no errors
        let spec = CodeSpec::new(1, vec![BitRule::Frozen1, BitRule::Frozen0]).unwrap();
        let x = polar_encode(&[1, 0], 1).unwrap();
        let state = QuantumState::exact_channel_output(&w, &x).unwrap();
        let trace = bitwise_helstrom_decode(&state, &spec, &w, &mut rng).unwrap();
        assert_eq!(trace.u_hat, vec![1, 0]);

        // single-bit code: the bit error rate is the Helstrom error δ
        let dec = BitwiseHelstromDecoder::new(w, 0, &[1]).unwrap();
        let trials = 4000;
        let mut wrong = 0usize;
        for _ in 0..trials {
            let u = vec![rng.gen_range(0..2u8)];
            let state = QuantumState::exact_channel_output(&w, &u).unwrap();
            let trace = dec.decode(&state, &[0], &mut rng).unwrap();
            wrong += (trace.u_hat != u) as usize;
        }
        let p = wrong as f64 / trials as f64;
        let sigma = (0.1f64 * 0.9 / trials as f64).sqrt();
        assert!((p - 0.1).abs() < 4.0 * sigma);
    }
}
