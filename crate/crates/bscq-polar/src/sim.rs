//! N-qubit simulation engine.
//!
//! Two backends share one interface: an exact density matrix (4^N entries,
//! capped at N = 8) and a sampled pure state vector (2^N amplitudes, capped
//! at N = 20). Qubit 0 is the most significant bit of a basis index, so the
//! basis state `|b_0 b_1 … b_{N-1}⟩` has index `b_0·2^{N-1} + … + b_{N-1}`.
//!
//! Two-qubit gates are applied by direct index arithmetic; the explicit swap
//! operator is kept as a test oracle for the swap-embed-swap definition of
//! embedded node unitaries. Conditional gates are block-diagonal in the
//! computational basis of a set of reliability qubits: the 4×4 block acting
//! on the target pair is selected by the classical configuration of those
//! qubits, which is how deferred measurements are realized.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::ChannelParams;
use crate::combine::{bit_matrix_raw, raw_of};
use crate::Error;

pub const MAX_DENSITY_QUBITS: usize = 8;
pub const MAX_PURE_QUBITS: usize = 20;

type C = Complex64;

/// A 4×4 complex gate in row-major form.
pub type Gate4 = [[C; 4]; 4];

pub(crate) fn real_gate(rows: [[f64; 4]; 4]) -> Gate4 {
    let mut g = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = C::new(rows[i][j], 0.0);
        }
    }
    g
}

pub(crate) fn adjoint4(g: &Gate4) -> Gate4 {
    let mut a = [[C::new(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = g[j][i].conj();
        }
    }
    a
}

/// Per-qubit bookkeeping for deferred measurements: the ordered reliability
/// qubit list `L(i)` and one channel-parameter entry per computational
/// configuration of those qubits. The first list element is the most
/// significant bit of the configuration index.
#[derive(Clone, Debug)]
pub struct ConditionalParams {
    pub owner: usize,
    pub reliability: Vec<usize>,
    pub entries: Vec<CondEntry>,
}

/// One conditional channel entry in canonical form plus the σx/σz output
/// relabelings (`flip`, `sign`) that reconstruct the convention the quantum
/// state actually follows.
#[derive(Clone, Copy, Debug)]
pub struct CondEntry {
    pub delta: f64,
    pub gamma: f64,
    pub flip: bool,
    pub sign: bool,
}

impl CondEntry {
    pub fn fresh(w: &ChannelParams) -> Self {
        Self {
            delta: w.delta(),
            gamma: w.gamma(),
            flip: false,
            sign: false,
        }
    }

    /// Parameters in the uncanonicalized state convention.
    pub fn raw(&self) -> (f64, f64) {
        raw_of(self.delta, self.gamma, self.flip, self.sign)
    }
}

impl ConditionalParams {
    /// Fresh channel output: empty reliability list.
    pub fn fresh(owner: usize, w: &ChannelParams) -> Self {
        Self {
            owner,
            reliability: Vec::new(),
            entries: vec![CondEntry::fresh(w)],
        }
    }

    pub fn config_count(&self) -> usize {
        self.entries.len()
    }

    /// Validity: entry count matches the list length, lists disjoint from
    /// the owner, all parameters valid.
    pub fn validate(&self) -> Result<(), Error> {
        if self.entries.len() != 1 << self.reliability.len() {
            return Err(Error::LengthMismatch {
                expected: 1 << self.reliability.len(),
                got: self.entries.len(),
            });
        }
        let mut seen = std::collections::HashSet::new();
        for &q in &self.reliability {
            if q == self.owner || !seen.insert(q) {
                return Err(Error::OverlappingIndices(q));
            }
        }
        for e in &self.entries {
            if !(0.0..=0.5 + 1e-12).contains(&e.delta) || e.gamma < -1e-12 {
                return Err(Error::DeltaOutOfRange(e.delta));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
enum StateData {
    Pure(Vec<C>),
    Density(Vec<C>),
}

/// An N-qubit register on one of the two backends.
#[derive(Clone, Debug)]
pub struct QuantumState {
    n: usize,
    dim: usize,
    data: StateData,
}

impl QuantumState {
    /// Tensor product of per-qubit eigenstates of `W(x_i)`, each eigenstate
    /// drawn with probability equal to its eigenvalue.
    pub fn sample_channel_output<R: Rng>(
        w: &ChannelParams,
        codeword: &[u8],
        rng: &mut R,
    ) -> Result<Self, Error> {
        let n = codeword.len();
        if n > MAX_PURE_QUBITS {
            return Err(Error::ResourceGuard(format!(
                "{n} qubits exceeds the pure-state cap {MAX_PURE_QUBITS}"
            )));
        }
        // eigendecomposition of ρ(δ,γ): λ± = (1 ± r)/2 with r = √(a² + 4γ²)
        let (d, g) = (w.delta(), w.gamma());
        let a = 1.0 - 2.0 * d;
        let r = (a * a + 4.0 * g * g).sqrt();
        let lam_hi = (1.0 + r) / 2.0;
        // |hi⟩ ∝ (γ, λ_hi − δ) spans the large-eigenvalue direction
        let hi = normalize2([g, (1.0 + r) / 2.0 - d]);
        let lo = [-hi[1], hi[0]];
        let mut kets = Vec::with_capacity(n);
        for &x in codeword {
            let pick_hi = rng.gen::<f64>() < lam_hi;
            let mut v = if pick_hi { hi } else { lo };
            if x & 1 == 1 {
                v = [v[1], v[0]]; // σx conjugation of the channel output
            }
            kets.push(v);
        }
        let mut amps = vec![C::new(0.0, 0.0); 1 << n];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let mut prod = 1.0;
            for (q, ket) in kets.iter().enumerate() {
                prod *= ket[(idx >> (n - 1 - q)) & 1];
            }
            *amp = C::new(prod, 0.0);
        }
        Ok(Self {
            n,
            dim: 1 << n,
            data: StateData::Pure(amps),
        })
    }

    /// Exact mixed output `⊗_i W(x_i)` on the density backend.
    pub fn exact_channel_output(w: &ChannelParams, codeword: &[u8]) -> Result<Self, Error> {
        let n = codeword.len();
        if n > MAX_DENSITY_QUBITS {
            return Err(Error::ResourceGuard(format!(
                "{n} qubits exceeds the density cap {MAX_DENSITY_QUBITS}"
            )));
        }
        let dim = 1usize << n;
        let (d, g) = (w.delta(), w.gamma());
        let rho = [[d, g], [g, 1.0 - d]];
        let mut data = vec![C::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                let mut prod = 1.0;
                for (q, &x) in codeword.iter().enumerate() {
                    let flip = (x & 1) as usize;
                    let rb = ((r >> (n - 1 - q)) & 1) ^ flip;
                    let cb = ((c >> (n - 1 - q)) & 1) ^ flip;
                    prod *= rho[rb][cb];
                }
                data[r * dim + c] = C::new(prod, 0.0);
            }
        }
        Ok(Self {
            n,
            dim,
            data: StateData::Density(data),
        })
    }

    pub fn from_amplitudes(amps: Vec<C>) -> Result<Self, Error> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two(),
                got: dim,
            });
        }
        Ok(Self {
            n: dim.trailing_zeros() as usize,
            dim,
            data: StateData::Pure(amps),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn is_density(&self) -> bool {
        matches!(self.data, StateData::Density(_))
    }

    pub fn amplitudes(&self) -> Option<&[C]> {
        match &self.data {
            StateData::Pure(a) => Some(a),
            StateData::Density(_) => None,
        }
    }

    /// Promote to the density backend (outer product for pure states).
    pub fn to_density(&self) -> Result<Self, Error> {
        if self.n > MAX_DENSITY_QUBITS {
            return Err(Error::ResourceGuard(format!(
                "{} qubits exceeds the density cap {MAX_DENSITY_QUBITS}",
                self.n
            )));
        }
        let data = match &self.data {
            StateData::Density(d) => d.clone(),
            StateData::Pure(a) => {
                let mut d = vec![C::new(0.0, 0.0); self.dim * self.dim];
                for r in 0..self.dim {
                    for c in 0..self.dim {
                        d[r * self.dim + c] = a[r] * a[c].conj();
                    }
                }
                d
            }
        };
        Ok(Self {
            n: self.n,
            dim: self.dim,
            data: StateData::Density(data),
        })
    }

    pub fn density_entries(&self) -> Option<&[C]> {
        match &self.data {
            StateData::Density(d) => Some(d),
            StateData::Pure(_) => None,
        }
    }

    fn bitpos(&self, q: usize) -> usize {
        self.n - 1 - q
    }

    fn check_qubit(&self, q: usize) -> Result<(), Error> {
        if q >= self.n {
            Err(Error::QubitOutOfRange(q, self.n))
        } else {
            Ok(())
        }
    }

    /// Norm (pure) or trace (density); 1 up to numerical drift.
    pub fn weight(&self) -> f64 {
        match &self.data {
            StateData::Pure(a) => a.iter().map(|x| x.norm_sqr()).sum(),
            StateData::Density(d) => (0..self.dim).map(|r| d[r * self.dim + r].re).sum(),
        }
    }

    /// Apply σx on qubit `q`.
    pub fn apply_x(&mut self, q: usize) -> Result<(), Error> {
        self.check_qubit(q)?;
        let mask = 1usize << self.bitpos(q);
        match &mut self.data {
            StateData::Pure(a) => {
                for idx in 0..self.dim {
                    if idx & mask == 0 {
                        a.swap(idx, idx | mask);
                    }
                }
            }
            StateData::Density(d) => {
                let dim = self.dim;
                for r in 0..dim {
                    if r & mask == 0 {
                        for c in 0..dim {
                            d.swap(r * dim + c, (r | mask) * dim + c);
                        }
                    }
                }
                for c in 0..dim {
                    if c & mask == 0 {
                        for r in 0..dim {
                            d.swap(r * dim + c, r * dim + (c | mask));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply σx on qubit `q` iff the classical `bit` is set.
    pub fn apply_x_conditional(&mut self, bit: u8, q: usize) -> Result<(), Error> {
        if bit & 1 == 1 {
            self.apply_x(q)?;
        }
        Ok(())
    }

    /// Apply a single-qubit gate.
    pub fn apply_one_qubit(&mut self, g: &[[C; 2]; 2], q: usize) -> Result<(), Error> {
        self.check_qubit(q)?;
        let mask = 1usize << self.bitpos(q);
        let dim = self.dim;
        match &mut self.data {
            StateData::Pure(a) => {
                for idx in 0..dim {
                    if idx & mask == 0 {
                        let x0 = a[idx];
                        let x1 = a[idx | mask];
                        a[idx] = g[0][0] * x0 + g[0][1] * x1;
                        a[idx | mask] = g[1][0] * x0 + g[1][1] * x1;
                    }
                }
            }
            StateData::Density(d) => {
                for c in 0..dim {
                    for r in 0..dim {
                        if r & mask == 0 {
                            let x0 = d[r * dim + c];
                            let x1 = d[(r | mask) * dim + c];
                            d[r * dim + c] = g[0][0] * x0 + g[0][1] * x1;
                            d[(r | mask) * dim + c] = g[1][0] * x0 + g[1][1] * x1;
                        }
                    }
                }
                for r in 0..dim {
                    for c in 0..dim {
                        if c & mask == 0 {
                            let x0 = d[r * dim + c];
                            let x1 = d[r * dim + (c | mask)];
                            d[r * dim + c] = g[0][0].conj() * x0 + g[0][1].conj() * x1;
                            d[r * dim + (c | mask)] = g[1][0].conj() * x0 + g[1][1].conj() * x1;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Apply a 4×4 gate on qubits `(i, j)` with `i` the more significant
    /// index of the gate's 2-bit basis.
    pub fn apply_two_qubit(&mut self, g: &Gate4, i: usize, j: usize) -> Result<(), Error> {
        self.apply_conditional_two_qubit(i, j, &[], &[], std::slice::from_ref(g))
    }

    /// Apply a conditional two-qubit gate: the block acting on `(i, j)` is
    /// `blocks[(m_i << l_j) | m_j]` where `m_i`, `m_j` are the computational
    /// configurations of the `rel_i` and `rel_j` qubits (first list entry is
    /// the most significant bit).
    pub fn apply_conditional_two_qubit(
        &mut self,
        i: usize,
        j: usize,
        rel_i: &[usize],
        rel_j: &[usize],
        blocks: &[Gate4],
    ) -> Result<(), Error> {
        self.check_qubit(i)?;
        self.check_qubit(j)?;
        if i == j {
            return Err(Error::OverlappingIndices(i));
        }
        for &q in rel_i.iter().chain(rel_j) {
            self.check_qubit(q)?;
            if q == i || q == j {
                return Err(Error::OverlappingIndices(q));
            }
        }
        let expected = 1usize << (rel_i.len() + rel_j.len());
        if blocks.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                got: blocks.len(),
            });
        }
        let mi_mask = 1usize << self.bitpos(i);
        let mj_mask = 1usize << self.bitpos(j);
        let pair_mask = mi_mask | mj_mask;
        let n = self.n;
        let config_of = |idx: usize| -> usize {
            let mut m = 0usize;
            for &q in rel_i {
                m = (m << 1) | ((idx >> (n - 1 - q)) & 1);
            }
            for &q in rel_j {
                m = (m << 1) | ((idx >> (n - 1 - q)) & 1);
            }
            m
        };
        let dim = self.dim;
        // `conj` applies the entrywise conjugate of the block: the right
        // factor of ρ ↦ UρU† acts on the column index as Σ_l ρ_{rl} conj(U_{cl})
        let kernel = |a: &mut [C], offset: usize, stride: usize, conj: bool, sel: usize| {
            let g = &blocks[sel];
            let mut xs = [C::new(0.0, 0.0); 4];
            for (k, x) in xs.iter_mut().enumerate() {
                let bits = ((k >> 1) * mi_mask) | ((k & 1) * mj_mask);
                *x = a[offset + stride * bits];
            }
            for (r, row) in g.iter().enumerate() {
                let bits = ((r >> 1) * mi_mask) | ((r & 1) * mj_mask);
                let mut acc = C::new(0.0, 0.0);
                for (&entry, &x) in row.iter().zip(&xs) {
                    acc += if conj { entry.conj() } else { entry } * x;
                }
                a[offset + stride * bits] = acc;
            }
        };
        match &mut self.data {
            StateData::Pure(a) => {
                for idx in 0..dim {
                    if idx & pair_mask == 0 {
                        kernel(a, idx, 1, false, config_of(idx));
                    }
                }
            }
            StateData::Density(d) => {
                // U ρ: transform the row index within every column
                for r in 0..dim {
                    if r & pair_mask == 0 {
                        let sel = config_of(r);
                        for c in 0..dim {
                            kernel(d, r * dim + c, dim, false, sel);
                        }
                    }
                }
                // (Uρ) U†: transform the column index within every row
                for c in 0..dim {
                    if c & pair_mask == 0 {
                        let sel = config_of(c);
                        for r in 0..dim {
                            kernel(d, r * dim + c, 1, true, sel);
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// The conditional bit-node unitary: on reliability configuration
    /// `(m_i, m_j)` the pair `(i, j)` sees `V` built from the entries'
    /// parameters, with recorded `flip`/`sign` relabelings entering as the
    /// σx/σz adjustment of those parameters.
    pub fn apply_conditional_bitnode(
        &mut self,
        i: usize,
        j: usize,
        cp_i: &ConditionalParams,
        cp_j: &ConditionalParams,
        adjoint: bool,
    ) -> Result<(), Error> {
        let blocks = bitnode_blocks(cp_i, cp_j, adjoint);
        self.apply_conditional_two_qubit(i, j, &cp_i.reliability, &cp_j.reliability, &blocks)
    }

    /// Permute qubits: qubit `k` receives the state of qubit `perm[k]`.
    pub fn apply_swap(&mut self, perm: &[usize]) -> Result<(), Error> {
        if perm.len() != self.n {
            return Err(Error::InvalidPermutation);
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(Error::InvalidPermutation);
            }
            seen[p] = true;
        }
        let n = self.n;
        let source_index = |idx: usize| -> usize {
            let mut src = 0usize;
            for (k, &p) in perm.iter().enumerate() {
                let bit = (idx >> (n - 1 - k)) & 1;
                src |= bit << (n - 1 - p);
            }
            src
        };
        match &mut self.data {
            StateData::Pure(a) => {
                let old = a.clone();
                for (idx, amp) in a.iter_mut().enumerate() {
                    *amp = old[source_index(idx)];
                }
            }
            StateData::Density(d) => {
                let old = d.clone();
                let dim = self.dim;
                for r in 0..dim {
                    for c in 0..dim {
                        d[r * dim + c] = old[source_index(r) * dim + source_index(c)];
                    }
                }
            }
        }
        Ok(())
    }

    /// Probability that measuring qubit `q` in the computational basis gives
    /// `bit`, without collapsing.
    pub fn prob_of(&self, q: usize, bit: u8) -> Result<f64, Error> {
        self.check_qubit(q)?;
        let mask = 1usize << self.bitpos(q);
        let want = (bit & 1) as usize * mask;
        let p = match &self.data {
            StateData::Pure(a) => a
                .iter()
                .enumerate()
                .filter(|(idx, _)| idx & mask == want)
                .map(|(_, x)| x.norm_sqr())
                .sum(),
            StateData::Density(d) => (0..self.dim)
                .filter(|r| r & mask == want)
                .map(|r| d[r * self.dim + r].re)
                .sum(),
        };
        Ok(p)
    }

    /// Born-rule measurement of qubit `q` with collapse and renormalization.
    pub fn measure_qubit<R: Rng>(&mut self, q: usize, rng: &mut R) -> Result<(u8, f64), Error> {
        let p0 = self.prob_of(q, 0)?;
        let outcome = if rng.gen::<f64>() < p0 { 0u8 } else { 1u8 };
        let p = self.project(q, outcome)?;
        Ok((outcome, p))
    }

    /// Genie measurement: project qubit `q` onto `outcome`, renormalize, and
    /// return the branch probability. Errors if the branch is (numerically)
    /// impossible.
    pub fn measure_forced(&mut self, q: usize, outcome: u8) -> Result<f64, Error> {
        let p = self.prob_of(q, outcome)?;
        if p < 1e-15 {
            return Err(Error::ForcedOutcomeImpossible(p));
        }
        self.project(q, outcome)?;
        Ok(p)
    }

    fn project(&mut self, q: usize, outcome: u8) -> Result<f64, Error> {
        let p = self.prob_of(q, outcome)?;
        let mask = 1usize << self.bitpos(q);
        let want = (outcome & 1) as usize * mask;
        match &mut self.data {
            StateData::Pure(a) => {
                let norm = p.sqrt().max(1e-300);
                for (idx, amp) in a.iter_mut().enumerate() {
                    if idx & mask == want {
                        *amp /= norm;
                    } else {
                        *amp = C::new(0.0, 0.0);
                    }
                }
            }
            StateData::Density(d) => {
                let dim = self.dim;
                let pn = p.max(1e-300);
                for r in 0..dim {
                    for c in 0..dim {
                        if r & mask == want && c & mask == want {
                            d[r * dim + c] /= pn;
                        } else {
                            d[r * dim + c] = C::new(0.0, 0.0);
                        }
                    }
                }
            }
        }
        Ok(p)
    }

    /// L2 distance between two states' raw data (testing aid; both must be
    /// on the same backend).
    pub fn distance(&self, other: &QuantumState) -> f64 {
        let (a, b) = match (&self.data, &other.data) {
            (StateData::Pure(a), StateData::Pure(b)) => (a, b),
            (StateData::Density(a), StateData::Density(b)) => (a, b),
            _ => return f64::INFINITY,
        };
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn normalize2(v: [f64; 2]) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    if n < 1e-300 {
        [0.0, 1.0]
    } else {
        [v[0] / n, v[1] / n]
    }
}

/// Block table of a conditional bit-node unitary from two conditional
/// parameter lists, ordered `(m_i, m_j)` lexicographically.
pub(crate) fn bitnode_blocks(
    cp_i: &ConditionalParams,
    cp_j: &ConditionalParams,
    adjoint: bool,
) -> Vec<Gate4> {
    let mut blocks = Vec::with_capacity(cp_i.entries.len() * cp_j.entries.len());
    for ei in &cp_i.entries {
        let (di, gi) = ei.raw();
        for ej in &cp_j.entries {
            let (dj, gj) = ej.raw();
            let g = real_gate(bit_matrix_raw(di, gi, dj, gj));
            blocks.push(if adjoint { adjoint4(&g) } else { g });
        }
    }
    blocks
}
