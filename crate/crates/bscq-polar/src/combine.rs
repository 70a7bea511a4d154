//! Paired-measurement channel combining.
//!
//! Check-node combining `W ⊞ W'` sees the joint state
//! `½ Σ_z' W(z⊕z') ⊗ W'(z')`; bit-node combining `W ⊛ W'` sees
//! `W(z) ⊗ W'(z)`. In both cases a two-outcome paired measurement of the
//! reliability splits the combined channel into two qubit BSCQ branches
//! `(p_j, δ_j, γ_j)` while achieving the Helstrom error of the joint
//! discrimination. The measurement is realized by a 4×4 unitary (the
//! parameter-free `C` for check nodes, the parameter-dependent `V` for bit
//! nodes) that moves the decision into the first qubit and the reliability
//! outcome into the second.
//!
//! The bit-node Helstrom matrix `M = ρ⊗ρ' − (σx⊗σx)(ρ⊗ρ')(σx⊗σx)`
//! anticommutes with conjugation by `σx⊗σx`; in the Bell-like basis
//! `(|00⟩±|11⟩)/√2, (|01⟩±|10⟩)/√2` it reduces to an off-diagonal 2×2 block
//! `K`, so its positive eigenpairs come straight out of a 2×2 SVD. That is
//! both faster and better conditioned than a general 4×4 eigensolver, and it
//! yields a deterministic completion basis in the degenerate (pure or
//! useless) cases.

use nalgebra::Matrix4;
use num_complex::Complex64;

use crate::channel::ChannelParams;

/// One branch of a combining step: reached with probability `p`, leaving a
/// canonicalized qubit channel. `flip`/`sign` record the σx / σz output
/// relabelings applied by canonicalization; the decoder consumes them when it
/// rebuilds the uncanonicalized state convention.
#[derive(Clone, Copy, Debug)]
pub struct Branch {
    pub p: f64,
    pub params: ChannelParams,
    pub flip: bool,
    pub sign: bool,
}

impl Branch {
    /// Helstrom error of this branch's channel.
    pub fn error_rate(&self) -> f64 {
        self.params.error_rate()
    }

    /// The branch channel in the uncanonicalized convention the decoder's
    /// quantum state actually follows.
    pub fn raw(&self) -> (f64, f64) {
        raw_of(
            self.params.delta(),
            self.params.gamma(),
            self.flip,
            self.sign,
        )
    }
}

/// Undo the canonicalization gauge: `δ_raw = flip ? 1-δ : δ`,
/// `γ_raw = sign ? -γ : γ`.
pub(crate) fn raw_of(delta: f64, gamma: f64, flip: bool, sign: bool) -> (f64, f64) {
    (
        if flip { 1.0 - delta } else { delta },
        if sign { -gamma } else { gamma },
    )
}

/// The two branches produced by one node-combining step.
#[derive(Clone, Copy, Debug)]
pub struct BranchUpdate {
    pub branches: [Branch; 2],
}

impl BranchUpdate {
    /// Mean Helstrom error over the two branches; equals the brute-force
    /// joint Helstrom error of the combined channel.
    pub fn expected_error(&self) -> f64 {
        self.branches.iter().map(|b| b.p * b.error_rate()).sum()
    }
}

/// Which node unitary a [`NodeUnitary`] holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Check,
    Bit,
}

/// A 4×4 combining unitary together with its provenance.
#[derive(Clone, Debug)]
pub struct NodeUnitary {
    pub matrix: Matrix4<Complex64>,
    pub kind: NodeKind,
    /// `(δ, γ, δ', γ')` the matrix was built from (bit nodes only).
    pub source_params: Option<(f64, f64, f64, f64)>,
}

/// Raw (uncanonicalized) branch data as produced by the combining formulas.
#[derive(Clone, Copy, Debug)]
pub(crate) struct RawBranch {
    pub p: f64,
    pub delta_raw: f64,
    pub gamma_raw: f64,
}

/// Check-node branches for arbitrary real parameters.
///
/// With `s = δδ' + (1-δ)(1-δ')` the printed formulas reduce to
/// `p₀ = ½ + 2γγ'`, `δ₀ = (s/2 + γγ')/p₀`, `γ₀ = (γ+γ')/(2p₀)` and the
/// mirrored expressions for branch 1.
pub(crate) fn check_branches_raw(d: f64, g: f64, d2: f64, g2: f64) -> [RawBranch; 2] {
    let s = d * d2 + (1.0 - d) * (1.0 - d2);
    let gg = g * g2;
    let p0 = 0.5 + 2.0 * gg;
    let p1 = 0.5 - 2.0 * gg;
    let branch = |p: f64, num_d: f64, num_g: f64| {
        if p > 1e-300 {
            RawBranch {
                p: p.clamp(0.0, 1.0),
                delta_raw: (num_d / p).clamp(0.0, 1.0),
                gamma_raw: num_g / p,
            }
        } else {
            RawBranch {
                p: 0.0,
                delta_raw: 0.5,
                gamma_raw: 0.0,
            }
        }
    };
    [
        branch(p0, s / 2.0 + gg, (g + g2) / 2.0),
        branch(p1, s / 2.0 - gg, (g - g2) / 2.0),
    ]
}

/// Positive-eigenspace pair `(v₀', v₁')` of the bit-node Helstrom matrix,
/// with their eigenvalues, for arbitrary real parameters.
///
/// Degenerate cases fall out of the SVD: a pure⊗pure input gives σ₁ = 0 and
/// the second vector completes the basis with zero probability weight; a
/// fully useless input (`M = 0`) yields the computational-basis fallback.
pub(crate) fn bit_vectors_raw(d: f64, g: f64, d2: f64, g2: f64) -> ([[f64; 4]; 2], [f64; 2]) {
    let w = 1.0 - d - d2;
    let u = d - d2;
    let a = 1.0 - 2.0 * d;
    let a2 = 1.0 - 2.0 * d2;
    let k = [[-w, a2 * g - a * g2], [-(a * g2 + a2 * g), u]];
    let (us, sv, vs) = svd2(k);
    let mut vecs = [[0.0; 4]; 2];
    for j in 0..2 {
        let (u0, u1) = (us[0][j], us[1][j]);
        let (v0, v1) = (vs[0][j], vs[1][j]);
        // reassemble from the Bell-like sector basis
        let mut v = [
            (u0 + v0) / 2.0,
            (u1 + v1) / 2.0,
            (u1 - v1) / 2.0,
            (u0 - v0) / 2.0,
        ];
        // phase gauge: first non-negligible component positive
        if let Some(&lead) = v.iter().find(|x| x.abs() > 1e-12) {
            if lead < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        vecs[j] = v;
    }
    (vecs, sv)
}

fn xx_image(v: &[f64; 4]) -> [f64; 4] {
    [v[3], v[2], v[1], v[0]]
}

/// `ρ(δ,γ) ⊗ ρ(δ',γ')` as a real 4×4 array.
fn joint_density(d: f64, g: f64, d2: f64, g2: f64) -> [[f64; 4]; 4] {
    let r = [[d, g], [g, 1.0 - d]];
    let r2 = [[d2, g2], [g2, 1.0 - d2]];
    let mut a = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            a[i][j] = r[i >> 1][j >> 1] * r2[i & 1][j & 1];
        }
    }
    a
}

fn quad_form(a: &[[f64; 4]; 4], x: &[f64; 4], y: &[f64; 4]) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += x[i] * a[i][j] * y[j];
        }
    }
    acc
}

/// Bit-node branches for arbitrary real parameters.
pub(crate) fn bit_branches_raw(d: f64, g: f64, d2: f64, g2: f64) -> [RawBranch; 2] {
    let a = joint_density(d, g, d2, g2);
    let (vecs, _) = bit_vectors_raw(d, g, d2, g2);
    let mut out = [RawBranch {
        p: 0.0,
        delta_raw: 0.5,
        gamma_raw: 0.0,
    }; 2];
    for j in 0..2 {
        let v = vecs[j];
        let xv = xx_image(&v);
        let q0 = quad_form(&a, &v, &v);
        let q1 = quad_form(&a, &xv, &xv);
        let p = q0 + q1;
        if p > 1e-14 {
            out[j] = RawBranch {
                p: p.clamp(0.0, 1.0),
                delta_raw: (q0 / p).clamp(0.0, 1.0),
                gamma_raw: quad_form(&a, &xv, &v) / p,
            };
        }
    }
    out
}

/// Canonicalize raw branches. The σx relabeling is assigned structurally so
/// that it is identical for both branches of one node (ties at δ_raw = ½
/// cannot make the two branches disagree): bit-node branches always sit on
/// the flipped side, check-node branches flip iff the inputs' conventions
/// agree.
pub(crate) fn canonicalize(raw: [RawBranch; 2], flip: bool) -> BranchUpdate {
    let mk = |b: &RawBranch| {
        if b.p <= 0.0 {
            return Branch {
                p: 0.0,
                params: ChannelParams::from_raw_real(if flip { 1.0 } else { 0.0 }, 0.0),
                flip,
                sign: false,
            };
        }
        let delta = if flip { 1.0 - b.delta_raw } else { b.delta_raw };
        let sign = b.gamma_raw < 0.0;
        Branch {
            p: b.p,
            params: ChannelParams::from_raw_real(delta.clamp(0.0, 0.5), b.gamma_raw.abs()),
            flip,
            sign,
        }
    };
    BranchUpdate {
        branches: [mk(&raw[0]), mk(&raw[1])],
    }
}

/// Check-node combining `W ⊞ W'` of two canonical channels.
pub fn check_combine(w: &ChannelParams, w2: &ChannelParams) -> BranchUpdate {
    canonicalize(
        check_branches_raw(w.delta(), w.gamma(), w2.delta(), w2.gamma()),
        true,
    )
}

/// Bit-node combining `W ⊛ W'` of two canonical channels.
pub fn bit_combine(w: &ChannelParams, w2: &ChannelParams) -> BranchUpdate {
    canonicalize(
        bit_branches_raw(w.delta(), w.gamma(), w2.delta(), w2.gamma()),
        true,
    )
}

fn real_mat4(rows: [[f64; 4]; 4]) -> Matrix4<Complex64> {
    Matrix4::from_fn(|i, j| Complex64::new(rows[i][j], 0.0))
}

/// The constant check-node unitary
/// `C = 1/√2 [1 0 0 1; -1 0 0 1; 0 1 1 0; 0 1 -1 0]`.
///
/// Its rows are `|v₀⟩, |v₁⟩, (σx⊗I)|v₀⟩, (σx⊗I)|v₁⟩` with
/// `|v₀⟩ = (|00⟩+|11⟩)/√2`; it does not depend on the channel parameters.
pub fn check_unitary() -> NodeUnitary {
    NodeUnitary {
        matrix: real_mat4(check_matrix()),
        kind: NodeKind::Check,
        source_params: None,
    }
}

pub(crate) fn check_matrix() -> [[f64; 4]; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [
        [h, 0.0, 0.0, h],
        [-h, 0.0, 0.0, h],
        [0.0, h, h, 0.0],
        [0.0, h, -h, 0.0],
    ]
}

/// Bit-node unitary rows built from the same eigenvector selection as the
/// branch formulas; parameters may be any valid real pair, including the
/// uncanonicalized convention the decoder tracks.
pub(crate) fn bit_matrix_raw(d: f64, g: f64, d2: f64, g2: f64) -> [[f64; 4]; 4] {
    let (vecs, _) = bit_vectors_raw(d, g, d2, g2);
    [vecs[0], vecs[1], xx_image(&vecs[0]), xx_image(&vecs[1])]
}

/// Bit-node unitary `V(δ,γ,δ',γ')` with rows
/// `|v₀'⟩, |v₁'⟩, (σx⊗σx)|v₀'⟩, (σx⊗σx)|v₁'⟩`.
///
/// The eigenvector ordering (larger positive eigenvalue first) and phase
/// gauge (leading component positive) are shared with [`bit_combine`], so
/// the unitary and the branch bookkeeping always agree.
pub fn bit_unitary(w: &ChannelParams, w2: &ChannelParams) -> NodeUnitary {
    NodeUnitary {
        matrix: real_mat4(bit_matrix_raw(w.delta(), w.gamma(), w2.delta(), w2.gamma())),
        kind: NodeKind::Bit,
        source_params: Some((w.delta(), w.gamma(), w2.delta(), w2.gamma())),
    }
}

/// Robust closed-form SVD of a real 2×2 matrix: `K = U · diag(σ) · Vᵀ` with
/// `σ₀ ≥ σ₁ ≥ 0` and deterministic factors.
pub(crate) fn svd2(k: [[f64; 2]; 2]) -> ([[f64; 2]; 2], [f64; 2], [[f64; 2]; 2]) {
    let e = (k[0][0] + k[1][1]) / 2.0;
    let f = (k[0][0] - k[1][1]) / 2.0;
    let g = (k[1][0] + k[0][1]) / 2.0;
    let h = (k[1][0] - k[0][1]) / 2.0;
    let q = e.hypot(h);
    let r = f.hypot(g);

    let rot = |t: f64| -> [[f64; 2]; 2] { [[t.cos(), -t.sin()], [t.sin(), t.cos()]] };
    let scale = q.max(r);
    let (mut us, mut vs);
    if r <= 1e-15 * scale.max(1e-300) && q > 0.0 {
        // K is proportional to a rotation by a2; the singular values tie and
        // any orthogonal W gives a valid factorization U = R(a2)·W, V = W.
        // W = R(π/4) is the symmetric limit basis, which keeps coherence
        // intact when combining with an exactly-useless partner.
        let a2 = h.atan2(e);
        us = rot(a2 + std::f64::consts::FRAC_PI_4);
        vs = rot(std::f64::consts::FRAC_PI_4);
    } else {
        let a1 = g.atan2(f);
        let a2 = h.atan2(e);
        us = rot((a1 + a2) / 2.0);
        vs = rot((a1 - a2) / 2.0);
    }
    // diagonalize, absorbing signs into U's columns
    let mut sv = [0.0; 2];
    for j in 0..2 {
        let mut diag = 0.0;
        for i in 0..2 {
            for l in 0..2 {
                diag += us[i][j] * k[i][l] * vs[l][j];
            }
        }
        if diag < 0.0 {
            us[0][j] = -us[0][j];
            us[1][j] = -us[1][j];
        }
        sv[j] = diag.abs();
    }
    if sv[0] < sv[1] {
        sv.swap(0, 1);
        for row in 0..2 {
            us[row].swap(0, 1);
            vs[row].swap(0, 1);
        }
    }
    (us, sv, vs)
}
