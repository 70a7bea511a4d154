//! Design and decoding laboratory for polar codes on symmetric binary-input
//! classical-quantum (CQ) channels.
//!
//! The crate has three layers:
//!
//! - **Channel layer** ([`channel`], [`combine`]): canonical qubit BSCQ
//!   channels `(δ, γ)`, Helstrom discrimination, and the paired-measurement
//!   check-node (`⊞`) and bit-node (`⊛`) combining rules with their 4×4
//!   unitaries `C` and `V`.
//! - **Design layer** ([`de`]): Monte-Carlo density evolution over bags of
//!   channel parameters, the polar effective-channel recursion, exact
//!   enumeration for small depths, and frozen-set selection under union-bound
//!   or non-commutative union-bound targets.
//! - **Decoder layer** ([`sim`], [`decoder`], [`psc`]): an N-qubit simulator
//!   (exact density matrix or sampled state vector), the deferred-measurement
//!   successive-cancellation decoder built from conditional node unitaries,
//!   its pure-state-channel specialization, and a successive bitwise Helstrom
//!   baseline.
//!
//! Runnable walkthroughs for each capability live in `examples/`; the thin
//! `bscq-polar` binary drives the same library functions from the command
//! line and writes CSV/JSON artifacts.

pub mod channel;
pub mod cli;
pub mod combine;
pub mod de;
pub mod decoder;
pub mod psc;
pub mod sim;
pub mod stats;

pub use channel::{
    binary_entropy, helstrom, psc_to_bscq, ChannelParams, DensityMatrix, HelstromResult,
};
pub use combine::{
    bit_combine, bit_unitary, check_combine, check_unitary, Branch, BranchUpdate, NodeKind,
    NodeUnitary,
};
pub use de::{
    bag_bit_update, bag_check_update, mf_design, polar_de, polar_de_exact, select_design, Bag,
    DesignResult, SelectMode,
};
pub use decoder::{
    bitwise_helstrom_decode, decode, decode_genie, decode_sampled, polar_encode, BitRule,
    BitwiseHelstromDecoder, CodeSpec, DecodeMode, DecodeTrace,
};
pub use psc::{psc_de_exact, psc_decode};
pub use sim::{ConditionalParams, QuantumState};

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("delta {0} outside [0, 1]")]
    DeltaOutOfRange(f64),
    #[error("gamma magnitude {gamma} exceeds positivity bound {bound}")]
    GammaTooLarge { gamma: f64, bound: f64 },
    #[error("theta {0} outside [0, pi/2]")]
    ThetaOutOfRange(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not Hermitian within tolerance")]
    NotHermitian,
    #[error("matrix trace is not 1 within tolerance")]
    NotUnitTrace,
    #[error("matrix has an eigenvalue below -1e-10")]
    NotPositive,
    #[error("invalid permutation of qubit indices")]
    InvalidPermutation,
    #[error("qubit index {0} out of range for {1} qubits")]
    QubitOutOfRange(usize, usize),
    #[error("index sets overlap: qubit {0} appears twice")]
    OverlappingIndices(usize),
    #[error("cannot force an outcome of probability {0:.3e} < 1e-15")]
    ForcedOutcomeImpossible(f64),
    #[error("resource guard: {0}")]
    ResourceGuard(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state has {state_qubits} qubits but the code needs {code_bits}")]
    StateSpecMismatch {
        state_qubits: usize,
        code_bits: usize,
    },
    #[error("requested K={k} exceeds block length N={n}")]
    KTooLarge { k: usize, n: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
