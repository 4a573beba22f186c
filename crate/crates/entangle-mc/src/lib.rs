//! Monte Carlo survey of how two-qubit gates change entanglement of
//! formation when initial states are drawn uniformly from the space of all
//! (pure and mixed) two-qubit states.
//!
//! The crate is organized bottom-up:
//!
//! - [`matrix`]: 4x4 complex arithmetic and a Hermitian Jacobi eigensolver;
//! - [`state`]: validated pure states and density matrices in the fixed
//!   |00>, |01>, |10>, |11> basis;
//! - [`measures`]: concurrence, entanglement of formation, entropies,
//!   participation ratio and the PPT separability verdict;
//! - [`gates`]: the CNOT and rotation-block gate family with ΔE bookkeeping;
//! - [`sampling`]: seeded product-measure and Fubini-Study samplers plus
//!   rejection-based conditioning;
//! - [`experiments`]: sharded estimators reproducing each survey figure;
//! - [`stats`]: moment accumulators and Kolmogorov-Smirnov helpers.
//!
//! Estimators run their logical shards on rayon by default; building with
//! `--no-default-features` swaps in a sequential driver that produces
//! bit-identical outputs.

pub mod experiments;
pub mod gates;
pub mod matrix;
pub mod measures;
pub mod sampling;
pub mod state;
pub mod stats;

pub use gates::{parse_gate, DeltaE, Gate, GateLabel};
pub use matrix::{hermitian_eigen, matmul, psd_sqrt, Matrix4, Spectrum4};
pub use measures::{
    binary_entropy, concurrence, entanglement_of_formation, eof_from_concurrence,
    is_ppt_separable, participation_ratio, q_moment, spin_flip, von_neumann_entropy,
    EntanglementValue,
};
pub use sampling::{
    haar_unitary, sample_conditioned, sample_mixed, sample_pure, sample_state, uniform_simplex,
    Band, Ensemble, RngStream, SampleError,
};
pub use state::{parse_state_text, DensityMatrix, PureState, StateError, StateParseError};
