//! Dense pure-state linear algebra for small qubit registers: tensor products,
//! single-qubit operators, Bell-basis measurement and two-outcome Kraus
//! measurement.

mod kraus;
mod matrix;
mod measure;
mod rng;
mod state;

pub use kraus::{KrausBranch, KrausPair, KRAUS_TOLERANCE};
pub use matrix::Matrix2;
pub use measure::{
    bell_branches, bell_measure, generalized_measure, kraus_branches, BellBranch, BellOutcome,
    KrausOutcome, PauliCorrection, ZERO_PROBABILITY,
};
pub(crate) use measure::generalized_measure_into;
pub use rng::{derive_seed, RandomSource};
pub use state::{fidelity, PureState, NORM_TOLERANCE};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 24;
