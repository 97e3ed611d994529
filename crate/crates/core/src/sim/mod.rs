//! Sparse state-vector simulation.
//!
//! [`StateVector`] keeps only nonzero amplitudes, keyed by basis
//! configuration. Programs are evaluated either by seeded sampling
//! ([`evaluate_run`]) or by enumerating every measurement branch
//! ([`evaluate_exact`]).

mod apply;
mod eval;
mod rng;
mod rotation;
mod state;

use std::fmt;

use thiserror::Error;

use crate::ir::{Name, ValidationReport};

pub use apply::apply_unitary;
pub use eval::{
    evaluate_exact, evaluate_run, run_program, Machine, NoiseHook, Noiseless, OutcomeDistribution,
};
pub use rng::SimRng;
pub use rotation::{Amplitude, GateClass, Pauli, Rotation};
pub use state::{BasisState, StateVector, DEFAULT_PRUNE, MAX_LIVE_QUBITS};

/// Simulator-level qubit identifier, assigned from a monotone counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(pub u64);

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("qubit {0} is not allocated")]
    UnallocatedQubit(QubitId),
    #[error("name `{0}` is not bound")]
    UnboundName(Name),
    #[error("ancilla {0} was not returned to its initial state")]
    AncillaNotReturned(QubitId),
    #[error("qubit {0} is not in a basis state and cannot be released")]
    NotInBasisState(QubitId),
    #[error("conditional branch acts on its control qubit {0}")]
    ControlTouchedByBranch(QubitId),
    #[error("swap of {0} with itself")]
    SwapSameQubit(QubitId),
    #[error("more than {MAX_LIVE_QUBITS} simultaneously allocated qubits")]
    TooManyQubits,
    #[error("matrix is not unitary")]
    NonUnitary,
    #[error("exact evaluation does not support stochastic noise sites")]
    StochasticNoisePresent,
    #[error("states are defined over different qubit registers")]
    MismatchedRegisters,
    #[error("program is invalid: {0}")]
    Invalid(ValidationReport),
}
