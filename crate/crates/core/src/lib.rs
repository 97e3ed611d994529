//! Quantum programs as a first-order IR, a sparse state-vector simulator,
//! and a rewrite pass that turns any program into an error-corrected one.
pub mod corpus;
pub mod format;
pub mod ir;
pub mod noise;
pub mod qec;
pub mod report;
pub mod sim;
pub mod transform;
