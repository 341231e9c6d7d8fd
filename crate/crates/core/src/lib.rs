//! Symmetrization of parameterized quantum circuits over subgroups of the
//! symmetric group, with cost and expressivity metrics.
//!
//! Qubit `k` is bit `k` of a basis index throughout.

pub mod catalog;
pub mod error;
pub mod metrics;
pub mod pauli;
pub mod permgroup;
pub mod pipeline;
pub mod rep;
pub mod sim;
pub mod synth;
pub mod twirl;

#[cfg(test)]
mod testutil;

pub use catalog::{build_ansatz, generator_of, AnsatzTemplate, GateDef, GateKind, Param, NUM_ANSATZES};
pub use error::{Error, Result};
pub use metrics::{
    entangling_capability, expressibility, haar_entanglement, haar_pdf, norm_metric, FidelityHistogram,
    MetricsRecord, NormMode,
};
pub use pauli::{HermitianOp, Pauli, PauliTerm};
pub use permgroup::{enumerate_subgroups, sample_subgroups, Permutation, Subgroup};
pub use sim::{run, StateVector};
pub use synth::{metrics_of, peephole, synthesize, synthesize_with_fallback, Circuit, CircuitMetrics, SynthMode};
pub use twirl::{twirl_ansatz, twirl_generator, TwirledGate};
pub use pipeline::{evaluate_cell, report, run_sweep, Report, SweepConfig};
