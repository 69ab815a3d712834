//! Compile arbitrary single-qubit Markovian dynamics into one-ancilla quantum
//! circuits and certify the result against an exact superoperator oracle.
//!
//! Given a Lindblad generator (a 3x3 PSD GKS matrix plus a 2x2 Hamiltonian),
//! an evolution time `t` and a target accuracy `eps`, the pipeline
//!
//! 1. spectrally decomposes the generator into canonical one-parameter
//!    dissipative semigroups conjugated by SU(2) frames ([`generator`]),
//! 2. recombines them with Suzuki-Lie-Trotter product formulas sized to meet
//!    `eps` ([`trotter`]),
//! 3. convex-splits each canonical factor channel into two quasi-extreme
//!    channels and synthesises their two-qubit dilations into CNOT + rotation
//!    circuits ([`channel`], [`circuit`]),
//!
//! and [`pipeline`] wires the steps together, runs the resulting channel
//! program on a density-matrix simulator and validates it against `e^{tL}`.
//!
//! ```
//! use qmarkov_core::circuit::RunMode;
//! use qmarkov_core::generator::{canonical_gks, GeneratorSpec};
//! use qmarkov_core::pipeline::{compile, validate, JobSpec};
//! use qmarkov_core::qmatrix::CMat;
//!
//! // a single canonical dissipative component, no Hamiltonian
//! let job = JobSpec {
//!     generator: GeneratorSpec::new(canonical_gks(0.5), CMat::zeros(2)).unwrap(),
//!     t: 0.8,
//!     eps: 1e-3,
//!     mode: RunMode::Deterministic,
//!     trajectories: 0,
//!     seed: 0,
//!     k_override: None,
//! };
//! let (program, plan) = compile(&job).unwrap();
//! assert_eq!(plan.reps, 1); // one semigroup factor is exact, no splitting
//! assert!(program.gate_count() > 0);
//! let report = validate(&job).unwrap();
//! assert!(report.bound_satisfied);
//! ```

// index loops mirror the matrix formulas throughout; iterator rewrites would
// obscure them
#![allow(clippy::needless_range_loop)]

pub mod channel;
pub mod circuit;
pub mod generator;
pub mod pipeline;
pub mod qmatrix;
#[cfg(test)]
pub(crate) mod testutil;
pub mod trotter;

pub use channel::{CanonicalChannel, QuasiExtremeMember, QuasiExtremePair};
pub use circuit::{ChannelProgram, Gate, JointState, RunMode, Stage};
pub use generator::{GeneratorDecomposition, GeneratorSpec};
pub use pipeline::{compile, parse_jobspec, validate, JobSpec, ValidationReport};
pub use qmatrix::{BlochAffine, CMat, DensityMatrix, Superoperator, C64};
pub use trotter::{Factor, TrotterPlan};
