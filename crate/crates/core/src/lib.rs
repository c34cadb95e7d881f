//! Numerical toolkit for Hamiltonian simulation of time-periodic (Floquet)
//! systems.
//!
//! The library turns a driven Hamiltonian, given by its Fourier components
//! `H(t) = sum_m H_m e^{-i m omega t}`, into time-independent dynamics on a
//! truncated Floquet-Hilbert space, amplifies the physical component with a
//! symmetry stage plus oblivious amplitude amplification, and certifies the
//! whole chain against an adaptive time-ordered integrator:
//!
//! * [`hamiltonian`]: Fourier data, LCU decompositions, energy scales;
//! * [`sambe`]: truncation orders and the effective / linear-potential /
//!   periodic-boundary operators;
//! * [`propagator`]: the ODE reference oracle and exact exponential action;
//! * [`amplification`]: the two-stage amplification circuits and the
//!   adiabatic-like and long-time pipelines;
//! * [`blockenc`]: block-encoding oracles, walk operators, query degrees;
//! * [`bounds`]: closed-form error bounds and resource formulas;
//! * [`verify`]: bound-vs-measurement sweep suites;
//! * [`cli`]: config files, artifact writers, exit codes (binary: `fqs`).

pub mod amplification;
pub mod blockenc;
pub mod bounds;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod presets;
pub mod propagator;
pub mod sambe;
pub mod verify;

pub use error::{FqsError, FqsResult};
