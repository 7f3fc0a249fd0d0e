//! Time-optimal quantum navigation under an energy resource bound.
//!
//! A fixed background Hamiltonian `H0` drags the state along its free
//! evolution; a control Hamiltonian with constant `tr(Hc^2) = k` steers it.
//! Given the two endpoint states this crate computes the minimum crossing
//! time, the control realizing it, the full evolution, and the diagnostics
//! that certify the solution.
//!
//! ```
//! use zermelo::models::oscillator_problem;
//! use zermelo::protocol::{full_unitary, solve, SolverSettings};
//!
//! // Ground state to excited state of a two-level system at omega = 1.
//! let problem = oscillator_problem(1.0, 4.5).unwrap();
//! let solution = solve(&problem, &SolverSettings::default()).unwrap();
//! assert!((solution.delta_t - std::f64::consts::PI / 3.0).abs() < 1e-12);
//!
//! let u = full_unitary(&problem, &solution, solution.delta_t);
//! let arrived = u.apply(problem.psi_i()).unwrap();
//! assert!((arrived.fidelity(problem.psi_f()).unwrap() - 1.0).abs() < 1e-10);
//! ```
//!
//! Module map:
//!
//! - [`linalg`] — validated Hermitian/unitary/state newtypes, spectral
//!   decomposition, operator exponentials;
//! - [`protocol`] — the four-step solve: minimum time, intermediate target,
//!   control construction, full unitary;
//! - [`dynamics`] — closed-form and integrator-based propagation, conserved
//!   quantities, the travel-time norm, adiabaticity reports;
//! - [`models`] — physical presets (oscillator, Heisenberg dimer Bell swap,
//!   Cu(II) acetate) and the Zeeman realizability / k-quantization analysis;
//! - [`scenario`] — the declarative JSON scenario runner behind the CLI.

pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod models;
pub mod protocol;
pub mod scenario;

// Compile the guide's code blocks as doc-tests so the book cannot drift out
// of sync with the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/protocol.md")]
    mod protocol {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
    #[doc = include_str!("../../../book/src/quantization.md")]
    mod quantization {}
    #[doc = include_str!("../../../book/src/dimers.md")]
    mod dimers {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
