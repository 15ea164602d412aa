//! Dynamical weight reduction of Pauli measurements to weight 2.
//!
//! A Hermitian Pauli operator of weight `w` can be measured with nothing
//! but one- and two-qubit Pauli measurements, at the cost of auxiliary
//! qubits and circuit depth. This crate compiles such measurement
//! sequences onto device connectivity graphs and verifies them against
//! independent simulation oracles.
//!
//! - [`pauli`]: signed Pauli strings, products, commutation, destabilizers.
//! - [`graph`]: connectivity graphs, canonical scheme graphs, spanning
//!   trees with prescribed leaves.
//! - [`circuit`]: the layered measurement IR, metrics, rescheduling and
//!   the text format.
//! - [`compile`]: the general recipe, the constant-space / depth-5 /
//!   depth-6 schemes, the interpolating family, rebasing and the CX demo.
//! - [`tableau`]: symbolic stabilizer simulation, sign masks, Pauli
//!   corrections, Heisenberg propagation.
//! - [`oracle`]: dense brute-force verification over outcome strings.
//!
//! ```
//! use dwr2::compile::compile_depth5;
//! use dwr2::tableau::verify_dwr;
//!
//! let circuit = compile_depth5(4).unwrap();
//! let report = verify_dwr(&circuit, &"ZZZZ".parse().unwrap()).unwrap();
//! assert!(report.ok);
//! assert_eq!(circuit.metrics().v, 20);
//! ```

pub mod circuit;
pub mod compile;
pub mod graph;
pub mod oracle;
pub mod pauli;
pub mod tableau;

pub use circuit::{Circuit, MeasureOp, Metrics, RotGate};
pub use compile::{
    compile_constant_space, compile_depth5, compile_depth6, compile_general,
    compile_interpolating, cx_via_measurements, rebase, rebase_with_rotations,
};
pub use graph::{ConnectivityGraph, TreeLayout};
pub use pauli::{Letter, PauliString};
pub use tableau::{verify_dwr, OutcomeExpr, SymbolicTableau, VerificationReport};

// The guide chapters double as doctests so their code stays compilable.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/pauli-strings.md")]
    mod pauli_strings {}
    #[doc = include_str!("../../../book/src/connectivity.md")]
    mod connectivity {}
    #[doc = include_str!("../../../book/src/schemes.md")]
    mod schemes {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/gates-from-measurements.md")]
    mod gates_from_measurements {}
}
