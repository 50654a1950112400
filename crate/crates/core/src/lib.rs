//! Quantum circuit toolkit: a register-aware circuit IR, the `.fqt` source
//! format, lowering passes down to the integer QP instruction format, a
//! state-vector and a computational-basis simulator, qubit reduction by
//! constant specialization, reference adder circuits and a unit-test
//! harness.
//!
//! Basis indices are little-endian throughout: qubit `i` is bit `i`.

pub mod harness;
pub mod ir;
pub mod library;
pub mod logic;
pub mod passes;
pub mod qp;
pub mod reduction;
pub mod source;
pub mod statevector;

pub use ir::{Circuit, Control, Gate, GateKind, Layout, Polarity, QubitRef};
pub use passes::{compile, lower, verify, PassConfig};
pub use qp::{emit_qp, parse_qp, QpProgram};
pub use source::{parse_source, print_source};
