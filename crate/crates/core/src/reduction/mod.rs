//! Circuit qubit reduction.
//!
//! Fixing some qubits to classical constants turns one circuit into a
//! family of smaller kernels, one per constant value, each needing half the
//! state-vector memory per removed qubit. Two methods are tried in order:
//!
//! 1. [`specialize_syntactic`]: constant propagation over the gate list.
//!    Works when the fixed qubits only ever change under gates whose
//!    controls are themselves fixed.
//! 2. [`extract_permutation`] + [`synthesize_from_permutation`]: for
//!    NOT-family circuits, tabulate the reversible function the circuit
//!    computes on the free qubits and resynthesize it from scratch.

mod semantic;
mod syntactic;
mod synthesis;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

use rayon::prelude::*;
use thiserror::Error;

use crate::ir::{Circuit, Gate, Layout, QubitRef};
use crate::logic::LogicError;
use crate::source::print_source;

pub use semantic::{extract_permutation, Extraction};
pub use syntactic::specialize_syntactic;
pub use synthesis::synthesize_from_permutation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReductionError {
    #[error("gate {gate_index}: not reducible by constant propagation: {reason}")]
    NotReducible { gate_index: usize, reason: String },
    #[error("gate {gate_index}: `{kind}` is not a NOT-family gate; semantic reduction needs a basis-permuting circuit")]
    UnsupportedForSemanticReduction {
        gate_index: usize,
        kind: crate::ir::GateKind,
    },
    #[error(
        "qubit {qubit} does not end in a constant state: its output depends on the free qubits"
    )]
    EntangledSpecialization { qubit: usize },
    #[error("not a permutation: {0}")]
    NotAPermutation(String),
    #[error("{free} free qubits exceed the semantic reduction cap of {cap}")]
    TooManyFreeQubits { free: usize, cap: usize },
    #[error("invalid specialization: {0}")]
    InvalidSpecialization(String),
    #[error(transparent)]
    Logic(#[from] LogicError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Syntactic,
    Semantic,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Syntactic => "syntactic",
            Method::Semantic => "semantic",
        })
    }
}

/// Classical values for a set of qubits (by flat index).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Specialization {
    assignments: BTreeMap<usize, bool>,
}

impl Specialization {
    pub fn new<I>(assignments: I) -> Result<Specialization, ReductionError>
    where
        I: IntoIterator<Item = (usize, bool)>,
    {
        let mut map = BTreeMap::new();
        for (q, bit) in assignments {
            if map.insert(q, bit).is_some() {
                return Err(ReductionError::InvalidSpecialization(format!(
                    "qubit {q} assigned twice"
                )));
            }
        }
        Ok(Specialization { assignments: map })
    }

    /// Pairs `qubits[i]` with `bits[i]`.
    pub fn from_bits(qubits: &[usize], bits: &[bool]) -> Result<Specialization, ReductionError> {
        if qubits.len() != bits.len() {
            return Err(ReductionError::InvalidSpecialization(format!(
                "{} qubits but a {}-bit value",
                qubits.len(),
                bits.len()
            )));
        }
        Specialization::new(qubits.iter().copied().zip(bits.iter().copied()))
    }

    pub fn assignments(&self) -> &BTreeMap<usize, bool> {
        &self.assignments
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    fn check(&self, n_qubits: usize) -> Result<(), ReductionError> {
        match self.assignments.keys().find(|&&q| q >= n_qubits) {
            Some(q) => Err(ReductionError::InvalidSpecialization(format!(
                "qubit {q} does not exist in a {n_qubits}-qubit circuit"
            ))),
            None => Ok(()),
        }
    }

    /// Unassigned qubits in ascending order.
    fn free_qubits(&self, n_qubits: usize) -> Vec<usize> {
        (0..n_qubits)
            .filter(|q| !self.assignments.contains_key(q))
            .collect()
    }
}

/// A circuit specialized to one constant value of the removed qubits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedKernel {
    /// Over the free qubits only, densely reindexed.
    pub circuit: Circuit,
    /// `index_map[new] = old`.
    pub index_map: Vec<usize>,
    /// Output value of every specialized qubit.
    pub final_constants: BTreeMap<usize, bool>,
    pub method: Method,
    pub warnings: Vec<String>,
}

impl ReducedKernel {
    pub fn new_index(&self, old: usize) -> Option<usize> {
        self.index_map.binary_search(&old).ok()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionConfig {
    /// Largest free-qubit count the semantic path will tabulate (2^cap runs).
    pub semantic_cap: usize,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig { semantic_cap: 20 }
    }
}

/// Qubits that are never the target of any gate.
pub fn find_control_only_qubits(c: &Circuit) -> BTreeSet<usize> {
    let mut out: BTreeSet<usize> = (0..c.n_qubits()).collect();
    for g in c.gates() {
        for t in &g.targets {
            if let Some(i) = c.index_of(t) {
                out.remove(&i);
            }
        }
    }
    out
}

/// Builds the kernel circuit from gates already rewritten to new indices.
/// When the free qubits are exactly a set of whole registers, those
/// registers are kept and refs are written by name.
fn kernel_circuit(original: &Circuit, free: &[usize], gates: Vec<Gate>) -> Circuit {
    let layout = original.layout();
    let free_set: BTreeSet<usize> = free.iter().copied().collect();
    let whole: Vec<&(String, usize, usize)> = layout
        .registers
        .iter()
        .filter(|(_, base, size)| (*base..base + size).all(|q| free_set.contains(&q)))
        .collect();
    let covered: usize = whole.iter().map(|(_, _, size)| size).sum();
    if covered == free.len() && !whole.is_empty() {
        let kernel = Circuit::with_registers(whole.iter().map(|(l, _, s)| (l.clone(), *s)))
            .expect("labels come from a valid circuit");
        let kl = kernel.layout();
        let named: Vec<Gate> = gates
            .iter()
            .map(|g| {
                g.map_qubits(|q| match q.index().and_then(|i| kl.name_of(i)) {
                    Some(n) => n,
                    None => q.clone(),
                })
            })
            .collect();
        return kernel.with_gates(named);
    }
    let mut kernel = Circuit::anonymous(free.len());
    for g in gates {
        kernel.push(g);
    }
    kernel
}

/// Outcome of one value in [`generate_kernels`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelOutcome {
    pub value: Vec<bool>,
    pub result: Result<ReducedKernel, ReductionError>,
    /// Why the syntactic method was skipped, if it was.
    pub syntactic_failure: Option<ReductionError>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelReport {
    pub qubits: Vec<usize>,
    pub outcomes: Vec<KernelOutcome>,
}

impl KernelReport {
    pub fn kernels(&self) -> impl Iterator<Item = &ReducedKernel> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = &KernelOutcome> {
        self.outcomes.iter().filter(|o| o.result.is_err())
    }

    pub fn all_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }
}

/// One kernel per value: syntactic reduction first, falling back to the
/// semantic method when constant propagation gets stuck. Values are
/// processed independently and reported in input order.
pub fn generate_kernels(
    c: &Circuit,
    qubits: &[usize],
    values: &[Vec<bool>],
    cfg: &ReductionConfig,
) -> KernelReport {
    let single_empty = [Vec::new()];
    let values = if qubits.is_empty() && values.is_empty() {
        &single_empty[..]
    } else {
        values
    };
    let outcomes = values
        .par_iter()
        .map(|value| {
            let spec = match Specialization::from_bits(qubits, value) {
                Ok(s) => s,
                Err(e) => {
                    return KernelOutcome {
                        value: value.clone(),
                        result: Err(e),
                        syntactic_failure: None,
                    }
                }
            };
            match specialize_syntactic(c, &spec) {
                Ok(k) => KernelOutcome {
                    value: value.clone(),
                    result: Ok(k),
                    syntactic_failure: None,
                },
                Err(e @ ReductionError::NotReducible { .. }) => {
                    let result = extract_permutation(c, &spec, cfg.semantic_cap).and_then(|ex| {
                        let synthesized = synthesize_from_permutation(&ex.permutation)?;
                        let gates = synthesized.into_gates();
                        let mut warnings = Vec::new();
                        if !ex.restored {
                            warnings.push(
                                "specialized qubits do not return to their input values"
                                    .to_string(),
                            );
                        }
                        Ok(ReducedKernel {
                            circuit: kernel_circuit(c, &ex.free_qubits, gates),
                            index_map: ex.free_qubits,
                            final_constants: ex.final_constants,
                            method: Method::Semantic,
                            warnings,
                        })
                    });
                    KernelOutcome {
                        value: value.clone(),
                        result,
                        syntactic_failure: Some(e),
                    }
                }
                Err(e) => KernelOutcome {
                    value: value.clone(),
                    result: Err(e),
                    syntactic_failure: None,
                },
            }
        })
        .collect();
    KernelReport {
        qubits: qubits.to_vec(),
        outcomes,
    }
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|ch| match ch {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

/// `<base>.k<value>.fqt`
pub fn kernel_file_name(base: &str, value: &[bool]) -> String {
    format!("{base}.k{}.fqt", format_bits(value))
}

pub fn manifest_file_name(base: &str) -> String {
    format!("{base}.manifest")
}

fn describe(layout: &Layout, q: usize) -> String {
    match layout.name_of(q) {
        Some(QubitRef::Named { label, offset }) => format!("{label}[{offset}]"),
        _ => q.to_string(),
    }
}

/// Kernel source with a comment header recording where it came from.
pub fn kernel_source(
    original: &Circuit,
    qubits: &[usize],
    value: &[bool],
    kernel: &ReducedKernel,
) -> String {
    let layout = original.layout();
    let mut out = String::new();
    let fixed: Vec<String> = qubits
        .iter()
        .zip(value)
        .map(|(&q, &b)| format!("{}={}", describe(&layout, q), b as u8))
        .collect();
    let _ = writeln!(out, "# specialized: {}", fixed.join(" "));
    let _ = writeln!(out, "# method: {}", kernel.method);
    let outs: Vec<String> = kernel
        .final_constants
        .iter()
        .map(|(&q, &b)| format!("{}={}", describe(&layout, q), b as u8))
        .collect();
    let _ = writeln!(out, "# outputs: {}", outs.join(" "));
    for (new, &old) in kernel.index_map.iter().enumerate() {
        let _ = writeln!(out, "# qubit {new} <- {}", describe(&layout, old));
    }
    for w in &kernel.warnings {
        let _ = writeln!(out, "# warning: {w}");
    }
    out.push_str(&print_source(&kernel.circuit));
    out
}

/// One line per value: `<value> <file> <method>` (or `error: ...`).
pub fn manifest(original: &Circuit, base: &str, report: &KernelReport) -> String {
    let layout = original.layout();
    let names: Vec<String> = report
        .qubits
        .iter()
        .map(|&q| describe(&layout, q))
        .collect();
    let mut out = format!("# qubits: {}\n", names.join(","));
    for o in &report.outcomes {
        let bits = format_bits(&o.value);
        match &o.result {
            Ok(k) => {
                let _ = writeln!(
                    out,
                    "{bits} {} {}",
                    kernel_file_name(base, &o.value),
                    k.method
                );
            }
            Err(e) => {
                let _ = writeln!(out, "{bits} - error: {e}");
            }
        }
    }
    out
}
