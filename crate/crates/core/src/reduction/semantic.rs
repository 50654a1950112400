use std::collections::BTreeMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::ir::Circuit;
use crate::logic::{BasisState, LogicError, LogicProgram};

use super::{ReductionError, Specialization};

/// The reversible function a NOT-family circuit computes on its free
/// qubits once the specialized ones are fixed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Extraction {
    /// `permutation[v]` is the free-qubit output for free-qubit input `v`
    /// (bit `i` of `v` is `free_qubits[i]`).
    pub permutation: Vec<usize>,
    pub free_qubits: Vec<usize>,
    pub final_constants: BTreeMap<usize, bool>,
    /// Whether every specialized qubit ends where it started.
    pub restored: bool,
}

type Packed = SmallVec<[u64; 1]>;

fn pack(bits: impl Iterator<Item = bool>) -> Packed {
    let mut out = Packed::new();
    for (i, b) in bits.enumerate() {
        if i % 64 == 0 {
            out.push(0);
        }
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

/// Tabulates the circuit over all 2^m free inputs. Fails when the circuit
/// is not NOT-family, when m exceeds `cap`, or when a specialized qubit's
/// output depends on the free input.
pub fn extract_permutation(
    c: &Circuit,
    s: &Specialization,
    cap: usize,
) -> Result<Extraction, ReductionError> {
    s.check(c.n_qubits())?;
    let program = LogicProgram::compile(c).map_err(|e| match e {
        LogicError::NonLogicGate { kind, gate_index } => {
            ReductionError::UnsupportedForSemanticReduction { gate_index, kind }
        }
        other => ReductionError::Logic(other),
    })?;
    let n = c.n_qubits();
    let free = s.free_qubits(n);
    let m = free.len();
    if m > cap || m >= usize::BITS as usize {
        return Err(ReductionError::TooManyFreeQubits { free: m, cap });
    }
    let assigned: Vec<(usize, bool)> = s.assignments().iter().map(|(&q, &b)| (q, b)).collect();

    let eval = |v: usize| -> (usize, Packed) {
        if n <= 64 {
            let mut bits = 0u64;
            for &(q, b) in &assigned {
                bits |= (b as u64) << q;
            }
            for (i, &q) in free.iter().enumerate() {
                bits |= (((v >> i) & 1) as u64) << q;
            }
            let out = program.run_u64(bits).expect("n <= 64");
            let free_out = free.iter().enumerate().fold(0usize, |acc, (i, &q)| {
                acc | ((((out >> q) & 1) as usize) << i)
            });
            (
                free_out,
                pack(assigned.iter().map(|&(q, _)| (out >> q) & 1 == 1)),
            )
        } else {
            let mut state = BasisState::zeros(n);
            for &(q, b) in &assigned {
                state.set(q, b);
            }
            for (i, &q) in free.iter().enumerate() {
                state.set(q, (v >> i) & 1 == 1);
            }
            program.run(&mut state);
            let free_out = free
                .iter()
                .enumerate()
                .fold(0usize, |acc, (i, &q)| acc | ((state.get(q) as usize) << i));
            (free_out, pack(assigned.iter().map(|&(q, _)| state.get(q))))
        }
    };

    let rows: Vec<(usize, Packed)> = (0..1usize << m).into_par_iter().map(eval).collect();
    let reference = rows[0].1.clone();
    if let Some((_, differing)) = rows.iter().find(|(_, a)| *a != reference) {
        let pos = (0..assigned.len())
            .find(|&i| (differing[i / 64] ^ reference[i / 64]) >> (i % 64) & 1 == 1)
            .expect("packed vectors differ");
        return Err(ReductionError::EntangledSpecialization {
            qubit: assigned[pos].0,
        });
    }
    let final_constants: BTreeMap<usize, bool> = assigned
        .iter()
        .enumerate()
        .map(|(i, &(q, _))| (q, (reference[i / 64] >> (i % 64)) & 1 == 1))
        .collect();
    let restored = &final_constants == s.assignments();
    Ok(Extraction {
        permutation: rows.into_iter().map(|(f, _)| f).collect(),
        free_qubits: free,
        final_constants,
        restored,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Gate, GateKind};

    #[test]
    fn empty_circuit_is_identity() {
        let c = Circuit::anonymous(3);
        let s = Specialization::new([(1, true)]).unwrap();
        let ex = extract_permutation(&c, &s, 20).unwrap();
        assert_eq!(ex.permutation, vec![0, 1, 2, 3]);
        assert_eq!(ex.free_qubits, vec![0, 2]);
        assert!(ex.restored);
    }

    #[test]
    fn entangled_specialization() {
        // a = 0, b = 1; CX(b -> a) makes a's output equal b
        let c = Circuit::from_gates(vec![Gate::cx(1, 0)]);
        let s = Specialization::new([(0, false)]).unwrap();
        assert_eq!(
            extract_permutation(&c, &s, 20),
            Err(ReductionError::EntangledSpecialization { qubit: 0 })
        );
    }

    #[test]
    fn rejects_non_logic_and_caps() {
        let c = Circuit::from_gates(vec![Gate::new(GateKind::T, 0)]);
        let s = Specialization::default();
        assert!(matches!(
            extract_permutation(&c, &s, 20),
            Err(ReductionError::UnsupportedForSemanticReduction { gate_index: 0, .. })
        ));
        let wide = Circuit::anonymous(5);
        assert_eq!(
            extract_permutation(&wide, &s, 4),
            Err(ReductionError::TooManyFreeQubits { free: 5, cap: 4 })
        );
    }

    #[test]
    fn wide_circuit_path() {
        let mut c = Circuit::anonymous(70);
        c.push(Gate::cx(69, 0));
        let s = Specialization::new((1..69).map(|q| (q, false))).unwrap();
        let ex = extract_permutation(&c, &s, 20).unwrap();
        // free qubits 0 and 69: bit 1 of v drives bit 0
        assert_eq!(ex.permutation, vec![0, 1, 3, 2]);
    }
}
