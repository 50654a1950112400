//! Computational-basis ("logic") simulation for circuits built only from
//! NOT gates with arbitrary controls (and SWAPs). Exactly one basis state
//! is live at any time, so a run costs O(gates · controls) time and O(n)
//! memory.

use std::fmt;

use smallvec::{smallvec, SmallVec};
use thiserror::Error;

use crate::ir::{Circuit, Gate, GateKind, Polarity, QubitRef};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("gate {gate_index}: `{kind}` is not a NOT-family gate; use the state-vector backend")]
    NonLogicGate { kind: GateKind, gate_index: usize },
    #[error("gate {gate_index}: qubit {qubit} does not resolve")]
    Unresolved { gate_index: usize, qubit: QubitRef },
    #[error("gate {gate_index}: malformed gate ({message})")]
    InvalidGate { gate_index: usize, message: String },
    #[error("input has {found} qubits but the circuit has {expected}")]
    WidthMismatch { expected: usize, found: usize },
    #[error("value {value} does not fit in {n_qubits} qubits")]
    ValueOutOfRange { value: u64, n_qubits: usize },
}

/// One computational basis state. Up to 64 qubits live in a single inline
/// word; wider registers spill to a heap bitset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BasisState {
    n_qubits: usize,
    words: SmallVec<[u64; 1]>,
}

impl BasisState {
    pub fn zeros(n_qubits: usize) -> BasisState {
        BasisState {
            n_qubits,
            words: smallvec![0; n_qubits.div_ceil(64).max(1)],
        }
    }

    pub fn from_u64(n_qubits: usize, value: u64) -> Result<BasisState, LogicError> {
        if n_qubits < 64 && value >> n_qubits != 0 {
            return Err(LogicError::ValueOutOfRange { value, n_qubits });
        }
        let mut s = BasisState::zeros(n_qubits);
        s.words[0] = value;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of 64-bit words backing the state.
    pub fn word_count(&self) -> usize {
        self.words.len()
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n_qubits);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        debug_assert!(i < self.n_qubits);
        let mask = 1u64 << (i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.n_qubits);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// The whole state as an integer, if it fits.
    pub fn as_u64(&self) -> Option<u64> {
        self.words[1..]
            .iter()
            .all(|&w| w == 0)
            .then_some(self.words[0])
    }

    /// `width` bits starting at qubit `base`, little-endian (width ≤ 64).
    pub fn field(&self, base: usize, width: usize) -> u64 {
        debug_assert!(width <= 64);
        (0..width).fold(0u64, |acc, k| acc | ((self.get(base + k) as u64) << k))
    }

    pub fn set_field(&mut self, base: usize, width: usize, value: u64) {
        for k in 0..width {
            self.set(base + k, (value >> k) & 1 == 1);
        }
    }
}

impl fmt::Debug for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for i in (0..self.n_qubits).rev() {
            write!(f, "{}", self.get(i) as u8)?;
        }
        write!(f, "⟩")
    }
}

fn controls_fire(state: &BasisState, controls: &[(usize, Polarity)]) -> bool {
    controls
        .iter()
        .all(|&(q, pol)| state.get(q) == (pol == Polarity::Positive))
}

/// Runs `c` on `input` with a single tracked basis state.
pub fn run_logic(c: &Circuit, input: &BasisState) -> Result<BasisState, LogicError> {
    if input.n_qubits != c.n_qubits() {
        return Err(LogicError::WidthMismatch {
            expected: c.n_qubits(),
            found: input.n_qubits,
        });
    }
    let mut state = input.clone();
    let mut ctrl_buf: Vec<(usize, Polarity)> = Vec::new();
    for (gate_index, g) in c.gates().iter().enumerate() {
        let op = LogicOp::resolve(c, gate_index, g, &mut ctrl_buf)?;
        if controls_fire(&state, &ctrl_buf) {
            op.apply(&mut state);
        }
    }
    Ok(state)
}

#[derive(Debug, Clone, Copy)]
enum LogicOp {
    Flip(usize),
    Swap(usize, usize),
}

impl LogicOp {
    fn resolve(
        c: &Circuit,
        gate_index: usize,
        g: &Gate,
        controls: &mut Vec<(usize, Polarity)>,
    ) -> Result<LogicOp, LogicError> {
        if !g.kind.is_x_family() {
            return Err(LogicError::NonLogicGate {
                kind: g.kind,
                gate_index,
            });
        }
        let index = |q: &QubitRef| {
            c.index_of(q).ok_or_else(|| LogicError::Unresolved {
                gate_index,
                qubit: q.clone(),
            })
        };
        if g.targets.len() != g.kind.arity() {
            return Err(LogicError::InvalidGate {
                gate_index,
                message: format!("`{}` with {} targets", g.kind, g.targets.len()),
            });
        }
        controls.clear();
        for ct in &g.controls {
            controls.push((index(&ct.qubit)?, ct.polarity));
        }
        Ok(match g.kind {
            GateKind::Swap => LogicOp::Swap(index(&g.targets[0])?, index(&g.targets[1])?),
            _ => LogicOp::Flip(index(&g.targets[0])?),
        })
    }

    fn apply(self, state: &mut BasisState) {
        match self {
            LogicOp::Flip(t) => state.flip(t),
            LogicOp::Swap(a, b) => {
                let (x, y) = (state.get(a), state.get(b));
                state.set(a, y);
                state.set(b, x);
            }
        }
    }
}

/// A NOT-family circuit pre-resolved for repeated evaluation on many inputs.
#[derive(Debug, Clone)]
pub struct LogicProgram {
    n_qubits: usize,
    ops: Vec<(LogicOp, Vec<(usize, Polarity)>)>,
}

impl LogicProgram {
    pub fn compile(c: &Circuit) -> Result<LogicProgram, LogicError> {
        let mut ops = Vec::with_capacity(c.len());
        let mut buf = Vec::new();
        for (gate_index, g) in c.gates().iter().enumerate() {
            let op = LogicOp::resolve(c, gate_index, g, &mut buf)?;
            ops.push((op, buf.clone()));
        }
        Ok(LogicProgram {
            n_qubits: c.n_qubits(),
            ops,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn run(&self, state: &mut BasisState) {
        debug_assert_eq!(state.n_qubits, self.n_qubits);
        for (op, controls) in &self.ops {
            if controls_fire(state, controls) {
                op.apply(state);
            }
        }
    }

    /// Word-sized fast path; `None` when the program spans more than 64 qubits.
    pub fn run_u64(&self, bits: u64) -> Option<u64> {
        if self.n_qubits > 64 {
            return None;
        }
        let mut s = bits;
        for (op, controls) in &self.ops {
            let fire = controls
                .iter()
                .all(|&(q, pol)| ((s >> q) & 1 == 1) == (pol == Polarity::Positive));
            if fire {
                match *op {
                    LogicOp::Flip(t) => s ^= 1 << t,
                    LogicOp::Swap(a, b) => {
                        if ((s >> a) ^ (s >> b)) & 1 == 1 {
                            s ^= (1 << a) | (1 << b);
                        }
                    }
                }
            }
        }
        Some(s)
    }
}
