//! Full state-vector simulation by qubit-wise multiplication.
//!
//! Basis index `b` encodes qubit `i` as bit `i` of `b`. A gate on target `t`
//! updates the amplitude pairs `(j, j + 2^t)` for every `j` with bit `t`
//! clear, applying the 2×2 gate matrix wherever the control bits of `j`
//! match. The pairs partition the vector, so one gate's updates are
//! independent of each other and large vectors are processed in parallel.
//! SWAP is applied directly as an amplitude exchange.

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ir::{Circuit, Gate, GateKind, Polarity};

/// Largest register the simulator will allocate for (2^30 amplitudes, 16 GiB).
pub const MAX_QUBITS: usize = 30;

/// Vectors at least this long are updated with rayon.
const PARALLEL_LEN: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("basis state {basis} does not exist in a {n_qubits}-qubit register")]
    BasisOutOfRange { basis: u64, n_qubits: usize },
    #[error("{0} qubits exceed the state-vector limit of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("gate {gate_index}: {message}")]
    InvalidGate { gate_index: usize, message: String },
}

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateMatrix(pub [[Complex64; 2]; 2]);

impl GateMatrix {
    /// `None` for SWAP, which is not a single-qubit operator.
    pub fn for_kind(kind: GateKind) -> Option<GateMatrix> {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let t = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        Some(GateMatrix(match kind {
            GateKind::X => [[o, l], [l, o]],
            GateKind::Y => [[o, -i], [i, o]],
            GateKind::Z => [[l, o], [o, -l]],
            GateKind::H => [[h, h], [h, -h]],
            GateKind::S => [[l, o], [o, i]],
            GateKind::Sdg => [[l, o], [o, -i]],
            GateKind::T => [[l, o], [o, t]],
            GateKind::Tdg => [[l, o], [o, t.conj()]],
            GateKind::Swap => return None,
        }))
    }

    pub fn dagger(&self) -> GateMatrix {
        let m = &self.0;
        GateMatrix([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn mul(&self, other: &GateMatrix) -> GateMatrix {
        let (a, b) = (&self.0, &other.0);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (r, row) in out.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        GateMatrix(out)
    }

    /// ‖U†U − I‖_max ≤ tol.
    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.dagger().mul(self);
        (0..2).all(|r| {
            (0..2).all(|c| {
                let id = if r == c { 1.0 } else { 0.0 };
                (p.0[r][c] - Complex64::new(id, 0.0)).norm() <= tol
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state `|basis⟩`.
    pub fn basis(n_qubits: usize, basis: u64) -> Result<StateVector, SimError> {
        if n_qubits > MAX_QUBITS {
            return Err(SimError::TooManyQubits(n_qubits));
        }
        let len = 1usize << n_qubits;
        if basis >= len as u64 {
            return Err(SimError::BasisOutOfRange { basis, n_qubits });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); len];
        amplitudes[basis as usize] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    /// `None` unless the length is a power of two.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Option<StateVector> {
        let len = amplitudes.len();
        if !len.is_power_of_two() {
            return None;
        }
        Some(StateVector {
            n_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// The index of the single basis state holding all probability mass
    /// (within `tol`), if there is one.
    pub fn as_basis_state(&self, tol: f64) -> Option<usize> {
        let (idx, p) = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| (i, a.norm_sqr()))
            .max_by(|a, b| a.1.total_cmp(&b.1))?;
        (p >= 1.0 - tol).then_some(idx)
    }

    /// Applies one indexed gate. Positive and negative controls are both
    /// honoured directly.
    pub fn apply_gate(&mut self, gate: &Gate) -> Result<(), SimError> {
        self.apply_gate_at(0, gate)
    }

    fn apply_gate_at(&mut self, gate_index: usize, gate: &Gate) -> Result<(), SimError> {
        let invalid = |message: String| SimError::InvalidGate {
            gate_index,
            message,
        };
        if gate.targets.len() != gate.kind.arity() {
            return Err(invalid(format!(
                "`{}` expects {} target(s), found {}",
                gate.kind,
                gate.kind.arity(),
                gate.targets.len()
            )));
        }
        let index = |q: &crate::ir::QubitRef| -> Result<usize, SimError> {
            let i = q
                .index()
                .ok_or_else(|| invalid(format!("qubit {q} is not resolved to an index")))?;
            if i >= self.n_qubits {
                return Err(invalid(format!("qubit {i} out of range")));
            }
            Ok(i)
        };
        let targets: Vec<usize> = gate.targets.iter().map(index).collect::<Result<_, _>>()?;
        let target_mask = targets.iter().fold(0usize, |m, &t| m | 1 << t);
        if target_mask.count_ones() as usize != targets.len() {
            return Err(invalid("swap targets are identical".to_string()));
        }
        let mut mask = 0usize;
        let mut want = 0usize;
        for ct in &gate.controls {
            let bit = 1usize << index(&ct.qubit)?;
            if bit & target_mask != 0 || mask & bit != 0 {
                return Err(invalid(format!(
                    "control {} overlaps the target or another control",
                    ct.qubit
                )));
            }
            mask |= bit;
            if ct.polarity == Polarity::Positive {
                want |= bit;
            }
        }
        match GateMatrix::for_kind(gate.kind) {
            Some(matrix) => apply_controlled(&mut self.amplitudes, targets[0], mask, want, &matrix),
            None => apply_controlled_swap(&mut self.amplitudes, targets[0], targets[1], mask, want),
        }
        Ok(())
    }
}

/// The amplitude index pairs a gate on `target` updates, in order.
pub fn pair_indices(n_qubits: usize, target: usize) -> impl Iterator<Item = (usize, usize)> {
    let stride = 1usize << target;
    (0..1usize << n_qubits)
        .filter(move |j| j & stride == 0)
        .map(move |j| (j, j + stride))
}

fn apply_controlled(
    amps: &mut [Complex64],
    target: usize,
    mask: usize,
    want: usize,
    u: &GateMatrix,
) {
    let stride = 1usize << target;
    let [[m00, m01], [m10, m11]] = u.0;
    let update = |(block, chunk): (usize, &mut [Complex64])| {
        let base = block * 2 * stride;
        let (lo, hi) = chunk.split_at_mut(stride);
        for (i, (a, b)) in lo.iter_mut().zip(hi.iter_mut()).enumerate() {
            if (base + i) & mask == want {
                let (x, y) = (*a, *b);
                *a = m00 * x + m01 * y;
                *b = m10 * x + m11 * y;
            }
        }
    };
    if amps.len() >= PARALLEL_LEN {
        amps.par_chunks_mut(2 * stride).enumerate().for_each(update);
    } else {
        amps.chunks_mut(2 * stride).enumerate().for_each(update);
    }
}

/// Exchanges the amplitudes of `|..1..0..⟩` and `|..0..1..⟩` (bits `a`, `b`)
/// wherever the controls match. Partners differ only below bit
/// `max(a, b) + 1`, so blocks of that size are independent.
fn apply_controlled_swap(amps: &mut [Complex64], a: usize, b: usize, mask: usize, want: usize) {
    let (lo, hi) = (a.min(b), a.max(b));
    let block = 2usize << hi;
    let flip = (1usize << lo) | (1usize << hi);
    let update = |(k, chunk): (usize, &mut [Complex64])| {
        let base = k * block;
        for i in 0..chunk.len() {
            let j = base + i;
            if (j >> hi) & 1 == 1 && (j >> lo) & 1 == 0 && j & mask == want {
                chunk.swap(i, i ^ flip);
            }
        }
    };
    if amps.len() >= PARALLEL_LEN {
        amps.par_chunks_mut(block).enumerate().for_each(update);
    } else {
        amps.chunks_mut(block).enumerate().for_each(update);
    }
}

pub fn init_state(n_qubits: usize, basis: u64) -> Result<StateVector, SimError> {
    StateVector::basis(n_qubits, basis)
}

/// Simulates `c` from basis state `prep`. Named refs are resolved against
/// the circuit's own registers.
pub fn run(c: &Circuit, prep: u64) -> Result<StateVector, SimError> {
    let state = StateVector::basis(c.n_qubits(), prep)?;
    run_from(c, state)
}

pub fn run_from(c: &Circuit, mut state: StateVector) -> Result<StateVector, SimError> {
    if state.n_qubits != c.n_qubits() {
        return Err(SimError::InvalidGate {
            gate_index: 0,
            message: format!(
                "state has {} qubits but the circuit has {}",
                state.n_qubits,
                c.n_qubits()
            ),
        });
    }
    for (gi, g) in c.gates().iter().enumerate() {
        if g.qubits().all(|q| q.index().is_some()) {
            state.apply_gate_at(gi, g)?;
        } else {
            let resolved = g.map_qubits(|q| c.index_of(q).map_or_else(|| q.clone(), Into::into));
            state.apply_gate_at(gi, &resolved)?;
        }
    }
    Ok(state)
}

pub fn probabilities(s: &StateVector) -> Vec<f64> {
    s.probabilities()
}
