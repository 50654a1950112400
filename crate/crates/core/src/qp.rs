//! QP ("quantum problem") files: a lowered circuit as a flat list of
//! decimal integers.
//!
//! ```text
//! n_qubits n_gates max_controls
//! opcode target c1 .. cM     (one record per gate, unused control slots are -1)
//! ```
//!
//! Opcodes: 1=X 2=Y 3=Z 4=H 5=S 6=SDG 7=T 8=TDG. SWAP has no opcode and must
//! be lowered before emission. Any ASCII whitespace separates tokens.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ir::{Circuit, Control, Gate, GateKind, QubitRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    X = 1,
    Y = 2,
    Z = 3,
    H = 4,
    S = 5,
    Sdg = 6,
    T = 7,
    Tdg = 8,
}

impl Opcode {
    pub const MAX: i64 = 8;

    pub fn code(self) -> i64 {
        self as i64
    }

    pub fn from_code(v: i64) -> Option<Opcode> {
        Some(match v {
            1 => Opcode::X,
            2 => Opcode::Y,
            3 => Opcode::Z,
            4 => Opcode::H,
            5 => Opcode::S,
            6 => Opcode::Sdg,
            7 => Opcode::T,
            8 => Opcode::Tdg,
            _ => return None,
        })
    }

    pub fn from_kind(kind: GateKind) -> Option<Opcode> {
        Some(match kind {
            GateKind::X => Opcode::X,
            GateKind::Y => Opcode::Y,
            GateKind::Z => Opcode::Z,
            GateKind::H => Opcode::H,
            GateKind::S => Opcode::S,
            GateKind::Sdg => Opcode::Sdg,
            GateKind::T => Opcode::T,
            GateKind::Tdg => Opcode::Tdg,
            GateKind::Swap => return None,
        })
    }

    pub fn kind(self) -> GateKind {
        match self {
            Opcode::X => GateKind::X,
            Opcode::Y => GateKind::Y,
            Opcode::Z => GateKind::Z,
            Opcode::H => GateKind::H,
            Opcode::S => GateKind::S,
            Opcode::Sdg => GateKind::Sdg,
            Opcode::T => GateKind::T,
            Opcode::Tdg => GateKind::Tdg,
        }
    }
}

/// One gate record. `controls` holds only the used slots; padding with
/// `-1` happens on emission.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QpGate {
    pub opcode: Opcode,
    pub target: usize,
    pub controls: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QpProgram {
    pub n_qubits: usize,
    pub max_controls: usize,
    pub gates: Vec<QpGate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QpError {
    #[error("input ends before the program is complete")]
    Truncated,
    #[error("bad opcode {0}")]
    BadOpcode(i64),
    #[error("gate {gate_index}: bad qubit index {value}: {reason}")]
    BadIndex {
        gate_index: usize,
        value: i64,
        reason: &'static str,
    },
    #[error("token `{0}` is not an integer")]
    NonIntegerToken(String),
    #[error("bad header: {0}")]
    BadHeader(&'static str),
    #[error("unexpected tokens after the last gate")]
    TrailingTokens,
    #[error("gate {gate_index}: {reason}")]
    InvariantViolation { gate_index: usize, reason: String },
}

impl QpProgram {
    /// Encodes a fully lowered, indexed circuit.
    pub fn from_circuit(c: &Circuit, max_controls: usize) -> Result<QpProgram, QpError> {
        let violation =
            |gate_index, reason: String| QpError::InvariantViolation { gate_index, reason };
        let mut gates = Vec::with_capacity(c.len());
        for (gi, g) in c.gates().iter().enumerate() {
            let opcode = Opcode::from_kind(g.kind).ok_or_else(|| {
                violation(
                    gi,
                    format!("`{}` has no opcode and must be lowered", g.kind),
                )
            })?;
            let index = |q: &QubitRef| {
                q.index()
                    .ok_or_else(|| violation(gi, format!("qubit {q} is not resolved to an index")))
            };
            let target = index(g.target())?;
            let mut controls = Vec::with_capacity(g.controls.len());
            for ct in &g.controls {
                if !ct.is_positive() {
                    return Err(violation(
                        gi,
                        format!("negative control on {} must be lowered", ct.qubit),
                    ));
                }
                controls.push(index(&ct.qubit)?);
            }
            gates.push(QpGate {
                opcode,
                target,
                controls,
            });
        }
        let p = QpProgram {
            n_qubits: c.n_qubits(),
            max_controls,
            gates,
        };
        p.validate()?;
        Ok(p)
    }

    /// Back to an anonymous circuit over `n_qubits` qubits.
    pub fn to_circuit(&self) -> Circuit {
        let mut c = Circuit::anonymous(self.n_qubits);
        for g in &self.gates {
            let mut gate = Gate::new(g.opcode.kind(), g.target);
            gate.controls = g.controls.iter().map(|&i| Control::pos(i)).collect();
            c.push(gate);
        }
        c
    }

    pub fn validate(&self) -> Result<(), QpError> {
        if self.n_qubits == 0 {
            return Err(QpError::BadHeader("n_qubits must be positive"));
        }
        if self.max_controls < 2 {
            return Err(QpError::BadHeader("max_controls must be at least 2"));
        }
        for (gi, g) in self.gates.iter().enumerate() {
            let bad = |value: usize, reason| QpError::BadIndex {
                gate_index: gi,
                value: value as i64,
                reason,
            };
            if g.target >= self.n_qubits {
                return Err(bad(g.target, "target out of range"));
            }
            if g.controls.len() > self.max_controls {
                return Err(QpError::InvariantViolation {
                    gate_index: gi,
                    reason: format!(
                        "{} controls exceed the limit of {}",
                        g.controls.len(),
                        self.max_controls
                    ),
                });
            }
            for (i, &ct) in g.controls.iter().enumerate() {
                if ct >= self.n_qubits {
                    return Err(bad(ct, "control out of range"));
                }
                if ct == g.target {
                    return Err(bad(ct, "control equals target"));
                }
                if g.controls[..i].contains(&ct) {
                    return Err(bad(ct, "duplicate control"));
                }
            }
        }
        Ok(())
    }
}

/// Serializes a program. Output is deterministic: the header, then each
/// record separated by two spaces.
pub fn emit_qp(p: &QpProgram) -> Result<String, QpError> {
    p.validate()?;
    let mut out = format!("{} {} {}", p.n_qubits, p.gates.len(), p.max_controls);
    for g in &p.gates {
        let _ = write!(out, "  {} {}", g.opcode.code(), g.target);
        for slot in 0..p.max_controls {
            match g.controls.get(slot) {
                Some(c) => {
                    let _ = write!(out, " {c}");
                }
                None => out.push_str(" -1"),
            }
        }
    }
    Ok(out)
}

/// Parses and validates QP text.
pub fn parse_qp(text: &str) -> Result<QpProgram, QpError> {
    let mut tokens = text.split_ascii_whitespace().map(|t| {
        t.parse::<i64>()
            .map_err(|_| QpError::NonIntegerToken(t.to_string()))
    });
    let mut next = move || tokens.next().unwrap_or(Err(QpError::Truncated));

    let n_qubits = next()?;
    let n_gates = next()?;
    let max_controls = next()?;
    if n_qubits <= 0 {
        return Err(QpError::BadHeader("n_qubits must be positive"));
    }
    if n_gates < 0 {
        return Err(QpError::BadHeader("n_gates must not be negative"));
    }
    if max_controls < 2 {
        return Err(QpError::BadHeader("max_controls must be at least 2"));
    }
    let n = n_qubits as u64;

    // no preallocation from header values: they are untrusted
    let mut gates = Vec::new();
    for gi in 0..n_gates as u64 {
        let gate_index = gi as usize;
        let bad = |value: i64, reason| QpError::BadIndex {
            gate_index,
            value,
            reason,
        };
        let op = next()?;
        let opcode = Opcode::from_code(op).ok_or(QpError::BadOpcode(op))?;
        let target = next()?;
        if target < 0 || target as u64 >= n {
            return Err(bad(target, "target out of range"));
        }
        let mut controls = Vec::new();
        let mut padding = false;
        for _ in 0..max_controls {
            let v = next()?;
            if v == -1 {
                padding = true;
                continue;
            }
            if padding {
                return Err(bad(v, "control after an unused slot"));
            }
            if v < 0 || v as u64 >= n {
                return Err(bad(v, "control out of range"));
            }
            if v == target {
                return Err(bad(v, "control equals target"));
            }
            let v = v as usize;
            if controls.contains(&v) {
                return Err(bad(v as i64, "duplicate control"));
            }
            controls.push(v);
        }
        gates.push(QpGate {
            opcode,
            target: target as usize,
            controls,
        });
    }
    match next() {
        Err(QpError::Truncated) => {}
        _ => return Err(QpError::TrailingTokens),
    }
    let max_controls =
        usize::try_from(max_controls).map_err(|_| QpError::BadHeader("max_controls too large"))?;
    Ok(QpProgram {
        n_qubits: n as usize,
        max_controls,
        gates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(opcode: Opcode, target: usize, controls: &[usize]) -> QpGate {
        QpGate {
            opcode,
            target,
            controls: controls.to_vec(),
        }
    }

    #[test]
    fn emit_examples() {
        let p = QpProgram {
            n_qubits: 2,
            max_controls: 2,
            gates: vec![gate(Opcode::H, 0, &[]), gate(Opcode::X, 1, &[0])],
        };
        assert_eq!(emit_qp(&p).unwrap(), "2 2 2  4 0 -1 -1  1 1 0 -1");
        let empty = QpProgram {
            n_qubits: 3,
            max_controls: 2,
            gates: vec![],
        };
        assert_eq!(emit_qp(&empty).unwrap(), "3 0 2");
    }

    #[test]
    fn parse_examples() {
        let p = parse_qp("1 1 2  1 0 -1 -1").unwrap();
        assert_eq!(p.gates, vec![gate(Opcode::X, 0, &[])]);
        assert_eq!(parse_qp("1 1 2  9 0 -1 -1"), Err(QpError::BadOpcode(9)));
        assert!(matches!(
            parse_qp("2 1 2  1 0 0 -1"),
            Err(QpError::BadIndex { value: 0, .. })
        ));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_qp(""), Err(QpError::Truncated));
        assert_eq!(parse_qp("2 1 2  1 0 -1"), Err(QpError::Truncated));
        assert_eq!(parse_qp("2 x 2"), Err(QpError::NonIntegerToken("x".into())));
        assert_eq!(parse_qp("2 0 2 7"), Err(QpError::TrailingTokens));
        assert!(matches!(parse_qp("0 0 2"), Err(QpError::BadHeader(_))));
        assert!(matches!(parse_qp("2 0 1"), Err(QpError::BadHeader(_))));
        assert!(matches!(
            parse_qp("3 1 2  1 0 -1 1"),
            Err(QpError::BadIndex { .. })
        ));
        assert!(matches!(
            parse_qp("3 1 2  1 0 1 1"),
            Err(QpError::BadIndex { .. })
        ));
        assert!(matches!(
            parse_qp("3 1 2  1 3 -1 -1"),
            Err(QpError::BadIndex { value: 3, .. })
        ));
        assert_eq!(parse_qp("3 1 2  0 0 -1 -1"), Err(QpError::BadOpcode(0)));
        // absurd header counts with no data must not allocate or hang
        assert_eq!(
            parse_qp("5 9223372036854775807 9223372036854775807"),
            Err(QpError::Truncated)
        );
    }

    #[test]
    fn emit_rejects_swap_and_negative_controls() {
        let c = Circuit::from_gates(vec![Gate::swap(0, 1)]);
        assert!(matches!(
            QpProgram::from_circuit(&c, 2),
            Err(QpError::InvariantViolation { gate_index: 0, .. })
        ));
        let c = Circuit::from_gates(vec![Gate::x(0).with_control(Control::neg(1))]);
        assert!(QpProgram::from_circuit(&c, 2).is_err());
        let mut g = Gate::x(0);
        for i in 1..4 {
            g = g.with_control(Control::pos(i));
        }
        assert!(QpProgram::from_circuit(&Circuit::from_gates(vec![g]), 2).is_err());
    }

    #[test]
    fn circuit_round_trip() {
        let c = Circuit::from_gates(vec![Gate::new(GateKind::T, 2), Gate::ccx(0, 1, 2)]);
        let p = QpProgram::from_circuit(&c, 3).unwrap();
        assert_eq!(p.to_circuit(), c);
        assert_eq!(parse_qp(&emit_qp(&p).unwrap()).unwrap(), p);
    }
}
