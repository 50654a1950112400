//! Compilation pipeline from a named circuit down to a QP program:
//! verification, name resolution, SWAP lowering, negative-control lowering
//! and multi-control expansion.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::ir::{Circuit, Control, Gate, GateKind, IrError, Layout, QubitRef};
use crate::qp::{QpError, QpProgram};

/// Architecture limits the lowering passes target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassConfig {
    max_controls: usize,
    pub allow_ancilla_growth: bool,
}

impl PassConfig {
    pub const DEFAULT_MAX_CONTROLS: usize = 2;

    pub fn new(max_controls: usize) -> Result<Self, CompileError> {
        if max_controls < 2 {
            return Err(CompileError::BadConfig(max_controls));
        }
        Ok(PassConfig {
            max_controls,
            allow_ancilla_growth: true,
        })
    }

    pub fn max_controls(&self) -> usize {
        self.max_controls
    }
}

impl Default for PassConfig {
    fn default() -> Self {
        PassConfig {
            max_controls: Self::DEFAULT_MAX_CONTROLS,
            allow_ancilla_growth: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub gate_index: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.gate_index {
            Some(i) => write!(f, "{sev}: gate {i}: {}", self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Diagnostics(pub Vec<Diagnostic>);

impl Diagnostics {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.0.iter().any(|d| d.severity == Severity::Error)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Diagnostic> {
        self.0.iter()
    }

    fn error(&mut self, gate_index: Option<usize>, message: String) {
        self.0.push(Diagnostic {
            severity: Severity::Error,
            gate_index,
            message,
        });
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("verify: circuit is not well-formed\n{0}")]
    Verify(Diagnostics),
    #[error("resolve_names: {0}")]
    Resolve(#[from] IrError),
    #[error("expand_multi_controls: gate {gate_index} needs {needed} ancilla(s) but ancilla growth is disabled")]
    AncillaGrowthDisabled { gate_index: usize, needed: usize },
    #[error("emit: {0}")]
    Emit(#[from] QpError),
    #[error("max_controls must be at least 2, got {0}")]
    BadConfig(usize),
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Checks that every qubit resolves and every gate has a sane
/// target/control set. An empty result means the circuit is well-formed.
pub fn verify(c: &Circuit) -> Diagnostics {
    let mut diags = Diagnostics::default();
    for r in c.registers() {
        if !is_identifier(&r.label) {
            diags.error(
                None,
                format!("register label `{}` is not an identifier", r.label),
            );
        }
    }
    for (gi, g) in c.gates().iter().enumerate() {
        let at = Some(gi);
        if g.targets.len() != g.kind.arity() {
            diags.error(
                at,
                format!(
                    "`{}` expects {} target(s), found {}",
                    g.kind,
                    g.kind.arity(),
                    g.targets.len()
                ),
            );
        }
        let mut resolve = |q: &QubitRef| -> Option<usize> {
            let idx = c.index_of(q);
            if idx.is_none() {
                let msg = match q {
                    QubitRef::Named { label, .. } if c.register(label).is_none() => {
                        format!("qubit {q} refers to undeclared register `{label}`")
                    }
                    QubitRef::Named { label, .. } => format!(
                        "qubit out of range: {q} (register `{label}` has {} qubits)",
                        c.register(label).map_or(0, |r| r.size)
                    ),
                    QubitRef::Index(_) => format!(
                        "qubit out of range: {q} (circuit has {} qubits)",
                        c.n_qubits()
                    ),
                };
                diags.error(at, msg);
            }
            idx
        };
        let targets: Vec<Option<usize>> = g.targets.iter().map(&mut resolve).collect();
        let controls: Vec<Option<usize>> = g.controls.iter().map(|ct| resolve(&ct.qubit)).collect();

        if g.kind == GateKind::Swap
            && targets.len() == 2
            && targets[0].is_some()
            && targets[0] == targets[1]
        {
            diags.error(at, "swap targets are identical".to_string());
        }
        let target_set: HashSet<usize> = targets.iter().flatten().copied().collect();
        let mut seen = HashSet::new();
        for (ct, idx) in g.controls.iter().zip(&controls) {
            let Some(idx) = idx else { continue };
            if target_set.contains(idx) {
                diags.error(at, format!("target used as control: {}", ct.qubit));
            } else if !seen.insert(*idx) {
                diags.error(at, format!("duplicate control on qubit {}", ct.qubit));
            }
        }
    }
    diags
}

/// Rewrites every named ref to its flat index. Registers are kept so the
/// result can still be decoded by label.
pub fn resolve_names(c: &Circuit) -> Result<(Circuit, Layout), CompileError> {
    Ok((c.to_indexed()?, c.layout()))
}

/// SWAP(p, q; K) becomes CX(p→q; K) CX(q→p; K) CX(p→q; K).
pub fn lower_swaps(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.kind != GateKind::Swap {
            gates.push(g.clone());
            continue;
        }
        let (p, q) = (&g.targets[0], &g.targets[1]);
        let cx = |ctrl: &QubitRef, tgt: &QubitRef| {
            let mut controls = Vec::with_capacity(g.controls.len() + 1);
            controls.push(Control::pos(ctrl.clone()));
            controls.extend(g.controls.iter().cloned());
            Gate {
                kind: GateKind::X,
                targets: smallvec::smallvec![tgt.clone()],
                controls,
            }
        };
        gates.push(cx(p, q));
        gates.push(cx(q, p));
        gates.push(cx(p, q));
    }
    c.with_gates(gates)
}

/// Each negative control becomes a positive one bracketed by X gates on
/// the control qubit.
pub fn lower_negative_controls(c: &Circuit) -> Circuit {
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        let negated: Vec<QubitRef> = g
            .controls
            .iter()
            .filter(|ct| !ct.is_positive())
            .map(|ct| ct.qubit.clone())
            .collect();
        if negated.is_empty() {
            gates.push(g.clone());
            continue;
        }
        gates.extend(negated.iter().cloned().map(Gate::x));
        gates.push(Gate {
            kind: g.kind,
            targets: g.targets.clone(),
            controls: g
                .controls
                .iter()
                .map(|ct| Control::pos(ct.qubit.clone()))
                .collect(),
        });
        gates.extend(negated.into_iter().map(Gate::x));
    }
    c.with_gates(gates)
}

/// Reduces every gate to at most `max_controls` controls.
///
/// A gate with k > M controls folds its first two controls into a fresh
/// ancilla with a Toffoli, k − M times, applies the main gate, then
/// uncomputes the ancillas in reverse. Ancillas are appended above the
/// existing qubits, start in |0⟩, end in |0⟩ and are shared between gates.
pub fn expand_multi_controls(c: &Circuit, cfg: &PassConfig) -> Result<Circuit, CompileError> {
    let m = cfg.max_controls;
    let pool = c
        .gates()
        .iter()
        .map(|g| g.controls.len().saturating_sub(m))
        .max()
        .unwrap_or(0);
    if pool == 0 {
        return Ok(c.clone());
    }
    if !cfg.allow_ancilla_growth {
        let (gate_index, g) = c
            .gates()
            .iter()
            .enumerate()
            .find(|(_, g)| g.controls.len() > m)
            .expect("pool > 0 implies an oversized gate");
        return Err(CompileError::AncillaGrowthDisabled {
            gate_index,
            needed: g.controls.len() - m,
        });
    }
    let first_ancilla = c.n_qubits();
    let mut gates = Vec::with_capacity(c.len());
    for g in c.gates() {
        if g.controls.len() <= m {
            gates.push(g.clone());
            continue;
        }
        let mut remaining = g.controls.clone();
        let mut compute = Vec::new();
        for i in 0..g.controls.len() - m {
            let w = QubitRef::Index(first_ancilla + i);
            let rest = remaining.split_off(2);
            compute.push(Gate {
                kind: GateKind::X,
                targets: smallvec::smallvec![w.clone()],
                controls: remaining,
            });
            remaining = std::iter::once(Control::pos(w)).chain(rest).collect();
        }
        gates.extend(compute.iter().cloned());
        gates.push(Gate {
            kind: g.kind,
            targets: g.targets.clone(),
            controls: remaining,
        });
        gates.extend(compute.into_iter().rev());
    }
    let mut out = c.with_gates(gates);
    out.grow_to(first_ancilla + pool);
    Ok(out)
}

/// verify → resolve_names → lower_swaps → lower_negative_controls →
/// expand_multi_controls. Stops short of emitting.
pub fn lower(c: &Circuit, cfg: &PassConfig) -> Result<Circuit, CompileError> {
    let diags = verify(c);
    if diags.has_errors() {
        return Err(CompileError::Verify(diags));
    }
    let (resolved, _) = resolve_names(c)?;
    let no_swaps = lower_swaps(&resolved);
    let positive = lower_negative_controls(&no_swaps);
    expand_multi_controls(&positive, cfg)
}

/// Full pipeline down to a QP program.
pub fn compile(c: &Circuit, cfg: &PassConfig) -> Result<QpProgram, CompileError> {
    let lowered = lower(c, cfg)?;
    Ok(QpProgram::from_circuit(&lowered, cfg.max_controls)?)
}
