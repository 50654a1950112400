//! Circuit intermediate representation and the construction combinators
//! layered on top of it.
//!
//! A [`Circuit`] is an ordered list of [`Gate`]s over a flat qubit register.
//! Qubits are referred to either by a register label and offset
//! (`a[3]`) or directly by their flat index. Named registers occupy the
//! low end of the flat index space in declaration order; anything above the
//! declared registers (up to `n_qubits`) is anonymous.
//!
//! Constructors never reorder, merge or cancel gates.

use std::collections::HashMap;
use std::fmt;

use smallvec::{smallvec, SmallVec};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("register `{0}` declared with conflicting sizes")]
    ConflictingRegister(String),
    #[error("register `{0}` must have at least one qubit")]
    EmptyRegister(String),
    #[error("control qubit {0} is also a gate target")]
    ControlTargetsOverlap(QubitRef),
    #[error("qubit {0} would be both a positive and a negative control")]
    DuplicateControlConflict(QubitRef),
    #[error("ladder with step {step} and width {width} cannot tile {len} qubits")]
    BadLadderGeometry {
        step: usize,
        width: usize,
        len: usize,
    },
    #[error("input qubit register lengths must be identical ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("qubit {0} does not resolve to an index in the register")]
    Unresolved(QubitRef),
}

/// A reference to one qubit, either by register name or by flat index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitRef {
    Named { label: String, offset: usize },
    Index(usize),
}

impl QubitRef {
    pub fn named(label: impl Into<String>, offset: usize) -> Self {
        QubitRef::Named {
            label: label.into(),
            offset,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            QubitRef::Index(i) => Some(*i),
            QubitRef::Named { .. } => None,
        }
    }
}

impl From<usize> for QubitRef {
    fn from(i: usize) -> Self {
        QubitRef::Index(i)
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QubitRef::Named { label, offset } => write!(f, "{label}[{offset}]"),
            QubitRef::Index(i) => write!(f, "{i}"),
        }
    }
}

/// Refs `label[0] .. label[size-1]`.
pub fn qreg(label: &str, size: usize) -> Vec<QubitRef> {
    (0..size).map(|i| QubitRef::named(label, i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: QubitRef,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(qubit: impl Into<QubitRef>) -> Self {
        Control {
            qubit: qubit.into(),
            polarity: Polarity::Positive,
        }
    }

    pub fn neg(qubit: impl Into<QubitRef>) -> Self {
        Control {
            qubit: qubit.into(),
            polarity: Polarity::Negative,
        }
    }

    pub fn is_positive(&self) -> bool {
        self.polarity == Polarity::Positive
    }
}

impl fmt::Display for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarity {
            Polarity::Positive => write!(f, "{}", self.qubit),
            Polarity::Negative => write!(f, "!{}", self.qubit),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 9] = [
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::H,
        GateKind::S,
        GateKind::Sdg,
        GateKind::T,
        GateKind::Tdg,
        GateKind::Swap,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Swap => "swap",
        }
    }

    /// Case-insensitive lookup by mnemonic.
    pub fn from_name(name: &str) -> Option<Self> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(name))
    }

    /// Number of target qubits.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// Gates that only permute computational basis states: NOT and SWAP
    /// with any number of controls.
    pub fn is_x_family(self) -> bool {
        matches!(self, GateKind::X | GateKind::Swap)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: SmallVec<[QubitRef; 2]>,
    pub controls: Vec<Control>,
}

impl Gate {
    /// Single-target gate. Use [`Gate::swap`] for SWAP.
    pub fn new(kind: GateKind, target: impl Into<QubitRef>) -> Self {
        debug_assert_eq!(kind.arity(), 1, "{kind} takes two targets");
        Gate {
            kind,
            targets: smallvec![target.into()],
            controls: Vec::new(),
        }
    }

    pub fn swap(a: impl Into<QubitRef>, b: impl Into<QubitRef>) -> Self {
        Gate {
            kind: GateKind::Swap,
            targets: smallvec![a.into(), b.into()],
            controls: Vec::new(),
        }
    }

    pub fn x(target: impl Into<QubitRef>) -> Self {
        Gate::new(GateKind::X, target)
    }

    pub fn cx(control: impl Into<QubitRef>, target: impl Into<QubitRef>) -> Self {
        Gate::x(target).with_control(Control::pos(control))
    }

    pub fn ccx(
        c1: impl Into<QubitRef>,
        c2: impl Into<QubitRef>,
        target: impl Into<QubitRef>,
    ) -> Self {
        Gate::x(target)
            .with_control(Control::pos(c1))
            .with_control(Control::pos(c2))
    }

    /// Appends a control without any checking.
    pub fn with_control(mut self, control: Control) -> Self {
        self.controls.push(control);
        self
    }

    pub fn target(&self) -> &QubitRef {
        &self.targets[0]
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> impl Iterator<Item = &QubitRef> {
        self.targets
            .iter()
            .chain(self.controls.iter().map(|c| &c.qubit))
    }

    pub fn has_negative_controls(&self) -> bool {
        self.controls.iter().any(|c| !c.is_positive())
    }

    /// Adds `extra` to the control set. Same-qubit same-polarity duplicates
    /// collapse; opposite polarities on one qubit are rejected.
    pub fn add_controls(&mut self, extra: &[Control]) -> Result<(), IrError> {
        for ctrl in extra {
            if self.targets.contains(&ctrl.qubit) {
                return Err(IrError::ControlTargetsOverlap(ctrl.qubit.clone()));
            }
            match self.controls.iter().find(|c| c.qubit == ctrl.qubit) {
                Some(existing) if existing.polarity == ctrl.polarity => {}
                Some(_) => return Err(IrError::DuplicateControlConflict(ctrl.qubit.clone())),
                None => self.controls.push(ctrl.clone()),
            }
        }
        Ok(())
    }

    /// Maps every qubit reference through `f`.
    pub fn map_qubits<F>(&self, mut f: F) -> Gate
    where
        F: FnMut(&QubitRef) -> QubitRef,
    {
        Gate {
            kind: self.kind,
            targets: self.targets.iter().map(&mut f).collect(),
            controls: self
                .controls
                .iter()
                .map(|c| Control {
                    qubit: f(&c.qubit),
                    polarity: c.polarity,
                })
                .collect(),
        }
    }
}

/// Source-syntax rendering: mnemonic, targets, then controls.
impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        for t in &self.targets {
            write!(f, " {t}")?;
        }
        for c in &self.controls {
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Register {
    pub label: String,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    registers: Vec<Register>,
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    /// `n` anonymous qubits, no registers.
    pub fn anonymous(n: usize) -> Self {
        Circuit {
            registers: Vec::new(),
            n_qubits: n,
            gates: Vec::new(),
        }
    }

    pub fn with_registers<I, S>(registers: I) -> Result<Self, IrError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut c = Circuit::new();
        for (label, size) in registers {
            c.add_register(label, size)?;
        }
        Ok(c)
    }

    /// A register-less fragment. `n_qubits` covers the highest indexed
    /// ref; named refs are left for a later [`Circuit::chain`] to declare.
    pub fn from_gates(gates: Vec<Gate>) -> Self {
        let n_qubits = gates
            .iter()
            .flat_map(|g| g.qubits())
            .filter_map(QubitRef::index)
            .map(|i| i + 1)
            .max()
            .unwrap_or(0);
        Circuit {
            registers: Vec::new(),
            n_qubits,
            gates,
        }
    }

    /// Assembles a circuit from raw parts. `n_qubits` is raised to cover
    /// the declared registers if needed.
    pub fn from_parts(
        registers: Vec<Register>,
        n_qubits: usize,
        gates: Vec<Gate>,
    ) -> Result<Self, IrError> {
        let mut c = Circuit::with_registers(registers.into_iter().map(|r| (r.label, r.size)))?;
        c.n_qubits = c.n_qubits.max(n_qubits);
        c.gates = gates;
        Ok(c)
    }

    /// Declares a register and returns its refs. Re-declaring an existing
    /// label with the same size is a no-op.
    pub fn add_register(
        &mut self,
        label: impl Into<String>,
        size: usize,
    ) -> Result<Vec<QubitRef>, IrError> {
        let label = label.into();
        if size == 0 {
            return Err(IrError::EmptyRegister(label));
        }
        match self.register(&label) {
            Some(r) if r.size == size => {}
            Some(_) => return Err(IrError::ConflictingRegister(label)),
            None => {
                self.registers.push(Register {
                    label: label.clone(),
                    size,
                });
                self.n_qubits = self.n_qubits.max(self.declared_qubits());
            }
        }
        Ok(qreg(&label, size))
    }

    /// Ensures at least `n` qubits exist.
    pub fn grow_to(&mut self, n: usize) {
        self.n_qubits = self.n_qubits.max(n);
    }

    pub fn push(&mut self, gate: Gate) {
        self.gates.push(gate);
    }

    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn register(&self, label: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.label == label)
    }

    /// Flat index of `label[0]`.
    pub fn register_base(&self, label: &str) -> Option<usize> {
        let mut base = 0;
        for r in &self.registers {
            if r.label == label {
                return Some(base);
            }
            base += r.size;
        }
        None
    }

    /// Total size of all named registers.
    pub fn declared_qubits(&self) -> usize {
        self.registers.iter().map(|r| r.size).sum()
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn into_gates(self) -> Vec<Gate> {
        self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Same register and qubit count, different gate list.
    pub fn with_gates(&self, gates: Vec<Gate>) -> Circuit {
        Circuit {
            registers: self.registers.clone(),
            n_qubits: self.n_qubits,
            gates,
        }
    }

    pub fn index_of(&self, q: &QubitRef) -> Option<usize> {
        match q {
            QubitRef::Index(i) => (*i < self.n_qubits).then_some(*i),
            QubitRef::Named { label, offset } => {
                let mut base = 0;
                for r in &self.registers {
                    if &r.label == label {
                        return (*offset < r.size).then_some(base + offset);
                    }
                    base += r.size;
                }
                None
            }
        }
    }

    pub fn layout(&self) -> Layout {
        let mut entries = Vec::with_capacity(self.registers.len());
        let mut base = 0;
        for r in &self.registers {
            entries.push((r.label.clone(), base, r.size));
            base += r.size;
        }
        Layout {
            registers: entries,
            n_qubits: self.n_qubits,
        }
    }

    /// Copy with every ref rewritten to index form.
    pub fn to_indexed(&self) -> Result<Circuit, IrError> {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in &self.gates {
            let mut err = None;
            let mapped = g.map_qubits(|q| match self.index_of(q) {
                Some(i) => QubitRef::Index(i),
                None => {
                    err.get_or_insert_with(|| q.clone());
                    q.clone()
                }
            });
            if let Some(q) = err {
                return Err(IrError::Unresolved(q));
            }
            gates.push(mapped);
        }
        Ok(self.with_gates(gates))
    }

    pub fn is_indexed(&self) -> bool {
        self.gates
            .iter()
            .flat_map(|g| g.qubits())
            .all(|q| q.index().is_some())
    }

    /// `self` followed by `other`. Registers are merged by label, keeping
    /// first-appearance order.
    pub fn chain(&self, other: &Circuit) -> Result<Circuit, IrError> {
        let mut out = self.clone();
        out.extend(other)?;
        Ok(out)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<(), IrError> {
        for r in &other.registers {
            if let Some(mine) = self.register(&r.label) {
                if mine.size != r.size {
                    return Err(IrError::ConflictingRegister(r.label.clone()));
                }
            }
        }
        for r in &other.registers {
            self.add_register(r.label.clone(), r.size)?;
        }
        self.n_qubits = self.n_qubits.max(other.n_qubits);
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// Every gate gains all of `ctrls`.
    pub fn with_controls(&self, ctrls: &[Control]) -> Result<Circuit, IrError> {
        let mut gates = self.gates.clone();
        for g in &mut gates {
            g.add_controls(ctrls)?;
        }
        Ok(self.with_gates(gates))
    }

    /// The gate list repeated `k` times.
    pub fn repeat(&self, k: usize) -> Circuit {
        let mut gates = Vec::with_capacity(self.gates.len() * k);
        for _ in 0..k {
            gates.extend(self.gates.iter().cloned());
        }
        self.with_gates(gates)
    }
}

/// Register label → flat index table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    /// `(label, base, size)` in declaration order.
    pub registers: Vec<(String, usize, usize)>,
    pub n_qubits: usize,
}

impl Layout {
    pub fn lookup(&self, label: &str, offset: usize) -> Option<usize> {
        self.registers
            .iter()
            .find(|(l, _, size)| l == label && offset < *size)
            .map(|(_, base, _)| base + offset)
    }

    pub fn register(&self, label: &str) -> Option<(usize, usize)> {
        self.registers
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, base, size)| (*base, *size))
    }

    /// The named form of a flat index, if it lies inside a register.
    pub fn name_of(&self, index: usize) -> Option<QubitRef> {
        self.registers
            .iter()
            .find(|(_, base, size)| (*base..base + size).contains(&index))
            .map(|(l, base, _)| QubitRef::named(l.clone(), index - base))
    }

    pub fn as_map(&self) -> HashMap<QubitRef, usize> {
        let mut m = HashMap::new();
        for (label, base, size) in &self.registers {
            for off in 0..*size {
                m.insert(QubitRef::named(label.clone(), off), base + off);
            }
        }
        m
    }
}

/// `[r1[0], r2[0], r1[1], r2[1], ...]`.
pub fn interleave(r1: &[QubitRef], r2: &[QubitRef]) -> Result<Vec<QubitRef>, IrError> {
    if r1.len() != r2.len() {
        return Err(IrError::LengthMismatch {
            left: r1.len(),
            right: r2.len(),
        });
    }
    Ok(r1
        .iter()
        .zip(r2)
        .flat_map(|(a, b)| [a.clone(), b.clone()])
        .collect())
}

/// Applies `builder` to windows of `width` qubits starting at offsets
/// `0, step, 2*step, ..., len - width` and chains the results, in window
/// order or in reverse window order.
pub fn ladder<F, E>(
    step: usize,
    width: usize,
    qubits: &[QubitRef],
    reversed: bool,
    mut builder: F,
) -> Result<Circuit, E>
where
    F: FnMut(&[QubitRef]) -> Result<Circuit, E>,
    E: From<IrError>,
{
    let len = qubits.len();
    if step == 0 || width == 0 || len < width || !(len - width).is_multiple_of(step) {
        return Err(IrError::BadLadderGeometry { step, width, len }.into());
    }
    let mut starts: Vec<usize> = (0..=len - width).step_by(step).collect();
    if reversed {
        starts.reverse();
    }
    let mut out = Circuit::new();
    for s in starts {
        let piece = builder(&qubits[s..s + width])?;
        out.extend(&piece)?;
    }
    Ok(out)
}
