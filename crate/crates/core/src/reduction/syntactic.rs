use std::collections::BTreeMap;

use crate::ir::{Circuit, GateKind, Polarity, QubitRef};

use super::{kernel_circuit, Method, ReducedKernel, ReductionError, Specialization};

/// Constant propagation of the specialized qubits through the gate list.
///
/// Gates on free qubits lose their specialized controls (or vanish when a
/// specialized control is unsatisfied). Gates on specialized qubits are
/// evaluated classically, which requires a NOT-family gate whose controls
/// are all specialized; anything else is [`ReductionError::NotReducible`].
pub fn specialize_syntactic(
    c: &Circuit,
    s: &Specialization,
) -> Result<ReducedKernel, ReductionError> {
    s.check(c.n_qubits())?;
    let indexed = c
        .to_indexed()
        .map_err(|e| ReductionError::InvalidSpecialization(e.to_string()))?;
    let mut tracked: BTreeMap<usize, bool> = s.assignments().clone();
    let free = s.free_qubits(c.n_qubits());
    let mut new_index = vec![usize::MAX; c.n_qubits()];
    for (new, &old) in free.iter().enumerate() {
        new_index[old] = new;
    }
    let idx = |q: &QubitRef| q.index().expect("circuit was indexed");

    let mut gates = Vec::new();
    for (gate_index, g) in indexed.gates().iter().enumerate() {
        let stuck = |reason: String| ReductionError::NotReducible { gate_index, reason };
        let tracked_targets = g
            .targets
            .iter()
            .filter(|t| tracked.contains_key(&idx(t)))
            .count();

        if tracked_targets == 0 {
            let mut fires = true;
            let mut controls = Vec::with_capacity(g.controls.len());
            for ct in &g.controls {
                match tracked.get(&idx(&ct.qubit)) {
                    Some(&bit) => fires &= bit == (ct.polarity == Polarity::Positive),
                    None => controls.push(ct.clone()),
                }
            }
            if fires {
                let mut kept = g.clone();
                kept.controls = controls;
                gates.push(kept.map_qubits(|q| QubitRef::Index(new_index[idx(q)])));
            }
            continue;
        }

        if !g.kind.is_x_family() {
            return Err(stuck(format!("`{}` acts on a specialized qubit", g.kind)));
        }
        if tracked_targets != g.targets.len() {
            return Err(stuck(
                "swap exchanges a specialized qubit with a free one".to_string(),
            ));
        }
        if let Some(ct) = g
            .controls
            .iter()
            .find(|ct| !tracked.contains_key(&idx(&ct.qubit)))
        {
            return Err(stuck(format!(
                "specialized target {} depends on free control {}",
                g.targets[0], ct.qubit
            )));
        }
        let fires = g
            .controls
            .iter()
            .all(|ct| tracked[&idx(&ct.qubit)] == (ct.polarity == Polarity::Positive));
        if fires {
            match g.kind {
                GateKind::Swap => {
                    let (a, b) = (idx(&g.targets[0]), idx(&g.targets[1]));
                    let (va, vb) = (tracked[&a], tracked[&b]);
                    tracked.insert(a, vb);
                    tracked.insert(b, va);
                }
                _ => {
                    let t = idx(&g.targets[0]);
                    let v = tracked[&t];
                    tracked.insert(t, !v);
                }
            }
        }
    }

    let mut warnings = Vec::new();
    if &tracked != s.assignments() {
        warnings.push("specialized qubits do not return to their input values".to_string());
    }
    Ok(ReducedKernel {
        circuit: kernel_circuit(c, &free, gates),
        index_map: free,
        final_constants: tracked,
        method: Method::Syntactic,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Control, Gate};

    fn spec(pairs: &[(usize, bool)]) -> Specialization {
        Specialization::new(pairs.iter().copied()).unwrap()
    }

    #[test]
    fn cnot_with_constant_control() {
        // a = 0, b = 1
        let c = Circuit::from_gates(vec![Gate::cx(0, 1)]);
        let one = specialize_syntactic(&c, &spec(&[(0, true)])).unwrap();
        assert_eq!(one.circuit.gates(), &[Gate::x(0)]);
        assert_eq!(one.circuit.n_qubits(), 1);
        assert_eq!(one.index_map, vec![1]);
        let zero = specialize_syntactic(&c, &spec(&[(0, false)])).unwrap();
        assert!(zero.circuit.is_empty());
    }

    #[test]
    fn tracked_flip() {
        let c = Circuit::from_gates(vec![Gate::x(0), Gate::cx(0, 1)]);
        let k = specialize_syntactic(&c, &spec(&[(0, false)])).unwrap();
        assert_eq!(k.circuit.gates(), &[Gate::x(0)]);
        assert_eq!(k.final_constants, BTreeMap::from([(0, true)]));
        assert_eq!(k.warnings.len(), 1);
    }

    #[test]
    fn negative_and_mixed_controls() {
        let c = Circuit::from_gates(vec![Gate::x(2)
            .with_control(Control::neg(0))
            .with_control(Control::pos(1))]);
        let k = specialize_syntactic(&c, &spec(&[(0, false)])).unwrap();
        assert_eq!(k.circuit.gates(), &[Gate::cx(0, 1)]);
        let k = specialize_syntactic(&c, &spec(&[(0, true)])).unwrap();
        assert!(k.circuit.is_empty());
    }

    #[test]
    fn stuck_cases() {
        let c = Circuit::from_gates(vec![Gate::cx(1, 0)]);
        assert!(matches!(
            specialize_syntactic(&c, &spec(&[(0, false)])),
            Err(ReductionError::NotReducible { gate_index: 0, .. })
        ));
        let h = Circuit::from_gates(vec![Gate::new(GateKind::H, 0)]);
        assert!(matches!(
            specialize_syntactic(&h, &spec(&[(0, false)])),
            Err(ReductionError::NotReducible { .. })
        ));
        let sw = Circuit::from_gates(vec![Gate::swap(0, 1)]);
        assert!(specialize_syntactic(&sw, &spec(&[(0, false)])).is_err());
        assert!(matches!(
            specialize_syntactic(&sw, &spec(&[(5, false)])),
            Err(ReductionError::InvalidSpecialization(_))
        ));
    }

    #[test]
    fn swap_between_specialized_qubits() {
        let c = Circuit::from_gates(vec![Gate::swap(0, 1), Gate::cx(0, 2)]);
        let k = specialize_syntactic(&c, &spec(&[(0, false), (1, true)])).unwrap();
        assert_eq!(k.circuit.gates(), &[Gate::x(0)]);
        assert_eq!(k.final_constants, BTreeMap::from([(0, true), (1, false)]));
    }

    #[test]
    fn non_x_gates_on_free_qubits_survive() {
        let c = Circuit::from_gates(vec![Gate::new(GateKind::H, 1).with_control(Control::pos(0))]);
        let k = specialize_syntactic(&c, &spec(&[(0, true)])).unwrap();
        assert_eq!(k.circuit.gates(), &[Gate::new(GateKind::H, 0)]);
    }
}
