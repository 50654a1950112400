#![allow(dead_code)]

use num_complex::Complex64;
use proptest::prelude::*;
use qforge_core::ir::{Circuit, Control, Gate, GateKind};
use rand::seq::index::sample;
use rand::Rng;

/// Random indexed circuit over `n` anonymous qubits. SWAPs get two distinct
/// targets; controls are drawn from the remaining qubits with random polarity.
pub fn random_circuit<R: Rng>(
    rng: &mut R,
    n: usize,
    n_gates: usize,
    max_controls: usize,
    kinds: &[GateKind],
) -> Circuit {
    let mut c = Circuit::anonymous(n);
    for _ in 0..n_gates {
        let kind = kinds[rng.random_range(0..kinds.len())];
        let arity = kind.arity();
        if n < arity {
            continue;
        }
        let k = rng.random_range(0..=max_controls.min(n - arity));
        let picked = sample(rng, n, arity + k).into_vec();
        let mut g = if kind == GateKind::Swap {
            Gate::swap(picked[0], picked[1])
        } else {
            Gate::new(kind, picked[0])
        };
        for &q in &picked[arity..] {
            let ct = if rng.random_bool(0.5) {
                Control::pos(q)
            } else {
                Control::neg(q)
            };
            g = g.with_control(ct);
        }
        c.push(g);
    }
    c
}

pub const X_FAMILY: [GateKind; 2] = [GateKind::X, GateKind::Swap];

/// Largest component-wise distance, comparing `wide` (which may carry extra
/// ancilla qubits above `narrow`'s) against `narrow` padded with |0⟩.
pub fn padded_distance(narrow: &[Complex64], wide: &[Complex64]) -> f64 {
    wide.iter()
        .enumerate()
        .map(|(i, w)| {
            let n = narrow.get(i).copied().unwrap_or_default();
            (w - n).norm()
        })
        .fold(0.0, f64::max)
}

/// proptest strategy for indexed circuits with the given gate kinds.
pub fn circuit_strategy(
    max_qubits: usize,
    max_gates: usize,
    max_controls: usize,
    kinds: Vec<GateKind>,
) -> impl Strategy<Value = Circuit> {
    (2..=max_qubits, 0..=max_gates, any::<u64>()).prop_map(move |(n, g, seed)| {
        use rand::SeedableRng;
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        random_circuit(&mut rng, n, g, max_controls, &kinds)
    })
}

/// Case count with on-disk failure persistence off (integration tests have
/// no `lib.rs` next to them for proptest to anchor regressions to).
pub fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        failure_persistence: None,
        ..ProptestConfig::with_cases(n)
    }
}
