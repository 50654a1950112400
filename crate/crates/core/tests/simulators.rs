mod common;

use num_complex::Complex64;
use proptest::prelude::*;
use qforge_core::ir::{Circuit, Gate, GateKind};
use qforge_core::logic::{run_logic, BasisState};
use qforge_core::statevector::{run, run_from, GateMatrix, StateVector};

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::{Rng, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut amps: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_amplitudes(amps).unwrap()
}

proptest! {
    #![proptest_config(common::cases(200))]

    #[test]
    fn unitary_gates_preserve_norm(
        c in common::circuit_strategy(8, 60, 3, GateKind::ALL.iter().copied().filter(|k| *k != GateKind::Swap).collect()),
        seed in any::<u64>(),
    ) {
        let s = random_state(c.n_qubits(), seed);
        let out = run_from(&c, s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn logic_and_state_vector_agree(
        c in common::circuit_strategy(7, 30, 4, vec![GateKind::X]),
        input in any::<u64>(),
    ) {
        let n = c.n_qubits();
        let prep = input % (1u64 << n);
        let sv = run(&c, prep).unwrap();
        let logic = run_logic(&c, &BasisState::from_u64(n, prep).unwrap()).unwrap();
        prop_assert_eq!(sv.as_basis_state(1e-12), Some(logic.as_u64().unwrap() as usize));
    }

    #[test]
    fn gate_then_dagger_is_identity(kind_ix in 0usize..8, t in 0usize..4, seed in any::<u64>()) {
        let kind = [GateKind::X, GateKind::Y, GateKind::Z, GateKind::H, GateKind::S, GateKind::Sdg, GateKind::T, GateKind::Tdg][kind_ix];
        let inverse = match kind {
            GateKind::S => GateKind::Sdg,
            GateKind::Sdg => GateKind::S,
            GateKind::T => GateKind::Tdg,
            GateKind::Tdg => GateKind::T,
            k => k,
        };
        let c = Circuit::from_gates(vec![Gate::new(kind, t), Gate::new(inverse, t), Gate::x(3)]);
        let s = random_state(4, seed);
        let want = run_from(&Circuit::from_gates(vec![Gate::x(3)]), s.clone()).unwrap();
        let got = run_from(&c, s).unwrap();
        let d = want.amplitudes().iter().zip(got.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-12);
    }
}

#[test]
fn gate_matrices_are_unitary() {
    for kind in GateKind::ALL {
        if let Some(m) = GateMatrix::for_kind(kind) {
            assert!(m.is_unitary(1e-14), "{kind}");
        }
    }
}
