mod common;

use proptest::prelude::*;
use qforge_core::ir::{Circuit, Control, Gate, GateKind, QubitRef};
use qforge_core::source::{parse_source, print_source, ParseError};
use rand::rngs::StdRng;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};

const LABELS: [&str; 4] = ["a", "b", "carry", "q_1"];

/// Circuits with named registers, extra anonymous qubits, and refs written
/// either by name or by flat index.
fn named_circuit(seed: u64) -> Circuit {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut c = Circuit::new();
    let n_regs = rng.random_range(1..=LABELS.len());
    for label in &LABELS[..n_regs] {
        c.add_register(*label, rng.random_range(1..=4)).unwrap();
    }
    c.grow_to(c.n_qubits() + rng.random_range(0..3));
    let layout = c.layout();
    let n = c.n_qubits();
    let as_ref = |rng: &mut StdRng, i: usize| -> QubitRef {
        match layout.name_of(i) {
            Some(named) if rng.random_bool(0.7) => named,
            _ => QubitRef::Index(i),
        }
    };
    for _ in 0..rng.random_range(0..25) {
        let kind = GateKind::ALL[rng.random_range(0..GateKind::ALL.len())];
        if n < kind.arity() {
            continue;
        }
        let k = rng.random_range(0..=3usize.min(n - kind.arity()));
        let picked = sample(&mut rng, n, kind.arity() + k).into_vec();
        let mut g = if kind == GateKind::Swap {
            let (x, y) = (as_ref(&mut rng, picked[0]), as_ref(&mut rng, picked[1]));
            Gate::swap(x, y)
        } else {
            Gate::new(kind, as_ref(&mut rng, picked[0]))
        };
        for &q in &picked[kind.arity()..] {
            let r = as_ref(&mut rng, q);
            g = g.with_control(if rng.random_bool(0.5) {
                Control::pos(r)
            } else {
                Control::neg(r)
            });
        }
        c.push(g);
    }
    c
}

proptest! {
    #![proptest_config(common::cases(1000))]

    #[test]
    fn print_then_parse_is_identity(seed in any::<u64>()) {
        let c = named_circuit(seed);
        let text = print_source(&c);
        let back = parse_source(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(print_source(&back), text);
    }

    #[test]
    fn parser_is_total_on_arbitrary_text(text in "\\PC{0,200}") {
        let _ = parse_source(&text);
    }

    #[test]
    fn parser_is_total_on_gate_like_text(text in "(qreg [a-z] [0-9]\n|qubits [0-9]{1,3}\n|[a-z]{1,4}( !?[a-z]?\\[?[0-9]{0,3}\\]?){0,4}\n|# [ -~]*\n){0,12}") {
        let _ = parse_source(&text);
    }
}

#[test]
fn errors_carry_positions() {
    let err = parse_source("qreg a 2\n\nfoo a[0]").unwrap_err();
    assert!(matches!(
        err,
        ParseError::UnknownGate {
            line: 3,
            col: 1,
            ..
        }
    ));
    assert_eq!(err.position(), (3, 1));
    let err = parse_source("qreg a 2\nx b[0]").unwrap_err();
    assert!(matches!(
        err,
        ParseError::UndeclaredRegister { line: 2, .. }
    ));
}

#[test]
fn fixtures_round_trip() {
    for (name, text) in qforge_core::library::fixtures::ALL {
        let c = parse_source(text).unwrap();
        assert_eq!(parse_source(&print_source(&c)).unwrap(), c, "{name}");
    }
}

#[test]
fn anonymous_circuit_prints_qubit_count() {
    let c = common::random_circuit(&mut StdRng::seed_from_u64(7), 5, 10, 2, &GateKind::ALL);
    let text = print_source(&c);
    assert!(text.starts_with("qubits 5\n"));
    assert_eq!(parse_source(&text).unwrap(), c);
}
