mod common;

use proptest::prelude::*;
use qforge_core::ir::GateKind;
use qforge_core::library::fixtures;
use qforge_core::passes::{compile, lower, PassConfig};
use qforge_core::qp::{emit_qp, parse_qp, Opcode, QpError, QpGate, QpProgram};
use qforge_core::source::parse_source;

fn program() -> impl Strategy<Value = QpProgram> {
    (1usize..12, 2usize..5).prop_flat_map(|(n, m)| {
        let gate = (1i64..=8, 0..n, proptest::collection::vec(0..n, 0..=m)).prop_filter_map(
            "controls must be distinct and avoid the target",
            move |(op, target, mut controls)| {
                controls.retain(|&c| c != target);
                let mut seen = Vec::new();
                controls.retain(|c| {
                    let fresh = !seen.contains(c);
                    seen.push(*c);
                    fresh
                });
                (n > 1 || controls.is_empty()).then(|| QpGate {
                    opcode: Opcode::from_code(op).unwrap(),
                    target,
                    controls,
                })
            },
        );
        proptest::collection::vec(gate, 0..30).prop_map(move |gates| QpProgram {
            n_qubits: n,
            max_controls: m,
            gates,
        })
    })
}

proptest! {
    #![proptest_config(common::cases(1000))]

    #[test]
    fn emit_then_parse_is_identity(p in program()) {
        let text = emit_qp(&p).unwrap();
        prop_assert_eq!(parse_qp(&text).unwrap(), p);
    }

    #[test]
    fn parser_is_total(text in "\\PC{0,120}") {
        let _ = parse_qp(&text);
    }

    #[test]
    fn parser_is_total_on_integer_soup(ints in proptest::collection::vec(-3i64..12, 0..40)) {
        let text = ints.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ");
        if let Ok(p) = parse_qp(&text) {
            prop_assert!(p.validate().is_ok());
        }
    }

    #[test]
    fn compiled_programs_decode_to_the_lowered_circuit(c in common::circuit_strategy(6, 20, 4, GateKind::ALL.to_vec())) {
        let cfg = PassConfig::default();
        let p = compile(&c, &cfg).unwrap();
        let back = parse_qp(&emit_qp(&p).unwrap()).unwrap();
        let (decoded, lowered) = (back.to_circuit(), lower(&c, &cfg).unwrap());
        prop_assert_eq!(decoded.gates(), lowered.gates());
    }
}

#[test]
fn golden_modadd4() {
    let c = parse_source(fixtures::CUCCARO_MODADD4_REARRANGED).unwrap();
    let p = compile(&c, &PassConfig::default()).unwrap();
    let text = emit_qp(&p).unwrap() + "\n";
    assert_eq!(text, include_str!("../fixtures/cuccaro_modadd4.qp"));
}

#[test]
fn rejects_malformed() {
    assert_eq!(parse_qp(""), Err(QpError::Truncated));
    assert_eq!(parse_qp("2 1 2  9 0 -1 -1"), Err(QpError::BadOpcode(9)));
    assert!(matches!(
        parse_qp("2 1 2  1 2 -1 -1"),
        Err(QpError::BadIndex { .. })
    ));
    assert!(matches!(
        parse_qp("2 1 2  1 0 0 -1"),
        Err(QpError::BadIndex { .. })
    ));
    assert_eq!(parse_qp("2 0 2 7"), Err(QpError::TrailingTokens));
    assert!(matches!(
        parse_qp("2 x 2"),
        Err(QpError::NonIntegerToken(_))
    ));
    assert!(matches!(parse_qp("0 0 2"), Err(QpError::BadHeader(_))));
    assert!(matches!(parse_qp("2 0 1"), Err(QpError::BadHeader(_))));
    assert_eq!(
        parse_qp("3 1 2  1 0 2 -1").unwrap().gates[0].controls,
        vec![2]
    );
}
