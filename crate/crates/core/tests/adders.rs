use qforge_core::ir::{qreg, Circuit, IrError, QubitRef};
use qforge_core::library::{
    cuccaro_full_adder, full_add, mod_add, AdderLayout, AdderSpec, LibraryError,
};
use qforge_core::logic::{run_logic, BasisState, LogicProgram};

/// Full adder over `a(w) b(w) c(1) z(1)`: exhaustive against integer addition.
#[test]
fn full_adder_exhaustive_up_to_width_6() {
    for w in 1..=6usize {
        let c = cuccaro_full_adder(w).unwrap();
        let p = LogicProgram::compile(&c).unwrap();
        let m = 1u64 << w;
        for a in 0..m {
            for b in 0..m {
                let out = p.run_u64(a | (b << w)).unwrap();
                let (ra, rb) = (out & (m - 1), (out >> w) & (m - 1));
                let (rc, rz) = ((out >> (2 * w)) & 1, (out >> (2 * w + 1)) & 1);
                assert_eq!(
                    (ra, rb, rc, rz),
                    (a, (a + b) % m, 0, (a + b) / m),
                    "w={w} a={a} b={b}"
                );
            }
        }
    }
}

#[test]
fn mod_add_equals_full_add_without_carry() {
    for w in 1..=6usize {
        let full = LogicProgram::compile(&cuccaro_full_adder(w).unwrap()).unwrap();
        let spec = AdderSpec::new(w, AdderLayout::ARegisterFirst).unwrap();
        let modular = LogicProgram::compile(&spec.circuit()).unwrap();
        let m = 1u64 << w;
        let low = (1u64 << (2 * w + 1)) - 1;
        for a in 0..m {
            for b in 0..m {
                let x = a | (b << w);
                assert_eq!(modular.run_u64(x).unwrap(), full.run_u64(x).unwrap() & low);
            }
        }
    }
}

#[test]
fn layouts_agree_under_permutation() {
    for w in 1..=5usize {
        let inter = AdderSpec::new(w, AdderLayout::Interleaved).unwrap();
        let first = AdderSpec::new(w, AdderLayout::ARegisterFirst).unwrap();
        let (pi, pf) = (
            LogicProgram::compile(&inter.circuit()).unwrap(),
            LogicProgram::compile(&first.circuit()).unwrap(),
        );
        let (qi, qf) = (inter.qubits(), first.qubits());
        for a in 0..1u64 << w {
            for b in 0..1u64 << w {
                for c in [false, true] {
                    let x = qi.decode(pi.run_u64(qi.encode(a, b, c)).unwrap());
                    let y = qf.decode(pf.run_u64(qf.encode(a, b, c)).unwrap());
                    assert_eq!(x, y);
                }
            }
        }
    }
}

#[test]
fn a_zero_leaves_b_unchanged() {
    let spec = AdderSpec::new(4, AdderLayout::Interleaved).unwrap();
    let c = spec.circuit();
    let q = spec.qubits();
    for b in 0..16 {
        let mut s = BasisState::zeros(c.n_qubits());
        for (k, &i) in q.b.iter().enumerate() {
            s.set(i, (b >> k) & 1 == 1);
        }
        let out = run_logic(&c, &s).unwrap();
        assert_eq!(q.decode(out.as_u64().unwrap()), (0, b, false));
    }
}

#[test]
fn full_add_rejects_mismatched_registers() {
    let err = full_add(
        &qreg("a", 3),
        &qreg("b", 4),
        &QubitRef::named("c", 0),
        &QubitRef::named("z", 0),
    )
    .unwrap_err();
    assert_eq!(
        err,
        LibraryError::Ir(IrError::LengthMismatch { left: 4, right: 3 })
    );
    assert!(err
        .to_string()
        .starts_with("input qubit register lengths must be identical"));
    assert_eq!(
        mod_add(0, AdderLayout::Interleaved),
        Err(LibraryError::ZeroWidth)
    );
    assert!(Circuit::new().is_empty());
}
