use std::path::{Path, PathBuf};

use qforge_core::harness::{load_suite, parse_suite, run_suite, CaseOutcome, SuiteError};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

#[test]
fn adder_suite() {
    let report = run_suite(&load_suite(&data("modadd4.qtest")).unwrap());
    let outcomes: Vec<&CaseOutcome> = report.cases.iter().map(|c| &c.outcome).collect();
    assert_eq!(outcomes[0], &CaseOutcome::Pass);
    assert_eq!(outcomes[1], &CaseOutcome::Pass);
    assert_eq!(
        outcomes[2],
        &CaseOutcome::Fail {
            expected: "b=4".into(),
            actual: "b=3".into()
        }
    );
    assert_eq!(outcomes[3], &CaseOutcome::Pass);
    // a=2, b=2 ends in basis index 2 | 4 << 4 = 66
    assert_eq!(outcomes[4], &CaseOutcome::Pass);
    assert_eq!((report.passed, report.failed, report.errors), (4, 1, 0));
    assert!(report.to_string().ends_with("4 passed, 1 failed, 0 errors"));
}

#[test]
fn bell_suite() {
    let cases = load_suite(&data("bell.qtest")).unwrap();
    let report = run_suite(&cases);
    assert_eq!(report.cases[0].outcome, CaseOutcome::Pass);
    assert_eq!(report.cases[1].outcome, CaseOutcome::Pass);
    assert!(matches!(&report.cases[2].outcome, CaseOutcome::Error(m) if m.contains("NOT-family")));
    assert_eq!(report, run_suite(&cases));
}

#[test]
fn missing_circuit_is_a_case_error() {
    let cases = parse_suite("circuit /nonexistent/nowhere.fqt\ncase x expect q=0\n").unwrap();
    let report = run_suite(&cases);
    assert!(matches!(report.cases[0].outcome, CaseOutcome::Error(_)));
}

#[test]
fn missing_suite_is_an_io_error() {
    assert!(matches!(
        load_suite(&data("absent.qtest")),
        Err(SuiteError::Io { .. })
    ));
}
