//! Circuit unit tests: prepare registers, run on a backend, decode, compare.
//!
//! Suites are line-oriented `.qtest` files:
//!
//! ```text
//! circuit modadd4.fqt        # relative to the suite file
//! backend logic              # logic | sv, applies to the cases below
//! lower off                  # on: run the fully lowered circuit instead
//! case one_plus_two prep a=1,b=2,c=0 expect b=3,a=1
//! backend sv
//! case superposed prep b=0b0001
//! expect amp 3 0.7071067811865476 0 tol 1e-12
//! ```
//!
//! `expect amp` lines attach to the preceding case. In a state-vector case,
//! every amplitude not listed must stay below the smallest listed tolerance.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::ir::Circuit;
use crate::logic::{run_logic, BasisState};
use crate::passes::{lower, verify, PassConfig};
use crate::source::parse_source;
use crate::statevector::{run_from, StateVector};

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BackendKind {
    Logic,
    StateVector,
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackendKind::Logic => "logic",
            BackendKind::StateVector => "sv",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitSource {
    Path(PathBuf),
    Inline(Arc<Circuit>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeExpectation {
    pub index: usize,
    pub value: Complex64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub name: String,
    pub circuit: CircuitSource,
    pub backend: BackendKind,
    pub lower: bool,
    pub prep: Vec<(String, u64)>,
    pub expect: Vec<(String, u64)>,
    pub amplitudes: Vec<AmplitudeExpectation>,
}

impl TestCase {
    pub fn logic(name: impl Into<String>, circuit: Arc<Circuit>) -> TestCase {
        TestCase {
            name: name.into(),
            circuit: CircuitSource::Inline(circuit),
            backend: BackendKind::Logic,
            lower: false,
            prep: Vec::new(),
            expect: Vec::new(),
            amplitudes: Vec::new(),
        }
    }

    pub fn prep(mut self, register: &str, value: u64) -> TestCase {
        self.prep.push((register.to_string(), value));
        self
    }

    pub fn expect(mut self, register: &str, value: u64) -> TestCase {
        self.expect.push((register.to_string(), value));
        self
    }
}

fn syntax(line: usize, message: impl Into<String>) -> SuiteError {
    SuiteError::Syntax {
        line,
        message: message.into(),
    }
}

fn parse_value(s: &str) -> Option<u64> {
    match s.strip_prefix("0b") {
        Some(bits) if !bits.is_empty() => u64::from_str_radix(bits, 2).ok(),
        Some(_) => None,
        None => s.parse().ok(),
    }
}

/// `a=1,b=0b10` (whitespace after commas allowed).
pub fn parse_assignments(s: &str) -> Result<Vec<(String, u64)>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|pair| {
            let (reg, val) = pair
                .split_once('=')
                .ok_or_else(|| format!("expected REG=VALUE, found `{pair}`"))?;
            let reg = reg.trim();
            if reg.is_empty() {
                return Err(format!("missing register name in `{pair}`"));
            }
            let v = parse_value(val.trim()).ok_or_else(|| format!("bad value `{}`", val.trim()))?;
            Ok((reg.to_string(), v))
        })
        .collect()
}

fn parse_f64(line: usize, s: Option<&str>, what: &str) -> Result<f64, SuiteError> {
    s.and_then(|t| t.parse::<f64>().ok())
        .filter(|v| v.is_finite())
        .ok_or_else(|| syntax(line, format!("expected {what}")))
}

/// Parses suite text. Relative circuit paths are kept as written.
pub fn parse_suite(text: &str) -> Result<Vec<TestCase>, SuiteError> {
    let mut cases: Vec<TestCase> = Vec::new();
    let mut circuit: Option<CircuitSource> = None;
    let mut backend = BackendKind::Logic;
    let mut lowered = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut words = content.split_whitespace();
        let Some(keyword) = words.next() else {
            continue;
        };
        match keyword {
            "circuit" => {
                let path = content["circuit".len()..].trim();
                if path.is_empty() {
                    return Err(syntax(line, "expected `circuit PATH`"));
                }
                circuit = Some(CircuitSource::Path(PathBuf::from(path)));
            }
            "backend" => {
                backend = match (words.next(), words.next()) {
                    (Some("logic"), None) => BackendKind::Logic,
                    (Some("sv"), None) => BackendKind::StateVector,
                    _ => return Err(syntax(line, "expected `backend logic|sv`")),
                };
            }
            "lower" => {
                lowered = match (words.next(), words.next()) {
                    (Some("on"), None) => true,
                    (Some("off"), None) => false,
                    _ => return Err(syntax(line, "expected `lower on|off`")),
                };
            }
            "case" => {
                let name = words
                    .next()
                    .ok_or_else(|| syntax(line, "expected a case name"))?;
                let circuit = circuit
                    .clone()
                    .ok_or_else(|| syntax(line, "case before any `circuit` directive"))?;
                let rest: Vec<&str> = words.collect();
                let mut prep = String::new();
                let mut expect = String::new();
                let mut section: Option<&mut String> = None;
                let mut seen = (false, false);
                for w in rest {
                    match w {
                        "prep" if !seen.0 && !seen.1 => {
                            seen.0 = true;
                            section = Some(&mut prep);
                        }
                        "expect" if !seen.1 => {
                            seen.1 = true;
                            section = Some(&mut expect);
                        }
                        _ => match section.as_deref_mut() {
                            Some(buf) => buf.push_str(w),
                            None => return Err(syntax(line, format!("unexpected `{w}`"))),
                        },
                    }
                }
                let prep = parse_assignments(&prep).map_err(|m| syntax(line, m))?;
                let expect = parse_assignments(&expect).map_err(|m| syntax(line, m))?;
                cases.push(TestCase {
                    name: name.to_string(),
                    circuit,
                    backend,
                    lower: lowered,
                    prep,
                    expect,
                    amplitudes: Vec::new(),
                });
            }
            "expect" => {
                if words.next() != Some("amp") {
                    return Err(syntax(line, "expected `expect amp INDEX RE IM tol T`"));
                }
                let case = cases
                    .last_mut()
                    .ok_or_else(|| syntax(line, "`expect amp` before any case"))?;
                let index = words
                    .next()
                    .and_then(|t| t.parse::<usize>().ok())
                    .ok_or_else(|| syntax(line, "expected a basis index"))?;
                let re = parse_f64(line, words.next(), "a real part")?;
                let im = parse_f64(line, words.next(), "an imaginary part")?;
                if words.next() != Some("tol") {
                    return Err(syntax(line, "expected `tol`"));
                }
                let tol = parse_f64(line, words.next(), "a tolerance")?;
                if tol <= 0.0 {
                    return Err(syntax(line, "tolerance must be positive"));
                }
                if let Some(extra) = words.next() {
                    return Err(syntax(line, format!("unexpected `{extra}`")));
                }
                case.amplitudes.push(AmplitudeExpectation {
                    index,
                    value: Complex64::new(re, im),
                    tol,
                });
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok(cases)
}

/// Reads a suite file; circuit paths become relative to its directory.
pub fn load_suite(path: &Path) -> Result<Vec<TestCase>, SuiteError> {
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut cases = parse_suite(&text)?;
    for case in &mut cases {
        if let CircuitSource::Path(p) = &case.circuit {
            if p.is_relative() {
                case.circuit = CircuitSource::Path(base.join(p));
            }
        }
    }
    Ok(cases)
}

/// What a backend hands back after a run.
#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Basis(BasisState),
    State(StateVector),
}

/// Somewhere a prepared circuit can be executed.
pub trait Backend: Sync {
    fn kind(&self) -> BackendKind;
    fn run(&self, circuit: &Circuit, prep: &BasisState) -> Result<RunOutput, String>;
}

pub struct LogicBackend;

impl Backend for LogicBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::Logic
    }

    fn run(&self, circuit: &Circuit, prep: &BasisState) -> Result<RunOutput, String> {
        run_logic(circuit, prep)
            .map(RunOutput::Basis)
            .map_err(|e| e.to_string())
    }
}

pub struct StateVectorBackend;

impl Backend for StateVectorBackend {
    fn kind(&self) -> BackendKind {
        BackendKind::StateVector
    }

    fn run(&self, circuit: &Circuit, prep: &BasisState) -> Result<RunOutput, String> {
        let basis = prep
            .as_u64()
            .ok_or_else(|| "preparation does not fit the state-vector simulator".to_string())?;
        let state = StateVector::basis(circuit.n_qubits(), basis).map_err(|e| e.to_string())?;
        let indexed = circuit.to_indexed().map_err(|e| e.to_string())?;
        run_from(&indexed, state)
            .map(RunOutput::State)
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CaseOutcome {
    Pass,
    Fail { expected: String, actual: String },
    Error(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub name: String,
    pub outcome: CaseOutcome,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestReport {
    pub cases: Vec<CaseResult>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

impl TestReport {
    fn from_cases(cases: Vec<CaseResult>) -> TestReport {
        let mut r = TestReport::default();
        for c in &cases {
            match c.outcome {
                CaseOutcome::Pass => r.passed += 1,
                CaseOutcome::Fail { .. } => r.failed += 1,
                CaseOutcome::Error(_) => r.errors += 1,
            }
        }
        r.cases = cases;
        r
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.cases.len()
    }
}

impl fmt::Display for TestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.cases {
            match &c.outcome {
                CaseOutcome::Pass => writeln!(f, "PASS  {}", c.name)?,
                CaseOutcome::Fail { expected, actual } => {
                    writeln!(f, "FAIL  {}: expected {expected}, got {actual}", c.name)?
                }
                CaseOutcome::Error(m) => writeln!(f, "ERROR {}: {m}", c.name)?,
            }
        }
        write!(
            f,
            "{} passed, {} failed, {} errors",
            self.passed, self.failed, self.errors
        )
    }
}

/// Default state-vector tolerance for register expectations.
const BASIS_TOL: f64 = 1e-9;

fn load_circuits(cases: &[TestCase]) -> HashMap<PathBuf, Result<Arc<Circuit>, String>> {
    let mut out = HashMap::new();
    for case in cases {
        if let CircuitSource::Path(p) = &case.circuit {
            out.entry(p.clone()).or_insert_with(|| {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| format!("cannot read {}: {e}", p.display()))?;
                parse_source(&text)
                    .map(Arc::new)
                    .map_err(|e| format!("{}: {e}", p.display()))
            });
        }
    }
    out
}

fn format_pairs(pairs: &[(String, u64)]) -> String {
    pairs
        .iter()
        .map(|(r, v)| format!("{r}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn run_case(case: &TestCase, circuit: &Circuit, backends: &[&dyn Backend]) -> CaseOutcome {
    let backend = match backends.iter().find(|b| b.kind() == case.backend) {
        Some(b) => *b,
        None => return CaseOutcome::Error(format!("no {} backend available", case.backend)),
    };
    let diags = verify(circuit);
    if diags.has_errors() {
        return CaseOutcome::Error(diags.to_string());
    }
    let layout = circuit.layout();
    let prepared;
    let runnable = if case.lower {
        match lower(circuit, &PassConfig::default()) {
            Ok(c) => {
                prepared = c;
                &prepared
            }
            Err(e) => return CaseOutcome::Error(e.to_string()),
        }
    } else {
        circuit
    };

    let field = |reg: &str| -> Result<(usize, usize), String> {
        let (base, size) = layout
            .register(reg)
            .ok_or_else(|| format!("unknown register `{reg}`"))?;
        if size > 64 {
            return Err(format!("register `{reg}` is wider than 64 qubits"));
        }
        Ok((base, size))
    };
    let mut prep = BasisState::zeros(runnable.n_qubits());
    for (reg, v) in &case.prep {
        let (base, size) = match field(reg) {
            Ok(f) => f,
            Err(m) => return CaseOutcome::Error(m),
        };
        if size < 64 && v >> size != 0 {
            return CaseOutcome::Error(format!("{reg}={v} does not fit in {size} qubits"));
        }
        prep.set_field(base, size, *v);
    }

    let output = match backend.run(runnable, &prep) {
        Ok(o) => o,
        Err(m) => return CaseOutcome::Error(m),
    };

    let basis = match &output {
        RunOutput::Basis(b) => Some(b.clone()),
        RunOutput::State(sv) => sv.as_basis_state(BASIS_TOL).map(|i| {
            BasisState::from_u64(runnable.n_qubits(), i as u64).expect("index fits the state")
        }),
    };
    if !case.expect.is_empty() {
        let Some(basis) = basis else {
            return CaseOutcome::Fail {
                expected: format_pairs(&case.expect),
                actual: "a superposition".to_string(),
            };
        };
        let mut actual = Vec::with_capacity(case.expect.len());
        for (reg, _) in &case.expect {
            match field(reg) {
                Ok((base, size)) => actual.push((reg.clone(), basis.field(base, size))),
                Err(m) => return CaseOutcome::Error(m),
            }
        }
        if actual != case.expect {
            return CaseOutcome::Fail {
                expected: format_pairs(&case.expect),
                actual: format_pairs(&actual),
            };
        }
    }

    if !case.amplitudes.is_empty() {
        let RunOutput::State(sv) = &output else {
            return CaseOutcome::Error("amplitude expectations need the sv backend".to_string());
        };
        let amps = sv.amplitudes();
        for e in &case.amplitudes {
            let Some(&got) = amps.get(e.index) else {
                return CaseOutcome::Error(format!("basis index {} out of range", e.index));
            };
            if (got - e.value).norm() > e.tol {
                return CaseOutcome::Fail {
                    expected: format!("amp[{}]={} (tol {})", e.index, e.value, e.tol),
                    actual: format!("amp[{}]={got}", e.index),
                };
            }
        }
        let floor = case
            .amplitudes
            .iter()
            .map(|e| e.tol)
            .fold(f64::INFINITY, f64::min);
        if let Some((i, a)) = amps
            .iter()
            .enumerate()
            .find(|(i, a)| a.norm() >= floor && !case.amplitudes.iter().any(|e| e.index == *i))
        {
            return CaseOutcome::Fail {
                expected: format!("amp[{i}]=0 (tol {floor})"),
                actual: format!("amp[{i}]={a}"),
            };
        }
    }
    CaseOutcome::Pass
}

/// Runs cases on the given backends (in parallel, reported in order).
pub fn run_suite_with(cases: &[TestCase], backends: &[&dyn Backend]) -> TestReport {
    let circuits = load_circuits(cases);
    let results = cases
        .par_iter()
        .map(|case| {
            let circuit = match &case.circuit {
                CircuitSource::Inline(c) => Ok(c.clone()),
                CircuitSource::Path(p) => circuits[p].clone(),
            };
            let outcome = match circuit {
                Ok(c) => run_case(case, &c, backends),
                Err(m) => CaseOutcome::Error(m),
            };
            CaseResult {
                name: case.name.clone(),
                outcome,
            }
        })
        .collect();
    TestReport::from_cases(results)
}

/// Runs cases on the built-in logic and state-vector simulators.
pub fn run_suite(cases: &[TestCase]) -> TestReport {
    run_suite_with(cases, &[&LogicBackend, &StateVectorBackend])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{Gate, GateKind};
    use crate::library::{mod_add, AdderLayout};

    fn adder() -> Arc<Circuit> {
        Arc::new(mod_add(4, AdderLayout::ARegisterFirst).unwrap())
    }

    #[test]
    fn pass_and_fail() {
        let c = adder();
        let cases = vec![
            TestCase::logic("ok", c.clone())
                .prep("a", 1)
                .prep("b", 2)
                .prep("c", 0)
                .expect("b", 3),
            TestCase::logic("bad", c)
                .prep("a", 1)
                .prep("b", 2)
                .expect("b", 4),
        ];
        let r = run_suite(&cases);
        assert_eq!(r.cases[0].outcome, CaseOutcome::Pass);
        assert_eq!(
            r.cases[1].outcome,
            CaseOutcome::Fail {
                expected: "b=4".into(),
                actual: "b=3".into()
            }
        );
        assert_eq!((r.passed, r.failed, r.errors), (1, 1, 0));
    }

    #[test]
    fn non_logic_gate_is_error() {
        let mut c = Circuit::with_registers([("q", 1)]).unwrap();
        c.push(Gate::new(GateKind::H, crate::ir::QubitRef::named("q", 0)));
        let r = run_suite(&[TestCase::logic("h", Arc::new(c)).expect("q", 0)]);
        assert!(
            matches!(&r.cases[0].outcome, CaseOutcome::Error(m) if m.contains("not a NOT-family"))
        );
    }

    #[test]
    fn exhaustive_adder_suite() {
        let c = adder();
        let cases: Vec<TestCase> = (0..256u64)
            .map(|v| {
                let (a, b) = (v & 15, v >> 4);
                TestCase::logic(format!("add_{a}_{b}"), c.clone())
                    .prep("a", a)
                    .prep("b", b)
                    .expect("b", (a + b) % 16)
                    .expect("a", a)
                    .expect("c", 0)
            })
            .collect();
        let r = run_suite(&cases);
        assert_eq!(r.passed, 256);
        assert_eq!(r, run_suite(&cases));
    }

    #[test]
    fn parse_suite_text() {
        let text = "circuit x.fqt\ncase a prep q=0b01 expect q=1\nbackend sv\nlower on\ncase b\nexpect amp 0 0.5 -0.5 tol 1e-9\n";
        let cases = parse_suite(text).unwrap();
        assert_eq!(cases.len(), 2);
        assert_eq!(cases[0].prep, vec![("q".to_string(), 1)]);
        assert_eq!(cases[0].backend, BackendKind::Logic);
        assert_eq!(cases[1].backend, BackendKind::StateVector);
        assert!(cases[1].lower);
        assert_eq!(cases[1].amplitudes[0].value, Complex64::new(0.5, -0.5));
    }

    #[test]
    fn parse_suite_errors() {
        for bad in [
            "case x",
            "circuit a\nexpect amp 0 1 0 tol 1",
            "circuit a\ncase x\nexpect amp 0 1 0 tol 0",
            "circuit a\ncase x\nexpect amp 0 1 0 tol",
            "backend gpu",
            "circuit a\ncase x prep a=1 prep b=2",
            "circuit a\ncase x prep a",
            "frobnicate",
        ] {
            assert!(parse_suite(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn state_vector_amplitudes() {
        let mut c = Circuit::with_registers([("q", 1)]).unwrap();
        c.push(Gate::new(GateKind::H, crate::ir::QubitRef::named("q", 0)));
        let c = Arc::new(c);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut ok = TestCase::logic("sv", c.clone());
        ok.backend = BackendKind::StateVector;
        ok.amplitudes = vec![
            AmplitudeExpectation {
                index: 0,
                value: Complex64::new(h, 0.0),
                tol: 1e-12,
            },
            AmplitudeExpectation {
                index: 1,
                value: Complex64::new(h, 0.0),
                tol: 1e-12,
            },
        ];
        let mut missing = ok.clone();
        missing.amplitudes.pop();
        let r = run_suite(&[ok, missing]);
        assert_eq!(r.cases[0].outcome, CaseOutcome::Pass);
        assert!(matches!(r.cases[1].outcome, CaseOutcome::Fail { .. }));
    }

    #[test]
    fn lowered_run_matches() {
        let mut c = Circuit::with_registers([("q", 4)]).unwrap();
        let q = crate::ir::qreg("q", 4);
        c.push(
            Gate::x(q[3].clone())
                .with_control(crate::ir::Control::pos(q[0].clone()))
                .with_control(crate::ir::Control::neg(q[1].clone()))
                .with_control(crate::ir::Control::pos(q[2].clone())),
        );
        let mut case = TestCase::logic("low", Arc::new(c))
            .prep("q", 0b0101)
            .expect("q", 0b1101);
        case.lower = true;
        assert!(run_suite(&[case]).all_passed());
    }
}
