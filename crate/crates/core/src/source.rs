//! The `.fqt` circuit source format.
//!
//! ```text
//! # comment
//! qreg a 4          # register declaration: label, size
//! qubits 10         # optional total qubit count (anonymous qubits above the registers)
//! x b[0] a[0]       # gate: targets first, then controls
//! x b[1] !a[1] 3    # '!' marks a negative control; a bare integer is a flat index
//! swap a[0] a[1] c[0]
//! ```
//!
//! One statement per line. Whitespace inside a line is insignificant,
//! keywords and gate mnemonics are case-insensitive.

use std::fmt::Write as _;

use thiserror::Error;

use crate::ir::{Circuit, Control, Gate, GateKind, Polarity, QubitRef, Register};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax {
        line: usize,
        col: usize,
        message: String,
    },
    #[error("{line}:{col}: unknown gate `{name}`")]
    UnknownGate {
        line: usize,
        col: usize,
        name: String,
    },
    #[error("{line}:{col}: undeclared register `{label}`")]
    UndeclaredRegister {
        line: usize,
        col: usize,
        label: String,
    },
}

impl ParseError {
    pub fn position(&self) -> (usize, usize) {
        match self {
            ParseError::Syntax { line, col, .. }
            | ParseError::UnknownGate { line, col, .. }
            | ParseError::UndeclaredRegister { line, col, .. } => (*line, *col),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    Int(&'a str),
    Bang,
    Open,
    Close,
}

struct Lexed<'a> {
    tok: Tok<'a>,
    col: usize,
}

fn syntax(line: usize, col: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        message: message.into(),
    }
}

fn lex_line(line_no: usize, text: &str) -> Result<Vec<Lexed<'_>>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    // columns are 1-based and count chars, not bytes
    let mut col = 0;
    while let Some((start, ch)) = chars.next() {
        col += 1;
        let tok_col = col;
        match ch {
            '#' => break,
            c if c.is_whitespace() => continue,
            '!' => out.push(Lexed {
                tok: Tok::Bang,
                col: tok_col,
            }),
            '[' => out.push(Lexed {
                tok: Tok::Open,
                col: tok_col,
            }),
            ']' => out.push(Lexed {
                tok: Tok::Close,
                col: tok_col,
            }),
            c if c.is_ascii_digit() || c.is_ascii_alphabetic() || c == '_' => {
                let is_int = c.is_ascii_digit();
                let mut end = start + c.len_utf8();
                while let Some(&(i, n)) = chars.peek() {
                    let ok = if is_int {
                        n.is_ascii_digit()
                    } else {
                        n.is_ascii_alphanumeric() || n == '_'
                    };
                    if !ok {
                        break;
                    }
                    end = i + n.len_utf8();
                    col += 1;
                    chars.next();
                }
                let word = &text[start..end];
                let tok = if is_int {
                    Tok::Int(word)
                } else {
                    Tok::Ident(word)
                };
                out.push(Lexed { tok, col: tok_col });
            }
            other => {
                return Err(syntax(
                    line_no,
                    tok_col,
                    format!("unexpected character {other:?}"),
                ))
            }
        }
    }
    Ok(out)
}

fn parse_int(line: usize, col: usize, s: &str) -> Result<usize, ParseError> {
    s.parse::<usize>()
        .map_err(|_| syntax(line, col, format!("integer `{s}` out of range")))
}

struct Parser {
    registers: Vec<Register>,
    declared: usize,
    n_qubits: usize,
    gates: Vec<Gate>,
}

impl Parser {
    fn line(&mut self, line: usize, toks: &[Lexed<'_>]) -> Result<(), ParseError> {
        let Some(first) = toks.first() else {
            return Ok(());
        };
        let Tok::Ident(word) = first.tok else {
            return Err(syntax(
                line,
                first.col,
                "expected a declaration or gate name",
            ));
        };
        if word.eq_ignore_ascii_case("qreg") {
            self.qreg(line, toks)
        } else if word.eq_ignore_ascii_case("qubits") {
            self.qubits(line, toks)
        } else {
            self.gate(line, word, first.col, &toks[1..])
        }
    }

    fn qreg(&mut self, line: usize, toks: &[Lexed<'_>]) -> Result<(), ParseError> {
        let (label, size) = match toks {
            [_, Lexed {
                tok: Tok::Ident(l),
                col: lc,
            }, Lexed {
                tok: Tok::Int(s),
                col: sc,
            }] => (*l, (parse_int(line, *sc, s)?, *lc, *sc)),
            _ => {
                let col = toks.get(1).map_or(toks[0].col, |t| t.col);
                return Err(syntax(line, col, "expected `qreg LABEL SIZE`"));
            }
        };
        let (size, label_col, size_col) = size;
        if size == 0 {
            return Err(syntax(line, size_col, "register size must be positive"));
        }
        if self.registers.iter().any(|r| r.label == label) {
            return Err(syntax(
                line,
                label_col,
                format!("register `{label}` already declared"),
            ));
        }
        self.declared = self
            .declared
            .checked_add(size)
            .ok_or_else(|| syntax(line, size_col, "total register size overflows"))?;
        self.n_qubits = self.n_qubits.max(self.declared);
        self.registers.push(Register {
            label: label.to_string(),
            size,
        });
        Ok(())
    }

    fn qubits(&mut self, line: usize, toks: &[Lexed<'_>]) -> Result<(), ParseError> {
        match toks {
            [_, Lexed {
                tok: Tok::Int(s),
                col,
            }] => {
                let n = parse_int(line, *col, s)?;
                self.n_qubits = self.n_qubits.max(n);
                Ok(())
            }
            _ => {
                let col = toks.get(1).map_or(toks[0].col, |t| t.col);
                Err(syntax(line, col, "expected `qubits COUNT`"))
            }
        }
    }

    fn operand(
        &self,
        line: usize,
        toks: &[Lexed<'_>],
        pos: &mut usize,
    ) -> Result<(QubitRef, Polarity, usize), ParseError> {
        let start_col = toks[*pos].col;
        let mut polarity = Polarity::Positive;
        if toks[*pos].tok == Tok::Bang {
            polarity = Polarity::Negative;
            *pos += 1;
        }
        let Some(head) = toks.get(*pos) else {
            return Err(syntax(line, start_col, "expected a qubit after `!`"));
        };
        match head.tok {
            Tok::Int(s) => {
                *pos += 1;
                Ok((
                    QubitRef::Index(parse_int(line, head.col, s)?),
                    polarity,
                    start_col,
                ))
            }
            Tok::Ident(label) => {
                let (open, idx, close) =
                    (toks.get(*pos + 1), toks.get(*pos + 2), toks.get(*pos + 3));
                let offset = match (open, idx, close) {
                    (
                        Some(Lexed { tok: Tok::Open, .. }),
                        Some(Lexed {
                            tok: Tok::Int(s),
                            col,
                        }),
                        Some(Lexed {
                            tok: Tok::Close, ..
                        }),
                    ) => parse_int(line, *col, s)?,
                    _ => {
                        return Err(syntax(line, head.col, format!("expected `{label}[INDEX]`")));
                    }
                };
                if !self.registers.iter().any(|r| r.label == label) {
                    return Err(ParseError::UndeclaredRegister {
                        line,
                        col: head.col,
                        label: label.to_string(),
                    });
                }
                *pos += 4;
                Ok((QubitRef::named(label, offset), polarity, start_col))
            }
            _ => Err(syntax(line, head.col, "expected a qubit operand")),
        }
    }

    fn gate(
        &mut self,
        line: usize,
        name: &str,
        name_col: usize,
        toks: &[Lexed<'_>],
    ) -> Result<(), ParseError> {
        let kind = GateKind::from_name(name).ok_or_else(|| ParseError::UnknownGate {
            line,
            col: name_col,
            name: name.to_string(),
        })?;
        let mut pos = 0;
        let mut targets = smallvec::SmallVec::new();
        let mut controls = Vec::new();
        while pos < toks.len() {
            let (q, polarity, col) = self.operand(line, toks, &mut pos)?;
            if targets.len() < kind.arity() {
                if polarity == Polarity::Negative {
                    return Err(syntax(line, col, "a target cannot be negated"));
                }
                targets.push(q);
            } else {
                controls.push(Control { qubit: q, polarity });
            }
        }
        if targets.len() < kind.arity() {
            let col = toks.last().map_or(name_col, |t| t.col);
            return Err(syntax(
                line,
                col,
                format!("`{}` needs {} target(s)", kind.name(), kind.arity()),
            ));
        }
        self.gates.push(Gate {
            kind,
            targets,
            controls,
        });
        Ok(())
    }
}

/// Parses `.fqt` source text. Qubit ranges are not checked here; run
/// the verifier on the result.
pub fn parse_source(text: &str) -> Result<Circuit, ParseError> {
    let mut p = Parser {
        registers: Vec::new(),
        declared: 0,
        n_qubits: 0,
        gates: Vec::new(),
    };
    for (i, line) in text.lines().enumerate() {
        let toks = lex_line(i + 1, line)?;
        p.line(i + 1, &toks)?;
    }
    let Parser {
        registers,
        n_qubits,
        gates,
        ..
    } = p;
    Ok(Circuit::from_parts(registers, n_qubits, gates)
        .expect("parser already rejects duplicate and empty registers"))
}

/// Canonical source text: declarations first, then one gate per line.
pub fn print_source(c: &Circuit) -> String {
    let mut out = String::new();
    for r in c.registers() {
        let _ = writeln!(out, "qreg {} {}", r.label, r.size);
    }
    if c.n_qubits() > c.declared_qubits() {
        let _ = writeln!(out, "qubits {}", c.n_qubits());
    }
    for g in c.gates() {
        let _ = writeln!(out, "{g}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_program() {
        let c = parse_source("qreg q 2\nh q[0]\nx q[1] q[0]").unwrap();
        assert_eq!(c.n_qubits(), 2);
        assert_eq!(
            c.gates(),
            &[
                Gate::new(GateKind::H, QubitRef::named("q", 0)),
                Gate::cx(QubitRef::named("q", 0), QubitRef::named("q", 1)),
            ]
        );
    }

    #[test]
    fn negative_control() {
        let c = parse_source("qreg q 2\nx q[1] !q[0]").unwrap();
        assert_eq!(
            c.gates()[0],
            Gate::x(QubitRef::named("q", 1)).with_control(Control::neg(QubitRef::named("q", 0)))
        );
    }

    #[test]
    fn undeclared_register() {
        let err = parse_source("h r[0]").unwrap_err();
        assert_eq!(
            err,
            ParseError::UndeclaredRegister {
                line: 1,
                col: 3,
                label: "r".into()
            }
        );
    }

    #[test]
    fn unknown_gate_and_syntax_errors() {
        assert!(matches!(
            parse_source("qreg q 1\nfoo q[0]"),
            Err(ParseError::UnknownGate {
                line: 2,
                col: 1,
                ..
            })
        ));
        assert!(matches!(
            parse_source("qreg q 1\nx q[0"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            parse_source("qreg q 1\nx !q[0]"),
            Err(ParseError::Syntax {
                line: 2,
                col: 3,
                ..
            })
        ));
        assert!(matches!(
            parse_source("qreg q 2\nswap q[0]"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_source("qreg q 0"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_source("qreg q 1\nqreg q 1"),
            Err(ParseError::Syntax {
                line: 2,
                col: 6,
                ..
            })
        ));
        assert!(matches!(
            parse_source("x 99999999999999999999999"),
            Err(ParseError::Syntax { .. })
        ));
        assert!(matches!(
            parse_source("qreg q 1\nx q[0] ; q[0]"),
            Err(ParseError::Syntax { col: 8, .. })
        ));
    }

    #[test]
    fn comments_case_and_whitespace() {
        let c = parse_source("# header\nQREG q 2 # two\n\n  X   q [ 1 ]  ! q[0]\nSWAP q[0] q[1]\n")
            .unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.gates()[0].controls[0].polarity, Polarity::Negative);
        assert_eq!(c.gates()[1].kind, GateKind::Swap);
    }

    #[test]
    fn anonymous_qubits() {
        let c = parse_source("qubits 3\nx 2 !0").unwrap();
        assert_eq!(c.n_qubits(), 3);
        assert_eq!(c.gates()[0], Gate::x(2).with_control(Control::neg(0)));
        assert_eq!(print_source(&c), "qubits 3\nx 2 !0\n");
    }

    #[test]
    fn print_examples() {
        let mut c = Circuit::with_registers([("q", 1)]).unwrap();
        c.push(Gate::x(QubitRef::named("q", 0)));
        assert_eq!(print_source(&c), "qreg q 1\nx q[0]\n");

        let empty = Circuit::with_registers([("q", 3)]).unwrap();
        assert_eq!(print_source(&empty), "qreg q 3\n");
    }

    #[test]
    fn print_parse_round_trip_with_swap() {
        let mut c = Circuit::with_registers([("a", 2), ("c", 1)]).unwrap();
        c.grow_to(5);
        c.push(
            Gate::swap(QubitRef::named("a", 0), QubitRef::named("a", 1))
                .with_control(Control::neg(QubitRef::named("c", 0)))
                .with_control(Control::pos(4)),
        );
        assert_eq!(parse_source(&print_source(&c)).unwrap(), c);
    }
}
