//! The circuit text format.
//!
//! ```text
//! qubits 3          # header, first non-blank line
//! h 0
//! cnot 0 1
//! ckz 2 0 1 2       # control count, then c+1 qubits
//! diag 1,0 1,0 ...  # 2^width phases as re,im; acts on every qubit
//! ```

use std::fmt;
use std::fmt::Write;

use num_complex::Complex64;
use thiserror::Error;

use super::{Circuit, Gate, GateKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("missing `qubits <n>` header")]
    MissingHeader,
    #[error("invalid qubit count `{0}`")]
    BadWidth(String),
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("repeated qubit index {0}")]
    RepeatedQubit(usize),
    #[error("qubit index {index} out of range for {width} qubits")]
    QubitOutOfRange { index: usize, width: usize },
    #[error("invalid qubit index `{0}`")]
    BadIndex(String),
    #[error("`{gate}` expects {expected} arguments, got {got}")]
    Arity { gate: String, expected: usize, got: usize },
    #[error("invalid phase `{0}` (expected re,im)")]
    BadPhase(String),
    #[error("{0}")]
    Gate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.kind)
    }
}

/// Whitespace-separated tokens with 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(i),
            (true, Some(s)) => {
                out.push((s, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, &line[s..]));
    }
    out.into_iter()
        .map(|(byte, tok)| (line[..byte].chars().count() + 1, tok))
        .collect()
}

pub fn parse(text: &str) -> std::result::Result<Circuit, ParseError> {
    let mut circuit: Option<Circuit> = None;
    let mut last_line = 1;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let content = raw.split('#').next().unwrap_or("");
        let toks = tokens(content);
        let Some(&(col0, head)) = toks.first() else { continue };
        let err = |column, kind| ParseError { line: line_no, column, kind };

        let Some(c) = circuit.as_mut() else {
            if head != "qubits" {
                return Err(err(col0, ParseErrorKind::MissingHeader));
            }
            let Some(&(col, w)) = toks.get(1) else {
                return Err(err(col0, ParseErrorKind::BadWidth(String::new())));
            };
            let width: usize = w.parse().map_err(|_| err(col, ParseErrorKind::BadWidth(w.into())))?;
            if toks.len() > 2 {
                return Err(err(toks[2].0, ParseErrorKind::BadWidth(toks[2].1.into())));
            }
            circuit = Some(
                Circuit::new(width).map_err(|_| err(col, ParseErrorKind::BadWidth(w.into())))?,
            );
            continue;
        };

        let width = c.width();
        let mut args = &toks[1..];
        let kind = match head {
            "i" => GateKind::I,
            "x" => GateKind::X,
            "y" => GateKind::Y,
            "z" => GateKind::Z,
            "h" => GateKind::H,
            "s" => GateKind::S,
            "sdg" => GateKind::Sdg,
            "t" => GateKind::T,
            "tdg" => GateKind::Tdg,
            "cnot" => GateKind::Cnot,
            "cz" => GateKind::Cz,
            "swap" => GateKind::Swap,
            "ccz" => GateKind::Ckz(2),
            "ckz" => {
                let Some(&(col, cnt)) = args.first() else {
                    return Err(err(col0, ParseErrorKind::Arity { gate: "ckz".into(), expected: 2, got: 0 }));
                };
                let controls: usize =
                    cnt.parse().map_err(|_| err(col, ParseErrorKind::Gate(format!("invalid control count `{cnt}`"))))?;
                args = &args[1..];
                GateKind::Ckz(controls)
            }
            "diag" => {
                let expected = 1usize << width;
                if args.len() != expected {
                    return Err(err(col0, ParseErrorKind::Arity { gate: "diag".into(), expected, got: args.len() }));
                }
                let phases = args
                    .iter()
                    .map(|&(col, tok)| parse_phase(tok).ok_or_else(|| err(col, ParseErrorKind::BadPhase(tok.into()))))
                    .collect::<std::result::Result<Vec<_>, _>>()?;
                let gate = Gate::new(GateKind::Diag(phases), (0..width).collect())
                    .map_err(|e| err(col0, ParseErrorKind::Gate(e.to_string())))?;
                c.push(gate).expect("indices in range");
                continue;
            }
            other => return Err(err(col0, ParseErrorKind::UnknownGate(other.into()))),
        };

        if args.len() != kind.arity() {
            let col = args.get(kind.arity()).map_or(col0, |t| t.0);
            return Err(err(
                col,
                ParseErrorKind::Arity { gate: head.into(), expected: kind.arity(), got: args.len() },
            ));
        }
        let mut qubits = Vec::with_capacity(args.len());
        for &(col, tok) in args {
            let q: usize = tok.parse().map_err(|_| err(col, ParseErrorKind::BadIndex(tok.into())))?;
            if q >= width {
                return Err(err(col, ParseErrorKind::QubitOutOfRange { index: q, width }));
            }
            if qubits.contains(&q) {
                return Err(err(col, ParseErrorKind::RepeatedQubit(q)));
            }
            qubits.push(q);
        }
        let gate = Gate::new(kind, qubits).map_err(|e| err(col0, ParseErrorKind::Gate(e.to_string())))?;
        c.push(gate).expect("indices checked");
    }
    circuit.ok_or(ParseError { line: last_line, column: 1, kind: ParseErrorKind::MissingHeader })
}

fn parse_phase(tok: &str) -> Option<Complex64> {
    let (re, im) = tok.split_once(',')?;
    Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
}

pub(super) fn serialize(c: &Circuit) -> Result<String> {
    let mut out = String::new();
    if let Some(name) = c.name() {
        writeln!(out, "# {name}").unwrap();
    }
    writeln!(out, "qubits {}", c.width()).unwrap();
    for g in c.gates() {
        let qs = g.qubits().iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        match g.kind() {
            GateKind::Custom(_) => return Err(Error::Unserializable),
            GateKind::Diag(phases) => {
                if g.qubits() != (0..c.width()).collect::<Vec<_>>() {
                    return Err(Error::Unserializable);
                }
                let ps = phases.iter().map(|p| format!("{},{}", p.re, p.im)).collect::<Vec<_>>();
                writeln!(out, "diag {}", ps.join(" ")).unwrap();
            }
            GateKind::Ckz(ctrl) if *ctrl != 2 => writeln!(out, "ckz {ctrl} {qs}").unwrap(),
            kind => writeln!(out, "{} {qs}", kind.name()).unwrap(),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_single_t() {
        let c = parse("qubits 1\nt 0\n").unwrap();
        assert_eq!(c.width(), 1);
        assert_eq!(c.gates(), &[Gate::t(0)]);
    }

    #[test]
    fn parses_ccz() {
        let c = parse("qubits 3\nccz 0 1 2\n").unwrap();
        assert_eq!(c.gates()[0].kind(), &GateKind::Ckz(2));
        assert_eq!(c.gates()[0].qubits(), &[0, 1, 2]);
        let d = parse("qubits 4\nckz 3 3 2 1 0\n").unwrap();
        assert_eq!(d.gates()[0].kind(), &GateKind::Ckz(3));
    }

    #[test]
    fn repeated_qubit_is_an_error() {
        let e = parse("qubits 2\ncnot 0 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::RepeatedQubit(0));
        assert_eq!((e.line, e.column), (2, 8));
    }

    #[test]
    fn other_errors_carry_positions() {
        let e = parse("qubits 2\n\n  foo 1\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownGate("foo".into()));
        assert_eq!((e.line, e.column), (3, 3));

        let e = parse("qubits 2\nh 2\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::QubitOutOfRange { index: 2, width: 2 });
        assert_eq!((e.line, e.column), (2, 3));

        let e = parse("# nothing\nh 0\n").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::MissingHeader);
        assert_eq!(e.line, 2);

        assert_eq!(parse("").unwrap_err().kind, ParseErrorKind::MissingHeader);
        assert!(matches!(parse("qubits 0\n").unwrap_err().kind, ParseErrorKind::BadWidth(_)));
        assert!(matches!(parse("qubits 1\nh\n").unwrap_err().kind, ParseErrorKind::Arity { .. }));
        assert!(matches!(parse("qubits 1\ndiag 1,0 x\n").unwrap_err().kind, ParseErrorKind::BadPhase(_)));
        assert!(matches!(parse("qubits 1\ndiag 1,0 0.5,0\n").unwrap_err().kind, ParseErrorKind::Gate(_)));
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = parse("# header comment\n\nqubits 2 # two\n h 0 # hadamard\n\n# done\n").unwrap();
        assert_eq!(c.gates().len(), 1);
    }

    #[test]
    fn round_trip() {
        let text = "qubits 3\nh 0\nsdg 1\ntdg 2\ncnot 0 1\ncz 1 2\nswap 0 2\nccz 0 1 2\nckz 1 2 0\ny 1\ni 0\n";
        let c = parse(text).unwrap();
        assert_eq!(c.to_text().unwrap(), text);
        let d = parse("qubits 1\ndiag 1,0 0.7071067811865476,0.7071067811865476\n").unwrap();
        assert_eq!(parse(&d.to_text().unwrap()).unwrap(), d);
    }
}
