//! Line-oriented circuit file format (`bcc v1`).
//!
//! ```text
//! bcc v1
//! kind bilinear
//! inputs x 2 y 2
//! .section prod
//! t0 = mul x0 y0
//! outputs t0
//! ```

use std::fmt::Write as _;

use num_complex::Complex64;
use thiserror::Error;

use super::{Circuit, CircuitKind, Instruction, NodeRef, Op, Section};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, message: message.into() })
}

pub(super) fn serialize(circuit: &Circuit) -> String {
    let mut s = String::new();
    s.push_str("bcc v1\n");
    let _ = writeln!(s, "kind {}", circuit.kind());
    if circuit.kind() == CircuitKind::Bilinear {
        let _ = writeln!(s, "inputs x {} y {}", circuit.n_inputs_x(), circuit.n_inputs_y());
    } else {
        let _ = writeln!(s, "inputs x {}", circuit.n_inputs_x());
    }
    let mut current = None;
    for (k, ins) in circuit.instructions().iter().enumerate() {
        if circuit.kind() == CircuitKind::Bilinear && current != Some(ins.section) {
            let _ = writeln!(s, ".section {}", ins.section.tag());
            current = Some(ins.section);
        }
        let _ = match ins.op {
            Op::Add(a, b) => writeln!(s, "t{k} = add {a} {b}"),
            Op::Sub(a, b) => writeln!(s, "t{k} = sub {a} {b}"),
            Op::Mul(a, b) => writeln!(s, "t{k} = mul {a} {b}"),
            Op::Scale(c, a) => writeln!(s, "t{k} = scale ({},{}) {a}", c.re, c.im),
        };
    }
    s.push_str("outputs");
    for o in circuit.outputs() {
        let _ = write!(s, " {o}");
    }
    s.push('\n');
    s
}

fn parse_index(tok: &str, prefix: char) -> Option<usize> {
    let rest = tok.strip_prefix(prefix)?;
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

struct Header {
    n_x: usize,
    n_y: usize,
}

impl Header {
    fn parse_ref(&self, tok: &str, own_index: usize, line: usize) -> Result<NodeRef, ParseError> {
        let node = match tok.chars().next() {
            Some('x') => parse_index(tok, 'x').map(NodeRef::X),
            Some('y') => parse_index(tok, 'y').map(NodeRef::Y),
            Some('t') => parse_index(tok, 't').map(NodeRef::T),
            _ => None,
        };
        let Some(node) = node else {
            return err(line, format!("malformed reference `{tok}`"));
        };
        let ok = match node {
            NodeRef::X(i) => i < self.n_x,
            NodeRef::Y(i) => i < self.n_y,
            NodeRef::T(j) => j < own_index,
        };
        if ok {
            Ok(node)
        } else {
            err(line, format!("reference `{tok}` out of range"))
        }
    }
}

fn parse_scalar(tok: &str, line: usize) -> Result<Complex64, ParseError> {
    let inner = tok
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| ParseError { line, message: format!("malformed scalar `{tok}`") })?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| ParseError { line, message: format!("scalar `{tok}` needs (re,im)") })?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| ParseError { line, message: format!("bad scalar component `{}`", s.trim()) })
    };
    Ok(Complex64::new(parse(re)?, parse(im)?))
}

/// Parses the text format. Input indices are 0-based; instruction `t<k>` must
/// be the `k`-th instruction (counting from 0).
pub fn parse_circuit(text: &str) -> Result<Circuit, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, magic) = lines.next().ok_or(ParseError { line: 0, message: "empty file".into() })?;
    if magic.split_whitespace().collect::<Vec<_>>() != ["bcc", "v1"] {
        return err(ln, "expected header `bcc v1`");
    }
    let (ln, kind_line) = lines.next().ok_or(ParseError { line: ln, message: "missing kind line".into() })?;
    let kind = match kind_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "linear"] => CircuitKind::Linear,
        ["kind", "bilinear"] => CircuitKind::Bilinear,
        ["kind", "general"] => CircuitKind::General,
        _ => return err(ln, "expected `kind linear|bilinear|general`"),
    };
    let (ln, inputs_line) = lines.next().ok_or(ParseError { line: ln, message: "missing inputs line".into() })?;
    let count = |s: &str| s.parse::<usize>().map_err(|_| ParseError { line: ln, message: format!("bad count `{s}`") });
    let (n_x, n_y) = match inputs_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["inputs", "x", m] => (count(m)?, 0),
        ["inputs", "x", m, "y", n] if kind == CircuitKind::Bilinear => (count(m)?, count(n)?),
        ["inputs", "x", _, "y", _] => return err(ln, "y inputs are only allowed in bilinear circuits"),
        _ => return err(ln, "expected `inputs x <m> [y <n>]`"),
    };
    let header = Header { n_x, n_y };

    let mut section = if kind == CircuitKind::Bilinear { None } else { Some(Section::General) };
    let mut instructions = Vec::new();
    let mut outputs = None;
    for (ln, line) in lines {
        if outputs.is_some() {
            return err(ln, "content after `outputs` line");
        }
        if let Some(rest) = line.strip_prefix(".section") {
            if kind != CircuitKind::Bilinear {
                return err(ln, "section markers are only allowed in bilinear circuits");
            }
            section = Some(match rest.trim() {
                "lin-x" => Section::LinX,
                "lin-y" => Section::LinY,
                "prod" => Section::Prod,
                "out" => Section::Out,
                other => return err(ln, format!("unknown section `{other}`")),
            });
            continue;
        }
        if let Some(rest) = line.strip_prefix("outputs") {
            if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
                return err(ln, "malformed outputs line");
            }
            let refs = rest
                .split_whitespace()
                .map(|tok| header.parse_ref(tok, instructions.len(), ln))
                .collect::<Result<Vec<_>, _>>()?;
            outputs = Some(refs);
            continue;
        }
        let k = instructions.len();
        let (lhs, rhs) = line.split_once('=').ok_or(ParseError { line: ln, message: "expected `t<k> = ...`".into() })?;
        match parse_index(lhs.trim(), 't') {
            Some(idx) if idx == k => {}
            _ => return err(ln, format!("expected instruction name `t{k}`")),
        }
        let Some(section) = section else {
            return err(ln, "bilinear instructions need a `.section` marker first");
        };
        let rhs = rhs.trim();
        let op = if let Some(rest) = rhs.strip_prefix("scale") {
            let rest = rest.trim_start();
            let close = rest.find(')').ok_or(ParseError { line: ln, message: "unterminated scalar".into() })?;
            let scalar = parse_scalar(&rest[..=close], ln)?;
            let operand: Vec<_> = rest[close + 1..].split_whitespace().collect();
            match operand.as_slice() {
                [a] => Op::Scale(scalar, header.parse_ref(a, k, ln)?),
                _ => return err(ln, "scale takes exactly one operand"),
            }
        } else {
            match rhs.split_whitespace().collect::<Vec<_>>().as_slice() {
                [op, a, b] => {
                    let (a, b) = (header.parse_ref(a, k, ln)?, header.parse_ref(b, k, ln)?);
                    match *op {
                        "add" => Op::Add(a, b),
                        "sub" => Op::Sub(a, b),
                        "mul" => Op::Mul(a, b),
                        other => return err(ln, format!("unknown operation `{other}`")),
                    }
                }
                _ => return err(ln, "expected `add|sub|mul <ref> <ref>` or `scale (<re>,<im>) <ref>`"),
            }
        };
        instructions.push(Instruction { op, section });
    }
    let outputs = outputs.ok_or(ParseError { line: 0, message: "missing `outputs` line".into() })?;
    Circuit::new(kind, n_x, n_y, instructions, outputs).map_err(|e| ParseError { line: 0, message: e.to_string() })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
bcc v1
# cyclic convolution, n = 2
kind bilinear
inputs x 2 y 2
.section lin-x
t0 = add x0 x1
t1 = sub x0 x1
.section lin-y
t2 = add y0 y1
t3 = sub y0 y1
.section prod
t4 = mul t0 t2
t5 = mul t1 t3
.section out
t6 = scale (0.5,0) t4
t7 = scale (0.5,-0) t5
t8 = add t6 t7
t9 = sub t6 t7
outputs t8 t9
";

    #[test]
    fn parses_and_round_trips() {
        let circ = parse_circuit(SAMPLE).unwrap();
        assert_eq!(circ.size(), 10);
        assert_eq!(circ.kind(), CircuitKind::Bilinear);
        let text = circ.to_text();
        let again = parse_circuit(&text).unwrap();
        assert_eq!(again, circ);
        assert_eq!(again.to_text(), text);
        // -0 survives
        assert!(text.contains("scale (0.5,-0) t5"));
    }

    #[test]
    fn evaluates_parsed_convolution() {
        let circ = parse_circuit(SAMPLE).unwrap();
        let x = [Complex64::new(1.0, 0.0), Complex64::new(2.0, 0.0)];
        let y = [Complex64::new(3.0, 0.0), Complex64::new(5.0, 0.0)];
        let out = circ.evaluate(&x, Some(&y)).unwrap();
        assert_eq!(out, vec![Complex64::new(13.0, 0.0), Complex64::new(11.0, 0.0)]);
    }

    #[test]
    fn shortest_round_trip_scalars() {
        let text = "bcc v1\nkind linear\ninputs x 1\nt0 = scale (0.1,-0.7071067811865476) x0\noutputs t0\n";
        let circ = parse_circuit(text).unwrap();
        assert_eq!(circ.to_text(), text);
    }

    #[test]
    fn rejects_malformed_input() {
        let cases = [
            ("", 0),
            ("bcc v2\n", 1),
            ("bcc v1\nkind quadratic\n", 2),
            ("bcc v1\nkind linear\ninputs x 2 y 1\n", 3),
            ("bcc v1\nkind linear\ninputs x 1\nt0 = add x0 x1\noutputs t0\n", 4),
            ("bcc v1\nkind linear\ninputs x 1\nt1 = add x0 x0\noutputs t1\n", 4),
            ("bcc v1\nkind linear\ninputs x 1\nt0 = add x0 t0\noutputs t0\n", 4),
            ("bcc v1\nkind linear\ninputs x 1\nt0 = scale (nan,0) x0\noutputs t0\n", 4),
            ("bcc v1\nkind linear\ninputs x 1\n.section prod\n", 4),
            ("bcc v1\nkind bilinear\ninputs x 1 y 1\nt0 = mul x0 y0\noutputs t0\n", 4),
            ("bcc v1\nkind linear\ninputs x 1\noutputs x0\nt0 = add x0 x0\n", 5),
        ];
        for (text, line) in cases {
            let e = parse_circuit(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
        assert!(parse_circuit("bcc v1\nkind linear\ninputs x 1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let text = "# header comment\nbcc v1\n\nkind general # trailing\ninputs x 2\nt0 = mul x0 x1\n\noutputs t0 x1\n";
        let circ = parse_circuit(text).unwrap();
        assert_eq!(circ.outputs(), &[NodeRef::T(0), NodeRef::X(1)]);
    }
}
