//! Straight-line programs over the complex numbers.
//!
//! A [`Circuit`] is an ordered list of instructions. Each instruction reads
//! inputs or strictly earlier results, so evaluation is a single forward pass
//! over the result sequence. Linear and bilinear circuits are syntactic
//! restrictions of the general model, checked by [`validate_structure`].

mod builder;
mod text;

use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::spectral::{self, ComplexMatrix};

pub use builder::CircuitBuilder;
pub use text::{parse_circuit, ParseError};

/// Default coefficient bound of the bounded-coefficient model.
pub const DEFAULT_BOUND: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("instruction {index}: reference {node} is out of range")]
    BadReference { index: usize, node: NodeRef },
    #[error("output {position}: reference {node} is out of range")]
    BadOutput { position: usize, node: NodeRef },
    #[error("instruction {index}: scalar is not finite")]
    NonFiniteScalar { index: usize },
    #[error("only bilinear circuits may declare y inputs")]
    YInputsOnNonBilinear,
    #[error("expected {expected} x values, got {got}")]
    XLengthMismatch { expected: usize, got: usize },
    #[error("expected {expected} y values, got {got}")]
    YLengthMismatch { expected: usize, got: usize },
    #[error("y values supplied to a non-bilinear circuit")]
    YForNonBilinear,
    #[error("operation requires a {expected} circuit, got {got}")]
    WrongKind { expected: CircuitKind, got: CircuitKind },
}

/// A reference to an input or to the result of an earlier instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeRef {
    X(usize),
    Y(usize),
    T(usize),
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeRef::X(i) => write!(f, "x{i}"),
            NodeRef::Y(i) => write!(f, "y{i}"),
            NodeRef::T(i) => write!(f, "t{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Add(NodeRef, NodeRef),
    Sub(NodeRef, NodeRef),
    Mul(NodeRef, NodeRef),
    Scale(Complex64, NodeRef),
}

impl Op {
    pub fn operands(&self) -> impl Iterator<Item = NodeRef> {
        let (a, b) = match *self {
            Op::Add(a, b) | Op::Sub(a, b) | Op::Mul(a, b) => (a, Some(b)),
            Op::Scale(_, a) => (a, None),
        };
        std::iter::once(a).chain(b)
    }

    pub fn scalar(&self) -> Option<Complex64> {
        match *self {
            Op::Scale(c, _) => Some(c),
            _ => None,
        }
    }

    fn map_refs(self, mut f: impl FnMut(NodeRef) -> NodeRef) -> Op {
        match self {
            Op::Add(a, b) => Op::Add(f(a), f(b)),
            Op::Sub(a, b) => Op::Sub(f(a), f(b)),
            Op::Mul(a, b) => Op::Mul(f(a), f(b)),
            Op::Scale(c, a) => Op::Scale(c, f(a)),
        }
    }
}

/// Instruction partition of a bilinear circuit. Linear and general circuits
/// tag everything `General`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Section {
    LinX,
    LinY,
    Prod,
    Out,
    General,
}

impl Section {
    pub fn tag(self) -> &'static str {
        match self {
            Section::LinX => "lin-x",
            Section::LinY => "lin-y",
            Section::Prod => "prod",
            Section::Out => "out",
            Section::General => "general",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Instruction {
    pub op: Op,
    pub section: Section,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitKind {
    Linear,
    Bilinear,
    General,
}

impl fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CircuitKind::Linear => "linear",
            CircuitKind::Bilinear => "bilinear",
            CircuitKind::General => "general",
        })
    }
}

/// An immutable, well-formed straight-line program.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    kind: CircuitKind,
    n_x: usize,
    n_y: usize,
    instructions: Vec<Instruction>,
    outputs: Vec<NodeRef>,
}

impl Circuit {
    /// Checks reference well-formedness: every `t<j>` read by instruction
    /// `k` has `j < k`, input indices are in range, scalars are finite.
    pub fn new(
        kind: CircuitKind,
        n_x: usize,
        n_y: usize,
        instructions: Vec<Instruction>,
        outputs: Vec<NodeRef>,
    ) -> Result<Circuit, CircuitError> {
        if kind != CircuitKind::Bilinear && n_y != 0 {
            return Err(CircuitError::YInputsOnNonBilinear);
        }
        let in_range = |node: NodeRef, limit: usize| match node {
            NodeRef::X(i) => i < n_x,
            NodeRef::Y(i) => i < n_y,
            NodeRef::T(j) => j < limit,
        };
        for (index, ins) in instructions.iter().enumerate() {
            for node in ins.op.operands() {
                if !in_range(node, index) {
                    return Err(CircuitError::BadReference { index, node });
                }
            }
            if let Some(c) = ins.op.scalar() {
                if !(c.re.is_finite() && c.im.is_finite()) {
                    return Err(CircuitError::NonFiniteScalar { index });
                }
            }
        }
        for (position, &node) in outputs.iter().enumerate() {
            if !in_range(node, instructions.len()) {
                return Err(CircuitError::BadOutput { position, node });
            }
        }
        Ok(Circuit { kind, n_x, n_y, instructions, outputs })
    }

    pub fn kind(&self) -> CircuitKind {
        self.kind
    }

    pub fn n_inputs_x(&self) -> usize {
        self.n_x
    }

    pub fn n_inputs_y(&self) -> usize {
        self.n_y
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn outputs(&self) -> &[NodeRef] {
        &self.outputs
    }

    /// Number of instructions.
    pub fn size(&self) -> usize {
        self.instructions.len()
    }

    pub fn section_size(&self, section: Section) -> usize {
        self.instructions.iter().filter(|i| i.section == section).count()
    }

    /// Computes the full result sequence and returns the declared outputs.
    pub fn evaluate(&self, x: &[Complex64], y: Option<&[Complex64]>) -> Result<Vec<Complex64>, CircuitError> {
        let values = self.result_sequence(x, y)?;
        Ok(self.outputs.iter().map(|&o| fetch(o, x, y.unwrap_or(&[]), &values)).collect())
    }

    /// Values of every instruction, in order.
    pub fn result_sequence(&self, x: &[Complex64], y: Option<&[Complex64]>) -> Result<Vec<Complex64>, CircuitError> {
        if x.len() != self.n_x {
            return Err(CircuitError::XLengthMismatch { expected: self.n_x, got: x.len() });
        }
        let y = match (self.kind, y) {
            (CircuitKind::Bilinear, Some(y)) => {
                if y.len() != self.n_y {
                    return Err(CircuitError::YLengthMismatch { expected: self.n_y, got: y.len() });
                }
                y
            }
            (CircuitKind::Bilinear, None) => {
                if self.n_y != 0 {
                    return Err(CircuitError::YLengthMismatch { expected: self.n_y, got: 0 });
                }
                &[]
            }
            (_, Some(_)) => return Err(CircuitError::YForNonBilinear),
            (_, None) => &[],
        };
        let mut values = Vec::with_capacity(self.instructions.len());
        for ins in &self.instructions {
            let get = |r| fetch(r, x, y, &values);
            let v = match ins.op {
                Op::Add(a, b) => get(a) + get(b),
                Op::Sub(a, b) => get(a) - get(b),
                Op::Mul(a, b) => get(a) * get(b),
                Op::Scale(c, a) => c * get(a),
            };
            values.push(v);
        }
        Ok(values)
    }

    /// Linear forms (rows over the x inputs) computed at every instruction of
    /// a linear circuit, as an `size × n_x` matrix.
    pub fn linear_forms(&self) -> Result<ComplexMatrix, CircuitError> {
        self.require(CircuitKind::Linear)?;
        let n = self.n_x;
        let mut forms = ComplexMatrix::zeros(self.size(), n);
        let form_of = |forms: &ComplexMatrix, node: NodeRef| -> Vec<Complex64> {
            match node {
                NodeRef::X(i) => {
                    let mut e = vec![Complex64::new(0.0, 0.0); n];
                    e[i] = Complex64::new(1.0, 0.0);
                    e
                }
                NodeRef::T(j) => forms.row(j).to_vec(),
                NodeRef::Y(_) => unreachable!("linear circuits have no y inputs"),
            }
        };
        for (k, ins) in self.instructions.iter().enumerate() {
            let row: Vec<Complex64> = match ins.op {
                Op::Add(a, b) => {
                    let (fa, fb) = (form_of(&forms, a), form_of(&forms, b));
                    fa.iter().zip(&fb).map(|(p, q)| p + q).collect()
                }
                Op::Sub(a, b) => {
                    let (fa, fb) = (form_of(&forms, a), form_of(&forms, b));
                    fa.iter().zip(&fb).map(|(p, q)| p - q).collect()
                }
                Op::Scale(c, a) => form_of(&forms, a).iter().map(|p| c * p).collect(),
                Op::Mul(..) => unreachable!("checked by require"),
            };
            forms.row_mut(k).copy_from_slice(&row);
        }
        Ok(forms)
    }

    /// Drops instructions that no output depends on. Sections and relative
    /// order are preserved.
    pub fn prune_unreachable(&self) -> Circuit {
        let mut live = vec![false; self.size()];
        for o in &self.outputs {
            if let NodeRef::T(j) = *o {
                live[j] = true;
            }
        }
        for k in (0..self.size()).rev() {
            if live[k] {
                for node in self.instructions[k].op.operands() {
                    if let NodeRef::T(j) = node {
                        live[j] = true;
                    }
                }
            }
        }
        let mut remap = vec![usize::MAX; self.size()];
        let mut instructions = Vec::with_capacity(live.iter().filter(|&&l| l).count());
        let renumber = |remap: &[usize], r: NodeRef| match r {
            NodeRef::T(j) => NodeRef::T(remap[j]),
            other => other,
        };
        for (k, ins) in self.instructions.iter().enumerate() {
            if live[k] {
                remap[k] = instructions.len();
                instructions.push(Instruction { op: ins.op.map_refs(|r| renumber(&remap, r)), section: ins.section });
            }
        }
        let outputs = self.outputs.iter().map(|&r| renumber(&remap, r)).collect();
        Circuit { kind: self.kind, n_x: self.n_x, n_y: self.n_y, instructions, outputs }
    }

    /// Replaces one instruction in place; used by passes that keep the
    /// reference structure intact.
    pub(crate) fn with_instruction(&self, index: usize, op: Op) -> Circuit {
        let mut out = self.clone();
        out.instructions[index].op = op;
        out
    }

    pub(crate) fn require(&self, kind: CircuitKind) -> Result<(), CircuitError> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(CircuitError::WrongKind { expected: kind, got: self.kind })
        }
    }

    pub fn to_text(&self) -> String {
        text::serialize(self)
    }
}

fn fetch(node: NodeRef, x: &[Complex64], y: &[Complex64], values: &[Complex64]) -> Complex64 {
    match node {
        NodeRef::X(i) => x[i],
        NodeRef::Y(i) => y[i],
        NodeRef::T(j) => values[j],
    }
}

/// The matrix of a linear circuit: column `j` is the output on `e_j`.
pub fn extract_linear_matrix(circuit: &Circuit) -> Result<ComplexMatrix, CircuitError> {
    circuit.require(CircuitKind::Linear)?;
    let n = circuit.n_inputs_x();
    let m = circuit.outputs().len();
    let mut a = ComplexMatrix::zeros(m, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = circuit.evaluate(&e, None)?;
        for (i, v) in col.into_iter().enumerate() {
            a[(i, j)] = v;
        }
        e[j] = Complex64::new(0.0, 0.0);
    }
    Ok(a)
}

/// Which partition condition an instruction breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Sections must appear in the order lin-x, lin-y, prod, out.
    SectionOrder,
    /// lin-x is a linear circuit over the x inputs.
    LinX,
    /// lin-y is a linear circuit over the y inputs.
    LinY,
    /// Each product multiplies a lin-x node with a lin-y node.
    Prod,
    /// out is a linear circuit over the products.
    Out,
    /// Outputs of a bilinear circuit come from prod or out.
    Output,
    /// Linear circuits use add, sub and scale only.
    LinearOnly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub index: usize,
    pub condition: Condition,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub kind: CircuitKind,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the linear or bilinear partition conditions. General circuits are
/// always valid once well-formed.
pub fn validate_structure(circuit: &Circuit) -> ValidationReport {
    let mut violations = Vec::new();
    let mut report = |index, condition, message: String| violations.push(Violation { index, condition, message });
    match circuit.kind() {
        CircuitKind::General => {}
        CircuitKind::Linear => {
            for (k, ins) in circuit.instructions().iter().enumerate() {
                if let Op::Mul(..) = ins.op {
                    report(k, Condition::LinearOnly, format!("t{k}: mul in a linear circuit"));
                }
            }
        }
        CircuitKind::Bilinear => {
            let ins = circuit.instructions();
            let section_of = |r: NodeRef| match r {
                NodeRef::T(j) => Some(ins[j].section),
                _ => None,
            };
            let is_x_side = |r: NodeRef| matches!(r, NodeRef::X(_)) || section_of(r) == Some(Section::LinX);
            let is_y_side = |r: NodeRef| matches!(r, NodeRef::Y(_)) || section_of(r) == Some(Section::LinY);
            let is_prod_side = |r: NodeRef| matches!(section_of(r), Some(Section::Prod | Section::Out));
            let mut last = Section::LinX;
            for (k, i) in ins.iter().enumerate() {
                if i.section == Section::General {
                    report(k, Condition::SectionOrder, format!("t{k}: missing section tag"));
                    continue;
                }
                if i.section < last {
                    report(
                        k,
                        Condition::SectionOrder,
                        format!("t{k}: section {} after {}", i.section.tag(), last.tag()),
                    );
                }
                last = last.max(i.section);
                match i.section {
                    Section::LinX | Section::LinY | Section::Out => {
                        let (cond, ok): (Condition, &dyn Fn(NodeRef) -> bool) = match i.section {
                            Section::LinX => (Condition::LinX, &is_x_side),
                            Section::LinY => (Condition::LinY, &is_y_side),
                            _ => (Condition::Out, &is_prod_side),
                        };
                        if let Op::Mul(..) = i.op {
                            report(k, cond, format!("t{k}: mul outside the prod section"));
                        } else if let Some(bad) = i.op.operands().find(|&r| !ok(r)) {
                            report(k, cond, format!("t{k}: operand {bad} not allowed in section {}", i.section.tag()));
                        }
                    }
                    Section::Prod => match i.op {
                        Op::Mul(a, b) if (is_x_side(a) && is_y_side(b)) || (is_y_side(a) && is_x_side(b)) => {}
                        Op::Mul(a, b) => {
                            report(k, Condition::Prod, format!("t{k}: mul {a} {b} does not pair a lin-x node with a lin-y node"))
                        }
                        _ => report(k, Condition::Prod, format!("t{k}: only mul is allowed in section prod")),
                    },
                    Section::General => unreachable!(),
                }
            }
            for (pos, &o) in circuit.outputs().iter().enumerate() {
                if !is_prod_side(o) {
                    report(pos, Condition::Output, format!("output {pos} ({o}) is not a prod/out result"));
                }
            }
        }
    }
    ValidationReport { kind: circuit.kind(), violations }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientAudit {
    pub max_abs_scalar: f64,
    pub bound: f64,
    pub help_gates: Vec<usize>,
    pub help_count: usize,
    /// Dimension of the span of the forms feeding help gates; linear circuits only.
    pub help_span_dim: Option<usize>,
}

impl CoefficientAudit {
    pub fn is_bounded(&self) -> bool {
        self.help_count == 0
    }
}

/// Lists scale instructions whose scalar exceeds `bound` in modulus.
pub fn audit_coefficients(circuit: &Circuit, bound: f64) -> CoefficientAudit {
    assert!(bound > 0.0, "coefficient bound must be positive");
    let mut max_abs_scalar = 0.0f64;
    let mut help_gates = Vec::new();
    for (k, ins) in circuit.instructions().iter().enumerate() {
        if let Op::Scale(c, _) = ins.op {
            let m = c.norm();
            max_abs_scalar = max_abs_scalar.max(m);
            if m > bound {
                help_gates.push(k);
            }
        }
    }
    let help_span_dim = match circuit.kind() {
        CircuitKind::Linear if help_gates.is_empty() => Some(0),
        CircuitKind::Linear => {
            let forms = circuit.linear_forms().expect("linear circuit");
            let mut operand_forms = ComplexMatrix::zeros(help_gates.len(), circuit.n_inputs_x());
            for (row, &k) in help_gates.iter().enumerate() {
                if let Op::Scale(_, operand) = circuit.instructions()[k].op {
                    match operand {
                        NodeRef::X(i) => operand_forms[(row, i)] = Complex64::new(1.0, 0.0),
                        NodeRef::T(j) => operand_forms.row_mut(row).copy_from_slice(forms.row(j)),
                        NodeRef::Y(_) => unreachable!(),
                    }
                }
            }
            Some(spectral::numerical_rank(&operand_forms))
        }
        _ => None,
    };
    CoefficientAudit { max_abs_scalar, bound, help_count: help_gates.len(), help_gates, help_span_dim }
}
