use num_complex::Complex64;

use super::{Circuit, CircuitError, CircuitKind, Instruction, NodeRef, Op, Section};

/// Appends instructions one at a time and hands back references to them.
#[derive(Debug, Clone)]
pub struct CircuitBuilder {
    kind: CircuitKind,
    n_x: usize,
    n_y: usize,
    section: Section,
    instructions: Vec<Instruction>,
}

impl CircuitBuilder {
    pub fn new(kind: CircuitKind, n_x: usize, n_y: usize) -> Self {
        CircuitBuilder { kind, n_x, n_y, section: Section::General, instructions: Vec::new() }
    }

    pub fn linear(n: usize) -> Self {
        Self::new(CircuitKind::Linear, n, 0)
    }

    pub fn bilinear(n_x: usize, n_y: usize) -> Self {
        let mut b = Self::new(CircuitKind::Bilinear, n_x, n_y);
        b.section = Section::LinX;
        b
    }

    pub fn general(n: usize) -> Self {
        Self::new(CircuitKind::General, n, 0)
    }

    /// Section tag applied to subsequently pushed instructions.
    pub fn set_section(&mut self, section: Section) {
        self.section = section;
    }

    pub fn section(&self) -> Section {
        self.section
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn push(&mut self, op: Op) -> NodeRef {
        self.instructions.push(Instruction { op, section: self.section });
        NodeRef::T(self.instructions.len() - 1)
    }

    pub fn add(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        self.push(Op::Add(a, b))
    }

    pub fn sub(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        self.push(Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: NodeRef, b: NodeRef) -> NodeRef {
        self.push(Op::Mul(a, b))
    }

    pub fn scale(&mut self, c: Complex64, a: NodeRef) -> NodeRef {
        self.push(Op::Scale(c, a))
    }

    pub fn finish(self, outputs: Vec<NodeRef>) -> Result<Circuit, CircuitError> {
        Circuit::new(self.kind, self.n_x, self.n_y, self.instructions, outputs)
    }
}
