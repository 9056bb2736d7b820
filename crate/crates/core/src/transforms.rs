//! Circuit-to-circuit passes: bounding scalars by repeated doubling, fixing
//! the first argument of a bilinear circuit, and zeroing help gates.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{
    audit_coefficients, extract_linear_matrix, validate_structure, Circuit, CircuitBuilder, CircuitError,
    CircuitKind, Instruction, NodeRef, Op, Section, Violation, DEFAULT_BOUND,
};
use crate::spectral::{self, ComplexMatrix};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransformError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("circuit is not a valid bilinear circuit: {0:?}")]
    NotBilinear(Vec<Violation>),
    #[error("expected {expected} values for the fixed argument, got {got}")]
    ArgumentLength { expected: usize, got: usize },
}

/// Multiplication by `λ` as `doublings` additions `v + v` followed by one
/// scale with modulus at most 2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarTemplate {
    pub doublings: u32,
    pub scale: Complex64,
    /// Set when `λ = 0`; the template is then a single scale by zero.
    pub zero: bool,
}

impl ScalarTemplate {
    /// `2^doublings · scale`, which equals the decomposed scalar exactly.
    pub fn product(&self) -> Complex64 {
        self.scale * 2f64.powi(self.doublings as i32)
    }

    pub fn emit(&self, b: &mut CircuitBuilder, mut node: NodeRef) -> NodeRef {
        for _ in 0..self.doublings {
            node = b.add(node, node);
        }
        b.scale(self.scale, node)
    }
}

/// Splits `λ` into `k = max(0, ⌈log2|λ| − 1⌉)` doublings and a final factor
/// `λ / 2^k` of modulus at most 2. Division by a power of two is exact.
pub fn decompose_scalar(lambda: Complex64) -> ScalarTemplate {
    if lambda == Complex64::new(0.0, 0.0) {
        return ScalarTemplate { doublings: 0, scale: lambda, zero: true };
    }
    let mut scale = lambda;
    let mut doublings = 0;
    while scale.norm() > 2.0 {
        scale /= 2.0;
        doublings += 1;
    }
    ScalarTemplate { doublings, scale, zero: false }
}

/// Replaces every scale with modulus above 2 by its doubling template.
pub fn bc_normalize(circuit: &Circuit) -> Circuit {
    if audit_coefficients(circuit, DEFAULT_BOUND).help_count == 0 {
        return circuit.clone();
    }
    let mut b = CircuitBuilder::new(circuit.kind(), circuit.n_inputs_x(), circuit.n_inputs_y());
    let mut remap = Vec::with_capacity(circuit.size());
    let tr = |remap: &[NodeRef], r: NodeRef| match r {
        NodeRef::T(j) => remap[j],
        other => other,
    };
    for ins in circuit.instructions() {
        b.set_section(ins.section);
        let node = match ins.op {
            Op::Scale(c, a) if c.norm() > DEFAULT_BOUND => decompose_scalar(c).emit(&mut b, tr(&remap, a)),
            Op::Add(x, y) => b.add(tr(&remap, x), tr(&remap, y)),
            Op::Sub(x, y) => b.sub(tr(&remap, x), tr(&remap, y)),
            Op::Mul(x, y) => b.mul(tr(&remap, x), tr(&remap, y)),
            Op::Scale(c, a) => b.scale(c, tr(&remap, a)),
        };
        remap.push(node);
    }
    let outputs = circuit.outputs().iter().map(|&o| tr(&remap, o)).collect();
    b.finish(outputs).expect("normalization preserves well-formedness")
}

#[derive(Debug, Clone, PartialEq)]
pub struct FixedArgument {
    /// Linear circuit in the former y inputs.
    pub circuit: Circuit,
    /// `max_j |f_j(a)|` over the lin-x forms feeding products.
    pub gamma: f64,
    /// Set when `gamma = 0`: every product vanishes and the result is the zero map.
    pub zero_map: bool,
}

/// Specializes a bilinear circuit to `y ↦ φ(a, y)`.
///
/// Each product `f_i · g_j` becomes the bounded scale `(2 f_i(a)/γ) · g_j`,
/// and every output is multiplied back by `γ/2` with the doubling template
/// (a single scale when `γ < 2`). The lin-x section disappears.
pub fn fix_first_argument(circuit: &Circuit, a: &[Complex64]) -> Result<FixedArgument, TransformError> {
    circuit.require(CircuitKind::Bilinear)?;
    let report = validate_structure(circuit);
    if !report.is_valid() {
        return Err(TransformError::NotBilinear(report.violations));
    }
    if a.len() != circuit.n_inputs_x() {
        return Err(TransformError::ArgumentLength { expected: circuit.n_inputs_x(), got: a.len() });
    }
    let values = circuit.result_sequence(a, Some(&vec![Complex64::new(0.0, 0.0); circuit.n_inputs_y()]))?;
    let instructions = circuit.instructions();
    let x_value = |r: NodeRef| match r {
        NodeRef::X(i) => a[i],
        NodeRef::T(j) => values[j],
        NodeRef::Y(_) => unreachable!("validated product operand"),
    };
    let is_x_side = |r: NodeRef| match r {
        NodeRef::X(_) => true,
        NodeRef::T(j) => instructions[j].section == Section::LinX,
        NodeRef::Y(_) => false,
    };
    // (x-side value, y-side operand) per product
    let products: Vec<(Complex64, NodeRef)> = instructions
        .iter()
        .filter(|i| i.section == Section::Prod)
        .map(|i| match i.op {
            Op::Mul(p, q) if is_x_side(p) => (x_value(p), q),
            Op::Mul(p, q) => (x_value(q), p),
            _ => unreachable!("validated prod section"),
        })
        .collect();
    let gamma = products.iter().map(|(f, _)| f.norm()).fold(0.0, f64::max);

    let n = circuit.n_inputs_y();
    let mut b = CircuitBuilder::linear(n);
    if gamma == 0.0 {
        log::warn!("fix_first_argument: all products vanish at the given argument; emitting the zero map");
        let outputs = if circuit.outputs().is_empty() {
            Vec::new()
        } else if n == 0 {
            return Err(TransformError::ArgumentLength { expected: 1, got: 0 });
        } else {
            let zero = b.scale(Complex64::new(0.0, 0.0), NodeRef::X(0));
            vec![zero; circuit.outputs().len()]
        };
        return Ok(FixedArgument { circuit: b.finish(outputs)?, gamma, zero_map: true });
    }

    let mut remap: Vec<Option<NodeRef>> = vec![None; instructions.len()];
    let tr = |remap: &[Option<NodeRef>], r: NodeRef| match r {
        NodeRef::Y(i) => NodeRef::X(i),
        NodeRef::T(j) => remap[j].expect("lin-x nodes are not reachable from the y side"),
        NodeRef::X(_) => unreachable!("x inputs only feed lin-x and prod"),
    };
    let mut prod_index = 0;
    for (k, ins) in instructions.iter().enumerate() {
        let node = match ins.section {
            Section::LinX => continue,
            Section::Prod => {
                let (f, g) = products[prod_index];
                prod_index += 1;
                // f/γ can round just past modulus 1; doubling afterwards is exact
                let mut unit = f / gamma;
                while unit.norm() > 1.0 {
                    unit *= 1.0 - f64::EPSILON;
                }
                b.scale(unit * 2.0, tr(&remap, g))
            }
            _ => match ins.op {
                Op::Add(x, y) => b.add(tr(&remap, x), tr(&remap, y)),
                Op::Sub(x, y) => b.sub(tr(&remap, x), tr(&remap, y)),
                Op::Scale(c, x) => b.scale(c, tr(&remap, x)),
                Op::Mul(..) => unreachable!("validated"),
            },
        };
        remap[k] = Some(node);
    }
    let half_gamma = Complex64::new(gamma / 2.0, 0.0);
    let rescale = if gamma < 2.0 {
        ScalarTemplate { doublings: 0, scale: half_gamma, zero: false }
    } else {
        decompose_scalar(half_gamma)
    };
    let outputs = circuit
        .outputs()
        .iter()
        .map(|&o| {
            let node = tr(&remap, o);
            rescale.emit(&mut b, node)
        })
        .collect();
    Ok(FixedArgument { circuit: b.finish(outputs)?, gamma, zero_map: false })
}

/// Outcome of replacing help gates by multiplications with zero.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationRecord {
    pub help_gates: Vec<usize>,
    /// Size ledger: zeroed gates are free, so this is `size(in) - h`.
    pub effective_size: usize,
    pub original: ComplexMatrix,
    pub zeroed: ComplexMatrix,
    /// `E = zeroed - original`.
    pub difference: ComplexMatrix,
    /// Numerical rank of `E` from its SVD.
    pub rank: usize,
}

/// Turns every help gate (scale above `bound`) into a scale by zero.
pub fn zero_help_gates(circuit: &Circuit, bound: f64) -> Result<(Circuit, PerturbationRecord), TransformError> {
    circuit.require(CircuitKind::Linear)?;
    let audit = audit_coefficients(circuit, bound);
    let mut out = circuit.clone();
    for &k in &audit.help_gates {
        if let Op::Scale(_, operand) = circuit.instructions()[k].op {
            out = out.with_instruction(k, Op::Scale(Complex64::new(0.0, 0.0), operand));
        }
    }
    let original = extract_linear_matrix(circuit)?;
    let zeroed = extract_linear_matrix(&out)?;
    let difference = zeroed.sub(&original).expect("same shape");
    let rank = spectral::numerical_rank(&difference);
    let record = PerturbationRecord {
        effective_size: circuit.size() - audit.help_count,
        help_gates: audit.help_gates,
        original,
        zeroed,
        difference,
        rank,
    };
    Ok((out, record))
}

/// Appends `scale(c)` on output `index` and makes it the new output. Used to
/// build circuits with a known help gate.
pub fn scale_output(circuit: &Circuit, index: usize, c: Complex64) -> Circuit {
    let mut instructions = circuit.instructions().to_vec();
    let mut outputs = circuit.outputs().to_vec();
    let section = if circuit.kind() == CircuitKind::Bilinear { Section::Out } else { Section::General };
    instructions.push(Instruction { op: Op::Scale(c, outputs[index]), section });
    outputs[index] = NodeRef::T(instructions.len() - 1);
    Circuit::new(circuit.kind(), circuit.n_inputs_x(), circuit.n_inputs_y(), instructions, outputs)
        .expect("appending a scale keeps the circuit well-formed")
}
