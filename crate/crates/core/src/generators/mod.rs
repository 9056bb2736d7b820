//! Explicit bounded-coefficient circuits for the DFT, cyclic convolution and
//! the polynomial problems that reduce to it.

mod fft;
mod series;

use thiserror::Error;

use crate::circuit::{Circuit, CircuitBuilder, NodeRef, Section};

pub use series::{gen_division, gen_power_series_inv};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("n must be a power of two (got {0})")]
    NotPowerOfTwo(usize),
    #[error("invalid size: {0}")]
    InvalidSize(String),
}

fn require_power_of_two(n: usize) -> Result<(), GeneratorError> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(GeneratorError::NotPowerOfTwo(n))
    }
}

fn finish(b: CircuitBuilder, outputs: Vec<Option<NodeRef>>) -> Circuit {
    let outputs = outputs.into_iter().map(|o| o.expect("generated output is never a known zero")).collect();
    b.finish(outputs).expect("generators emit well-formed circuits").prune_unreachable()
}

fn inputs(n: usize, f: fn(usize) -> NodeRef) -> Vec<Option<NodeRef>> {
    (0..n).map(|i| Some(f(i))).collect()
}

/// Linear circuit for `(ω^{jk})`, `ω = e^{2πi/n}`, or its inverse `n^{-1}(ω^{-jk})`.
///
/// Size is at most `n log2 n` additions plus `n log2 n` scales for the
/// inverse; every scalar has modulus at most 1.
pub fn gen_dft(n: usize, inverse: bool) -> Result<Circuit, GeneratorError> {
    require_power_of_two(n)?;
    let mut b = CircuitBuilder::linear(n);
    let out = fft::emit_dft(&mut b, &inputs(n, NodeRef::X), inverse);
    Ok(finish(b, out))
}

/// Bilinear circuit for cyclic convolution `c_k = Σ_{i+j≡k} x_i y_j` via
/// forward transforms of both arguments, `n` products and an inverse
/// transform.
pub fn gen_convolution_fft(n: usize) -> Result<Circuit, GeneratorError> {
    require_power_of_two(n)?;
    let mut b = CircuitBuilder::bilinear(n, n);
    let out = emit_convolution(&mut b, &inputs(n, NodeRef::X), &inputs(n, NodeRef::Y));
    Ok(finish(b, out))
}

fn emit_convolution(b: &mut CircuitBuilder, x: &[Option<NodeRef>], y: &[Option<NodeRef>]) -> Vec<Option<NodeRef>> {
    b.set_section(Section::LinX);
    let fx = fft::emit_dft(b, x, false);
    b.set_section(Section::LinY);
    let fy = fft::emit_dft(b, y, false);
    b.set_section(Section::Prod);
    let prod: Vec<_> = fx.iter().zip(&fy).map(|(&p, &q)| fft::mul(b, p, q)).collect();
    b.set_section(Section::Out);
    fft::emit_dft(b, &prod, true)
}

/// Cyclic convolution straight from the defining sum: `n²` products and
/// `n² - n` additions.
pub fn gen_convolution_naive(n: usize) -> Result<Circuit, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("n must be at least 1".into()));
    }
    let mut b = CircuitBuilder::bilinear(n, n);
    b.set_section(Section::Prod);
    let products: Vec<Vec<NodeRef>> = (0..n)
        .map(|k| (0..n).map(|i| b.mul(NodeRef::X(i), NodeRef::Y((k + n - i) % n))).collect())
        .collect();
    b.set_section(Section::Out);
    let outputs = products
        .iter()
        .map(|terms| Some(terms[1..].iter().fold(terms[0], |acc, &t| b.add(acc, t))))
        .collect();
    Ok(finish(b, outputs))
}

/// Coefficients of `f·g` for `deg f, deg g < n`: both arguments are padded
/// with zeros to the next power of two `≥ 2n` and convolved cyclically.
pub fn gen_polymul(n: usize) -> Result<Circuit, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("n must be at least 1".into()));
    }
    let len = (2 * n).next_power_of_two();
    let pad = |f: fn(usize) -> NodeRef| -> Vec<Option<NodeRef>> {
        (0..len).map(|i| (i < n).then(|| f(i))).collect()
    };
    let mut b = CircuitBuilder::bilinear(n, n);
    let mut out = emit_convolution(&mut b, &pad(NodeRef::X), &pad(NodeRef::Y));
    out.truncate(2 * n - 1);
    Ok(finish(b, out))
}
