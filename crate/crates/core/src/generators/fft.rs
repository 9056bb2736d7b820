//! Radix-2 FFT emitted as circuit instructions.
//!
//! Nodes are `Option<NodeRef>`, with `None` standing for a known zero so that
//! zero-padded transforms do not spend instructions on the padding.

use num_complex::Complex64;

use crate::circuit::{CircuitBuilder, NodeRef};
use crate::spectral::root_of_unity;

pub(crate) type Node = Option<NodeRef>;

pub(crate) fn add(b: &mut CircuitBuilder, p: Node, q: Node) -> Node {
    match (p, q) {
        (Some(p), Some(q)) => Some(b.add(p, q)),
        (p, None) => p,
        (None, q) => q,
    }
}

pub(crate) fn sub(b: &mut CircuitBuilder, p: Node, q: Node) -> Node {
    match (p, q) {
        (Some(p), Some(q)) => Some(b.sub(p, q)),
        (p, None) => p,
        (None, Some(q)) => Some(b.scale(Complex64::new(-1.0, 0.0), q)),
    }
}

pub(crate) fn scale(b: &mut CircuitBuilder, c: Complex64, p: Node) -> Node {
    p.map(|p| b.scale(c, p))
}

pub(crate) fn mul(b: &mut CircuitBuilder, p: Node, q: Node) -> Node {
    match (p, q) {
        (Some(p), Some(q)) => Some(b.mul(p, q)),
        _ => None,
    }
}

fn bit_reverse(i: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        i.reverse_bits() >> (usize::BITS - bits)
    }
}

/// Decimation-in-time transform of `input` (length a power of two).
///
/// Forward computes `X_k = Σ_j x_j ω^{jk}`, `ω = e^{2πi/n}`. Inverse uses
/// `ω^{-1}` and halves both butterfly inputs at every stage, so the `1/n`
/// normalization is spread over `log2 n` scales of modulus at most 1.
pub(crate) fn emit_dft(b: &mut CircuitBuilder, input: &[Node], inverse: bool) -> Vec<Node> {
    let n = input.len();
    assert!(n.is_power_of_two(), "transform length must be a power of two");
    let bits = n.trailing_zeros();
    let mut v: Vec<Node> = (0..n).map(|i| input[bit_reverse(i, bits)]).collect();
    let half = Complex64::new(0.5, 0.0);
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..len / 2 {
                let w = root_of_unity(j * stride, n);
                let (lo, hi) = (v[start + j], v[start + j + len / 2]);
                let (a, t) = if inverse {
                    (scale(b, half, lo), scale(b, w.conj() * 0.5, hi))
                } else if j == 0 {
                    (lo, hi)
                } else {
                    (lo, scale(b, w, hi))
                };
                v[start + j] = add(b, a, t);
                v[start + j + len / 2] = sub(b, a, t);
            }
        }
        len *= 2;
    }
    v
}

fn trim(p: &[Node]) -> (usize, &[Node]) {
    let lead = p.iter().take_while(|x| x.is_none()).count();
    let end = p.len() - p.iter().rev().take_while(|x| x.is_none()).count();
    if lead >= end {
        (0, &[])
    } else {
        (lead, &p[lead..end])
    }
}

/// Coefficients `0..out_len` of `p · q` via zero-padded cyclic convolution.
/// Leading and trailing known zeros are stripped first; the transform length
/// is the next power of two covering the full product.
pub(crate) fn emit_poly_product(b: &mut CircuitBuilder, p: &[Node], q: &[Node], out_len: usize) -> Vec<Node> {
    let mut out = vec![None; out_len];
    let (sp, p) = trim(p);
    let (sq, q) = trim(q);
    let shift = sp + sq;
    if p.is_empty() || q.is_empty() || shift >= out_len {
        return out;
    }
    let needed = (out_len - shift).min(p.len() + q.len() - 1);
    let n = (p.len() + q.len() - 1).next_power_of_two();
    let pad = |v: &[Node]| {
        let mut w = v.to_vec();
        w.resize(n, None);
        w
    };
    let fp = emit_dft(b, &pad(p), false);
    let fq = emit_dft(b, &pad(q), false);
    let prod: Vec<Node> = fp.iter().zip(&fq).map(|(&x, &y)| mul(b, x, y)).collect();
    let c = emit_dft(b, &prod, true);
    out[shift..shift + needed].copy_from_slice(&c[..needed]);
    out
}
