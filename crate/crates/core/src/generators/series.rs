//! Power-series inversion by Newton iteration and division with remainder by
//! coefficient reversal.
//!
//! Circuits carry no constants, so the iteration works on the tail
//! `h = g - 1` of the inverse `g` of `f = 1 - A`. With `e = A + A·h - h`
//! (which equals `1 - f·g`) the step `g ← g(2 - f·g)` becomes
//! `h ← h + e + h·e`, and `e` vanishes below the current precision.

use num_complex::Complex64;

use super::fft::{self, Node};
use super::{finish, GeneratorError};
use crate::circuit::{Circuit, CircuitBuilder, NodeRef};

/// Tail `h_1..h_{prec-1}` (index 0 is a known zero) of `1 / (1 - A)` where
/// `a[0]` must be `None`.
fn emit_inverse_tail(b: &mut CircuitBuilder, a: &[Node], prec: usize) -> Vec<Node> {
    debug_assert!(a.first().is_none_or(|x| x.is_none()));
    let coeff = |i: usize| a.get(i).copied().flatten();
    let mut h: Vec<Node> = vec![None];
    let mut k = 1;
    while k < prec {
        let k2 = (2 * k).min(prec);
        let a_t: Vec<Node> = (0..k2).map(coeff).collect();
        let ah = fft::emit_poly_product(b, &a_t, &h, k2);
        let mut e: Vec<Node> = vec![None; k2];
        for i in k..k2 {
            // h_i is a known zero for i >= k
            e[i] = fft::add(b, a_t[i], ah[i]);
        }
        let he = fft::emit_poly_product(b, &h, &e, k2);
        h.resize(k2, None);
        for i in k..k2 {
            h[i] = fft::add(b, e[i], he[i]);
        }
        k = k2;
    }
    h.truncate(prec.max(1));
    h
}

/// First `n` coefficients `b_1..b_n` of `1 / f` for `f = 1 - Σ_{i=1}^n a_i X^i`,
/// with inputs `a_1..a_n`.
pub fn gen_power_series_inv(n: usize) -> Result<Circuit, GeneratorError> {
    if n == 0 {
        return Err(GeneratorError::InvalidSize("n must be at least 1".into()));
    }
    let mut b = CircuitBuilder::general(n);
    let a: Vec<Node> = (0..=n).map(|i| (i > 0).then(|| NodeRef::X(i - 1))).collect();
    let h = emit_inverse_tail(&mut b, &a, n + 1);
    Ok(finish(b, h[1..].to_vec()))
}

/// Quotient and remainder of `f` (degree `n`) by the monic `g` (degree `m`).
///
/// Inputs are `f_0..f_n` followed by `g_0..g_{m-1}`; outputs are `q_0..q_{n-m}`
/// followed by `r_0..r_{m-1}`.
pub fn gen_division(n: usize, m: usize) -> Result<Circuit, GeneratorError> {
    if m == 0 || n < m {
        return Err(GeneratorError::InvalidSize(format!("need n >= m >= 1 (got n={n}, m={m})")));
    }
    let f = |i: usize| NodeRef::X(i);
    let g = |i: usize| NodeRef::X(n + 1 + i);
    let prec = n - m + 1;
    let mut b = CircuitBuilder::general(n + 1 + m);
    let minus_one = Complex64::new(-1.0, 0.0);

    // rev(g) = 1 + Σ g_{m-i} X^i = 1 - A
    let a: Vec<Node> = (0..prec).map(|i| (1..=m).contains(&i).then(|| b.scale(minus_one, g(m - i)))).collect();
    let h = emit_inverse_tail(&mut b, &a, prec);

    // rev(q) = rev(f) · (1 + h) mod X^prec
    let f_rev: Vec<Node> = (0..prec).map(|i| Some(f(n - i))).collect();
    let fh = fft::emit_poly_product(&mut b, &f_rev, &h, prec);
    let q_rev: Vec<Node> = (0..prec).map(|i| fft::add(&mut b, f_rev[i], fh[i])).collect();
    let q: Vec<Node> = q_rev.iter().rev().copied().collect();

    // r = f - q·g mod X^m; the X^m term of g only affects degrees >= m
    let g_low: Vec<Node> = (0..m).map(|i| Some(g(i))).collect();
    let qg = fft::emit_poly_product(&mut b, &q, &g_low, m);
    let r: Vec<Node> = (0..m).map(|i| fft::sub(&mut b, Some(f(i)), qg[i])).collect();

    Ok(finish(b, q.into_iter().chain(r).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::audit_coefficients;

    fn re(v: &[f64]) -> Vec<Complex64> {
        v.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }

    fn close(got: &[Complex64], want: &[f64]) -> bool {
        got.len() == want.len() && got.iter().zip(want).all(|(g, &w)| (g - w).norm() < 1e-9)
    }

    #[test]
    fn fibonacci() {
        let c = gen_power_series_inv(5).unwrap();
        assert_eq!(audit_coefficients(&c, 2.0).help_count, 0);
        let out = c.evaluate(&re(&[1.0, 1.0, 0.0, 0.0, 0.0]), None).unwrap();
        assert!(close(&out, &[1.0, 2.0, 3.0, 5.0, 8.0]), "{out:?}");
    }

    #[test]
    fn geometric_and_zero() {
        for n in 1..=9 {
            let c = gen_power_series_inv(n).unwrap();
            let mut a = vec![0.0; n];
            a[0] = 1.0;
            assert!(close(&c.evaluate(&re(&a), None).unwrap(), &vec![1.0; n]));
            assert!(close(&c.evaluate(&re(&vec![0.0; n]), None).unwrap(), &vec![0.0; n]));
        }
    }

    #[test]
    fn hand_divisions() {
        // X^2 / X
        let c = gen_division(2, 1).unwrap();
        assert!(close(&c.evaluate(&re(&[0.0, 0.0, 1.0, 0.0]), None).unwrap(), &[0.0, 1.0, 0.0]));
        // (X^3 + 1) / (X + 1)
        let c = gen_division(3, 1).unwrap();
        assert!(close(&c.evaluate(&re(&[1.0, 0.0, 0.0, 1.0, 1.0]), None).unwrap(), &[1.0, -1.0, 1.0, 0.0]));
        // n = m: quotient is the leading coefficient
        let c = gen_division(2, 2).unwrap();
        let out = c.evaluate(&re(&[5.0, 3.0, 2.0, 1.0, 1.0]), None).unwrap();
        assert!(close(&out, &[2.0, 3.0, 1.0]), "{out:?}");
        assert!(gen_division(1, 2).is_err());
    }
}
