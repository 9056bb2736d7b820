//! Direct reference implementations of the maps the generators compute.
//!
//! These follow the defining formulas with no transforms and are used by
//! `bcv check` to compare circuits against.

use num_complex::Complex64;

use crate::spectral::root_of_unity;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `c_k = Σ_{i+j≡k mod n} x_i y_j`.
pub fn cyclic_convolution(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(x.len(), y.len(), "arguments must have equal length");
    let n = x.len();
    let mut c = vec![ZERO; n];
    for (i, &a) in x.iter().enumerate() {
        for (j, &b) in y.iter().enumerate() {
            c[(i + j) % n] += a * b;
        }
    }
    c
}

/// `X_k = Σ_j x_j ω^{±jk}`, divided by `n` for the inverse.
pub fn dft(x: &[Complex64], inverse: bool) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let s: Complex64 = x
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let w = root_of_unity(j * k, n);
                    v * if inverse { w.conj() } else { w }
                })
                .sum();
            if inverse {
                s / n as f64
            } else {
                s
            }
        })
        .collect()
}

/// Schoolbook product; the result has `len(f) + len(g) - 1` coefficients.
pub fn poly_mul(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    if f.is_empty() || g.is_empty() {
        return Vec::new();
    }
    let mut c = vec![ZERO; f.len() + g.len() - 1];
    for (i, &a) in f.iter().enumerate() {
        for (j, &b) in g.iter().enumerate() {
            c[i + j] += a * b;
        }
    }
    c
}

/// `b_1..b_n` of `1 / (1 - Σ a_i X^i)` by `b_0 = 1`, `b_k = Σ_{i<k} a_{k-i} b_i`.
/// `a[0]` holds `a_1`.
pub fn power_series_inverse(a: &[Complex64]) -> Vec<Complex64> {
    let n = a.len();
    let mut b = vec![Complex64::new(1.0, 0.0)];
    for k in 1..=n {
        let s = (0..k).map(|i| a[k - i - 1] * b[i]).sum();
        b.push(s);
    }
    b.split_off(1)
}

/// Long division by a monic divisor whose lower coefficients are `g_low`.
/// Returns `(q, r)` with `deg r < len(g_low)`.
pub fn long_division(f: &[Complex64], g_low: &[Complex64]) -> (Vec<Complex64>, Vec<Complex64>) {
    let m = g_low.len();
    assert!(m >= 1 && f.len() > m, "need deg f >= deg g >= 1");
    let mut rem = f.to_vec();
    let mut q = vec![ZERO; f.len() - m];
    for d in (m..f.len()).rev() {
        let lead = rem[d];
        q[d - m] = lead;
        rem[d] = ZERO;
        for (i, &g) in g_low.iter().enumerate() {
            rem[d - m + i] -= lead * g;
        }
    }
    rem.truncate(m);
    (q, rem)
}

/// Folds a product of two length-`n` polynomials back into `ℂ[X]/(X^n - 1)`.
pub fn fold(c: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (k, &v) in c.iter().enumerate() {
        out[k % n] += v;
    }
    out
}

/// Horner evaluation of `Σ c_i t^i`.
pub fn horner(c: &[Complex64], t: Complex64) -> Complex64 {
    c.iter().rev().fold(ZERO, |acc, &v| acc * t + v)
}
