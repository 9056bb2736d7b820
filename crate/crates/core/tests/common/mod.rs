//! Test-side oracles, written from the defining formulas and independent of
//! the library code they check.
#![allow(dead_code)]

use bcc_core::probability::NormalSampler;
use bcc_core::spectral::ComplexMatrix;
use bcc_core::Complex64;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn reals(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

/// Gaussian complex vector from its own stream.
pub fn gaussian(n: usize, seed: u64, stream: u64) -> Vec<Complex64> {
    NormalSampler::new(seed, stream).complex_vector(n)
}

pub fn gaussian_matrix(m: usize, n: usize, seed: u64, stream: u64) -> ComplexMatrix {
    let v = gaussian(m * n, seed, stream);
    ComplexMatrix::from_fn(m, n, |i, j| v[i * n + j])
}

/// `e^{2πi·jk/n}` straight from the angle.
pub fn omega_pow(jk: usize, n: usize) -> Complex64 {
    let t = 2.0 * std::f64::consts::PI * ((jk % n) as f64) / n as f64;
    c(t.cos(), t.sin())
}

pub fn dft_table(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |j, k| omega_pow(j * k, n))
}

pub fn naive_cyclic(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| (0..n).map(|i| x[i] * y[(k + n - i) % n]).sum())
        .collect()
}

/// Matrix of `y ↦ a ⊛ y`, column `j` being the convolution of `a` with `e_j`.
pub fn circulant_by_columns(a: &[Complex64]) -> ComplexMatrix {
    let n = a.len();
    let cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| {
            let mut e = vec![ZERO; n];
            e[j] = c(1.0, 0.0);
            naive_cyclic(a, &e)
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

pub fn schoolbook(f: &[Complex64], g: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// `b_0 = 1`, `b_k = Σ_{i<k} a_{k-i} b_i`; returns `b_1..b_n` (`a[0] = a_1`).
pub fn series_recurrence(a: &[Complex64]) -> Vec<Complex64> {
    let mut b = vec![c(1.0, 0.0)];
    for k in 1..=a.len() {
        let mut s = ZERO;
        for i in 0..k {
            s += a[k - i - 1] * b[i];
        }
        b.push(s);
    }
    b[1..].to_vec()
}

pub fn horner(p: &[Complex64], t: Complex64) -> Complex64 {
    p.iter().rev().fold(ZERO, |acc, &v| acc * t + v)
}

/// Determinant by cofactor expansion along the first row.
pub fn laplace_det(a: &ComplexMatrix) -> Complex64 {
    let n = a.rows();
    if n == 0 {
        return c(1.0, 0.0);
    }
    if n == 1 {
        return a[(0, 0)];
    }
    let mut sum = ZERO;
    for j in 0..n {
        let rows: Vec<usize> = (1..n).collect();
        let cols: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        let minor = laplace_det(&a.select(&rows, &cols));
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        sum += a[(0, j)] * minor * sign;
    }
    sum
}

/// All `r`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, r, &mut Vec::new(), &mut out);
    out
}

/// `sqrt(Σ_{|I|=|J|=r} |det A_{I,J}|²)` by enumeration with Laplace
/// determinants.
pub fn msv_by_minors(a: &ComplexMatrix, r: usize) -> f64 {
    let mut s = 0.0;
    for rows in subsets(a.rows(), r) {
        for cols in subsets(a.cols(), r) {
            s += laplace_det(&a.select(&rows, &cols)).norm_sqr();
        }
    }
    s.sqrt()
}

/// `max_{|I|=r} sqrt(det A_I A_I*)`.
pub fn r_volume_by_gram(a: &ComplexMatrix, r: usize) -> f64 {
    subsets(a.rows(), r)
        .into_iter()
        .map(|rows| {
            let ai = a.select_rows(&rows);
            laplace_det(&ai.matmul(&ai.adjoint()).unwrap()).re.max(0.0).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Unitary matrix from Gram–Schmidt on a Gaussian matrix.
pub fn random_unitary(n: usize, seed: u64, stream: u64) -> ComplexMatrix {
    let g = gaussian_matrix(n, n, seed, stream);
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for u in &q {
                let d: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= d * ui;
                }
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.iter().map(|z| z / nrm).collect());
    }
    ComplexMatrix::from_fn(n, n, |i, j| q[j][i])
}

/// Real roots of `x³ + a x² + b x + c` with three real roots (trigonometric
/// form), sorted descending.
pub fn cubic_real_roots(a: f64, b: f64, c0: f64) -> [f64; 3] {
    let p = b - a * a / 3.0;
    let q = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c0;
    let m = 2.0 * (-p / 3.0).max(0.0).sqrt();
    let arg = if m == 0.0 { 0.0 } else { (3.0 * q / (p * m)).clamp(-1.0, 1.0) };
    let theta = arg.acos() / 3.0;
    let mut roots = [0.0; 3];
    for (k, r) in roots.iter_mut().enumerate() {
        *r = m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - a / 3.0;
    }
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}

/// Singular values of an `m × 3` matrix (`m >= 3`) from the characteristic
/// polynomial of the Hermitian `3 × 3` matrix `A* A`.
pub fn singular_values_3(a: &ComplexMatrix) -> [f64; 3] {
    let g = a.adjoint().matmul(a).unwrap();
    let tr = (g[(0, 0)] + g[(1, 1)] + g[(2, 2)]).re;
    let minors = (g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)]
        + g[(0, 0)] * g[(2, 2)]
        - g[(0, 2)] * g[(2, 0)]
        + g[(1, 1)] * g[(2, 2)]
        - g[(1, 2)] * g[(2, 1)])
        .re;
    let det = laplace_det(&g).re;
    let ev = cubic_real_roots(-tr, minors, -det);
    [ev[0].max(0.0).sqrt(), ev[1].max(0.0).sqrt(), ev[2].max(0.0).sqrt()]
}

pub fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn max_rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let scale = b.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max) / scale
}

pub fn vec_rel_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(1e-300);
    num / den
}
