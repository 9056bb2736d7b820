//! One-sided (Hestenes) Jacobi SVD for complex matrices.
//!
//! Columns are rotated pairwise until all are mutually orthogonal; the column
//! norms are then the singular values. Pairs are visited in round-robin
//! order so that each round consists of disjoint pairs, which are rotated in
//! parallel for larger inputs.

use num_complex::Complex64;
use rayon::prelude::*;

use super::ComplexMatrix;

const MAX_SWEEPS: usize = 80;
const PARALLEL_WORK: usize = 1 << 14;

/// Relative rank threshold used throughout: singular values at or below
/// `σ_max · RANK_TOL` count as zero.
pub const RANK_TOL: f64 = 1e-9;

/// Singular values (nonincreasing) with optional thin factors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    rows: usize,
    cols: usize,
    singular_values: Vec<f64>,
    left: Option<ComplexMatrix>,
    right: Option<ComplexMatrix>,
}

impl SpectralData {
    /// Wraps precomputed singular values for an `rows × cols` matrix.
    ///
    /// Panics if the count is not `min(rows, cols)` or a value is negative.
    pub fn from_singular_values(rows: usize, cols: usize, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), rows.min(cols), "need min(m, n) singular values");
        assert!(values.iter().all(|&s| s >= 0.0 && s.is_finite()), "singular values must be finite and >= 0");
        values.sort_by(|a, b| b.total_cmp(a));
        SpectralData { rows, cols, singular_values: values, left: None, right: None }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// `min(m, n)`.
    pub fn p(&self) -> usize {
        self.singular_values.len()
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `σ_k`, 1-based; zero past `p`.
    pub fn sigma(&self, k: usize) -> f64 {
        assert!(k >= 1, "singular values are indexed from 1");
        self.singular_values.get(k - 1).copied().unwrap_or(0.0)
    }

    /// `σ_k` with values under the rank threshold flushed to zero.
    pub fn effective_sigma(&self, k: usize) -> f64 {
        let s = self.sigma(k);
        if s <= self.zero_threshold() {
            0.0
        } else {
            s
        }
    }

    pub fn zero_threshold(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0) * RANK_TOL
    }

    pub fn numerical_rank(&self) -> usize {
        let t = self.zero_threshold();
        self.singular_values.iter().filter(|&&s| s > t).count()
    }

    /// `m × p` left factor, present when requested.
    pub fn left(&self) -> Option<&ComplexMatrix> {
        self.left.as_ref()
    }

    /// `n × p` right factor, present when requested.
    pub fn right(&self) -> Option<&ComplexMatrix> {
        self.right.as_ref()
    }

    /// `U Σ V*` from the thin factors.
    pub fn reconstruct(&self) -> Option<ComplexMatrix> {
        let (u, v) = (self.left.as_ref()?, self.right.as_ref()?);
        let mut us = u.clone();
        for i in 0..us.rows() {
            for (j, &s) in self.singular_values.iter().enumerate() {
                us[(i, j)] *= s;
            }
        }
        us.matmul(&v.adjoint()).ok()
    }
}

/// Singular values only.
pub fn svd(a: &ComplexMatrix) -> SpectralData {
    decompose(a, false)
}

/// Singular values with thin factors `U` (`m × p`) and `V` (`n × p`).
///
/// Columns of `U` belonging to zero singular values are left zero.
pub fn svd_with_vectors(a: &ComplexMatrix) -> SpectralData {
    decompose(a, true)
}

/// Number of singular values above `σ_max · 1e-9`.
pub fn numerical_rank(a: &ComplexMatrix) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    svd(a).numerical_rank()
}

fn decompose(a: &ComplexMatrix, vectors: bool) -> SpectralData {
    let (m, n) = a.shape();
    // Work on whichever of A, A* has at least as many rows as columns.
    let tall = m >= n;
    let work = if tall { a.clone() } else { a.adjoint() };
    let (wm, wn) = work.shape();
    let mut cols: Vec<Vec<Complex64>> = (0..wn).map(|j| work.column(j)).collect();
    let mut v: Option<Vec<Vec<Complex64>>> = vectors.then(|| {
        (0..wn)
            .map(|j| {
                let mut e = vec![Complex64::new(0.0, 0.0); wn];
                e[j] = Complex64::new(1.0, 0.0);
                e
            })
            .collect()
    });
    orthogonalize(&mut cols, v.as_mut(), wm);

    let norms: Vec<f64> = cols.iter().map(|c| norm(c)).collect();
    let mut order: Vec<usize> = (0..wn).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| norms[i]).collect();

    let (left, right) = match v {
        Some(v) => {
            let u_work = ComplexMatrix::from_fn(wm, wn, |r, c| {
                let idx = order[c];
                if norms[idx] > 0.0 {
                    cols[idx][r] / norms[idx]
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            let v_work = ComplexMatrix::from_fn(wn, wn, |r, c| v[order[c]][r]);
            if tall {
                (Some(u_work), Some(v_work))
            } else {
                (Some(v_work), Some(u_work))
            }
        }
        None => (None, None),
    };
    SpectralData { rows: m, cols: n, singular_values, left, right }
}

fn norm(c: &[Complex64]) -> f64 {
    c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(cols: &mut [Vec<Complex64>], mut v: Option<&mut Vec<Vec<Complex64>>>, m: usize) {
    let k = cols.len();
    if k < 2 {
        return;
    }
    let tol = (m.max(4) as f64) * f64::EPSILON;
    let parallel = m * k >= PARALLEL_WORK;
    // Round-robin schedule; an odd count gets a bye slot `k`.
    let slots = k + (k % 2);
    let mut players: Vec<usize> = (0..slots).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for _ in 0..slots - 1 {
            let pairs: Vec<(usize, usize)> = (0..slots / 2)
                .map(|i| (players[i], players[slots - 1 - i]))
                .filter(|&(a, b)| a < k && b < k)
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            let mut work: Vec<PairWork> = pairs
                .iter()
                .map(|&(i, j)| PairWork {
                    i,
                    j,
                    a: std::mem::take(&mut cols[i]),
                    b: std::mem::take(&mut cols[j]),
                    va: v.as_mut().map(|v| std::mem::take(&mut v[i])),
                    vb: v.as_mut().map(|v| std::mem::take(&mut v[j])),
                })
                .collect();
            let changed = if parallel {
                work.par_iter_mut().map(|w| w.rotate(tol)).filter(|&r| r).count()
            } else {
                work.iter_mut().map(|w| w.rotate(tol)).filter(|&r| r).count()
            };
            rotated |= changed > 0;
            for w in work {
                cols[w.i] = w.a;
                cols[w.j] = w.b;
                if let Some(v) = v.as_mut() {
                    v[w.i] = w.va.unwrap();
                    v[w.j] = w.vb.unwrap();
                }
            }
            players[1..].rotate_right(1);
        }
        if !rotated {
            return;
        }
    }
    log::warn!("jacobi svd: no convergence after {MAX_SWEEPS} sweeps ({m}x{k})");
}

struct PairWork {
    i: usize,
    j: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    va: Option<Vec<Complex64>>,
    vb: Option<Vec<Complex64>>,
}

impl PairWork {
    fn rotate(&mut self, tol: f64) -> bool {
        let mut alpha = 0.0;
        let mut beta = 0.0;
        let mut gamma = Complex64::new(0.0, 0.0);
        for (x, y) in self.a.iter().zip(&self.b) {
            alpha += x.norm_sqr();
            beta += y.norm_sqr();
            gamma += x.conj() * y;
        }
        let g = gamma.norm();
        if alpha == 0.0 || beta == 0.0 || g <= tol * (alpha * beta).sqrt() {
            return false;
        }
        // Rotate b's phase so that <a, b> becomes real, then apply a real
        // Jacobi rotation.
        let phase = (gamma / g).conj();
        let zeta = (beta - alpha) / (2.0 * g);
        let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
        let c = 1.0 / (1.0 + t * t).sqrt();
        let s = c * t;
        rotate_pair(&mut self.a, &mut self.b, phase, c, s);
        if let (Some(va), Some(vb)) = (self.va.as_mut(), self.vb.as_mut()) {
            rotate_pair(va, vb, phase, c, s);
        }
        true
    }
}

fn rotate_pair(a: &mut [Complex64], b: &mut [Complex64], phase: Complex64, c: f64, s: f64) {
    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
        let yp = phase * *y;
        let xv = *x;
        *x = xv * c - yp * s;
        *y = xv * s + yp * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn diagonal() {
        let s = svd(&ComplexMatrix::diag(&[1.0, 2.0]));
        assert_eq!(s.singular_values(), &[2.0, 1.0]);
    }

    #[test]
    fn zero_matrix() {
        let s = svd_with_vectors(&ComplexMatrix::zeros(3, 2));
        assert_eq!(s.singular_values(), &[0.0, 0.0]);
        assert_eq!(s.numerical_rank(), 0);
        assert_eq!(s.reconstruct().unwrap(), ComplexMatrix::zeros(3, 2));
    }

    #[test]
    fn wide_and_tall_reconstruct() {
        let a = ComplexMatrix::from_rows(&[
            vec![c(1.0, 2.0), c(0.5, -1.0), c(3.0, 0.0), c(0.0, 0.25)],
            vec![c(-2.0, 0.0), c(1.0, 1.0), c(0.0, -1.5), c(2.0, 2.0)],
        ])
        .unwrap();
        for m in [a.clone(), a.adjoint()] {
            let s = svd_with_vectors(&m);
            let diff = m.sub(&s.reconstruct().unwrap()).unwrap().frobenius_norm();
            assert!(diff <= 1e-12 * m.frobenius_norm(), "{diff}");
            let fro2: f64 = s.singular_values().iter().map(|x| x * x).sum();
            assert!((fro2 - m.frobenius_norm().powi(2)).abs() <= 1e-12 * fro2);
        }
    }

    #[test]
    fn dft_has_flat_spectrum() {
        for n in [1usize, 2, 4, 8, 5, 16] {
            let s = svd(&ComplexMatrix::dft(n));
            for &sigma in s.singular_values() {
                assert!((sigma - (n as f64).sqrt()).abs() < 1e-12 * n as f64);
            }
        }
    }

    #[test]
    fn rank_deficient() {
        // outer product has rank one
        let u = [c(1.0, 0.0), c(0.0, 2.0), c(-1.0, 1.0)];
        let v = [c(2.0, -1.0), c(0.5, 0.5)];
        let a = ComplexMatrix::from_fn(3, 2, |i, j| u[i] * v[j].conj());
        let s = svd(&a);
        assert_eq!(s.numerical_rank(), 1);
        assert_eq!(s.effective_sigma(2), 0.0);
    }
}
