//! Mean square volume, r-volume, rigidity sandwich and the perturbation check.

use itertools::Itertools;
use num_complex::Complex64;

use super::{svd, ComplexMatrix, SpectralData, SpectralError};

pub const BRUTEFORCE_MSV_LIMIT: usize = 12;
pub const R_VOLUME_ROW_LIMIT: usize = 20;

/// Relative slack of the perturbation inequality, in units of `σ_1(A)`.
pub const PERTURBATION_SLACK: f64 = 1e-8;

/// `log2(2^a + 2^b)` with `-inf` as the additive zero.
pub(crate) fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `log2 e_r(x_1, …, x_p)` for every `r = 0..=p`, given `log2 x_i`.
///
/// `-inf` entries (zeros) are skipped. Sums are formed in the log domain so
/// products on the scale of `n^n` never overflow.
pub fn log2_elementary_symmetric(log_values: &[f64]) -> Vec<f64> {
    let p = log_values.len();
    let mut e = vec![f64::NEG_INFINITY; p + 1];
    e[0] = 0.0;
    let mut seen = 0;
    for &l in log_values {
        if l == f64::NEG_INFINITY {
            continue;
        }
        seen += 1;
        for j in (1..=seen).rev() {
            e[j] = log2_add(e[j], l + e[j - 1]);
        }
    }
    e
}

/// `log2 MSV_r(A)` for `r = 0..=p`, from the singular values.
///
/// Singular values under the rank threshold are treated as exact zeros.
pub fn log2_msv_all(spec: &SpectralData) -> Vec<f64> {
    let logs: Vec<f64> = (1..=spec.p())
        .map(|k| {
            let s = spec.effective_sigma(k);
            if s > 0.0 {
                2.0 * s.log2()
            } else {
                f64::NEG_INFINITY
            }
        })
        .collect();
    log2_elementary_symmetric(&logs).into_iter().map(|v| v / 2.0).collect()
}

fn check_r(r: usize, max: usize) -> Result<(), SpectralError> {
    if r == 0 || r > max {
        Err(SpectralError::RankOutOfRange { r, min: 1, max })
    } else {
        Ok(())
    }
}

pub fn log2_msv(spec: &SpectralData, r: usize) -> Result<f64, SpectralError> {
    check_r(r, spec.p())?;
    Ok(log2_msv_all(spec)[r])
}

/// `MSV_r(A) = sqrt(e_r(σ_1², …, σ_p²))`. May overflow to `inf` for large
/// inputs; use [`log2_msv`] there.
pub fn msv(a: &ComplexMatrix, r: usize) -> Result<f64, SpectralError> {
    let spec = svd(a);
    Ok(log2_msv(&spec, r)?.exp2())
}

/// Sum of `|det A_{I,J}|²` over all `r`-subsets, square-rooted.
pub fn msv_bruteforce(a: &ComplexMatrix, r: usize) -> Result<f64, SpectralError> {
    let (m, n) = a.shape();
    let p = m.min(n);
    if p > BRUTEFORCE_MSV_LIMIT {
        return Err(SpectralError::SizeGuard { what: "msv_bruteforce min(m, n)", limit: BRUTEFORCE_MSV_LIMIT, got: p });
    }
    check_r(r, p)?;
    let mut total = 0.0;
    for rows in (0..m).combinations(r) {
        for cols in (0..n).combinations(r) {
            total += a.select(&rows, &cols).determinant()?.norm_sqr();
        }
    }
    Ok(total.sqrt())
}

/// `max_{|I|=r} sqrt(det A_I A_I*)` by enumeration of row subsets.
pub fn r_volume(a: &ComplexMatrix, r: usize) -> Result<f64, SpectralError> {
    let (m, n) = a.shape();
    if m > R_VOLUME_ROW_LIMIT {
        return Err(SpectralError::SizeGuard { what: "r_volume rows", limit: R_VOLUME_ROW_LIMIT, got: m });
    }
    check_r(r, m.min(n))?;
    let mut best = 0.0f64;
    for rows in (0..m).combinations(r) {
        let sub = a.select_rows(&rows);
        let gram = sub.matmul(&sub.adjoint())?;
        best = best.max(gram.determinant()?.re.max(0.0));
    }
    Ok(best.sqrt())
}

/// `(σ_{r+1}/√n, σ_{r+1})`, the bracket around geometric rigidity `Rig_r`.
pub fn rigidity_sandwich(spec: &SpectralData, r: usize) -> Result<(f64, f64), SpectralError> {
    if r >= spec.p() {
        return Err(SpectralError::RankOutOfRange { r, min: 0, max: spec.p().saturating_sub(1) });
    }
    let s = spec.effective_sigma(r + 1);
    Ok((s / (spec.cols() as f64).sqrt(), s))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationViolation {
    pub r: usize,
    /// `σ_{r+h}(A)`
    pub lower: f64,
    /// `σ_r(A + E)`
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationReport {
    /// Numerical rank of `E`.
    pub h: usize,
    /// Number of indices `r` checked.
    pub checked: usize,
    pub slack: f64,
    pub violations: Vec<PerturbationViolation>,
}

impl PerturbationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `σ_{r+h}(A) ≤ σ_r(A + E) + 1e-8·σ_1(A)` for every valid `r`,
/// with `h` the numerical rank of `E`.
pub fn check_perturbation(a: &ComplexMatrix, e: &ComplexMatrix) -> Result<PerturbationReport, SpectralError> {
    let b = a.add(e)?;
    let sa = svd(a);
    let sb = svd(&b);
    let h = svd(e).numerical_rank();
    let slack = PERTURBATION_SLACK * sa.sigma(1).max(0.0);
    let p = sa.p();
    let mut violations = Vec::new();
    let mut checked = 0;
    for r in 1..=p.saturating_sub(h) {
        checked += 1;
        let lower = sa.sigma(r + h);
        let upper = sb.sigma(r);
        if lower > upper + slack {
            violations.push(PerturbationViolation { r, lower, upper });
        }
    }
    Ok(PerturbationReport { h, checked, slack, violations })
}

/// Eigenvalues `λ = DFT_n a` of the circulant of `a` (`ω = e^{2πi/n}`).
pub fn circulant_spectrum(a: &[Complex64]) -> Vec<Complex64> {
    let mut buf = a.to_vec();
    if buf.len() > 1 {
        // rustfft's inverse direction uses e^{+2πi jk/n} and does not normalize.
        let fft = rustfft::FftPlanner::new().plan_fft_inverse(buf.len());
        fft.process(&mut buf);
    }
    buf
}

/// Singular values of the circulant from its spectrum, without forming it.
pub fn circulant_spectral_data(a: &[Complex64]) -> SpectralData {
    let n = a.len();
    let values = circulant_spectrum(a).iter().map(|z| z.norm()).collect();
    SpectralData::from_singular_values(n, n, values)
}

/// Orthonormal columns spanning `columns`, extended with standard basis
/// vectors until `target` columns are reached. Near-dependent inputs are
/// dropped (modified Gram–Schmidt, applied twice).
pub fn orthonormal_completion(columns: &[Vec<Complex64>], dim: usize, target: usize) -> Vec<Vec<Complex64>> {
    assert!(target <= dim, "cannot fit {target} orthonormal vectors in dimension {dim}");
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(target);
    let scale = columns
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let try_push = |basis: &mut Vec<Vec<Complex64>>, v: &[Complex64], reference: f64| {
        let mut w = v.to_vec();
        for _ in 0..2 {
            for q in basis.iter() {
                let dot: Complex64 = q.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= dot * qi;
                }
            }
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > reference * 1e-9 && nrm > 0.0 {
            w.iter_mut().for_each(|z| *z /= nrm);
            basis.push(w);
        }
    };
    for c in columns {
        if basis.len() == target {
            break;
        }
        try_push(&mut basis, c, scale);
    }
    let mut j = 0;
    while basis.len() < target && j < dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[j] = Complex64::new(1.0, 0.0);
        try_push(&mut basis, &e, 1.0);
        j += 1;
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn msv_of_diag() {
        let a = ComplexMatrix::diag(&[2.0, 1.0]);
        assert!((msv(&a, 1).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        assert!((msv(&a, 2).unwrap() - 2.0).abs() < 1e-14);
        assert!((msv_bruteforce(&a, 1).unwrap() - 5f64.sqrt()).abs() < 1e-14);
        assert!(msv(&a, 0).is_err());
        assert!(msv(&a, 3).is_err());
    }

    #[test]
    fn msv_of_identity_is_sqrt_binomial() {
        let a = ComplexMatrix::identity(6);
        let binom: [f64; 7] = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
        for r in 1..=6 {
            assert!((msv(&a, r).unwrap() - binom[r].sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn msv_of_dft_is_det() {
        let n = 8;
        let spec = svd(&ComplexMatrix::dft(n));
        let expected = (n as f64 / 2.0) * (n as f64).log2();
        assert!((log2_msv(&spec, n).unwrap() - expected).abs() < 1e-10);
    }

    #[test]
    fn elementary_symmetric_small() {
        // e_r(1, 2, 3) = 1, 6, 11, 6
        let logs = [0.0, 1.0, 3f64.log2()];
        let e: Vec<f64> = log2_elementary_symmetric(&logs).iter().map(|v| v.exp2()).collect();
        for (got, want) in e.iter().zip([1.0, 6.0, 11.0, 6.0]) {
            assert!((got - want).abs() < 1e-12 * want);
        }
        let with_zero = log2_elementary_symmetric(&[0.0, f64::NEG_INFINITY]);
        assert_eq!(with_zero[2], f64::NEG_INFINITY);
        assert_eq!(with_zero[1], 0.0);
    }

    #[test]
    fn huge_products_stay_finite() {
        let logs = vec![12.0; 4096];
        let e = log2_elementary_symmetric(&logs);
        assert!((e[4096] - 12.0 * 4096.0).abs() < 1e-6);
        assert!(e.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn r_volume_basics() {
        assert_eq!(r_volume(&ComplexMatrix::diag(&[2.0, 1.0]), 1).unwrap(), 2.0);
        assert!((r_volume(&ComplexMatrix::identity(4), 2).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(
            r_volume(&ComplexMatrix::zeros(21, 2), 1),
            Err(SpectralError::SizeGuard { .. })
        ));
        assert!(msv_bruteforce(&ComplexMatrix::zeros(13, 13), 1).is_err());
    }

    #[test]
    fn rigidity_sandwich_examples() {
        let n = 5;
        let (lo, hi) = rigidity_sandwich(&svd(&ComplexMatrix::identity(n)), 0).unwrap();
        assert!((lo - 1.0 / (n as f64).sqrt()).abs() < 1e-14);
        assert!((hi - 1.0).abs() < 1e-14);
        let (lo, hi) = rigidity_sandwich(&svd(&ComplexMatrix::diag(&[3.0, 2.0, 1.0])), 1).unwrap();
        assert!((lo - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        assert!((hi - 2.0).abs() < 1e-14);
        let rank_two = ComplexMatrix::diag(&[3.0, 2.0, 0.0]);
        assert_eq!(rigidity_sandwich(&svd(&rank_two), 2).unwrap(), (0.0, 0.0));
        assert!(rigidity_sandwich(&svd(&rank_two), 3).is_err());
    }

    #[test]
    fn circulant_spectrum_examples() {
        let ones = vec![c(1.0); 4];
        let lambda = circulant_spectrum(&ones);
        assert!((lambda[0] - c(4.0)).norm() < 1e-14);
        assert!(lambda[1..].iter().all(|z| z.norm() < 1e-14));
        let e1 = [c(0.0), c(1.0), c(0.0), c(0.0)];
        let lambda = circulant_spectrum(&e1);
        let expected = [c(1.0), Complex64::new(0.0, 1.0), c(-1.0), Complex64::new(0.0, -1.0)];
        for (g, w) in lambda.iter().zip(expected) {
            assert!((g - w).norm() < 1e-14);
        }
        let e0 = [c(1.0), c(0.0), c(0.0)];
        assert!(circulant_spectrum(&e0).iter().all(|z| (z - c(1.0)).norm() < 1e-14));
    }

    #[test]
    fn perturbation_zero() {
        let a = ComplexMatrix::diag(&[3.0, 2.0, 1.0]);
        let report = check_perturbation(&a, &ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(report.h, 0);
        assert_eq!(report.checked, 3);
        assert!(report.holds());
        assert!(check_perturbation(&a, &ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn completion_is_orthonormal() {
        let cols = vec![vec![c(1.0), c(1.0), c(0.0)], vec![c(2.0), c(2.0), c(0.0)]];
        let basis = orthonormal_completion(&cols, 3, 3);
        assert_eq!(basis.len(), 3);
        for i in 0..3 {
            for j in 0..3 {
                let dot: Complex64 = basis[i].iter().zip(&basis[j]).map(|(a, b)| a.conj() * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((dot - c(want)).norm() < 1e-14);
            }
        }
    }
}
