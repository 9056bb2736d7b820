//! Monte Carlo experiments. Each returns an [`McReport`] whose checks carry
//! three-standard-error bands.

use num_complex::Complex64;
use rayon::prelude::*;

use super::{
    constants, log2_product_abs_sq, orthonormality_defect, random_subspace, variance_error, Check, McReport,
    NormalSampler, ProbabilityError, Relation, TrialStats, SHARED_STREAM,
};
use crate::spectral::{self, orthonormal_completion, ComplexMatrix};

/// Largest circulant size accepted by [`mc_lemma43`].
pub const LEMMA43_MAX_N: usize = 512;

const BANDS: f64 = 3.0;

fn run_trials<T: Send>(trials: usize, seed: u64, f: impl Fn(&mut NormalSampler) -> T + Sync) -> Vec<T> {
    (0..trials)
        .into_par_iter()
        .map(|t| f(&mut NormalSampler::new(seed, t as u64)))
        .collect()
}

fn invalid(msg: impl Into<String>) -> ProbabilityError {
    ProbabilityError::Invalid(msg.into())
}

fn require_trials(trials: usize) -> Result<(), ProbabilityError> {
    if trials < 2 {
        return Err(invalid("need at least 2 trials"));
    }
    Ok(())
}

/// Frequency of `stats` against `1/2`, with the band taken at `p = 1/2`.
fn half_check(name: &str, stats: &TrialStats) -> Check {
    Check::new(name, stats.frequency(), Relation::AtLeast, 0.5, BANDS * stats.frequency_error(0.5))
}

/// `T = |S|² / (2‖f‖²)` for `S = Σ f_i ζ_i`, which should be `Exp(1)`.
pub fn mc_linear_comb(f: &[Complex64], trials: usize, seed: u64) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    let norm_sq: f64 = f.iter().map(|z| z.norm_sqr()).sum();
    if norm_sq == 0.0 {
        return Err(invalid("f must be nonzero"));
    }
    let t: Vec<f64> = run_trials(trials, seed, |s| {
        let sum: Complex64 = f.iter().map(|&fi| fi * s.complex()).sum();
        sum.norm_sqr() / (2.0 * norm_sq)
    });
    let stats = TrialStats::from_samples(&t, |v| v >= 1.0, seed, 1.0);
    let mut checks = vec![
        Check::new("|mean(T) - 1|", (stats.mean - 1.0).abs(), Relation::AtMost, 0.0, BANDS * stats.standard_error()),
        Check::new("|var(T) - 1|", (stats.variance - 1.0).abs(), Relation::AtMost, 0.0, BANDS * variance_error(&t)),
    ];
    let mut records = vec![("T".to_string(), stats)];
    for lambda in [2.0, 4.0, 8.0] {
        let tail = TrialStats::from_samples(&t, |v| v >= lambda, seed, lambda);
        let bound = 2.0 * (-lambda / 2.0f64).exp();
        let tol = BANDS * tail.frequency_error(bound.min(0.5));
        checks.push(Check::new(format!("P[T >= {lambda}]"), tail.frequency(), Relation::AtMost, bound, tol));
        records.push((format!("tail_{lambda}"), tail));
    }
    Ok(McReport { name: "linear-combination".into(), records, checks })
}

/// `Δ = log2 E|Z|² - E log2 |Z|²` and `Var log2 |Z|²` for `Z = X + iY` with
/// `(X, Y)` centered normal of the given real covariance.
pub fn mc_log_bounds(cov: [[f64; 2]; 2], trials: usize, seed: u64) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    let [[a, b], [b2, d]] = cov;
    if (b - b2).abs() > 1e-12 * (a.abs() + d.abs()) || !(a >= 0.0 && d >= 0.0) || a * d - b * b < -1e-12 * (a * d) {
        return Err(invalid("covariance must be symmetric positive semidefinite"));
    }
    if a + d == 0.0 {
        return Err(invalid("covariance must be nonzero"));
    }
    // principal axes
    let mean = (a + d) / 2.0;
    let spread = (((a - d) / 2.0).powi(2) + b * b).sqrt();
    let (l1, l2) = (mean + spread, (mean - spread).max(0.0));
    let angle = 0.5 * (2.0 * b).atan2(a - d);
    let (c, s) = (angle.cos(), angle.sin());
    let (s1, s2) = (l1.sqrt(), l2.sqrt());
    let abs_sq: Vec<f64> = run_trials(trials, seed, |r| {
        let (u, v) = (s1 * r.normal(), s2 * r.normal());
        let (x, y) = (c * u - s * v, s * u + c * v);
        x * x + y * y
    });
    let logs: Vec<f64> = abs_sq.iter().map(|v| v.log2()).collect();
    let k = constants();
    let sq = TrialStats::from_samples(&abs_sq, |_| false, seed, 0.0);
    let lg = TrialStats::from_samples(&logs, |_| false, seed, k.theta);
    let delta = sq.mean.log2() - lg.mean;
    // delta-method error of log2(mean) - mean(log)
    let lin: Vec<f64> = abs_sq.iter().zip(&logs).map(|(s, l)| s / (sq.mean * std::f64::consts::LN_2) - l).collect();
    let lin_stats = TrialStats::from_samples(&lin, |_| false, seed, 0.0);
    let delta_tol = BANDS * lin_stats.standard_error();
    let checks = vec![
        Check::new("delta >= 0", delta, Relation::AtLeast, 0.0, delta_tol),
        Check::new("delta <= gamma", delta, Relation::AtMost, k.gamma, delta_tol),
        Check::new("var(log2|Z|^2) <= theta", lg.variance, Relation::AtMost, k.theta, BANDS * variance_error(&logs)),
    ];
    Ok(McReport {
        name: "log-bounds".into(),
        records: vec![("abs_sq".into(), sq), ("log2_abs_sq".into(), lg)],
        checks,
    })
}

/// Forms are the columns of the `n × k` matrix `forms`, acting by
/// `f_i(a) = Σ_j forms[j][i] a_j`. The subspace `U` has dimension `r` and is
/// the orthogonal complement of the span of the top `n - r` left singular
/// vectors of `conj(forms)`; `R = σ_{n-r+1}`.
pub fn mc_lemma42(forms: &ComplexMatrix, r: usize, trials: usize, seed: u64) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    let (n, k) = forms.shape();
    if r == 0 || r >= n || k == 0 {
        return Err(invalid(format!("need 1 <= r < n and k >= 1 (n={n}, r={r}, k={k})")));
    }
    let conj = ComplexMatrix::from_fn(n, k, |i, j| forms[(i, j)].conj());
    let spec = spectral::svd_with_vectors(&conj);
    let left = spec.left().expect("factors requested");
    let top: Vec<Vec<Complex64>> = (0..(n - r).min(spec.p())).map(|j| left.column(j)).collect();
    let full = orthonormal_completion(&top, n, n);
    let basis = ComplexMatrix::from_fn(n, r, |i, j| full[n - r + j][i]);
    let big_r = spec.sigma(n - r + 1);
    let threshold = 2.0 * (4.0 * k as f64).ln().sqrt() * big_r;
    let scale = forms.frobenius_norm();
    let rows: Vec<(f64, bool)> = run_trials(trials, seed, |s| {
        let a = basis.mul_vec(&s.complex_vector(r));
        let a_norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let max = (0..k)
            .map(|i| (0..n).map(|j| forms[(j, i)] * a[j]).sum::<Complex64>().norm())
            .fold(0.0, f64::max);
        (max, max <= threshold + 1e-12 * scale * a_norm)
    });
    let values: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mut stats = TrialStats::from_samples(&values, |_| false, seed, threshold);
    stats.successes = rows.iter().filter(|r| r.1).count();
    let checks = vec![half_check("P[max |f_i(a)| <= 2 sqrt(ln 4k) R]", &stats)];
    let r_stats = TrialStats { trials: 1, successes: 0, mean: big_r, variance: 0.0, seed, threshold: big_r };
    Ok(McReport { name: "lemma42".into(), records: vec![("max_abs_form".into(), stats), ("R".into(), r_stats)], checks })
}

/// `Z = B_I ζ` for rows `I` of the orthonormal basis `B`. Compares
/// `∏|Z_i|²` with `det Σ = det E[Z Z*] = 2^r |det B_I|²`.
pub fn mc_lemma51(basis: &ComplexMatrix, rows: &[usize], trials: usize, seed: u64) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    let (n, r) = basis.shape();
    let defect = orthonormality_defect(basis);
    if defect > 1e-10 {
        return Err(ProbabilityError::NotOrthonormal(defect));
    }
    let mut sorted = rows.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if rows.len() != r || sorted.len() != r || sorted.last().is_some_and(|&i| i >= n) {
        return Err(invalid(format!("need {r} distinct row indices below {n}")));
    }
    let b_i = basis.select_rows(rows);
    let det = b_i.determinant().expect("square").norm();
    let log2_det_sigma = r as f64 + 2.0 * det.log2();
    let k = constants();
    let threshold = r as f64 * k.delta.log2() + log2_det_sigma;
    let logs: Vec<f64> = run_trials(trials, seed, |s| log2_product_abs_sq(&b_i.mul_vec(&s.complex_vector(r))));
    let log_stats = TrialStats::from_samples(&logs, |v| v >= threshold, seed, threshold);
    let mut records = vec![("log2_product".to_string(), log_stats.clone())];
    let mut checks = vec![half_check("P[prod >= delta^r det Sigma]", &log_stats)];
    if log2_det_sigma.is_finite() {
        let ratio: Vec<f64> = logs.iter().map(|l| (l - log2_det_sigma).exp2()).collect();
        let ratio_stats = TrialStats::from_samples(&ratio, |v| v >= 1.0, seed, 1.0);
        checks.insert(
            0,
            Check::new("E[prod] / det Sigma", ratio_stats.mean, Relation::AtLeast, 1.0, BANDS * ratio_stats.standard_error()),
        );
        records.insert(0, ("product_over_det_sigma".to_string(), ratio_stats));
    }
    Ok(McReport { name: "lemma51".into(), records, checks })
}

/// `a` standard Gaussian in a fixed random `r`-dimensional subspace (drawn
/// from the shared stream). Reports how often
/// `log2 MSV_r(Circ(a)) >= (r/2) log2 n + (r/2) log2 δ - n/2` and how often
/// `log2 MSV_r - n/2 >= (r/2) log2 n - c n`.
pub fn mc_lemma43(n: usize, r: usize, trials: usize, seed: u64) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    if !n.is_power_of_two() || n > LEMMA43_MAX_N || r == 0 || r > n {
        return Err(invalid(format!("need n a power of two <= {LEMMA43_MAX_N} and 1 <= r <= n (n={n}, r={r})")));
    }
    let basis = random_subspace(n, r, &mut NormalSampler::new(seed, SHARED_STREAM));
    let k = constants();
    let (nf, rf) = (n as f64, r as f64);
    let msv_threshold = rf / 2.0 * nf.log2() + rf / 2.0 * k.delta.log2() - nf / 2.0;
    let bound_threshold = rf / 2.0 * nf.log2() - k.c * nf;
    let logs: Vec<f64> = run_trials(trials, seed, |s| {
        let a = basis.mul_vec(&s.complex_vector(r));
        spectral::log2_msv(&spectral::circulant_spectral_data(&a), r).expect("1 <= r <= n")
    });
    let msv_stats = TrialStats::from_samples(&logs, |v| v >= msv_threshold, seed, msv_threshold);
    let bounds: Vec<f64> = logs.iter().map(|v| v - nf / 2.0).collect();
    let bound_stats = TrialStats::from_samples(&bounds, |v| v >= bound_threshold, seed, bound_threshold);
    let checks = vec![
        half_check("P[MSV_r^2 >= n^r delta^r 2^-n]", &msv_stats),
        half_check("P[msv_bound >= (r/2) log n - c n]", &bound_stats),
    ];
    Ok(McReport {
        name: "lemma43".into(),
        records: vec![("log2_msv".into(), msv_stats), ("msv_bound".into(), bound_stats)],
        checks,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma62Model {
    /// Real components, threshold `√(2 ln n) + ε`.
    Real,
    /// Complex components with `E|Z_i|²` equal to the variance, threshold
    /// `2√(ln 2n) + ε`.
    Complex,
}

impl Lemma62Model {
    fn threshold(self, n: usize, eps: f64) -> f64 {
        let n = n as f64;
        match self {
            Lemma62Model::Real => (2.0 * n.ln()).sqrt() + eps,
            Lemma62Model::Complex => 2.0 * (2.0 * n).ln().sqrt() + eps,
        }
    }
}

/// Exceedance of `max_i |X_i|` over the threshold for independent components
/// of the given variances, each repeated `copies` times (so `n` counts the
/// copies; repeated components are perfectly correlated).
pub fn mc_lemma62(
    variances: &[f64],
    copies: usize,
    model: Lemma62Model,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<McReport, ProbabilityError> {
    require_trials(trials)?;
    if variances.is_empty() || copies == 0 {
        return Err(invalid("need at least one component"));
    }
    if variances.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
        return Err(invalid("variances must lie in [0, 1]"));
    }
    let n = variances.len() * copies;
    let threshold = model.threshold(n, eps);
    let maxima: Vec<f64> = run_trials(trials, seed, |s| {
        variances
            .iter()
            .map(|&v| match model {
                Lemma62Model::Real => (v.sqrt() * s.normal()).abs(),
                Lemma62Model::Complex => (v / 2.0).sqrt() * s.complex().norm(),
            })
            .fold(0.0, f64::max)
    });
    let stats = TrialStats::from_samples(&maxima, |m| m > threshold, seed, threshold);
    Ok(McReport { name: format!("lemma62 n={n}"), records: vec![(format!("n={n}"), stats)], checks: Vec::new() })
}

/// Independent unit-variance components for `n = 2^lo ..= 2^hi`. Checks that
/// the exceedance frequency does not increase between consecutive sizes
/// beyond three combined standard errors, that it drops overall, and that it
/// is below `0.2` at the largest size.
pub fn mc_lemma62_sweep(
    lo: u32,
    hi: u32,
    model: Lemma62Model,
    eps: f64,
    trials: usize,
    seed: u64,
) -> Result<McReport, ProbabilityError> {
    if lo >= hi || hi > 24 {
        return Err(invalid("need lo < hi <= 24"));
    }
    let mut records = Vec::new();
    for j in lo..=hi {
        let n = 1usize << j;
        let report = mc_lemma62(&vec![1.0; n], 1, model, eps, trials, seed.wrapping_add(j as u64))?;
        records.extend(report.records);
    }
    let freq_se = |s: &TrialStats| {
        let p = s.frequency();
        (p * (1.0 - p) / s.trials as f64).sqrt()
    };
    let mut checks = Vec::new();
    for w in records.windows(2) {
        let (a, b) = (&w[0].1, &w[1].1);
        let tol = BANDS * (freq_se(a).powi(2) + freq_se(b).powi(2)).sqrt();
        checks.push(Check::new(format!("{} <= {}", w[1].0, w[0].0), b.frequency(), Relation::AtMost, a.frequency(), tol));
    }
    let (first, last) = (&records[0].1, &records[records.len() - 1].1);
    checks.push(Check::new("last <= first", last.frequency(), Relation::AtMost, first.frequency(), 0.0));
    checks.push(Check::new("last < 0.2", last.frequency(), Relation::AtMost, 0.2, 0.0));
    let name = match model {
        Lemma62Model::Real => "lemma62-sweep real",
        Lemma62Model::Complex => "lemma62-sweep complex",
    };
    Ok(McReport { name: name.into(), records, checks })
}
