mod common;

use bcc_core::probability::{
    adaptive_simpson, constants, log2_product_abs_sq, mc_lemma62, mc_linear_comb, mc_log_bounds, orthonormality_defect,
    random_subspace, sample_gaussian, GaussianSpec, Lemma62Model, NormalSampler, ProbabilityError, TrialStats,
};
use common::*;
use statrs::distribution::{ContinuousCDF, Normal};
use std::f64::consts::{LN_2, PI};

#[test]
fn sampler_is_reproducible_per_stream() {
    let a = NormalSampler::new(7, 3).complex_vector(16);
    let b = NormalSampler::new(7, 3).complex_vector(16);
    let other = NormalSampler::new(7, 4).complex_vector(16);
    assert_eq!(a, b);
    assert_ne!(a, other);
}

#[test]
fn real_parts_look_normal() {
    // Kolmogorov distance of Re ζ against N(0, 1)
    let mut s = NormalSampler::new(600, 0);
    let mut xs: Vec<f64> = (0..20_000).map(|_| s.complex().re).collect();
    xs.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, 1.0).unwrap();
    let n = xs.len() as f64;
    let d = xs
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal.cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max);
    // 99.9% critical value is about 1.95/sqrt(n)
    assert!(d < 1.95 / n.sqrt(), "KS distance {d}");
    let mean_sq: f64 = NormalSampler::new(600, 1).complex_vector(20_000).iter().map(|z| z.norm_sqr()).sum::<f64>() / n;
    assert!((mean_sq - 2.0).abs() < 0.06, "E|z|^2 = {mean_sq}");
}

#[test]
fn subspaces_are_orthonormal() {
    let mut s = NormalSampler::new(601, 0);
    for (n, r) in [(8, 1), (64, 6), (64, 32), (5, 5)] {
        let b = random_subspace(n, r, &mut s);
        assert_eq!(b.shape(), (n, r));
        assert!(orthonormality_defect(&b) < 1e-12);
    }
}

#[test]
fn gaussian_samples_lie_in_the_subspace() {
    let basis = random_subspace(10, 3, &mut NormalSampler::new(602, 0));
    let spec = GaussianSpec { dim: 10, basis: Some(basis.clone()), seed: 603 };
    for v in sample_gaussian(&spec, 20).unwrap() {
        let coeffs = basis.adjoint().mul_vec(&v);
        let back = basis.mul_vec(&coeffs);
        assert!(max_rel_diff(&back, &v) < 1e-12);
    }
    let bad = GaussianSpec { dim: 10, basis: Some(gaussian_matrix(10, 3, 604, 0)), seed: 0 };
    assert!(matches!(sample_gaussian(&bad, 1), Err(ProbabilityError::NotOrthonormal(_))));
}

#[test]
fn simpson_integrates_known_functions() {
    let v = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12);
    assert!((v - 2.0).abs() < 1e-10);
    let g = adaptive_simpson(&|x: f64| (-x * x).exp(), 0.0, 8.0, 1e-12);
    assert!((g - PI.sqrt() / 2.0).abs() < 1e-10);
}

#[test]
fn constants_agree_with_series_of_digamma_values() {
    // E ln(X²) for standard normal X equals ψ(1/2) + ln 2 = -γ_E - ln 2
    let eg = 0.577_215_664_901_532_9;
    let k = constants();
    assert!((k.gamma - ((eg + LN_2) / LN_2 + 1.0)).abs() < 1e-6);
    assert!(k.delta > 0.0 && k.delta < 1.0);
    assert!(k.c > 0.0);
}

#[test]
fn linear_combination_is_exponential() {
    let f = gaussian(12, 605, 0);
    let report = mc_linear_comb(&f, 20_000, 606).unwrap();
    assert!(report.passed(), "{}", report.to_text());
    assert!(mc_linear_comb(&reals(&[0.0; 3]), 100, 0).is_err());
}

#[test]
fn log_bounds_for_proper_covariance() {
    let report = mc_log_bounds([[1.0, 0.0], [0.0, 1.0]], 20_000, 607).unwrap();
    assert!(report.passed(), "{}", report.to_text());
    let report = mc_log_bounds([[1.0, 0.1], [0.1, 0.9]], 20_000, 608).unwrap();
    assert!(report.passed(), "{}", report.to_text());
}

#[test]
fn log_variance_exceeds_theta_for_elongated_covariance() {
    // axes ratio about 11: the mean bounds hold, the variance bound does not
    let report = mc_log_bounds([[2.0, 0.7], [0.7, 0.5]], 20_000, 611).unwrap();
    assert!(report.check("delta >= 0").unwrap().passed);
    assert!(report.check("delta <= gamma").unwrap().passed);
    assert!(!report.check("var(log2|Z|^2) <= theta").unwrap().passed, "{}", report.to_text());
}

#[test]
fn log_variance_exceeds_theta_for_real_gaussians() {
    // Z = X real: Var ln X² = ψ'(1/2) = π²/2, so Var log2 |Z|² ≈ 10.27 > θ.
    let exact = PI * PI / 2.0 / (LN_2 * LN_2);
    let report = mc_log_bounds([[1.0, 0.0], [0.0, 0.0]], 50_000, 609).unwrap();
    let var = report.record("log2_abs_sq").unwrap().variance;
    assert!((var - exact).abs() < 0.5, "var {var} vs {exact}");
    assert!(report.check("delta >= 0").unwrap().passed);
    assert!(report.check("delta <= gamma").unwrap().passed);
    assert!(!report.check("var(log2|Z|^2) <= theta").unwrap().passed);
    assert!(mc_log_bounds([[1.0, 2.0], [2.0, 1.0]], 100, 0).is_err());
}

#[test]
fn product_of_squares_in_log_domain() {
    let z = vec![c(3.0, 4.0), c(0.0, 0.5)];
    assert!((log2_product_abs_sq(&z) - (25.0f64 * 0.25).log2()).abs() < 1e-12);
    let big = vec![c(1e200, 0.0); 8];
    assert!(log2_product_abs_sq(&big).is_finite());
}

#[test]
fn trial_stats_summary() {
    let stats = TrialStats::from_samples(&[1.0, 2.0, 3.0, 4.0], |v| v > 2.5, 9, 2.5);
    assert_eq!(stats.trials, 4);
    assert_eq!(stats.successes, 2);
    assert!((stats.mean - 2.5).abs() < 1e-15);
    assert!((stats.variance - 5.0 / 3.0).abs() < 1e-12);
    assert_eq!(stats.frequency(), 0.5);
    assert!(stats.to_record().contains("seed: 9"));
}

#[test]
fn gaussian_maximum_single_size() {
    let variances = vec![1.0; 64];
    let report = mc_lemma62(&variances, 1, Lemma62Model::Complex, 0.5, 5_000, 610).unwrap();
    assert!(report.passed(), "{}", report.to_text());
}
