//! Gaussian sampling and Monte Carlo checks of the probabilistic estimates.
//!
//! Randomness comes from ChaCha8 keyed by a 64-bit seed. Trial `t` draws
//! from stream `t` of that key, so every trial is reproducible on its own and
//! results do not depend on how trials are split across threads. Normals are
//! produced by Box–Muller from 53-bit uniforms.
//!
//! A standard Gaussian in `ℂ^n` has independent real and imaginary parts of
//! variance 1, so `E|ζ_i|² = 2`.

mod constants;
mod lemmas;

use std::fmt::{self, Write as _};

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::spectral::{orthonormal_completion, ComplexMatrix};

pub use constants::{
    adaptive_simpson, closed_form_constants, constants, gamma_by_quadrature, theta_by_quadrature, Constants,
    EULER_GAMMA, QUADRATURE_T,
};
pub use lemmas::{
    mc_lemma42, mc_lemma43, mc_lemma51, mc_lemma62, mc_lemma62_sweep, mc_linear_comb, mc_log_bounds, Lemma62Model,
    LEMMA43_MAX_N,
};

/// Stream reserved for draws shared by all trials (fixed subspaces, etc.).
pub const SHARED_STREAM: u64 = u64::MAX;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProbabilityError {
    #[error("basis columns are not orthonormal (deviation {0:.3e})")]
    NotOrthonormal(f64),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// Normal sampler over one ChaCha8 stream.
#[derive(Debug, Clone)]
pub struct NormalSampler {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        NormalSampler { rng, spare: None }
    }

    /// Uniform in `(0, 1]`.
    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let radius = (-2.0 * self.uniform().ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * self.uniform();
        self.spare = Some(radius * angle.sin());
        radius * angle.cos()
    }

    /// Real and imaginary parts independent standard normal.
    pub fn complex(&mut self) -> Complex64 {
        let re = self.normal();
        Complex64::new(re, self.normal())
    }

    pub fn complex_vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }
}

/// Orthonormal basis (columns of an `n × r` matrix) of a random
/// `r`-dimensional subspace, by Gram–Schmidt on a Gaussian matrix.
pub fn random_subspace(n: usize, r: usize, sampler: &mut NormalSampler) -> ComplexMatrix {
    assert!(r <= n, "subspace dimension exceeds ambient dimension");
    let cols: Vec<Vec<Complex64>> = (0..r).map(|_| sampler.complex_vector(n)).collect();
    let basis = orthonormal_completion(&cols, n, r);
    ComplexMatrix::from_fn(n, r, |i, j| basis[j][i])
}

/// Largest entry of `|B*B - I|`.
pub fn orthonormality_defect(b: &ComplexMatrix) -> f64 {
    let g = b.adjoint().matmul(b).expect("shapes agree");
    g.sub(&ComplexMatrix::identity(b.cols())).expect("shapes agree").max_abs()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    pub dim: usize,
    /// Column-orthonormal `dim × r` basis of the subspace, if any.
    pub basis: Option<ComplexMatrix>,
    pub seed: u64,
}

/// `count` samples; sample `i` uses stream `i`. With a basis `B` each sample
/// is `Bζ` for standard Gaussian `ζ ∈ ℂ^r`.
pub fn sample_gaussian(spec: &GaussianSpec, count: usize) -> Result<Vec<Vec<Complex64>>, ProbabilityError> {
    if let Some(b) = &spec.basis {
        if b.rows() != spec.dim {
            return Err(ProbabilityError::Invalid(format!("basis has {} rows, expected {}", b.rows(), spec.dim)));
        }
        let defect = orthonormality_defect(b);
        if defect > 1e-10 {
            return Err(ProbabilityError::NotOrthonormal(defect));
        }
    }
    Ok((0..count)
        .map(|i| {
            let mut s = NormalSampler::new(spec.seed, i as u64);
            match &spec.basis {
                Some(b) => b.mul_vec(&s.complex_vector(b.cols())),
                None => s.complex_vector(spec.dim),
            }
        })
        .collect())
}

/// Outcome of a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub trials: usize,
    pub successes: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub seed: u64,
    pub threshold: f64,
}

impl TrialStats {
    /// Statistics of `values`; `success` marks which trials count.
    pub fn from_samples(values: &[f64], success: impl Fn(f64) -> bool, seed: u64, threshold: f64) -> Self {
        let trials = values.len();
        let mean = values.iter().sum::<f64>() / trials.max(1) as f64;
        let variance = if trials > 1 {
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (trials - 1) as f64
        } else {
            0.0
        };
        let successes = values.iter().filter(|&&v| success(v)).count();
        TrialStats { trials, successes, mean, variance, seed, threshold }
    }

    pub fn frequency(&self) -> f64 {
        self.successes as f64 / self.trials.max(1) as f64
    }

    /// Standard error of the mean.
    pub fn standard_error(&self) -> f64 {
        (self.variance / self.trials.max(1) as f64).sqrt()
    }

    /// Standard error of the success frequency at a reference probability.
    pub fn frequency_error(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials.max(1) as f64).sqrt()
    }

    pub fn to_record(&self) -> String {
        format!(
            "trials: {}\nsuccesses: {}\nfrequency: {:.6}\nmean: {:.6}\nvariance: {:.6}\nseed: {}\nthreshold: {:.6}\n",
            self.trials,
            self.successes,
            self.frequency(),
            self.mean,
            self.variance,
            self.seed,
            self.threshold
        )
    }
}

/// Sample variance's standard error, from the fourth central moment.
pub(crate) fn variance_error(values: &[f64]) -> f64 {
    let n = values.len().max(1) as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    ((m4 - m2 * m2).max(0.0) / n).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    AtLeast,
    AtMost,
}

/// One inequality compared against a Monte Carlo estimate with a
/// three-standard-error band.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub relation: Relation,
    pub bound: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, observed: f64, relation: Relation, bound: f64, tolerance: f64) -> Self {
        let passed = match relation {
            Relation::AtLeast => observed >= bound - tolerance,
            Relation::AtMost => observed <= bound + tolerance,
        };
        Check { name: name.into(), observed, relation, bound, tolerance, passed }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.relation {
            Relation::AtLeast => ">=",
            Relation::AtMost => "<=",
        };
        write!(
            f,
            "{}: {} {:.6} {op} {:.6} (tol {:.6})",
            if self.passed { "pass" } else { "FAIL" },
            self.name,
            self.observed,
            self.bound,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McReport {
    pub name: String,
    pub records: Vec<(String, TrialStats)>,
    pub checks: Vec<Check>,
}

impl McReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn record(&self, label: &str) -> Option<&TrialStats> {
        self.records.iter().find(|(l, _)| l == label).map(|(_, s)| s)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `key: value` lines, one block per record, then the checks.
    pub fn to_text(&self) -> String {
        let mut out = format!("experiment: {}\n", self.name);
        for (label, stats) in &self.records {
            let _ = writeln!(out, "record: {label}");
            out.push_str(&stats.to_record());
        }
        for c in &self.checks {
            let _ = writeln!(out, "check: {c}");
        }
        let _ = writeln!(out, "status: {}", if self.passed() { "pass" } else { "fail" });
        out
    }
}

/// `Σ log2 |z_i|²`, the log of the product `∏ |z_i|²`.
pub fn log2_product_abs_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|v| 2.0 * v.norm().log2()).sum()
}
