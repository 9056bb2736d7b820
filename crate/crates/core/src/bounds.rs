//! Lower bounds on bounded-coefficient linear complexity, in bits.
//!
//! Every formula reads singular values from a [`SpectralData`]; values at or
//! below the rank threshold count as zero, so singular inputs give
//! [`Bits::NegInfinity`] rather than a large negative float.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::spectral::{self, ComplexMatrix, SpectralData, SpectralError};

/// Row limit for including brute-force r-volume entries in [`best_bound`].
pub const REPORT_RVOL_ROWS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundError {
    #[error("matrix must be square, got {0}x{1}")]
    NotSquare(usize, usize),
    #[error("parameter out of range: {0}")]
    Range(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// A bound value in bits, with `-inf` kept distinct from finite values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bits {
    NegInfinity,
    Finite(f64),
}

impl Bits {
    pub fn from_log2(v: f64) -> Bits {
        assert!(!v.is_nan() && v != f64::INFINITY, "bound value must be finite or -inf");
        if v == f64::NEG_INFINITY {
            Bits::NegInfinity
        } else {
            Bits::Finite(v)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Bits::NegInfinity => f64::NEG_INFINITY,
            Bits::Finite(v) => v,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bits::Finite(_))
    }

    fn plus(self, x: f64) -> Bits {
        match self {
            Bits::NegInfinity => Bits::NegInfinity,
            Bits::Finite(v) => Bits::Finite(v + x),
        }
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value().partial_cmp(&other.value())
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bits::NegInfinity => f.write_str("-inf"),
            Bits::Finite(v) => write!(f, "{v:.6}"),
        }
    }
}

fn log2_sigma(spec: &SpectralData, k: usize) -> f64 {
    let s = spec.effective_sigma(k);
    if s > 0.0 {
        s.log2()
    } else {
        f64::NEG_INFINITY
    }
}

fn half_rows(spec: &SpectralData) -> f64 {
    spec.rows() as f64 / 2.0
}

/// `log2 |det A|`, via `MSV_n`.
pub fn morgenstern(spec: &SpectralData) -> Result<Bits, BoundError> {
    if spec.rows() != spec.cols() {
        return Err(BoundError::NotSquare(spec.rows(), spec.cols()));
    }
    Ok(Bits::from_log2(spectral::log2_msv_all(spec)[spec.p()]))
}

/// `log2 MSV_r(A) - m/2`.
pub fn msv_bound(spec: &SpectralData, r: usize) -> Result<Bits, BoundError> {
    Ok(Bits::from_log2(spectral::log2_msv(spec, r)?).plus(-half_rows(spec)))
}

/// `log2 Vol_r(A)` by enumeration of row subsets.
pub fn rvol_bound(a: &ComplexMatrix, r: usize) -> Result<Bits, BoundError> {
    Ok(Bits::from_log2(spectral::r_volume(a, r)?.log2()))
}

/// `r log2(σ_{r+1}/√n)`, the rigidity bound with `Rig_r` replaced by its
/// lower sandwich.
pub fn rigidity_bound(spec: &SpectralData, r: usize) -> Result<Bits, BoundError> {
    let (lower, _) = spectral::rigidity_sandwich(spec, r)?;
    if lower <= 0.0 {
        return Ok(Bits::NegInfinity);
    }
    Ok(Bits::Finite(r as f64 * lower.log2()))
}

/// Help-gate bound for exactly `h` help gates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelpGateBound {
    /// `Σ_{i=h+1}^{h+s} log2 σ_i - m/2 + h`
    pub value: Bits,
    /// `s log2 σ_{h+s} - m/2 + h`
    pub weak: Bits,
}

pub fn helpgate_bound(spec: &SpectralData, h: usize, s: usize) -> Result<HelpGateBound, BoundError> {
    let p = spec.p();
    if s == 0 || h + s > p {
        return Err(BoundError::Range(format!("need 1 <= s <= p - h (p={p}, h={h}, s={s})")));
    }
    let shift = h as f64 - half_rows(spec);
    let sum: f64 = (h + 1..=h + s).map(|i| log2_sigma(spec, i)).sum();
    let weak = s as f64 * log2_sigma(spec, h + s);
    Ok(HelpGateBound { value: Bits::from_log2(sum).plus(shift), weak: Bits::from_log2(weak).plus(shift) })
}

/// Help-gate bound for a budget of at most `h` help gates: the minimum of
/// [`helpgate_bound`] over every count `h' <= h`, at fixed `s <= p - h`.
pub fn helpgate_budget_bound(spec: &SpectralData, h: usize, s: usize) -> Result<(Bits, usize), BoundError> {
    let mut best: Option<(Bits, usize)> = None;
    for used in 0..=h {
        let v = helpgate_bound(spec, used, s)?.value;
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, used));
        }
    }
    Ok(best.expect("range 0..=h is non-empty"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundEntry {
    pub name: &'static str,
    pub r: Option<usize>,
    pub s: Option<usize>,
    pub h: Option<usize>,
    pub value: Bits,
    pub trace: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub id: String,
    pub rows: usize,
    pub cols: usize,
    pub help_budget: usize,
    pub entries: Vec<BoundEntry>,
    pub best: Bits,
    pub upper_bound: Option<usize>,
}

/// Every formula over all valid parameters for the matrix `a`.
pub fn best_bound(a: &ComplexMatrix, h: usize) -> BoundReport {
    let spec = spectral::svd(a);
    let small = (a.rows() <= REPORT_RVOL_ROWS).then_some(a);
    best_bound_from_spectrum(&spec, h, small)
}

/// As [`best_bound`] from precomputed singular values. r-volume entries are
/// included only when the matrix itself is supplied.
///
/// With `h = 0` the report holds the Morgenstern (square only), mean square
/// volume, r-volume, rigidity and `h = 0` help-gate entries. With `h > 0`
/// only budgeted help-gate entries are certified and reported.
pub fn best_bound_from_spectrum(spec: &SpectralData, h: usize, matrix: Option<&ComplexMatrix>) -> BoundReport {
    let p = spec.p();
    let m = spec.rows();
    let mut entries = Vec::new();
    let entry = |name, r, s, hh, value, trace| BoundEntry { name, r, s, h: hh, value, trace };
    if h == 0 {
        if let Ok(v) = morgenstern(spec) {
            entries.push(entry("morgenstern", Some(p), None, Some(0), v, format!("sum_{{i<={p}}} log2 sigma_i")));
        }
        let log_msv = spectral::log2_msv_all(spec);
        for r in 1..=p {
            let v = Bits::from_log2(log_msv[r]).plus(-(m as f64) / 2.0);
            entries.push(entry("msv", Some(r), None, Some(0), v, format!("log2 MSV_{r} = {} ; - {m}/2", Bits::from_log2(log_msv[r]))));
        }
        if let Some(a) = matrix {
            for r in 1..=p {
                if let Ok(v) = rvol_bound(a, r) {
                    entries.push(entry("rvol", Some(r), None, Some(0), v, format!("log2 Vol_{r}")));
                }
            }
        }
        for r in 0..p {
            if let Ok(v) = rigidity_bound(spec, r) {
                let trace = format!("{r} * log2(sigma_{} / sqrt({}))", r + 1, spec.cols());
                entries.push(entry("rigidity", Some(r), None, Some(0), v, trace));
            }
        }
    }
    for s in 1..=p.saturating_sub(h) {
        if let Ok((v, used)) = helpgate_budget_bound(spec, h, s) {
            let trace = format!("min over h'<={h}; attained at h'={used}: sum_{{i={}..{}}} log2 sigma_i - {m}/2 + {used}", used + 1, used + s);
            entries.push(entry("helpgate", None, Some(s), Some(h), v, trace));
        }
    }
    let best = entries.iter().map(|e| e.value).fold(Bits::NegInfinity, |a, b| if b > a { b } else { a });
    BoundReport { id: String::new(), rows: spec.rows(), cols: spec.cols(), help_budget: h, entries, best, upper_bound: None }
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

impl BoundReport {
    pub const CSV_HEADER: &'static str = "n,formula,r,s,h,bound_bits,upper_size";

    /// One CSV row per entry, plus a `best` row. `n` is the column count.
    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        let upper = opt(self.upper_bound);
        for e in &self.entries {
            let _ = writeln!(out, "{},{},{},{},{},{},{}", self.cols, e.name, opt(e.r), opt(e.s), opt(e.h), e.value, upper);
        }
        let _ = writeln!(out, "{},best,,,{},{},{}", self.cols, self.help_budget, self.best, upper);
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        if !self.id.is_empty() {
            let _ = writeln!(out, "### {}\n", self.id);
        }
        let _ = writeln!(out, "{}x{} matrix, help-gate budget {}\n", self.rows, self.cols, self.help_budget);
        out.push_str("| formula | r | s | h | bits | trace |\n|---|---|---|---|---|---|\n");
        for e in &self.entries {
            let _ = writeln!(out, "| {} | {} | {} | {} | {} | {} |", e.name, opt(e.r), opt(e.s), opt(e.h), e.value, e.trace);
        }
        let _ = writeln!(out, "\nbest: {}", self.best);
        if let Some(u) = self.upper_bound {
            let _ = writeln!(out, "upper: {u}");
        }
        out
    }
}

/// Finite-`n` assembly of the convolution lower-bound argument.
///
/// `log_term = n log2(2 sqrt(ln(4k)))`. Given the rigidity parameter `R`,
/// `value_given_r = (r/2) log2 n - c n - log_term - n log2 R`. Eliminating
/// `R` through `size >= (n - r) log2 R` gives
/// `combined = ((r/2) log2 n - c n - log_term) / (1 + n/(n - r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Surrogate {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub c: f64,
    pub main_term: f64,
    pub linear_term: f64,
    pub log_term: f64,
    pub rigidity_term: f64,
    pub value_given_r: f64,
    pub divisor: f64,
    pub combined: f64,
}

pub fn convolution_theorem_surrogate(n: usize, r: usize, k: usize, big_r: f64, c: f64) -> Result<Surrogate, BoundError> {
    if r == 0 || r >= n {
        return Err(BoundError::Range(format!("need 1 <= r < n (n={n}, r={r})")));
    }
    if k == 0 || !(big_r > 0.0) {
        return Err(BoundError::Range("need k >= 1 and R > 0".into()));
    }
    let nf = n as f64;
    let main_term = r as f64 / 2.0 * nf.log2();
    let linear_term = c * nf;
    let log_term = nf * (2.0 * (4.0 * k as f64).ln().sqrt()).log2();
    let rigidity_term = nf * big_r.log2();
    let divisor = 1.0 + nf / (n - r) as f64;
    Ok(Surrogate {
        n,
        r,
        k,
        c,
        main_term,
        linear_term,
        log_term,
        rigidity_term,
        value_given_r: main_term - linear_term - log_term - rigidity_term,
        divisor,
        combined: (main_term - linear_term - log_term) / divisor,
    })
}

/// Coefficient of `n log2 n` left after eliminating `R` at `r = εn`.
pub fn surrogate_coefficient(eps: f64) -> f64 {
    eps * (1.0 - eps) / (2.0 * (2.0 - eps))
}

/// Maximizer of [`surrogate_coefficient`] on `(0, 1)` by golden-section
/// search, returned as `(ε, coefficient)`.
pub fn maximize_coefficient() -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-12 {
        let a = hi - inv_phi * (hi - lo);
        let b = lo + inv_phi * (hi - lo);
        if surrogate_coefficient(a) < surrogate_coefficient(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    let eps = (lo + hi) / 2.0;
    (eps, surrogate_coefficient(eps))
}

/// Closed form of the maximizer: `ε = 2 - √2`, coefficient `3/2 - √2`.
pub fn maximize_coefficient_closed_form() -> (f64, f64) {
    (2.0 - 2f64.sqrt(), 1.5 - 2f64.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec_of(values: &[f64], rows: usize, cols: usize) -> SpectralData {
        SpectralData::from_singular_values(rows, cols, values.to_vec())
    }

    #[test]
    fn dft_values() {
        let n = 16;
        let spec = spec_of(&vec![4.0; n], n, n);
        assert_eq!(morgenstern(&spec).unwrap(), Bits::Finite(32.0));
        assert!((msv_bound(&spec, n).unwrap().value() - 24.0).abs() < 1e-12);
        assert_eq!(rigidity_bound(&spec, 3).unwrap(), Bits::Finite(0.0));
        let hb = helpgate_bound(&spec, 4, 12).unwrap();
        assert!((hb.value.value() - (12.0 * 2.0 - 8.0 + 4.0)).abs() < 1e-12);
        assert_eq!(hb.value, hb.weak);
        assert!(helpgate_bound(&spec, 16, 1).is_err());
    }

    #[test]
    fn identity_and_diag() {
        let spec = spec_of(&[1.0; 4], 4, 4);
        assert_eq!(morgenstern(&spec).unwrap(), Bits::Finite(0.0));
        let v = msv_bound(&spec, 2).unwrap().value();
        assert!((v - (0.5 * 6f64.log2() - 2.0)).abs() < 1e-12);
        let d = ComplexMatrix::diag(&[2.0, 1.0]);
        assert!((rvol_bound(&d, 1).unwrap().value() - 1.0).abs() < 1e-12);
        let v = msv_bound(&spectral::svd(&d), 1).unwrap().value();
        assert!((v - (0.5 * 5f64.log2() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn singular_and_zero() {
        let spec = spec_of(&[3.0, 0.0], 2, 2);
        assert_eq!(morgenstern(&spec).unwrap(), Bits::NegInfinity);
        assert_eq!(rigidity_bound(&spec, 1).unwrap(), Bits::NegInfinity);
        let report = best_bound(&ComplexMatrix::zeros(3, 3), 0);
        assert_eq!(report.best, Bits::NegInfinity);
        assert!(report.entries.iter().all(|e| e.value == Bits::NegInfinity));
        assert!(report.to_csv().contains("-inf"));
    }

    #[test]
    fn dft16_best_is_morgenstern() {
        let report = best_bound(&ComplexMatrix::dft(16), 0);
        assert!((report.best.value() - 32.0).abs() < 1e-9);
        let with_help = best_bound(&ComplexMatrix::dft(16), 8);
        assert!(with_help.entries.iter().all(|e| e.name == "helpgate" && e.h == Some(8)));
        assert_eq!(with_help.entries.len(), 8);
    }

    #[test]
    fn budget_uses_weakest_count() {
        // one large singular value: fewer help gates give the weaker bound
        let spec = spec_of(&[1.0, 1.0, 1.0, 1.0], 4, 4);
        let (v, used) = helpgate_budget_bound(&spec, 3, 1).unwrap();
        assert_eq!(used, 0);
        assert_eq!(v, Bits::Finite(-2.0));
    }

    #[test]
    fn coefficient_peak() {
        let (eps, coef) = maximize_coefficient();
        let (eps_cf, coef_cf) = maximize_coefficient_closed_form();
        assert!((eps - eps_cf).abs() < 1e-6 && (coef - coef_cf).abs() < 1e-12);
        assert!((surrogate_coefficient(0.5) - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn surrogate_terms_add_up() {
        let s = convolution_theorem_surrogate(1024, 512, 3 * 1024usize.pow(3), 1.0, 3.73).unwrap();
        assert_eq!(s.main_term, 2560.0);
        assert!((s.linear_term - 3.73 * 1024.0).abs() < 1e-9);
        assert_eq!(s.rigidity_term, 0.0);
        assert!((s.value_given_r - (s.main_term - s.linear_term - s.log_term)).abs() < 1e-9);
        assert!((s.combined * 3.0 - s.value_given_r).abs() < 1e-9);
        assert!(convolution_theorem_surrogate(8, 8, 1, 1.0, 1.0).is_err());
    }
}
