mod common;

use bcc_core::bounds::{
    best_bound, convolution_theorem_surrogate, helpgate_budget_bound, helpgate_bound, maximize_coefficient,
    maximize_coefficient_closed_form, morgenstern, msv_bound, rigidity_bound, surrogate_coefficient, Bits, BoundReport,
};
use bcc_core::spectral::{self, SpectralData};
use common::*;

#[test]
fn morgenstern_for_dft() {
    for j in 1..=8u32 {
        let n = 1usize << j;
        let v = morgenstern(&spectral::svd(&dft_table(n))).unwrap().value();
        assert!((v - n as f64 * j as f64 / 2.0).abs() < 1e-9);
    }
}

#[test]
fn morgenstern_needs_a_square_matrix() {
    assert!(morgenstern(&spectral::svd(&gaussian_matrix(3, 4, 500, 0))).is_err());
}

#[test]
fn singular_matrix_gives_negative_infinity() {
    let spec = SpectralData::from_singular_values(3, 3, vec![2.0, 1.0, 0.0]);
    let v = morgenstern(&spec).unwrap();
    assert_eq!(v, Bits::NegInfinity);
    assert_eq!(v.to_string(), "-inf");
    assert!(!v.is_finite());
    assert!(msv_bound(&spec, 2).unwrap().is_finite());
}

#[test]
fn helpgate_bound_from_known_spectrum() {
    let spec = SpectralData::from_singular_values(4, 4, vec![16.0, 8.0, 4.0, 2.0]);
    // h = 1, s = 2: log2 8 + log2 4 - 2 + 1 = 4
    let b = helpgate_bound(&spec, 1, 2).unwrap();
    assert!((b.value.value() - 4.0).abs() < 1e-12);
    // weak form: 2 log2 4 - 2 + 1 = 3
    assert!((b.weak.value() - 3.0).abs() < 1e-12);
    assert!(b.weak <= b.value);
    assert!(helpgate_bound(&spec, 3, 2).is_err());
    assert!(helpgate_bound(&spec, 0, 0).is_err());
}

#[test]
fn budget_never_exceeds_any_exact_count() {
    for t in 0..10u64 {
        let spec = spectral::svd(&gaussian_matrix(8, 8, 501, t));
        for h in 0..4 {
            for s in 1..=8 - h {
                let (budget, used) = helpgate_budget_bound(&spec, h, s).unwrap();
                assert!(used <= h);
                for hh in 0..=h {
                    assert!(budget <= helpgate_bound(&spec, hh, s).unwrap().value);
                }
            }
        }
    }
}

#[test]
fn rigidity_bound_from_known_spectrum() {
    let spec = SpectralData::from_singular_values(4, 4, vec![16.0, 8.0, 4.0, 2.0]);
    // r = 2: 2 log2(4 / 2) = 2
    assert!((rigidity_bound(&spec, 2).unwrap().value() - 2.0).abs() < 1e-12);
    assert_eq!(rigidity_bound(&spec, 0).unwrap().value(), 0.0);
}

#[test]
fn report_lists_every_formula_and_the_best() {
    let report = best_bound(&dft_table(8), 0);
    for name in ["morgenstern", "msv", "rvol", "rigidity", "helpgate"] {
        assert!(report.entries.iter().any(|e| e.name == name), "{name}");
    }
    let max = report.entries.iter().map(|e| e.value.value()).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(report.best.value(), max);
    assert!((report.best.value() - 12.0).abs() < 1e-9);
    let csv = report.to_csv();
    assert!(csv.starts_with(BoundReport::CSV_HEADER));
    assert!(csv.lines().last().unwrap().starts_with("8,best,"));
    assert!(report.to_markdown().contains("best:"));
}

#[test]
fn help_budget_weakens_the_report() {
    let a = dft_table(16);
    let free = best_bound(&a, 0);
    let helped = best_bound(&a, 3);
    assert!(helped.entries.iter().all(|e| e.name == "helpgate"));
    assert!(helped.best <= free.best);
}

#[test]
fn surrogate_terms() {
    let s = convolution_theorem_surrogate(1024, 512, 1024, 2.0, 3.73).unwrap();
    assert!((s.main_term - 256.0 * 10.0).abs() < 1e-9);
    assert!((s.divisor - 3.0).abs() < 1e-12);
    let want_log = 1024.0 * (2.0 * (4096f64).ln().sqrt()).log2();
    assert!((s.log_term - want_log).abs() < 1e-9);
    assert!((s.value_given_r - (s.main_term - s.linear_term - s.log_term - 1024.0)).abs() < 1e-9);
    assert!(convolution_theorem_surrogate(8, 8, 1, 1.0, 1.0).is_err());
    assert!(convolution_theorem_surrogate(8, 4, 0, 1.0, 1.0).is_err());
}

#[test]
fn coefficient_optimum() {
    let (eps, coef) = maximize_coefficient();
    let (eps_cf, coef_cf) = maximize_coefficient_closed_form();
    assert!((eps - eps_cf).abs() < 1e-6);
    assert!((coef - coef_cf).abs() < 1e-12);
    assert_eq!(surrogate_coefficient(0.5), 1.0 / 12.0);
    assert!(surrogate_coefficient(0.3) < coef && surrogate_coefficient(0.8) < coef);
}

#[test]
fn dft_circuits_exceed_every_certified_bound() {
    use bcc_core::bounds::best_bound_from_spectrum;
    use bcc_core::circuit::{audit_coefficients, extract_linear_matrix};
    use bcc_core::generators::gen_dft;
    for j in 2..=10u32 {
        let circuit = gen_dft(1 << j, false).unwrap();
        let h = audit_coefficients(&circuit, 2.0).help_count;
        let a = extract_linear_matrix(&circuit).unwrap();
        let report = best_bound_from_spectrum(&spectral::svd(&a), h, (a.rows() <= 12).then_some(&a));
        for e in &report.entries {
            assert!(e.value.value() <= circuit.size() as f64, "n={}: {} {}", 1 << j, e.name, e.value);
        }
    }
}

#[test]
fn doubling_the_matrix_adds_r_bits() {
    let a = gaussian_matrix(6, 6, 502, 0);
    let (s1, s2) = (spectral::svd(&a), spectral::svd(&a.scaled(c(2.0, 0.0))));
    for r in 1..=6 {
        let diff = msv_bound(&s2, r).unwrap().value() - msv_bound(&s1, r).unwrap().value();
        assert!((diff - r as f64).abs() < 1e-9);
    }
}

#[test]
fn helpgate_without_help_is_the_top_product() {
    let spec = spectral::svd(&gaussian_matrix(7, 5, 503, 0));
    for r in 1..=5 {
        let hg = helpgate_bound(&spec, 0, r).unwrap().value.value();
        let top: f64 = (1..=r).map(|i| spec.sigma(i).log2()).sum::<f64>() - 3.5;
        assert!((hg - top).abs() < 1e-9);
        // the top product never exceeds MSV_r
        assert!(hg <= msv_bound(&spec, r).unwrap().value() + 1e-9);
    }
}
