//! Convolution report: measured upper bound against sampled lower bounds.

use std::fmt::Write as _;

use anyhow::Result;
use bcc_core::bounds::{convolution_theorem_surrogate, Bits, BoundReport, Surrogate};
use bcc_core::generators::gen_convolution_fft;
use bcc_core::probability::{constants, NormalSampler};
use bcc_core::spectral::{circulant_spectral_data, log2_msv_all};
use rayon::prelude::*;

pub const SAMPLES: u64 = 11;

pub struct Row {
    pub n: usize,
    /// `size(gen_convolution_fft(n))`
    pub upper: usize,
    /// Median over the samples of the best mean square volume bound.
    pub msv: Bits,
    /// Rank attaining the median sample's bound.
    pub msv_r: usize,
    pub surrogate: Surrogate,
}

/// Best `log2 MSV_r - n/2` over `r` for the circulant of `a`.
fn best_msv(a: &[bcc_core::Complex64]) -> (Bits, usize) {
    let spec = circulant_spectral_data(a);
    let half = a.len() as f64 / 2.0;
    log2_msv_all(&spec)
        .iter()
        .enumerate()
        .skip(1)
        .map(|(r, &v)| (Bits::from_log2(v - half), r))
        .fold((Bits::NegInfinity, 0), |best, cur| if cur.0 > best.0 { cur } else { best })
}

pub fn rows(max_n: usize, seed: u64) -> Result<Vec<Row>> {
    let c = constants().c;
    let sizes: Vec<usize> = std::iter::successors(Some(2usize), |n| Some(n * 2)).take_while(|&n| n <= max_n).collect();
    sizes
        .par_iter()
        .map(|&n| {
            let upper = gen_convolution_fft(n)?.size();
            let mut samples: Vec<(Bits, usize)> = (0..SAMPLES)
                .map(|k| best_msv(&NormalSampler::new(seed, (n as u64) << 8 | k).complex_vector(n)))
                .collect();
            samples.sort_by(|a, b| a.0.value().total_cmp(&b.0.value()));
            let (msv, msv_r) = samples[samples.len() / 2];
            // r = n/2 and the failure budget k = 3n³ of the union bound
            let k = 3 * n * n * n;
            let surrogate = convolution_theorem_surrogate(n, n / 2, k, 1.0, c)?;
            Ok(Row { n, upper, msv, msv_r, surrogate })
        })
        .collect()
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = format!("{}\n", BoundReport::CSV_HEADER);
    for row in rows {
        let _ = writeln!(out, "{},msv_median,{},,0,{},{}", row.n, row.msv_r, row.msv, row.upper);
    }
    out
}

pub fn to_markdown(rows: &[Row]) -> String {
    let mut out = String::from(
        "| n | upper size | msv bits (median) | r | surrogate main | linear | log | combined (R=1) |\n\
         |---|---|---|---|---|---|---|---|\n",
    );
    for row in rows {
        let s = &row.surrogate;
        let _ = writeln!(
            out,
            "| {} | {} | {} | {} | {:.3} | {:.3} | {:.3} | {:.3} |",
            row.n, row.upper, row.msv, row.msv_r, s.main_term, s.linear_term, s.log_term, s.combined
        );
    }
    out.push_str("\nSurrogate terms are reported for r = n/2 and are not certified bounds.\n");
    out
}
