//! `bcv`: generate, inspect and bound bounded-coefficient circuits.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage or parse error.

mod report;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use bcc_core::bounds::{best_bound, best_bound_from_spectrum, REPORT_RVOL_ROWS};
use bcc_core::circuit::{audit_coefficients, extract_linear_matrix, parse_circuit, validate_structure, Circuit, CircuitKind};
use bcc_core::generators::{
    gen_convolution_fft, gen_convolution_naive, gen_dft, gen_division, gen_polymul, gen_power_series_inv,
};
use bcc_core::probability::{
    mc_lemma42, mc_lemma43, mc_lemma51, mc_lemma62, mc_lemma62_sweep, mc_log_bounds, random_subspace, Lemma62Model,
    McReport, NormalSampler, SHARED_STREAM,
};
use bcc_core::spectral::{circulant_spectral_data, parse_complex_tokens, ComplexMatrix};
use bcc_core::{oracles, Complex64};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bcv", version, about = "Bounded-coefficient circuits: generators, bounds and checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Dft,
    ConvFft,
    ConvNaive,
    Polymul,
    Psinv,
    Division,
}

#[derive(Clone, Copy, ValueEnum)]
enum Oracle {
    NaiveConv,
    Dft,
    Polymul,
    Psinv,
    Division,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    Lemma51,
    Lemma42,
    Lemma43,
    Lemma62,
    Logbounds,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Md,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Real,
    Complex,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated circuit file.
    Gen {
        kind: GenKind,
        #[arg(long)]
        n: usize,
        /// Divisor degree for `division`.
        #[arg(long)]
        m: Option<usize>,
        /// Inverse transform for `dft`.
        #[arg(long)]
        inverse: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a circuit on given or seeded inputs.
    Eval {
        circuit: PathBuf,
        /// Whitespace-separated entries, `(re,im)` or real.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<String>,
        /// Draw Gaussian inputs from this seed instead.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structure validation and coefficient audit.
    Audit {
        circuit: PathBuf,
        #[arg(long, default_value_t = 2.0)]
        bound: f64,
    },
    /// Matrix of a linear circuit.
    Matrix {
        circuit: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certified lower bounds for a matrix.
    Bound {
        /// Matrix file (`m n` header, then rows).
        matrix: Option<PathBuf>,
        /// Vector file `a`; bounds the circulant `Circ(a)`.
        #[arg(long, conflicts_with = "matrix")]
        circulant: Option<PathBuf>,
        #[arg(long = "help-gates", default_value_t = 0)]
        help_gates: usize,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Upper and lower bounds for cyclic convolution over n = 2..N.
    Report {
        #[arg(long = "max-n")]
        max_n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a circuit file against a reference on 100 seeded inputs.
    Check {
        circuit: PathBuf,
        #[arg(long, value_enum)]
        against: Oracle,
        /// Compare against the inverse transform for `dft`.
        #[arg(long)]
        inverse: bool,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Monte-Carlo experiments.
    Mc {
        lemma: Lemma,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        r: Option<usize>,
        /// Number of forms for `lemma42`.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// `lemma62`: model of the components.
        #[arg(long, value_enum, default_value = "complex")]
        model: Model,
        /// `lemma62`: threshold slack.
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        /// `lemma62`: sweep n = 2^6 ..= the given n.
        #[arg(long)]
        sweep: bool,
        /// `logbounds`: covariance entries `a b d` of [[a, b], [b, d]].
        #[arg(long, allow_hyphen_values = true, default_value = "1 0 1")]
        cov: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Outcome of a successful run; `Fail` maps to exit code 1.
enum Status {
    Ok,
    Fail,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli.command) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Fail) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("BCV_THREADS") else { return Ok(()) };
    let threads: usize = v.trim().parse().with_context(|| format!("BCV_THREADS must be a positive integer, got `{v}`"))?;
    if threads == 0 {
        bail!("BCV_THREADS must be a positive integer, got `{v}`");
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global()?;
    Ok(())
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_circuit(path: &Path) -> Result<Circuit> {
    parse_circuit(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

fn summary(c: &Circuit) -> String {
    let audit = audit_coefficients(c, 2.0);
    format!(
        "kind {} inputs {} outputs {} size {} max_scalar {} help_count {}",
        c.kind(),
        c.n_inputs_x() + c.n_inputs_y(),
        c.outputs().len(),
        c.size(),
        audit.max_abs_scalar,
        audit.help_count
    )
}

fn run(command: Command) -> Result<Status> {
    match command {
        Command::Gen { kind, n, m, inverse, out } => {
            let circuit = match kind {
                GenKind::Dft => gen_dft(n, inverse),
                GenKind::ConvFft => gen_convolution_fft(n),
                GenKind::ConvNaive => gen_convolution_naive(n),
                GenKind::Polymul => gen_polymul(n),
                GenKind::Psinv => gen_power_series_inv(n),
                GenKind::Division => gen_division(n, m.ok_or_else(|| anyhow!("division needs --m"))?),
            }?;
            emit(out.as_deref(), &circuit.to_text())?;
            // keep stdout clean when it carries the circuit
            if out.is_some() {
                println!("{}", summary(&circuit));
            } else {
                eprintln!("{}", summary(&circuit));
            }
            Ok(Status::Ok)
        }
        Command::Eval { circuit, x, y, seed, out } => {
            let c = load_circuit(&circuit)?;
            let (xs, ys) = match (x, seed) {
                (Some(x), None) => {
                    let xs = parse_complex_tokens(&x).map_err(|e| anyhow!("--x: {e}"))?;
                    let ys = y.map(|y| parse_complex_tokens(&y).map_err(|e| anyhow!("--y: {e}"))).transpose()?;
                    (xs, ys)
                }
                (None, Some(seed)) => {
                    let xs = NormalSampler::new(seed, 0).complex_vector(c.n_inputs_x());
                    let ys = (c.kind() == CircuitKind::Bilinear).then(|| NormalSampler::new(seed, 1).complex_vector(c.n_inputs_y()));
                    (xs, ys)
                }
                _ => bail!("give exactly one of --x or --seed"),
            };
            let values = c.evaluate(&xs, ys.as_deref())?;
            let text: String = values.iter().map(|v| format!("({},{})\n", v.re, v.im)).collect();
            emit(out.as_deref(), &text)?;
            Ok(Status::Ok)
        }
        Command::Audit { circuit, bound } => {
            if !(bound > 0.0) {
                bail!("--bound must be positive");
            }
            let c = load_circuit(&circuit)?;
            let audit = audit_coefficients(&c, bound);
            let report = validate_structure(&c);
            println!("kind: {}", c.kind());
            println!("size: {}", c.size());
            println!("max_scalar: {}", audit.max_abs_scalar);
            println!("help_count: {}", audit.help_count);
            let gates: Vec<String> = audit.help_gates.iter().map(|k| format!("t{k}")).collect();
            println!("help_gates: {}", gates.join(" "));
            if let Some(d) = audit.help_span_dim {
                println!("help_span_dim: {d}");
            }
            for v in &report.violations {
                println!("violation: {v:?}");
            }
            println!("structure: {}", if report.is_valid() { "valid" } else { "invalid" });
            Ok(if report.is_valid() { Status::Ok } else { Status::Fail })
        }
        Command::Matrix { circuit, out } => {
            let a = extract_linear_matrix(&load_circuit(&circuit)?)?;
            emit(out.as_deref(), &a.to_text())?;
            Ok(Status::Ok)
        }
        Command::Bound { matrix, circulant, help_gates, format, out } => {
            let mut report = match (matrix, circulant) {
                (Some(path), None) => {
                    let a = ComplexMatrix::parse(&read(&path)?).with_context(|| format!("parsing {}", path.display()))?;
                    let mut r = best_bound(&a, help_gates);
                    r.id = path.display().to_string();
                    r
                }
                (None, Some(path)) => {
                    let text = read(&path)?;
                    let a: Vec<Complex64> = text
                        .lines()
                        .map(|l| parse_complex_tokens(l.split('#').next().unwrap_or("")))
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| anyhow!("parsing {}: {e}", path.display()))?
                        .concat();
                    if a.is_empty() {
                        bail!("{} holds no entries", path.display());
                    }
                    let spec = circulant_spectral_data(&a);
                    // r-volumes need the matrix itself; only small ones are formed
                    let small = (a.len() <= REPORT_RVOL_ROWS).then(|| ComplexMatrix::circulant(&a));
                    let mut r = best_bound_from_spectrum(&spec, help_gates, small.as_ref());
                    r.id = format!("Circ({})", path.display());
                    r
                }
                _ => bail!("give a matrix file or --circulant <vector file>"),
            };
            report.upper_bound = None;
            let text = match format {
                Format::Csv => report.to_csv(),
                Format::Md => report.to_markdown(),
            };
            emit(out.as_deref(), &text)?;
            Ok(Status::Ok)
        }
        Command::Report { max_n, seed, format, out } => {
            if max_n < 2 || !max_n.is_power_of_two() || max_n > 4096 {
                bail!("--max-n must be a power of two in 2..=4096");
            }
            let rows = report::rows(max_n, seed)?;
            let text = match format {
                Format::Csv => report::to_csv(&rows),
                Format::Md => report::to_markdown(&rows),
            };
            emit(out.as_deref(), &text)?;
            Ok(Status::Ok)
        }
        Command::Check { circuit, against, inverse, seed } => {
            let c = load_circuit(&circuit)?;
            match check(&c, against, inverse, seed) {
                Ok(msg) => {
                    println!("pass: {msg}");
                    Ok(Status::Ok)
                }
                Err(msg) => {
                    println!("fail: {msg}");
                    Ok(Status::Fail)
                }
            }
        }
        Command::Mc { lemma, n, r, s, trials, seed, model, eps, sweep, cov, out } => {
            let report = monte_carlo(lemma, n, r, s, trials, seed, model, eps, sweep, &cov)?;
            emit(out.as_deref(), &report.to_text())?;
            Ok(if report.passed() { Status::Ok } else { Status::Fail })
        }
    }
}

const CHECK_INPUTS: u64 = 100;
const CHECK_TOL: f64 = 1e-9;

fn rel_error(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

/// Structural validation, then comparison on seeded inputs. `Err` carries
/// the reason for failure.
fn check(c: &Circuit, against: Oracle, inverse: bool, seed: u64) -> Result<String, String> {
    let report = validate_structure(c);
    if !report.is_valid() {
        return Err(format!("invalid structure: {:?}", report.violations));
    }
    let (nx, ny, p) = (c.n_inputs_x(), c.n_inputs_y(), c.outputs().len());
    let want_kind = match against {
        Oracle::NaiveConv | Oracle::Polymul => Some(CircuitKind::Bilinear),
        Oracle::Dft => Some(CircuitKind::Linear),
        Oracle::Psinv | Oracle::Division => None,
    };
    if let Some(k) = want_kind {
        if c.kind() != k {
            return Err(format!("expected a {k} circuit, found {}", c.kind()));
        }
    }
    let shape_ok = match against {
        Oracle::NaiveConv => nx == ny && p == nx,
        Oracle::Polymul => nx == ny && nx >= 1 && p == 2 * nx - 1,
        Oracle::Dft | Oracle::Psinv => p == nx,
        // inputs f_0..f_n, g_0..g_{m-1}; outputs q_0..q_{n-m}, r_0..r_{m-1}
        Oracle::Division => p >= 1 && nx > p && nx - p < p,
    };
    if !shape_ok {
        return Err(format!("shape {nx}/{ny} inputs, {p} outputs does not fit the reference"));
    }
    let mut worst: f64 = 0.0;
    for t in 0..CHECK_INPUTS {
        let mut s = NormalSampler::new(seed, t);
        let (x, y, want) = match against {
            Oracle::NaiveConv | Oracle::Polymul => {
                let (x, y) = (s.complex_vector(nx), s.complex_vector(ny));
                let want = match against {
                    Oracle::NaiveConv => oracles::cyclic_convolution(&x, &y),
                    _ => oracles::poly_mul(&x, &y),
                };
                (x, Some(y), want)
            }
            Oracle::Dft => {
                let x = s.complex_vector(nx);
                let want = oracles::dft(&x, inverse);
                (x, None, want)
            }
            Oracle::Psinv => {
                // a_1..a_n with a small radius keeps the coefficients tame
                let a: Vec<Complex64> = s.complex_vector(nx).iter().map(|z| z * 0.25).collect();
                let want = oracles::power_series_inverse(&a);
                (a, None, want)
            }
            Oracle::Division => {
                let n = p - 1;
                let m = nx - n - 1;
                let f = s.complex_vector(n + 1);
                let g_low: Vec<Complex64> = s.complex_vector(m).iter().map(|z| z * 0.25).collect();
                let (q, r) = oracles::long_division(&f, &g_low);
                let mut x = f;
                x.extend(g_low);
                (x, None, [q, r].concat())
            }
        };
        let got = c.evaluate(&x, y.as_deref()).map_err(|e| e.to_string())?;
        let err = rel_error(&got, &want);
        worst = worst.max(err);
        if !(err <= CHECK_TOL) {
            return Err(format!("input {t}: relative error {err:.3e} exceeds {CHECK_TOL:e}"));
        }
    }
    Ok(format!("{CHECK_INPUTS} inputs, worst relative error {worst:.3e}"))
}

fn need(v: Option<usize>, flag: &str) -> Result<usize> {
    v.ok_or_else(|| anyhow!("this experiment needs --{flag}"))
}

#[allow(clippy::too_many_arguments)]
fn monte_carlo(
    lemma: Lemma,
    n: Option<usize>,
    r: Option<usize>,
    s: Option<usize>,
    trials: usize,
    seed: u64,
    model: Model,
    eps: f64,
    sweep: bool,
    cov: &str,
) -> Result<McReport> {
    // fixed data (subspaces, forms, row sets) come from a stream no trial uses
    let mut fixed = NormalSampler::new(seed, SHARED_STREAM - 1);
    let report = match lemma {
        Lemma::Lemma51 => {
            let (n, r) = (need(n, "n")?, need(r, "r")?);
            if r == 0 || r > n {
                bail!("need 1 <= r <= n");
            }
            let basis = random_subspace(n, r, &mut fixed);
            let mut rows = Vec::with_capacity(r);
            while rows.len() < r {
                let i = ((fixed.uniform() * n as f64) as usize).min(n - 1);
                if !rows.contains(&i) {
                    rows.push(i);
                }
            }
            rows.sort_unstable();
            mc_lemma51(&basis, &rows, trials, seed)?
        }
        Lemma::Lemma42 => {
            let n = need(n, "n")?;
            let k = s.unwrap_or(2 * n);
            let data = fixed.complex_vector(n * k);
            let forms = ComplexMatrix::from_fn(n, k, |i, j| data[i * k + j]);
            mc_lemma42(&forms, need(r, "r")?, trials, seed)?
        }
        Lemma::Lemma43 => mc_lemma43(need(n, "n")?, need(r, "r")?, trials, seed)?,
        Lemma::Lemma62 => {
            let n = need(n, "n")?;
            let model = match model {
                Model::Real => Lemma62Model::Real,
                Model::Complex => Lemma62Model::Complex,
            };
            if sweep {
                if !n.is_power_of_two() || n < 128 {
                    bail!("--sweep needs --n a power of two >= 128");
                }
                mc_lemma62_sweep(6, n.trailing_zeros(), model, eps, trials, seed)?
            } else {
                mc_lemma62(&vec![1.0; n], 1, model, eps, trials, seed)?
            }
        }
        Lemma::Logbounds => {
            let v: Vec<f64> = cov
                .split_whitespace()
                .map(|t| t.parse::<f64>().with_context(|| format!("--cov entry `{t}`")))
                .collect::<Result<_>>()?;
            let [a, b, d] = v[..] else { bail!("--cov takes three numbers `a b d`") };
            mc_log_bounds([[a, b], [b, d]], trials, seed)?
        }
    };
    Ok(report)
}
