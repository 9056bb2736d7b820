//! The constants `γ`, `θ`, `δ`, `c` by quadrature, with closed forms.

use std::f64::consts::{LN_2, PI};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Upper end of the `t` range; the integrands are below `1e-11` past it.
pub const QUADRATURE_T: f64 = 60.0;

const QUADRATURE_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constants {
    /// `1 - E[log2 X²]` for standard normal `X`.
    pub gamma: f64,
    /// `E[log2²(X² + Y²)]` for independent standard normal `X, Y`.
    pub theta: f64,
    /// `2^{-(γ + √(2θ))}`
    pub delta: f64,
    /// `(2 + γ + √(2θ)) / 2`
    pub c: f64,
}

impl Constants {
    fn derive(gamma: f64, theta: f64) -> Constants {
        let spread = gamma + (2.0 * theta).sqrt();
        Constants { gamma, theta, delta: (-spread).exp2(), c: (2.0 + spread) / 2.0 }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let m = (a + b) / 2.0;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = (a + b) / 2.0;
    let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

fn x_log2_x(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `γ = -(1/√π) ∫_0^T t^{-1/2} e^{-t} log2 t dt` with `t = w⁴`, which turns
/// the integrand into `16 w e^{-w⁴} log2 w`, continuous at 0.
pub fn gamma_by_quadrature() -> f64 {
    let f = |w: f64| 16.0 * x_log2_x(w) * (-w.powi(4)).exp();
    -adaptive_simpson(&f, 0.0, QUADRATURE_T.powf(0.25), QUADRATURE_TOL) / PI.sqrt()
}

/// `θ = (1/2) ∫_0^T e^{-t/2} log2² t dt` with `t = u²`, giving
/// `4 u e^{-u²/2} log2² u`.
pub fn theta_by_quadrature() -> f64 {
    let f = |u: f64| {
        if u == 0.0 {
            0.0
        } else {
            let l = u.log2();
            4.0 * u * l * l * (-u * u / 2.0).exp()
        }
    };
    adaptive_simpson(&f, 0.0, QUADRATURE_T.sqrt(), QUADRATURE_TOL)
}

/// All four constants from quadrature.
pub fn constants() -> Constants {
    Constants::derive(gamma_by_quadrature(), theta_by_quadrature())
}

/// All four constants from `E[ln X²] = -(γ_E + ln 2)` and
/// `E[ln² S] = π²/6 + (ln 2 - γ_E)²` for `S ~ Exp(1/2)`.
pub fn closed_form_constants() -> Constants {
    let gamma = (EULER_GAMMA + LN_2) / LN_2 + 1.0;
    let theta = (PI * PI / 6.0 + (LN_2 - EULER_GAMMA).powi(2)) / (LN_2 * LN_2);
    Constants::derive(gamma, theta)
}
