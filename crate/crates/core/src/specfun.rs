//! Special functions for the first-passage formulas: the Dawson integrals
//! `D+` and `D-`, the antiderivative of `D-`, the standard normal CDF, the
//! generalized hypergeometric series 2F2(1,1;3/2,2;x), and an adaptive
//! Simpson quadrature used by the test suite as an independent oracle.
//!
//! Definitions:
//!
//! ```text
//! D+(x) = exp(-x^2) * integral_0^x exp(+u^2) du      (bounded, odd)
//! D-(x) = exp(+x^2) * integral_0^x exp(-u^2) du      (odd, grows like exp(x^2))
//! I-(x) = integral_0^x D-(w) dw
//! ```
//!
//! Both Dawson integrals satisfy first-order linear ODEs,
//! `D+' = 1 - 2x D+` and `D-' = 1 + 2x D-`, which the tests verify by
//! finite differences; `I-` is cross-checked against the identity
//! `I-(x) = (x^2/2) * 2F2(1,1;3/2,2;x^2)` through an independent series.

use alloc::format;

use crate::error::{Error, Result};

/// sqrt(pi), to double precision.
pub(crate) const SQRT_PI: f64 = 1.772_453_850_905_516_f64;

/// Largest `|x|` for which `exp(x^2)` stays comfortably inside double
/// range (`exp(26^2) ~ 3.4e293`); beyond it `D-` and `I-` report a range
/// error instead of overflowing.
pub const EXP_SQUARE_GUARD: f64 = 26.0;

/// Tight upper bound for `|D+|`: the maximum ~0.5410442246 (attained near
/// `x ~ 0.9241388730`), rounded up in the tenth decimal.
pub const DAWSON_PLUS_BOUND: f64 = 0.541_044_224_7_f64;

fn require_finite(name: &str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {x}")))
    }
}

/// Dawson integral `D+(x) = exp(-x^2) * integral_0^x exp(u^2) du`.
///
/// Odd, bounded by [`DAWSON_PLUS_BOUND`], defined for all finite `x`.
/// Evaluation: Maclaurin series for `|x| <= 0.5`, Taylor marching along the
/// ODE `D+' = 1 - 2x D+` up to `|x| = 10`, and the asymptotic series
/// `sum_n (2n-1)!! / (2^(n+1) x^(2n+1))` beyond.
pub fn dawson_plus(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    let a = libm::fabs(x);
    let value = if a <= 0.5 {
        dawson_plus_maclaurin(a)
    } else if a <= 10.0 {
        dawson_plus_ode_march(a)
    } else {
        dawson_plus_asymptotic(a)
    };
    Ok(libm::copysign(value, x))
}

/// Maclaurin series `D+(x) = sum_n (-2)^n x^(2n+1) / (2n+1)!!`,
/// accurate to machine precision for `|x| <= 0.5`.
fn dawson_plus_maclaurin(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0u32;
    loop {
        term *= -2.0 * x2 / (2.0 * n as f64 + 3.0);
        sum += term;
        n += 1;
        if libm::fabs(term) <= f64::EPSILON * libm::fabs(sum) || n > 40 {
            return sum;
        }
    }
}

/// Marches `D+` from `x0 = 0.5` to `x` by Taylor steps along the ODE
/// `F' = 1 - 2xF`. Around a point `x0` the coefficients of
/// `F(x0 + h) = sum_n c_n h^n` obey
///
/// ```text
/// c1      = 1 - 2 x0 c0
/// c_{n+1} = -2 (x0 c_n + c_{n-1}) / (n + 1)     for n >= 1
/// ```
///
/// The step is capped at `min(0.5, 2.5/x0)` to keep the alternating Taylor
/// terms small relative to the result (no destructive cancellation).
fn dawson_plus_ode_march(x: f64) -> f64 {
    let mut x0 = 0.5;
    let mut f = dawson_plus_maclaurin(x0);
    while x0 < x {
        let h = libm::fmin(libm::fmin(0.5, 2.5 / x0), x - x0);
        let mut c_prev = f; // c_{n-1}
        let mut c_cur = 1.0 - 2.0 * x0 * f; // c_n, starting at n = 1
        let mut h_pow = h;
        let mut sum = f + c_cur * h_pow;
        let mut n = 1u32;
        loop {
            let c_next = -2.0 * (x0 * c_cur + c_prev) / (n as f64 + 1.0);
            c_prev = c_cur;
            c_cur = c_next;
            h_pow *= h;
            let term = c_cur * h_pow;
            sum += term;
            n += 1;
            if libm::fabs(term) <= f64::EPSILON * libm::fabs(sum) || n > 60 {
                break;
            }
        }
        f = sum;
        x0 += h;
    }
    f
}

/// Asymptotic series `D+(x) ~ sum_n (2n-1)!! / (2^(n+1) x^(2n+1))` for
/// large `x`; at `|x| > 10` it reaches machine precision in ~12 terms.
fn dawson_plus_asymptotic(x: f64) -> f64 {
    let inv_2x2 = 1.0 / (2.0 * x * x);
    let mut term = 1.0 / (2.0 * x);
    let mut sum = term;
    let mut n = 0u32;
    loop {
        let next = term * (2.0 * n as f64 + 1.0) * inv_2x2;
        if next >= libm::fabs(term) || next <= f64::EPSILON * sum {
            // Stop at the smallest term (asymptotic truncation) or at
            // machine precision, whichever comes first.
            if next < libm::fabs(term) {
                sum += next;
            }
            return sum;
        }
        term = next;
        sum += term;
        n += 1;
    }
}

/// Dawson integral `D-(x) = exp(x^2) * integral_0^x exp(-u^2) du`.
///
/// Odd and strictly increasing; grows like `exp(x^2)`, so `|x|` is capped
/// at [`EXP_SQUARE_GUARD`] (range error beyond). Computed as
/// `exp(x^2) * (sqrt(pi)/2) * erf(x)`.
pub fn dawson_minus(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    if libm::fabs(x) > EXP_SQUARE_GUARD {
        return Err(Error::range(format!(
            "|x| = {} exceeds the exp(x^2) overflow guard {EXP_SQUARE_GUARD}",
            libm::fabs(x)
        )));
    }
    Ok(libm::exp(x * x) * (0.5 * SQRT_PI) * libm::erf(x))
}

/// Antiderivative `I-(x) = integral_0^x D-(w) dw` for `0 <= x <= 26`.
///
/// Computed by the term-wise integrated series of `D-`,
///
/// ```text
/// I-(x) = sum_{n>=0} 2^n x^(2n+2) / [ (2n+2) * (2n+1)!! ]
/// ```
///
/// whose terms are all positive (no cancellation). Negative `x` is a domain
/// error: only nonnegative arguments arise in the first-passage formulas.
pub fn integral_dawson_minus(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    if x < 0.0 {
        return Err(Error::domain(format!(
            "integral_dawson_minus is defined for x >= 0, got {x}"
        )));
    }
    if x > EXP_SQUARE_GUARD {
        return Err(Error::range(format!(
            "x = {x} exceeds the exp(x^2) overflow guard {EXP_SQUARE_GUARD}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let x2 = x * x;
    let mut term = x2 / 2.0; // n = 0
    let mut sum = term;
    let mut n = 0u32;
    loop {
        // t_{n+1} / t_n = 2 x^2 (2n+2) / [ (2n+4)(2n+3) ]
        let k = 2.0 * n as f64;
        term *= 2.0 * x2 * (k + 2.0) / ((k + 4.0) * (k + 3.0));
        sum += term;
        n += 1;
        if term <= f64::EPSILON * sum {
            return Ok(sum);
        }
        if n > 20_000 {
            return Err(Error::convergence(format!(
                "series for integral_dawson_minus({x}) did not converge"
            )));
        }
    }
}

/// Standard normal cumulative distribution function
/// `Phi(x) = P(N(0,1) <= x)`, computed as `erfc(-x / sqrt(2)) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / core::f64::consts::SQRT_2)
}

/// Generalized hypergeometric series `2F2(1,1; 3/2,2; x)` for
/// `0 <= x <= 500`.
///
/// ```text
/// 2F2(x) = sum_{n>=0} (1)_n (1)_n / [ (3/2)_n (2)_n n! ] * x^n
/// ```
///
/// summed by the running-term recurrence
/// `t_{n+1} = t_n * x (n+1) / [ (n+3/2)(n+2) ]`. All terms are positive;
/// the ratio drops below 1 once `n` exceeds about `x`, after which the tail
/// decays factorially.
pub fn hyp2f2(x: f64) -> Result<f64> {
    require_finite("x", x)?;
    if !(0.0..=500.0).contains(&x) {
        return Err(Error::range(format!(
            "hyp2f2 series is supported on 0 <= x <= 500, got {x}"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut n = 0u32;
    loop {
        let nf = n as f64;
        term *= x * (nf + 1.0) / ((nf + 1.5) * (nf + 2.0));
        sum += term;
        n += 1;
        if term <= f64::EPSILON * sum {
            return Ok(sum);
        }
        if n > 20_000 {
            return Err(Error::convergence(format!(
                "hyp2f2 series at x = {x} did not converge"
            )));
        }
    }
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Absolute tolerance on the integral (> 0).
    pub abs_tol: f64,
    /// Relative tolerance on the integral (> 0).
    pub rel_tol: f64,
    /// Maximum number of interval subdivisions before giving up.
    pub max_subdivisions: usize,
}

impl QuadratureConfig {
    /// Validated constructor.
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol.is_finite() && abs_tol > 0.0) {
            return Err(Error::domain(format!(
                "abs_tol must be a finite positive real, got {abs_tol}"
            )));
        }
        if !(rel_tol.is_finite() && rel_tol > 0.0) {
            return Err(Error::domain(format!(
                "rel_tol must be a finite positive real, got {rel_tol}"
            )));
        }
        Ok(Self {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
        }
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Halves intervals until the classic Richardson estimate
/// `|S(left) + S(right) - S(whole)| <= 15 * tol` holds on every piece, then
/// returns the extrapolated sum. Used throughout the test suite as the
/// independent oracle for the closed-form special functions; none of the
/// shipped evaluators call it.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    config: &QuadratureConfig,
) -> Result<f64> {
    require_finite("a", a)?;
    require_finite("b", b)?;
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return integrate(f, b, a, config).map(|v| -v);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let tol = libm::fmax(config.abs_tol, config.rel_tol * libm::fabs(whole));
    let mut budget = config.max_subdivisions;
    let value = adaptive(&f, a, b, fa, fm, fb, whole, tol, &mut budget)?;
    Ok(value)
}

/// Closed Simpson rule on `[a, b]` with precomputed endpoint/midpoint
/// values.
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    budget: &mut usize,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if libm::fabs(delta) <= 15.0 * tol || (b - a) < 1e-14 * libm::fabs(b) {
        return Ok(left + right + delta / 15.0);
    }
    if *budget == 0 {
        return Err(Error::convergence(
            "adaptive Simpson exhausted its subdivision budget",
        ));
    }
    *budget -= 1;
    let half_tol = 0.5 * tol;
    let vl = adaptive(f, a, m, fa, flm, fm, left, half_tol, budget)?;
    let vr = adaptive(f, m, b, fm, frm, fb, right, half_tol, budget)?;
    Ok(vl + vr)
}
