//! Mean first-passage time of the velocity to the origin.
//!
//! For the Ornstein-Uhlenbeck velocity started at `v`, the expected time to
//! first reach `v = 0` is, in closed form,
//!
//! ```text
//!     T(v) = (m sqrt(pi) / γ) e^{x²} D+(x) - (2m / γ) I-(x),
//!     x    = sqrt(m γ) |v| / σ,
//! ```
//!
//! with the Dawson integral `D+` and the antiderivative `I-` of the
//! complementary integral `D-` (see [`crate::specfun`]). `T` solves the
//! backward boundary-value problem
//!
//! ```text
//!     (σ² / 2m) T''(v) - γ v T'(v) = -m,      T(0) = 0,
//! ```
//!
//! which [`mfpt_ode_residual`] checks numerically. The same quantity drives
//! the zero-energy hitting analysis: `K = m v² / 2` reaches zero exactly when
//! `v` does, so [`mfpt_energy`] is the identical formula through
//! `x = sqrt(2 γ K) / σ`.
//!
//! Because `T` is finite for every starting point, zero-energy hits happen in
//! finite mean time — this is what makes the spurious Stratonovich
//! constructions (see [`crate::spurious`]) kick in almost surely rather than
//! on a null set.
//!
//! [`mfpt_finite_boundary`] gives the reflecting/absorbing variant on a
//! finite interval between the origin and a boundary `M`; it converges to the
//! unbounded formula as `|M|` grows (bit for bit well before `x_M = 6`,
//! where `erf(x_M)` rounds to 1).

use crate::error::{Error, Result};
use crate::model::LangevinParams;
use crate::specfun::{dawson_plus, integral_dawson_minus, EXP_SQUARE_GUARD, SQRT_PI};

/// A mean first-passage time together with the inputs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfptResult {
    /// Starting velocity (always the nonnegative representative; the
    /// passage time is even in the starting velocity).
    pub start_velocity: f64,
    /// Starting kinetic energy `m v² / 2`.
    pub start_energy: f64,
    /// The mean first-passage time to zero.
    pub value: f64,
}

impl MfptResult {
    /// Evaluates the passage time starting from velocity `v`.
    pub fn from_velocity(v: f64, params: &LangevinParams) -> Result<Self> {
        let value = mfpt_velocity(v, params)?;
        Ok(Self {
            start_velocity: libm::fabs(v),
            start_energy: 0.5 * params.m() * v * v,
            value,
        })
    }

    /// Evaluates the passage time starting from kinetic energy `k`.
    pub fn from_energy(k: f64, params: &LangevinParams) -> Result<Self> {
        let value = mfpt_energy(k, params)?;
        Ok(Self {
            start_velocity: libm::sqrt(2.0 * k / params.m()),
            start_energy: k,
            value,
        })
    }
}

/// Shared evaluator: `(2m/γ) [ (sqrt(pi)/2) erf_factor e^{x²} D+(x) - I-(x) ]`.
///
/// `erf_factor = 1` gives the unbounded-domain formula, `erf(x_M)` the finite
/// boundary at `M`. The guard on `x` keeps `e^{x²}` inside f64 range; the
/// subtraction loses roughly `x²/ln(10)` digits to cancellation as `x` grows
/// (about 1.5 digits at `x = 2`), which is inherent to this representation.
fn mfpt_core(x: f64, erf_factor: f64, params: &LangevinParams) -> Result<f64> {
    if x > EXP_SQUARE_GUARD {
        return Err(Error::range(alloc::format!(
            "scaled start x = {x} exceeds the exp(x^2) overflow guard {EXP_SQUARE_GUARD}; \
             the passage-time formula is not evaluable this far out"
        )));
    }
    let grow = libm::exp(x * x) * dawson_plus(x)?;
    let t = 2.0 * params.m() / params.gamma()
        * (0.5 * SQRT_PI * erf_factor * grow - integral_dawson_minus(x)?);
    Ok(t)
}

fn scaled_velocity(v: f64, params: &LangevinParams) -> f64 {
    libm::sqrt(params.m() * params.gamma()) * libm::fabs(v) / params.sigma()
}

/// Mean time for the velocity, started at `v`, to first reach zero.
///
/// Even in `v`, zero exactly at `v = 0`, strictly increasing in `|v|`.
/// Fails with a range error once `sqrt(mγ)|v|/σ` exceeds
/// [`EXP_SQUARE_GUARD`].
pub fn mfpt_velocity(v: f64, params: &LangevinParams) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::domain(alloc::format!(
            "starting velocity must be finite, got {v}"
        )));
    }
    mfpt_core(scaled_velocity(v, params), 1.0, params)
}

/// Mean time for the kinetic energy, started at `k >= 0`, to first reach zero.
///
/// The energy hits zero exactly when the velocity does, so this is
/// [`mfpt_velocity`] evaluated at `|v| = sqrt(2k/m)`, i.e. the same formula
/// with `x = sqrt(2 γ k) / σ`.
pub fn mfpt_energy(k: f64, params: &LangevinParams) -> Result<f64> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::domain(alloc::format!(
            "starting energy must be finite and >= 0, got {k}"
        )));
    }
    let x = libm::sqrt(2.0 * params.gamma() * k) / params.sigma();
    mfpt_core(x, 1.0, params)
}

/// Mean first-passage time to zero when the velocity is confined to the
/// interval between `0` and a reflecting boundary `M != 0`.
///
/// ```text
///     T_M(v) = (2m/γ) [ (sqrt(pi)/2) erf(x_M) e^{x_v²} D+(x_v) - I-(x_v) ]
/// ```
///
/// `v` must lie between the origin and the boundary (`0 <= v <= M` for
/// `M > 0`, `M <= v <= 0` otherwise). As `|M| -> inf` the `erf` factor tends
/// to one and `T_M` converges (monotonically from below) to
/// [`mfpt_velocity`]; the reflecting condition also forces `dT_M/dv = 0` at
/// `v = M`.
pub fn mfpt_finite_boundary(v: f64, boundary: f64, params: &LangevinParams) -> Result<f64> {
    if !v.is_finite() || !boundary.is_finite() {
        return Err(Error::domain(alloc::format!(
            "starting velocity and boundary must be finite, got v = {v}, M = {boundary}"
        )));
    }
    if boundary == 0.0 {
        return Err(Error::domain(
            "the reflecting boundary must be nonzero (the absorbing point already sits at 0)",
        ));
    }
    let inside = if boundary > 0.0 {
        (0.0..=boundary).contains(&v)
    } else {
        (boundary..=0.0).contains(&v)
    };
    if !inside {
        return Err(Error::domain(alloc::format!(
            "start v = {v} lies outside the interval between 0 and the boundary M = {boundary}"
        )));
    }
    // Only e^{x_v²} can overflow (mfpt_core guards it); erf(x_M) saturates
    // harmlessly at 1 for any finite boundary.
    let x_m = scaled_velocity(boundary, params);
    mfpt_core(scaled_velocity(v, params), libm::erf(x_m), params)
}

/// Residual of the closed-form passage time in the backward equation,
/// `(σ²/2m) T''(v) - γ v T'(v) + m`, with derivatives replaced by central
/// differences of step `h`.
///
/// For the true solution the result is `O(h²)` (plus a rounding floor
/// `~ ulp/h²`); a wrong passage-time formula leaves an `O(1)` residual.
pub fn mfpt_ode_residual(v: f64, params: &LangevinParams, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::domain(alloc::format!(
            "difference step must be finite and > 0, got {h}"
        )));
    }
    let t_minus = mfpt_velocity(v - h, params)?;
    let t_mid = mfpt_velocity(v, params)?;
    let t_plus = mfpt_velocity(v + h, params)?;
    let second = (t_plus - 2.0 * t_mid + t_minus) / (h * h);
    let first = (t_plus - t_minus) / (2.0 * h);
    let sigma = params.sigma();
    Ok(sigma * sigma / (2.0 * params.m()) * second - params.gamma() * v * first + params.m())
}
