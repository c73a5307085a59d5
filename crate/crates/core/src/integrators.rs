//! Numerical schemes for the two stochastic-calculus readings of the
//! kinetic-energy equation, plus the drift-conversion demonstrator.
//!
//! The energy `K_t = m V_t^2 / 2` of the damped particle satisfies, in the
//! Ito sense,
//!
//! ```text
//! dK = [ sigma^2/(2m) - 2 (gamma/m) K ] dt + sqrt(2 sigma^2 K / m) dW
//! ```
//!
//! and, in the Stratonovich sense,
//!
//! ```text
//! dK = -2 (gamma/m) K dt + sqrt(2 sigma^2 K / m) o dW
//! ```
//!
//! The Ito form has a unique (strong) solution and leaves `K = 0`
//! immediately; the Stratonovich form admits absorption at zero. The two
//! drifts differ by the conversion term `b b' / 2 = sigma^2/(2m)` —
//! constant for `K > 0` but undefined at `K = 0`, where `b(K) = sqrt(K)`
//! has unbounded derivative. [`drift_conversion`] returns exactly that
//! constant and errors at `K <= 0`, which is the whole story of why the
//! two calculi disagree at the origin.
//!
//! Both schemes use full truncation: iterates are clamped at zero and the
//! square root always receives `max(K, 0)`.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{EnergyPath, LangevinParams, NoisePath, TimeGrid};

/// Which integrator advances the energy path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Euler-Maruyama on the Ito energy equation.
    ItoEm,
    /// Heun predictor-corrector on the Stratonovich energy equation.
    StratHeun,
}

impl Scheme {
    /// Runs this scheme from `k0` along `noise`.
    pub fn path(
        &self,
        k0: f64,
        grid: &TimeGrid,
        noise: &NoisePath,
        params: &LangevinParams,
    ) -> Result<EnergyPath> {
        match self {
            Scheme::ItoEm => ito_em_path(k0, grid, noise, params),
            Scheme::StratHeun => strat_heun_path(k0, grid, noise, params),
        }
    }
}

/// How negative iterates are handled. Only clamping is provided: it is the
/// standard remedy for square-root diffusions, and it is what makes
/// absorption at zero representable at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NegativityPolicy {
    /// Replace any negative iterate by exactly 0.
    #[default]
    ClampToZero,
}

/// Scheme selection plus boundary-handling knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    /// The integrator.
    pub scheme: Scheme,
    /// Negative-iterate policy (always clamp-to-zero).
    pub negativity_policy: NegativityPolicy,
    /// Threshold used by consumers to classify a value as "absorbed at
    /// zero"; after clamping, exact zero is reachable, so the default is 0.
    pub zero_threshold: f64,
}

impl SchemeConfig {
    /// Config for `scheme` with clamping and a zero threshold of 0.
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            negativity_policy: NegativityPolicy::ClampToZero,
            zero_threshold: 0.0,
        }
    }

    /// Replaces the zero-detection threshold (must be `>= 0`).
    pub fn with_zero_threshold(mut self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps >= 0.0) {
            return Err(Error::domain(format!(
                "zero_threshold must be finite and >= 0, got {eps}"
            )));
        }
        self.zero_threshold = eps;
        Ok(self)
    }
}

/// Stratonovich drift `a(K) = -2 (gamma/m) K`.
pub fn strat_drift(params: &LangevinParams, k: f64) -> f64 {
    -2.0 * params.gamma() * k / params.m()
}

/// Rate at which the noise pumps energy in: `sigma^2 / (2m)`. This single
/// expression is shared by the Ito drift and the conversion term so that
/// the identity `ito_drift = strat_drift + drift_conversion` holds
/// bit-for-bit.
fn noise_energy_rate(params: &LangevinParams) -> f64 {
    params.sigma() * params.sigma() / (2.0 * params.m())
}

/// Ito drift `a(K) = sigma^2/(2m) - 2 (gamma/m) K`.
pub fn ito_drift(params: &LangevinParams, k: f64) -> f64 {
    strat_drift(params, k) + noise_energy_rate(params)
}

/// Diffusion coefficient `b(K) = sqrt(2 sigma^2 max(K,0) / m)`, shared by
/// both calculi.
pub fn energy_diffusion(params: &LangevinParams, k: f64) -> f64 {
    libm::sqrt(2.0 * params.sigma() * params.sigma() * libm::fmax(k, 0.0) / params.m())
}

/// The formal Stratonovich-to-Ito drift correction `b(k) b'(k) / 2` for the
/// energy diffusion: equal to the constant `sigma^2/(2m)` for every
/// `k > 0`.
///
/// At `k <= 0` the conversion is not defined — `b' ~ 1/sqrt(k)` blows up —
/// and a domain error is returned; the non-equivalence of the two calculi
/// at the origin is exactly the failure of this formula there.
pub fn drift_conversion(params: &LangevinParams, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::domain(format!(
            "drift conversion needs k > 0 (the diffusion derivative is unbounded at 0), got {k}"
        )));
    }
    Ok(noise_energy_rate(params))
}

fn check_k0(k0: f64) -> Result<()> {
    if !(k0.is_finite() && k0 >= 0.0) {
        return Err(Error::domain(format!(
            "initial energy must be finite and >= 0, got {k0}"
        )));
    }
    Ok(())
}

/// Euler-Maruyama path for the Ito energy equation with full truncation:
///
/// ```text
/// K_{i+1} = max(0, K_i + [sigma^2/(2m) - 2 (gamma/m) K_i] dt + sqrt(2 sigma^2 max(K_i,0)/m) dW_i)
/// ```
///
/// Zero is not special here: the drift at `K = 0` is `sigma^2/(2m) > 0`, so
/// the scheme (like the unique Ito solution) leaves the origin immediately.
pub fn ito_em_path(
    k0: f64,
    grid: &TimeGrid,
    noise: &NoisePath,
    params: &LangevinParams,
) -> Result<EnergyPath> {
    check_k0(k0)?;
    noise.matches(grid)?;
    let dt = grid.dt();
    let mut values = Vec::with_capacity(grid.n_points());
    let mut k = k0;
    values.push(k);
    for &dw in noise.increments() {
        k = libm::fmax(
            0.0,
            k + ito_drift(params, k) * dt + energy_diffusion(params, k) * dw,
        );
        values.push(k);
    }
    EnergyPath::new(*grid, values)
}

/// Heun (explicit trapezoidal) predictor-corrector for the Stratonovich
/// energy equation, with full truncation:
///
/// ```text
/// predictor  Kp      = K_i + a(K_i) dt + b(K_i) dW_i,   clamped to Kp+ = max(Kp, 0)
/// corrector  K_{i+1} = max(0, K_i + (a(K_i)+a(Kp+))/2 dt + (b(K_i)+b(Kp+))/2 dW_i)
/// ```
///
/// with `a(K) = -2 (gamma/m) K` and `b(K) = sqrt(2 sigma^2 K / m)`. Since
/// `a(0) = b(0) = 0`, a path started at exactly zero stays exactly zero for
/// any noise: the scheme realizes the absorbed Stratonovich solution.
pub fn strat_heun_path(
    k0: f64,
    grid: &TimeGrid,
    noise: &NoisePath,
    params: &LangevinParams,
) -> Result<EnergyPath> {
    check_k0(k0)?;
    noise.matches(grid)?;
    let dt = grid.dt();
    let mut values = Vec::with_capacity(grid.n_points());
    let mut k = k0;
    values.push(k);
    for &dw in noise.increments() {
        let a0 = strat_drift(params, k);
        let b0 = energy_diffusion(params, k);
        let predictor = libm::fmax(k + a0 * dt + b0 * dw, 0.0);
        let a1 = strat_drift(params, predictor);
        let b1 = energy_diffusion(params, predictor);
        k = libm::fmax(0.0, k + 0.5 * (a0 + a1) * dt + 0.5 * (b0 + b1) * dw);
        values.push(k);
    }
    EnergyPath::new(*grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::make_noise_path;

    fn quiet_params() -> LangevinParams {
        // Effectively noiseless dynamics for deterministic-order checks;
        // sigma must stay strictly positive.
        LangevinParams::new(1.0, 1.0, 1e-300).unwrap()
    }

    #[test]
    fn initial_energy_is_validated() {
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        let grid = TimeGrid::new(0.1, 4).unwrap();
        let noise = make_noise_path(0, 0, &grid);
        assert!(ito_em_path(-0.1, &grid, &noise, &p).is_err());
        assert!(strat_heun_path(f64::NAN, &grid, &noise, &p).is_err());
    }

    #[test]
    fn euler_is_first_order_on_the_noise_free_decay() {
        let p = quiet_params();
        let dt = 1e-3;
        let grid = TimeGrid::new(dt, 1000).unwrap();
        let noise = make_noise_path(1, 0, &grid);
        let path = ito_em_path(1.0, &grid, &noise, &p).unwrap();
        for (i, &k) in path.values().iter().enumerate() {
            let exactv = libm::exp(-2.0 * grid.time(i));
            assert!((k - exactv).abs() <= 5.0 * dt, "i = {i}: {k} vs {exactv}");
        }
    }

    #[test]
    fn heun_is_second_order_on_the_noise_free_decay() {
        let p = quiet_params();
        let dt = 1e-2;
        let grid = TimeGrid::new(dt, 100).unwrap();
        let noise = make_noise_path(1, 0, &grid);
        let path = strat_heun_path(1.0, &grid, &noise, &p).unwrap();
        for (i, &k) in path.values().iter().enumerate() {
            let exactv = libm::exp(-2.0 * grid.time(i));
            assert!(
                (k - exactv).abs() <= 2.0 * dt * dt,
                "i = {i}: {k} vs {exactv}"
            );
        }
    }

    #[test]
    fn heun_absorbs_at_exact_zero() {
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        let grid = TimeGrid::new(1e-3, 500).unwrap();
        for path_id in 0..10 {
            let noise = make_noise_path(42, path_id, &grid);
            let path = strat_heun_path(0.0, &grid, &noise, &p).unwrap();
            assert!(path.values().iter().all(|&k| k == 0.0));
        }
    }

    #[test]
    fn ito_leaves_zero_immediately() {
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        let grid = TimeGrid::new(1e-3, 10).unwrap();
        let noise = make_noise_path(42, 0, &grid);
        let path = ito_em_path(0.0, &grid, &noise, &p).unwrap();
        // First step is deterministic: b(0) = 0, so K_1 = sigma^2/(2m) dt.
        assert_eq!(path.values()[1], 2.0 * 1e-3);
        assert!(path.values()[1] > 0.0);
    }

    #[test]
    fn drift_identity_is_exact() {
        let p = LangevinParams::new(1.3, 0.7, 2.1).unwrap();
        for k in [1e-12, 1e-3, 0.5, 1.0, 42.0] {
            let lhs = strat_drift(&p, k) + drift_conversion(&p, k).unwrap();
            assert_eq!(lhs, ito_drift(&p, k));
        }
    }

    #[test]
    fn drift_conversion_values_and_domain() {
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(drift_conversion(&p, 0.7).unwrap(), 2.0);
        assert_eq!(drift_conversion(&p, 1e-9).unwrap(), 2.0);
        assert!(drift_conversion(&p, 0.0).is_err());
        assert!(drift_conversion(&p, -1.0).is_err());
    }

    #[test]
    fn paths_stay_nonnegative_under_rough_noise() {
        // Large dt and sigma force many clamps; outputs must stay >= 0
        // (EnergyPath::new would reject anything else).
        let p = LangevinParams::new(0.5, 3.0, 4.0).unwrap();
        let grid = TimeGrid::new(0.25, 200).unwrap();
        for path_id in 0..20 {
            let noise = make_noise_path(7, path_id, &grid);
            let a = ito_em_path(0.3, &grid, &noise, &p).unwrap();
            let b = strat_heun_path(0.3, &grid, &noise, &p).unwrap();
            assert!(a.values().iter().all(|&k| k >= 0.0));
            assert!(b.values().iter().all(|&k| k >= 0.0));
        }
    }

    #[test]
    fn scheme_dispatch_matches_direct_calls() {
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        let grid = TimeGrid::new(1e-2, 100).unwrap();
        let noise = make_noise_path(9, 4, &grid);
        assert_eq!(
            Scheme::ItoEm.path(0.5, &grid, &noise, &p).unwrap(),
            ito_em_path(0.5, &grid, &noise, &p).unwrap()
        );
        assert_eq!(
            Scheme::StratHeun.path(0.5, &grid, &noise, &p).unwrap(),
            strat_heun_path(0.5, &grid, &noise, &p).unwrap()
        );
    }

    #[test]
    fn scheme_config_validation() {
        let c = SchemeConfig::new(Scheme::ItoEm);
        assert_eq!(c.zero_threshold, 0.0);
        assert_eq!(c.negativity_policy, NegativityPolicy::ClampToZero);
        assert!(c.with_zero_threshold(-1.0).is_err());
        assert_eq!(
            SchemeConfig::new(Scheme::StratHeun)
                .with_zero_threshold(1e-6)
                .unwrap()
                .zero_threshold,
            1e-6
        );
    }
}
