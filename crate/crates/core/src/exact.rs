//! Distributionally exact sampling of the damped velocity process and the
//! closed-form kinetic-energy statistics.
//!
//! The velocity SDE `m dV = -gamma V dt + sigma dW` has the explicit
//! solution
//!
//! ```text
//! V_t = e^(-(gamma/m) t) V_0 + (sigma/m) integral_0^t e^((gamma/m)(s-t)) dW_s
//! ```
//!
//! so the transition over a step `dt` is Gaussian:
//!
//! ```text
//! V_{t+dt} | V_t  ~  Normal( e^(-(gamma/m) dt) V_t ,  sigma^2/(2 m gamma) (1 - e^(-2 (gamma/m) dt)) )
//! ```
//!
//! [`exact_velocity_path`] drives this recursion with the standardized
//! Brownian increments `dW_i / sqrt(dt)`. Those are i.i.d. standard normal,
//! so the sampled path has the exact joint law on the grid, and at the same
//! time the path is coupled to the increments that feed the SDE
//! integrators (the weighting is first-order accurate in `dt`), which is
//! what strong-error comparisons require.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::model::{EnergyPath, LangevinParams, NoisePath, TimeGrid, VelocityPath};

/// Initial velocity specification: a point mass or a Gaussian law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// `V_0 = v0` with probability one.
    Deterministic {
        /// The initial velocity.
        v0: f64,
    },
    /// `V_0 ~ Normal(v0_mean, v0_std^2)`.
    Gaussian {
        /// Mean of the initial velocity.
        v0_mean: f64,
        /// Standard deviation of the initial velocity (>= 0).
        v0_std: f64,
    },
}

impl InitialCondition {
    /// Point-mass initial condition.
    pub fn deterministic(v0: f64) -> Result<Self> {
        if !v0.is_finite() {
            return Err(Error::domain(format!("v0 must be finite, got {v0}")));
        }
        Ok(InitialCondition::Deterministic { v0 })
    }

    /// Gaussian initial condition with the given mean and standard
    /// deviation.
    pub fn gaussian(v0_mean: f64, v0_std: f64) -> Result<Self> {
        if !v0_mean.is_finite() {
            return Err(Error::domain(format!(
                "v0_mean must be finite, got {v0_mean}"
            )));
        }
        if !(v0_std.is_finite() && v0_std >= 0.0) {
            return Err(Error::domain(format!(
                "v0_std must be finite and >= 0, got {v0_std}"
            )));
        }
        Ok(InitialCondition::Gaussian { v0_mean, v0_std })
    }

    /// The stationary initial law `Normal(0, sigma^2 / (2 m gamma))`.
    pub fn stationary(params: &LangevinParams) -> Self {
        InitialCondition::Gaussian {
            v0_mean: 0.0,
            v0_std: libm::sqrt(params.stationary_velocity_variance()),
        }
    }

    /// Second moment `E[V_0^2]`, computed analytically.
    pub fn mean_square(&self) -> f64 {
        match *self {
            InitialCondition::Deterministic { v0 } => v0 * v0,
            InitialCondition::Gaussian { v0_mean, v0_std } => {
                v0_mean * v0_mean + v0_std * v0_std
            }
        }
    }

    /// Draws a concrete initial velocity. Deterministic conditions return
    /// `v0` without consuming randomness; Gaussian ones consume exactly one
    /// standard normal draw.
    pub fn resolve<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            InitialCondition::Deterministic { v0 } => v0,
            InitialCondition::Gaussian { v0_mean, v0_std } => {
                v0_mean + v0_std * rng.sample::<f64, _>(StandardNormal)
            }
        }
    }

    pub(crate) fn as_deterministic(&self) -> Result<f64> {
        match *self {
            InitialCondition::Deterministic { v0 } => Ok(v0),
            InitialCondition::Gaussian { .. } => Err(Error::domain(
                "a single path needs a concrete initial velocity; draw one with \
                 InitialCondition::resolve and pass it as a deterministic condition",
            )),
        }
    }
}

/// Precomputed one-step exact transition of the velocity process on a fixed
/// step `dt`.
///
/// `step` maps `(v, z)` with `z ~ Normal(0,1)` to
/// `decay * v + noise_std * z`, the exactly distributed next velocity.
#[derive(Debug, Clone, Copy)]
pub struct OuTransition {
    decay: f64,
    noise_std: f64,
}

impl OuTransition {
    /// Builds the transition for one step of size `dt >= 0`.
    pub fn new(params: &LangevinParams, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt >= 0.0) {
            return Err(Error::domain(format!(
                "dt must be finite and >= 0, got {dt}"
            )));
        }
        let decay = libm::exp(-(params.gamma() / params.m()) * dt);
        let noise_std = libm::sqrt(
            params.stationary_velocity_variance() * (1.0 - decay * decay),
        );
        Ok(Self { decay, noise_std })
    }

    /// Mean-reversion factor `e^(-(gamma/m) dt)`.
    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Standard deviation of the one-step innovation.
    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    /// One exact step from velocity `v` with standard normal draw `z`.
    pub fn step(&self, v: f64, z: f64) -> f64 {
        self.decay * v + self.noise_std * z
    }
}

/// One exact transition step of the velocity process: returns
/// `e^(-(gamma/m) dt) v + sqrt(sigma^2/(2 m gamma) (1 - e^(-2 (gamma/m) dt))) z`.
///
/// `z` is a standard normal draw; `dt` must be `>= 0` (at `dt = 0` the
/// velocity is returned unchanged).
pub fn ou_exact_step(v: f64, dt: f64, params: &LangevinParams, z: f64) -> Result<f64> {
    Ok(OuTransition::new(params, dt)?.step(v, z))
}

/// Builds the exactly distributed velocity path driven by `noise`.
///
/// Each step applies the exact Gaussian transition with the standardized
/// increment `z_i = dW_i / sqrt(dt)`; the joint law on grid points is exact,
/// and the path is first-order coupled to the same increments the SDE
/// integrators consume. The initial condition must be deterministic (draw
/// Gaussian conditions with [`InitialCondition::resolve`] first).
pub fn exact_velocity_path(
    ic: &InitialCondition,
    grid: &TimeGrid,
    noise: &NoisePath,
    params: &LangevinParams,
) -> Result<VelocityPath> {
    noise.matches(grid)?;
    let v0 = ic.as_deterministic()?;
    let transition = OuTransition::new(params, grid.dt())?;
    let inv_sqrt_dt = 1.0 / libm::sqrt(grid.dt());
    let mut values = Vec::with_capacity(grid.n_points());
    let mut v = v0;
    values.push(v);
    for &dw in noise.increments() {
        v = transition.step(v, dw * inv_sqrt_dt);
        values.push(v);
    }
    VelocityPath::new(*grid, values)
}

/// Builds the kinetic-energy path `K_i = m V_i^2 / 2` of the exact velocity
/// path for the same inputs.
pub fn exact_energy_path(
    ic: &InitialCondition,
    grid: &TimeGrid,
    noise: &NoisePath,
    params: &LangevinParams,
) -> Result<EnergyPath> {
    let velocity = exact_velocity_path(ic, grid, noise, params)?;
    energy_of_velocity(&velocity, params)
}

/// Squares a velocity path into its kinetic-energy path `K = m V^2 / 2`.
pub fn energy_of_velocity(velocity: &VelocityPath, params: &LangevinParams) -> Result<EnergyPath> {
    let half_m = 0.5 * params.m();
    let values = velocity.values().iter().map(|&v| half_m * v * v).collect();
    EnergyPath::new(*velocity.grid(), values)
}

/// Closed-form mean kinetic energy at time `t` for initial second moment
/// `E[V_0^2] = ev0_sq`:
///
/// ```text
/// E K_t = (m/2) e^(-2 (gamma/m) t) E[V_0^2] + sigma^2/(4 gamma) (1 - e^(-2 (gamma/m) t))
/// ```
///
/// Tends to `sigma^2 / (4 gamma)` as `t -> infinity`, and for any fixed
/// `t > 0` in the vanishing-mass limit `m -> 0`.
pub fn mean_energy_closed_form(t: f64, params: &LangevinParams, ev0_sq: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::domain(format!("t must be finite and >= 0, got {t}")));
    }
    if !(ev0_sq.is_finite() && ev0_sq >= 0.0) {
        return Err(Error::domain(format!(
            "ev0_sq must be finite and >= 0, got {ev0_sq}"
        )));
    }
    let e2 = libm::exp(-2.0 * (params.gamma() / params.m()) * t);
    Ok(0.5 * params.m() * e2 * ev0_sq + params.equilibrium_energy() * (1.0 - e2))
}

/// One draw from the stationary kinetic-energy law: returns
/// `sigma^2 z^2 / (4 gamma)` for a standard normal `z`, i.e. a
/// `Gamma(shape 1/2, scale sigma^2/(2 gamma))` variate with mean
/// `sigma^2/(4 gamma)` and variance `sigma^4/(8 gamma^2)`.
pub fn stationary_energy_sample(params: &LangevinParams, z: f64) -> f64 {
    params.equilibrium_energy() * z * z
}
