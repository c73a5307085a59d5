//! Physical parameters, uniform time grids, reproducible noise streams, and
//! validated path containers shared by every other module.
//!
//! Reproducibility contract: [`make_noise_path`] is a pure function of
//! `(seed, path_id, grid)`. Each path gets its own counter-selected stream
//! of a ChaCha cipher RNG, so ensembles may be generated in any order, on
//! any number of threads, and still be bit-identical.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Physical parameters of the damped, noise-driven particle.
///
/// The model is `m dV = -gamma V dt + sigma dW`. All three parameters are
/// strictly positive. The Boltzmann constant `k_B` defaults to 1 (natural
/// units); temperature is always *derived* from the fluctuation-dissipation
/// relation `sigma^2 = 2 k_B T gamma`, never supplied, so equipartition
/// holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangevinParams {
    m: f64,
    gamma: f64,
    sigma: f64,
    k_b: f64,
}

impl LangevinParams {
    /// Creates a parameter set with `k_B = 1`.
    ///
    /// Errors if any of `m`, `gamma`, `sigma` is not strictly positive and
    /// finite.
    pub fn new(m: f64, gamma: f64, sigma: f64) -> Result<Self> {
        Self::with_boltzmann(m, gamma, sigma, 1.0)
    }

    /// Creates a parameter set with an explicit Boltzmann constant.
    pub fn with_boltzmann(m: f64, gamma: f64, sigma: f64, k_b: f64) -> Result<Self> {
        fn check(name: &str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::domain(alloc::format!(
                    "{name} must be a finite positive real, got {v}"
                )))
            }
        }
        check("m", m)?;
        check("gamma", gamma)?;
        check("sigma", sigma)?;
        check("k_B", k_b)?;
        Ok(Self { m, gamma, sigma, k_b })
    }

    /// Particle mass `m`.
    pub fn m(&self) -> f64 {
        self.m
    }

    /// Damping coefficient `gamma`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Noise amplitude `sigma`.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Boltzmann constant `k_B`.
    pub fn k_b(&self) -> f64 {
        self.k_b
    }

    /// Velocity relaxation time `m / gamma`.
    pub fn relaxation_time(&self) -> f64 {
        self.m / self.gamma
    }

    /// Stationary mean kinetic energy `sigma^2 / (4 gamma)`.
    pub fn equilibrium_energy(&self) -> f64 {
        self.sigma * self.sigma / (4.0 * self.gamma)
    }

    /// Temperature from fluctuation-dissipation: `sigma^2 / (2 gamma k_B)`.
    pub fn temperature(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.gamma * self.k_b)
    }

    /// Stationary velocity variance `sigma^2 / (2 m gamma)` (the
    /// Maxwell-Boltzmann variance `k_B T / m`).
    pub fn stationary_velocity_variance(&self) -> f64 {
        self.sigma * self.sigma / (2.0 * self.m * self.gamma)
    }
}

/// Stationary mean kinetic energy `sigma^2 / (4 gamma)`.
///
/// Equals `k_B * T / 2` under the derived temperature (equipartition).
pub fn equilibrium_mean_energy(params: &LangevinParams) -> f64 {
    params.equilibrium_energy()
}

/// Uniform time grid `t_i = i * dt` for `i = 0..=n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    n_steps: usize,
}

impl TimeGrid {
    /// Creates a grid with step `dt > 0` and `n_steps >= 1` steps.
    pub fn new(dt: f64, n_steps: usize) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(alloc::format!(
                "dt must be a finite positive real, got {dt}"
            )));
        }
        if n_steps == 0 {
            return Err(Error::domain("n_steps must be >= 1"));
        }
        Ok(Self { dt, n_steps })
    }

    /// Creates the grid with step `dt` whose horizon is at least `horizon`
    /// (the step count is `ceil(horizon / dt)`).
    pub fn spanning(dt: f64, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::domain(alloc::format!(
                "horizon must be a finite positive real, got {horizon}"
            )));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(alloc::format!(
                "dt must be a finite positive real, got {dt}"
            )));
        }
        // Tolerate horizon/dt landing a hair above an integer.
        let steps = libm::ceil(horizon / dt - 1e-9) as usize;
        Self::new(dt, steps.max(1))
    }

    /// Step size.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of steps (the grid has `n_steps + 1` points).
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of grid points, `n_steps + 1`.
    pub fn n_points(&self) -> usize {
        self.n_steps + 1
    }

    /// Final time `dt * n_steps`.
    pub fn horizon(&self) -> f64 {
        self.dt * self.n_steps as f64
    }

    /// Time of the `i`-th grid point.
    pub fn time(&self, i: usize) -> f64 {
        self.dt * i as f64
    }

    /// Index of the grid point closest to `t` (clamped to the grid).
    pub fn nearest_index(&self, t: f64) -> usize {
        if t <= 0.0 {
            return 0;
        }
        let i = libm::round(t / self.dt) as usize;
        i.min(self.n_steps)
    }
}

/// Brownian increments `dW_i ~ Normal(0, dt)` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath {
    increments: Vec<f64>,
    dt: f64,
}

impl NoisePath {
    /// Wraps externally produced increments (e.g. coarsened fine-grid noise
    /// for strong-convergence studies). `dt` is the spacing the increments
    /// correspond to.
    pub fn from_increments(increments: Vec<f64>, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(alloc::format!(
                "dt must be a finite positive real, got {dt}"
            )));
        }
        if increments.is_empty() {
            return Err(Error::domain("a noise path needs at least one increment"));
        }
        Ok(Self { increments, dt })
    }

    /// The increments `dW_i`.
    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    /// Grid spacing of the increments.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Number of increments.
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    /// True when there are no increments (never for validated paths).
    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Checks that this noise path matches `grid` (same `dt`, one increment
    /// per step).
    pub fn matches(&self, grid: &TimeGrid) -> Result<()> {
        if self.increments.len() != grid.n_steps() {
            return Err(Error::mismatch(alloc::format!(
                "noise has {} increments but the grid has {} steps",
                self.increments.len(),
                grid.n_steps()
            )));
        }
        if self.dt != grid.dt() {
            return Err(Error::mismatch(alloc::format!(
                "noise dt = {} but grid dt = {}",
                self.dt,
                grid.dt()
            )));
        }
        Ok(())
    }

    /// Sums consecutive groups of `factor` increments, producing the same
    /// Brownian path viewed on a grid `factor` times coarser. The number of
    /// increments must be divisible by `factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::domain("coarsening factor must be >= 1"));
        }
        if self.increments.len() % factor != 0 {
            return Err(Error::mismatch(alloc::format!(
                "{} increments are not divisible into groups of {factor}",
                self.increments.len()
            )));
        }
        let coarse: Vec<f64> = self
            .increments
            .chunks_exact(factor)
            .map(|chunk| chunk.iter().sum())
            .collect();
        Self::from_increments(coarse, self.dt * factor as f64)
    }
}

/// The deterministic per-path RNG: a ChaCha cipher seeded by `seed` with its
/// word-counter stream selected by `path_id`.
///
/// Distinct `path_id`s index non-overlapping keystreams of the same cipher,
/// which is the standard way to hand out independent substreams to parallel
/// workers without coordination.
pub fn path_rng(seed: u64, path_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path_id);
    rng
}

/// Draws the Brownian increments for one path on `grid`.
///
/// Pure function of `(seed, path_id, grid)`: same inputs give bit-identical
/// output, distinct `path_id`s give statistically independent streams.
pub fn make_noise_path(seed: u64, path_id: u64, grid: &TimeGrid) -> NoisePath {
    let mut rng = path_rng(seed, path_id);
    noise_path_from_rng(&mut rng, grid)
}

/// Draws the Brownian increments for one path from an already-positioned
/// RNG. Ensemble drivers that also need an initial-condition draw use this
/// first and then continue drawing from the same RNG, keeping the per-path
/// draw order fixed.
pub fn noise_path_from_rng<R: Rng + ?Sized>(rng: &mut R, grid: &TimeGrid) -> NoisePath {
    let sqrt_dt = libm::sqrt(grid.dt());
    let increments = (0..grid.n_steps())
        .map(|_| sqrt_dt * rng.sample::<f64, _>(StandardNormal))
        .collect();
    NoisePath {
        increments,
        dt: grid.dt(),
    }
}

/// A velocity trajectory on a uniform grid (`n_steps + 1` values).
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl VelocityPath {
    /// Wraps velocity values; the length must be `grid.n_points()`.
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::mismatch(alloc::format!(
                "velocity path has {} values but the grid has {} points",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values })
    }

    /// The grid the path lives on.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// The velocity values `V_i`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the final grid point.
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("grid has at least two points")
    }
}

/// A kinetic-energy trajectory on a uniform grid (`n_steps + 1` values, all
/// nonnegative).
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPath {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl EnergyPath {
    /// Wraps energy values; the length must be `grid.n_points()` and every
    /// value must be finite and `>= 0` (kinetic energy is nonnegative).
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::mismatch(alloc::format!(
                "energy path has {} values but the grid has {} points",
                values.len(),
                grid.n_points()
            )));
        }
        if let Some((i, &bad)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= 0.0))
        {
            return Err(Error::domain(alloc::format!(
                "energy value K_{i} = {bad} is not a finite nonnegative real"
            )));
        }
        Ok(Self { grid, values })
    }

    /// The grid the path lives on.
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// The energy values `K_i`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at the final grid point.
    pub fn terminal(&self) -> f64 {
        *self.values.last().expect("grid has at least two points")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn params_reject_nonpositive_and_nonfinite() {
        assert!(LangevinParams::new(0.0, 1.0, 1.0).is_err());
        assert!(LangevinParams::new(1.0, -1.0, 1.0).is_err());
        assert!(LangevinParams::new(1.0, 1.0, 0.0).is_err());
        assert!(LangevinParams::new(f64::NAN, 1.0, 1.0).is_err());
        assert!(LangevinParams::new(1.0, f64::INFINITY, 1.0).is_err());
        assert!(LangevinParams::with_boltzmann(1.0, 1.0, 1.0, 0.0).is_err());
        assert!(LangevinParams::new(1.0, 1.0, 2.0).is_ok());
    }

    #[test]
    fn derived_quantities() {
        let p = LangevinParams::new(2.0, 4.0, 2.0).unwrap();
        assert_eq!(p.relaxation_time(), 0.5);
        assert_eq!(p.equilibrium_energy(), 0.25);
        assert_eq!(p.temperature(), 0.5);
        assert_eq!(p.stationary_velocity_variance(), 0.25);
    }

    #[test]
    fn equilibrium_energy_examples() {
        // sigma^2/(4 gamma) = 1 for sigma = 2, gamma = 1.
        let p = LangevinParams::new(1.0, 1.0, 2.0).unwrap();
        assert_eq!(equilibrium_mean_energy(&p), 1.0);
        // Mass does not enter.
        let p = LangevinParams::new(5.0, 1.0, 2.0).unwrap();
        assert_eq!(equilibrium_mean_energy(&p), 1.0);
        // Doubling gamma halves the limit energy.
        let p = LangevinParams::new(1.0, 2.0, 2.0).unwrap();
        assert_eq!(equilibrium_mean_energy(&p), 0.5);
    }

    #[test]
    fn equipartition_exact_in_natural_units() {
        // k_B = 1: equilibrium energy == k_B T / 2 bit-for-bit.
        for (m, gamma, sigma) in [(1.0, 1.0, 2.0), (3.0, 0.7, 1.3), (0.2, 5.0, 0.11)] {
            let p = LangevinParams::new(m, gamma, sigma).unwrap();
            assert_eq!(p.equilibrium_energy(), p.k_b() * p.temperature() / 2.0);
        }
    }

    #[test]
    fn equipartition_close_for_general_boltzmann() {
        let p = LangevinParams::with_boltzmann(1.0, 1.3, 0.9, 1.380649e-23).unwrap();
        let lhs = p.equilibrium_energy();
        let rhs = p.k_b() * p.temperature() / 2.0;
        assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * lhs.abs());
    }

    #[test]
    fn grid_validation_and_times() {
        assert!(TimeGrid::new(0.0, 5).is_err());
        assert!(TimeGrid::new(-0.1, 5).is_err());
        assert!(TimeGrid::new(0.1, 0).is_err());
        let g = TimeGrid::new(0.25, 8).unwrap();
        assert_eq!(g.n_points(), 9);
        assert_eq!(g.horizon(), 2.0);
        assert_eq!(g.time(4), 1.0);
        assert_eq!(g.nearest_index(1.0), 4);
        assert_eq!(g.nearest_index(-3.0), 0);
        assert_eq!(g.nearest_index(100.0), 8);
    }

    #[test]
    fn grid_spanning_rounds_up() {
        let g = TimeGrid::spanning(1e-3, 3.0).unwrap();
        assert_eq!(g.n_steps(), 3000);
        let g = TimeGrid::spanning(0.4, 1.0).unwrap();
        assert_eq!(g.n_steps(), 3); // 0.4 * 3 = 1.2 >= 1.0
    }

    #[test]
    fn noise_is_reproducible_and_streams_are_distinct() {
        let grid = TimeGrid::new(0.01, 64).unwrap();
        let a = make_noise_path(1, 0, &grid);
        let b = make_noise_path(1, 0, &grid);
        assert_eq!(a, b);
        let c = make_noise_path(1, 1, &grid);
        assert_ne!(a, c);
        let d = make_noise_path(2, 0, &grid);
        assert_ne!(a, d);
    }

    #[test]
    fn noise_moments_match_the_law() {
        // 1e5 increments with dt = 0.01: mean within 3 SE of 0, variance
        // within 2% of dt.
        let grid = TimeGrid::new(0.01, 1000).unwrap();
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut n = 0usize;
        for path_id in 0..100 {
            let noise = make_noise_path(7, path_id, &grid);
            for &dw in noise.increments() {
                sum += dw;
                sum_sq += dw * dw;
                n += 1;
            }
        }
        assert_eq!(n, 100_000);
        let mean = sum / n as f64;
        let var = (sum_sq - sum * sum / n as f64) / (n as f64 - 1.0);
        let se = libm::sqrt(var / n as f64);
        assert!(mean.abs() <= 3.0 * se, "mean {mean} vs SE {se}");
        assert!((var - 0.01).abs() <= 0.02 * 0.01, "variance {var}");
    }

    #[test]
    fn coarsening_sums_groups() {
        let noise = NoisePath::from_increments(vec![1.0, 2.0, 3.0, 4.0], 0.5).unwrap();
        let coarse = noise.coarsen(2).unwrap();
        assert_eq!(coarse.increments(), &[3.0, 7.0]);
        assert_eq!(coarse.dt(), 1.0);
        assert!(noise.coarsen(3).is_err());
    }

    #[test]
    fn energy_path_rejects_negative_values() {
        let grid = TimeGrid::new(0.1, 2).unwrap();
        assert!(EnergyPath::new(grid, vec![0.0, 1.0, -1e-12]).is_err());
        assert!(EnergyPath::new(grid, vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(EnergyPath::new(grid, vec![0.0, 1.0]).is_err());
        assert!(EnergyPath::new(grid, vec![0.0, 1.0, 2.0]).is_ok());
    }

    #[test]
    fn velocity_path_checks_length() {
        let grid = TimeGrid::new(0.1, 2).unwrap();
        assert!(VelocityPath::new(grid, vec![1.0, -2.0, 0.5]).is_ok());
        assert!(VelocityPath::new(grid, vec![1.0, -2.0]).is_err());
    }
}
