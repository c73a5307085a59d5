//! Ensemble statistics, empirical first-passage times, and the
//! stationary-distribution tests used to tell physical solutions from
//! spurious ones.
//!
//! Everything here is deterministic: estimators over given samples depend
//! only on those samples, and the Monte Carlo helpers take an explicit seed
//! and derive one RNG stream per path (see [`crate::model::path_rng`]), so
//! results are reproducible at any degree of outer parallelism.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exact::OuTransition;
use crate::model::{path_rng, EnergyPath, LangevinParams};

/// Streaming mean/variance accumulator (Welford's algorithm) with a
/// numerically stable pairwise merge, so ensembles can be reduced chunk by
/// chunk without storing samples.
#[derive(Debug, Clone, Copy, Default)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl MomentAccumulator {
    /// An empty accumulator.
    pub fn new() -> Self {
        Self::default()
    }

    /// Folds one observation in.
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Merges another accumulator into this one; the result is as if both
    /// sample streams had been pushed into a single accumulator.
    pub fn merge(&mut self, other: &Self) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n1 = self.n as f64;
        let n2 = other.n as f64;
        let n = n1 + n2;
        let delta = other.mean - self.mean;
        self.mean += delta * n2 / n;
        self.m2 += other.m2 + delta * delta * n1 * n2 / n;
        self.n += other.n;
    }

    /// Number of observations folded in so far.
    pub fn count(&self) -> u64 {
        self.n
    }

    /// Sample mean (0 for an empty accumulator).
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; 0 until two observations are present.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    /// Standard error of the mean, `sqrt(variance / n)`.
    pub fn standard_error(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            libm::sqrt(self.variance() / self.n as f64)
        }
    }
}

/// Per-time-point mean, variance, and standard error across an ensemble of
/// energy paths.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    mean: Vec<f64>,
    variance: Vec<f64>,
    standard_error: Vec<f64>,
    n_paths: usize,
}

impl EnsembleStats {
    /// Finalizes per-time accumulators (one per grid point, each having seen
    /// every path) into the summary arrays. Needs at least two paths for the
    /// variance to mean anything.
    pub fn from_accumulators(accumulators: &[MomentAccumulator]) -> Result<Self> {
        let n_paths = accumulators.first().map_or(0, |a| a.count());
        if n_paths < 2 {
            return Err(Error::domain(alloc::format!(
                "ensemble statistics need at least 2 paths, got {n_paths}"
            )));
        }
        if accumulators.iter().any(|a| a.count() != n_paths) {
            return Err(Error::mismatch(
                "per-time accumulators disagree on the number of paths",
            ));
        }
        let mut mean = Vec::with_capacity(accumulators.len());
        let mut variance = Vec::with_capacity(accumulators.len());
        let mut standard_error = Vec::with_capacity(accumulators.len());
        for acc in accumulators {
            mean.push(acc.mean());
            variance.push(acc.variance());
            standard_error.push(acc.standard_error());
        }
        Ok(Self {
            mean,
            variance,
            standard_error,
            n_paths: n_paths as usize,
        })
    }

    /// Per-time-point sample means.
    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Per-time-point unbiased sample variances.
    pub fn variance(&self) -> &[f64] {
        &self.variance
    }

    /// Per-time-point standard errors, `sqrt(variance / n_paths)`.
    pub fn standard_error(&self) -> &[f64] {
        &self.standard_error
    }

    /// Number of paths in the ensemble.
    pub fn n_paths(&self) -> usize {
        self.n_paths
    }
}

/// Cross-sectional statistics of an ensemble of energy paths on a common
/// grid, reduced in the given path order.
///
/// The mean is permutation-invariant up to floating-point associativity;
/// keeping the caller's ordering fixed is what makes reruns bit-identical.
pub fn ensemble_stats(paths: &[EnergyPath]) -> Result<EnsembleStats> {
    if paths.len() < 2 {
        return Err(Error::domain(alloc::format!(
            "ensemble statistics need at least 2 paths, got {}",
            paths.len()
        )));
    }
    let grid = *paths[0].grid();
    let mut accumulators = alloc::vec![MomentAccumulator::new(); grid.n_points()];
    for (p, path) in paths.iter().enumerate() {
        if *path.grid() != grid {
            return Err(Error::mismatch(alloc::format!(
                "path {p} is on a different grid (dt {}, {} steps) than path 0 (dt {}, {} steps)",
                path.grid().dt(),
                path.grid().n_steps(),
                grid.dt(),
                grid.n_steps()
            )));
        }
        for (acc, &k) in accumulators.iter_mut().zip(path.values()) {
            acc.push(k);
        }
    }
    EnsembleStats::from_accumulators(&accumulators)
}

/// Outcome of a statistical check: a test statistic, the threshold it was
/// held against, and the verdict `pass == (statistic <= threshold)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    statistic: f64,
    threshold: f64,
    pass: bool,
    description: String,
}

impl TestReport {
    /// Builds a report; the verdict is derived, never supplied.
    pub fn new(statistic: f64, threshold: f64, description: impl Into<String>) -> Self {
        Self {
            statistic,
            threshold,
            pass: statistic <= threshold,
            description: description.into(),
        }
    }

    /// The realised test statistic.
    pub fn statistic(&self) -> f64 {
        self.statistic
    }

    /// The critical value the statistic is compared against.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Whether the test passed (`statistic <= threshold`).
    pub fn pass(&self) -> bool {
        self.pass
    }

    /// Human-readable summary of what was tested.
    pub fn description(&self) -> &str {
        &self.description
    }
}

impl core::fmt::Display for TestReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(
            f,
            "{}: statistic {:.6e} vs threshold {:.6e} -> {}",
            self.description,
            self.statistic,
            self.threshold,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

/// Kolmogorov-Smirnov goodness-of-fit test against an explicit CDF.
///
/// The statistic is the sup-distance `D_n = sup_x |F_n(x) - F(x)|` between
/// the empirical CDF and `cdf`; the threshold is the asymptotic 1%-level
/// critical value `1.63 / sqrt(n)`, adequate for the required `n >= 1000`.
pub fn ks_test<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<TestReport> {
    let n = samples.len();
    if n < 1000 {
        return Err(Error::domain(alloc::format!(
            "the Kolmogorov-Smirnov test needs at least 1000 samples, got {n}"
        )));
    }
    if let Some(bad) = samples.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(alloc::format!(
            "samples must be finite, got {bad}"
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let scale = 1.0 / n as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::domain(alloc::format!(
                "cdf must map into [0, 1], got {f} at x = {x}"
            )));
        }
        d = d.max(f - i as f64 * scale).max((i + 1) as f64 * scale - f);
    }
    let threshold = 1.63 / libm::sqrt(n as f64);
    Ok(TestReport::new(
        d,
        threshold,
        alloc::format!("Kolmogorov-Smirnov sup-distance vs supplied CDF (n = {n}, 1% level)"),
    ))
}

/// Moment test of energy samples against the stationary energy distribution
/// Gamma(1/2, σ²/2γ): mean σ²/4γ within 3 standard errors, variance σ⁴/8γ²
/// within 5%.
///
/// The statistic is the worse of the two normalised discrepancies, so the
/// report passes exactly when both moments agree.
pub fn gamma_moment_test(samples: &[f64], params: &LangevinParams) -> Result<TestReport> {
    let n = samples.len();
    if n < 1000 {
        return Err(Error::domain(alloc::format!(
            "the moment test needs at least 1000 samples, got {n}"
        )));
    }
    let mut acc = MomentAccumulator::new();
    for &k in samples {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::domain(alloc::format!(
                "energy samples must be finite and >= 0, got {k}"
            )));
        }
        acc.push(k);
    }
    let target_mean = params.equilibrium_energy();
    let target_variance = 2.0 * target_mean * target_mean; // σ⁴ / 8γ²
    let mean_discrepancy = libm::fabs(acc.mean() - target_mean) / (3.0 * acc.standard_error());
    let variance_discrepancy =
        libm::fabs(acc.variance() - target_variance) / (0.05 * target_variance);
    // f64::max ignores a NaN operand, so a 0/0 mean term (constant samples
    // sitting exactly on the target) cannot mask a variance failure.
    let statistic = mean_discrepancy.max(variance_discrepancy);
    Ok(TestReport::new(
        statistic,
        1.0,
        alloc::format!(
            "stationary energy moments vs Gamma(1/2, sigma^2/2gamma) \
             (n = {n}, mean within 3 SE, variance within 5%)"
        ),
    ))
}

/// Result of a Monte Carlo first-passage experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMfpt {
    /// Mean hitting time over the uncensored paths.
    pub mean: f64,
    /// Standard error of that mean.
    pub standard_error: f64,
    /// Paths that never hit the threshold before `t_max`.
    pub censored: usize,
    /// Paths that did hit (the mean is over these).
    pub uncensored: usize,
    /// True when more than 1% of paths were censored — the estimate is then
    /// biased low and `t_max` should be raised.
    pub heavy_censoring: bool,
}

/// Default censoring horizon: 50 relaxation times, long enough that
/// censoring is a rounding-level artifact (passage times are finite in
/// expectation).
pub fn default_censoring_horizon(params: &LangevinParams) -> f64 {
    50.0 * params.relaxation_time()
}

/// Monte Carlo mean first-passage time of the energy to `<= eps`, using the
/// exact velocity sampler so the only discretization effect is hit detection
/// on the grid (which biases the time up; refine `dt` to shrink it).
///
/// Each path draws from its own RNG stream (`path_rng(seed, path_id)`) and
/// records the first grid time (including `t = 0`) with `m v² / 2 <= eps`;
/// paths that never hit before `t_max` are censored and excluded from the
/// mean.
#[allow(clippy::too_many_arguments)]
pub fn empirical_mfpt(
    v0: f64,
    params: &LangevinParams,
    dt: f64,
    n_paths: usize,
    eps: f64,
    t_max: f64,
    seed: u64,
) -> Result<EmpiricalMfpt> {
    if !(v0.is_finite() && v0 != 0.0) {
        return Err(Error::domain(alloc::format!(
            "starting velocity must be finite and nonzero, got {v0}"
        )));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::domain(alloc::format!(
            "hit threshold must be finite and > 0, got {eps}"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(alloc::format!(
            "time step must be finite and > 0, got {dt}"
        )));
    }
    if !(t_max.is_finite() && t_max >= dt) {
        return Err(Error::domain(alloc::format!(
            "censoring horizon must be finite and >= dt, got {t_max}"
        )));
    }
    if n_paths < 2 {
        return Err(Error::domain(alloc::format!(
            "the passage-time estimate needs at least 2 paths, got {n_paths}"
        )));
    }
    let transition = OuTransition::new(params, dt)?;
    let max_steps = libm::ceil(t_max / dt - 1e-9) as usize;
    let half_m = 0.5 * params.m();
    let mut times = MomentAccumulator::new();
    let mut censored = 0usize;
    for path_id in 0..n_paths {
        let mut rng = path_rng(seed, path_id as u64);
        let mut v = v0;
        let mut hit = None;
        if half_m * v * v <= eps {
            hit = Some(0.0);
        } else {
            for i in 1..=max_steps {
                let z: f64 = rng.sample(StandardNormal);
                v = transition.step(v, z);
                if half_m * v * v <= eps {
                    hit = Some(i as f64 * dt);
                    break;
                }
            }
        }
        match hit {
            Some(t) => times.push(t),
            None => censored += 1,
        }
    }
    if times.count() == 0 {
        return Err(Error::convergence(alloc::format!(
            "all {n_paths} paths were censored at t_max = {t_max}; raise t_max or eps"
        )));
    }
    Ok(EmpiricalMfpt {
        mean: times.mean(),
        standard_error: times.standard_error(),
        censored,
        uncensored: times.count() as usize,
        heavy_censoring: censored as f64 > 0.01 * n_paths as f64,
    })
}

/// One row of the Brownian-limit divergence table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianDivergenceRow {
    /// Increment length Δt.
    pub dt: f64,
    /// Raw second moment `E[(ΔX/Δt)²]` of the finite-difference velocity —
    /// grows like `1/Δt`.
    pub raw_second_moment: f64,
    /// `Δt · E[(ΔX/Δt)²]`, which stays at `σ²/γ²`.
    pub scaled_second_moment: f64,
}

/// Demonstrates why the overdamped (Brownian) position model has no kinetic
/// energy: finite-difference velocities `ΔX/Δt` of the position increments
/// `ΔX = (σ/γ) ΔW` have second moment `(σ²/γ²)/Δt`, which diverges as the
/// increments shrink. Each row reports the raw moment and the Δt-scaled
/// moment (constant at `σ²/γ²`) over `n_samples` increments.
///
/// `dt_list` must be positive and strictly decreasing so the table reads as
/// a refinement; each row uses its own RNG stream of the given seed.
pub fn brownian_divergence_demo(
    params: &LangevinParams,
    dt_list: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<BrownianDivergenceRow>> {
    if dt_list.is_empty() {
        return Err(Error::domain("dt_list must not be empty"));
    }
    for pair in dt_list.windows(2) {
        if pair[1] >= pair[0] {
            return Err(Error::domain(alloc::format!(
                "dt_list must be strictly decreasing, got {} before {}",
                pair[0],
                pair[1]
            )));
        }
    }
    if !(dt_list[0].is_finite() && dt_list[dt_list.len() - 1] > 0.0) {
        return Err(Error::domain("dt_list entries must be finite and > 0"));
    }
    if n_samples < 2 {
        return Err(Error::domain(alloc::format!(
            "the divergence demo needs at least 2 samples per row, got {n_samples}"
        )));
    }
    let ratio = params.sigma() / params.gamma();
    let mut rows = Vec::with_capacity(dt_list.len());
    for (row_id, &dt) in dt_list.iter().enumerate() {
        let mut rng = path_rng(seed, row_id as u64);
        let scale = ratio * libm::sqrt(dt) / dt; // ΔX/Δt for a unit normal
        let mut acc = MomentAccumulator::new();
        for _ in 0..n_samples {
            let z: f64 = rng.sample(StandardNormal);
            let v = scale * z;
            acc.push(v * v);
        }
        let raw = acc.mean();
        rows.push(BrownianDivergenceRow {
            dt,
            raw_second_moment: raw,
            scaled_second_moment: dt * raw,
        });
    }
    Ok(rows)
}
