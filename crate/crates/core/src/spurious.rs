//! Construction and diagnosis of spurious Stratonovich energy solutions.
//!
//! The Stratonovich energy equation
//!
//! ```text
//!     dK = -(2 γ / m) K dt + sqrt(2 σ² K / m) ∘ dW~
//! ```
//!
//! has an absorbing point at `K = 0`: both drift and diffusion vanish there,
//! so the constant path `K ≡ 0` solves the equation. Because the physical
//! energy keeps returning to zero (every time the velocity crosses the
//! origin), one can splice zero-energy plateaus into the physical path and
//! obtain *new* continuous solutions of the same Stratonovich equation. The
//! resulting family is parametrised by the waiting times spent at zero:
//!
//! * **Restart** — at the n-th zero hit `T_n` the path stays at `K = 0` for a
//!   waiting time `λ_n ≥ 0` and then relaunches the exact dynamics from
//!   `v = 0` at `R_n = T_n + λ_n`. Every choice of waits gives a distinct
//!   solution; all-zero waits reproduce the physical path bit for bit.
//! * **Truncate** — the path follows the physical solution until the first
//!   zero hit `T_1` and is identically zero afterwards (an infinite wait).
//!
//! None of these spurious paths carries the injected-power term
//! `σ²/(2m) dt` that the Itô form makes explicit, so their ensemble mean
//! decays instead of approaching equipartition. [`spurious_residual`]
//! provides the falsification tool: a midpoint (Stratonovich-consistent)
//! residual that is small for true solutions of the equation, *exactly* zero
//! on zero plateaus, and large for paths that fail the equation.
//!
//! One change of variables matters throughout: deriving the energy equation
//! from the velocity equation gives `dK = -(2γ/m) K dt + σ V ∘ dW`, and
//! writing the noise term as `sqrt(2 σ² K / m) = σ |V|` costs a sign — the
//! Brownian motion `W~` driving the *energy* equation has increments
//! `dW~ = sgn(V) dW`. A velocity-derived energy path therefore only passes
//! the residual test against its sign-folded noise ([`energy_driving_noise`]
//! computes it; [`SpuriousPath::driving_noise`] carries it for constructed
//! paths), while a path integrated directly in the energy variable (the Heun
//! scheme, say) is tested against the raw increments it consumed.
//!
//! On a finite grid "hitting zero" means dropping below a small threshold
//! `eps_hit`; the grid index of the first such sample stands in for the
//! continuous hitting time.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::exact::{InitialCondition, OuTransition};
use crate::integrators::{energy_diffusion, strat_drift};
use crate::model::{EnergyPath, LangevinParams, NoisePath, TimeGrid, VelocityPath};

/// How the path behaves after it hits zero energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpuriousMode {
    /// Wait at zero for the next configured waiting time, then relaunch the
    /// exact dynamics from `v = 0`.
    Restart,
    /// Stay at zero forever after the first hit.
    Truncate,
}

/// Recipe for splicing zero-energy plateaus into the physical path.
///
/// Validated at construction: waiting times must be finite and nonnegative,
/// the hit threshold strictly positive, and truncate mode takes no waits.
#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousSpec {
    mode: SpuriousMode,
    waits: Vec<f64>,
    initial_wait: f64,
    eps_hit: f64,
}

impl SpuriousSpec {
    /// Restart mode with the given waiting times `λ_1, λ_2, …` (seconds).
    ///
    /// Hits beyond the end of the list get `λ = 0`, i.e. the construction
    /// falls back to the physical continuation once the list is exhausted.
    pub fn restart(waits: Vec<f64>, eps_hit: f64) -> Result<Self> {
        for (n, &w) in waits.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::domain(alloc::format!(
                    "waiting time #{n} must be finite and >= 0, got {w}"
                )));
            }
        }
        Self::check_eps(eps_hit)?;
        Ok(Self {
            mode: SpuriousMode::Restart,
            waits,
            initial_wait: 0.0,
            eps_hit,
        })
    }

    /// Truncate mode: identically zero after the first hit.
    pub fn truncate(eps_hit: f64) -> Result<Self> {
        Self::check_eps(eps_hit)?;
        Ok(Self {
            mode: SpuriousMode::Truncate,
            waits: Vec::new(),
            initial_wait: 0.0,
            eps_hit,
        })
    }

    /// Waiting time spent at zero *before* the dynamics start, used only when
    /// the initial velocity is exactly zero (the path then already sits at
    /// the absorbing point at `t = 0`).
    pub fn with_initial_wait(mut self, wait: f64) -> Result<Self> {
        if !(wait.is_finite() && wait >= 0.0) {
            return Err(Error::domain(alloc::format!(
                "initial wait must be finite and >= 0, got {wait}"
            )));
        }
        self.initial_wait = wait;
        Ok(self)
    }

    /// Default hit threshold: `1e-4` times the equilibrium mean energy.
    ///
    /// Small enough that a sample below it is indistinguishable from an
    /// actual zero crossing at the resolutions used here, large enough that
    /// hits happen at a healthy rate on coarse grids.
    pub fn default_eps_hit(params: &LangevinParams) -> f64 {
        1e-4 * params.equilibrium_energy()
    }

    fn check_eps(eps_hit: f64) -> Result<()> {
        if !(eps_hit.is_finite() && eps_hit > 0.0) {
            return Err(Error::domain(alloc::format!(
                "hit threshold must be finite and > 0, got {eps_hit}"
            )));
        }
        Ok(())
    }

    /// Which mode the spec is in.
    pub fn mode(&self) -> SpuriousMode {
        self.mode
    }

    /// The configured waiting times.
    pub fn waits(&self) -> &[f64] {
        &self.waits
    }

    /// The waiting time applied at `t = 0` when the initial velocity is zero.
    pub fn initial_wait(&self) -> f64 {
        self.initial_wait
    }

    /// The zero-hit detection threshold.
    pub fn eps_hit(&self) -> f64 {
        self.eps_hit
    }
}

/// The hitting and restart times realised by one spurious construction.
///
/// Times interleave as `T_1 <= R_1 <= T_2 <= R_2 <= …` (a zero-length wait
/// gives `T_n = R_n`). In truncate mode there is at most one hit and no
/// restart. All times lie on the grid; waiting times are rounded *up* to a
/// whole number of steps, so `R_n = T_n + ceil(λ_n / dt) · dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct StoppingTimes {
    hits: Vec<f64>,
    restarts: Vec<f64>,
}

impl StoppingTimes {
    /// Times `T_n` at which the path reached zero.
    pub fn hits(&self) -> &[f64] {
        &self.hits
    }

    /// Times `R_n` at which the dynamics relaunched from `v = 0` (restart
    /// mode only; empty when the path was truncated or never hit zero).
    pub fn restarts(&self) -> &[f64] {
        &self.restarts
    }

    /// Checks the interleaving `T_1 <= R_1 <= T_2 <= …` and that no restart
    /// precedes its hit.
    pub fn is_consistent(&self) -> bool {
        if self.restarts.len() > self.hits.len() {
            return false;
        }
        let mut previous = f64::NEG_INFINITY;
        for (n, &t) in self.hits.iter().enumerate() {
            if t < previous {
                return false;
            }
            previous = t;
            if let Some(&r) = self.restarts.get(n) {
                if r < previous {
                    return false;
                }
                previous = r;
            }
        }
        true
    }
}

/// A constructed spurious solution: the energy path, the stopping times it
/// realised, and the noise increments that drive it as an energy-equation
/// solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpuriousPath {
    energy: EnergyPath,
    stopping_times: StoppingTimes,
    driving_noise: NoisePath,
}

impl SpuriousPath {
    /// The spliced energy path.
    pub fn energy(&self) -> &EnergyPath {
        &self.energy
    }

    /// The hit/restart times realised on the grid.
    pub fn stopping_times(&self) -> &StoppingTimes {
        &self.stopping_times
    }

    /// The increments of the Brownian motion driving the energy equation
    /// along this path: the input increments with the sign of the (hidden)
    /// velocity folded in on the physical segments, passed through untouched
    /// on the zero plateaus (where the diffusion coefficient vanishes and
    /// the noise is simply not consumed).
    ///
    /// This is the noise to hand to [`spurious_residual`].
    pub fn driving_noise(&self) -> &NoisePath {
        &self.driving_noise
    }

    /// Consumes the realisation, yielding the path, the stopping times, and
    /// the driving noise.
    pub fn into_parts(self) -> (EnergyPath, StoppingTimes, NoisePath) {
        (self.energy, self.stopping_times, self.driving_noise)
    }
}

/// Index of the first grid point (from index 1 on) with energy `<= eps`.
///
/// Returns `None` when the path stays above the threshold. Index 0 is never
/// reported: the initial condition is a datum, not a hit.
pub fn first_zero_hit(path: &EnergyPath, eps: f64) -> Option<usize> {
    path.values()
        .iter()
        .enumerate()
        .skip(1)
        .find(|&(_, &k)| k <= eps)
        .map(|(i, _)| i)
}

/// Increments of the Brownian motion driving the *energy* equation along a
/// velocity path: `ΔW~_i = sgn(v_i + v_{i+1}) ΔW_i`.
///
/// The energy equation inherits `σ V ∘ dW` from the velocity equation;
/// rewriting its coefficient as `sqrt(2 σ² K / m) = σ |V|` folds `sgn(V)`
/// into the noise. The midpoint sum `v_i + v_{i+1}` fixes the sign per step
/// (a tie, only possible at an exact crossing, keeps the raw increment —
/// the diffusion coefficient is negligible there anyway).
pub fn energy_driving_noise(velocity: &VelocityPath, noise: &NoisePath) -> Result<NoisePath> {
    noise.matches(velocity.grid())?;
    let values = velocity.values();
    let increments = noise
        .increments()
        .iter()
        .enumerate()
        .map(|(i, &dw)| {
            if values[i] + values[i + 1] < 0.0 {
                -dw
            } else {
                dw
            }
        })
        .collect();
    NoisePath::from_increments(increments, noise.dt())
}

/// Number of grid steps covering a waiting time `λ` (rounded up).
///
/// The small slack keeps an exact multiple of `dt` from being pushed to the
/// next step by representation error.
fn wait_steps(lambda: f64, dt: f64) -> usize {
    let steps = libm::ceil(lambda / dt - 1e-12);
    if steps <= 0.0 {
        0
    } else {
        steps as usize
    }
}

/// Builds a spurious Stratonovich solution by splicing zero-energy plateaus
/// into the exact dynamics driven by `noise`.
///
/// The path follows the exact solution (sampled through the standardized
/// increments of `noise`) until the energy first drops to `eps_hit` or
/// below. What happens next depends on the mode, see [`SpuriousSpec`]. After
/// a restart the dynamics relaunch from `v = 0` and consume the *remaining*
/// noise increments, so the spliced segments are genuine exact solutions on
/// their own subintervals. Hit detection resumes one step after a restart,
/// and a zero waiting time splices nothing: the path continues physically
/// through the hit (bit for bit) while the hit is still recorded with
/// `T_n = R_n`.
///
/// An initial velocity of exactly zero starts the path *at* the absorbing
/// point; the spec's `initial_wait` then holds it there before the first
/// launch. The initial condition must be deterministic — resolve random
/// conditions first (see [`InitialCondition::resolve`]).
///
/// Returns the path, the realised [`StoppingTimes`], and the sign-folded
/// noise that drives it (see [`SpuriousPath::driving_noise`]).
pub fn construct_spurious_path(
    ic: &InitialCondition,
    grid: &TimeGrid,
    noise: &NoisePath,
    params: &LangevinParams,
    spec: &SpuriousSpec,
) -> Result<SpuriousPath> {
    noise.matches(grid)?;
    let v0 = ic.as_deterministic()?;
    let dt = grid.dt();
    let n = grid.n_steps();
    let transition = OuTransition::new(params, dt)?;
    let inv_sqrt_dt = 1.0 / libm::sqrt(dt);
    let half_m = 0.5 * params.m();

    let mut values = vec![0.0; n + 1];
    let mut driving = noise.increments().to_vec();
    let mut hits = Vec::new();
    let mut restarts = Vec::new();

    let mut v = v0;
    values[0] = half_m * v * v;

    // Start index of the next exact segment. Hits are only detected from one
    // past the segment start: the launch value is a datum, and consecutive
    // hits are at least one grid step apart.
    let mut start = 0usize;
    let mut next_wait = 0usize;
    // In restart mode an exhausted wait list means λ = 0 forever: the path
    // continues physically, so detection can stop once the list runs out.
    let mut detect = spec.mode == SpuriousMode::Truncate || !spec.waits.is_empty();

    if v0 == 0.0 && spec.initial_wait > 0.0 {
        let w = wait_steps(spec.initial_wait, dt).min(n);
        hits.push(0.0);
        restarts.push(grid.time(w));
        start = w; // values[0..=w] are already zero
    }

    while start < n {
        // Advance the exact solution from `start`, watching for a hit and
        // folding the velocity sign into the energy-equation noise.
        let mut hit = None;
        for i in start + 1..=n {
            let v_prev = v;
            v = transition.step(v, noise.increments()[i - 1] * inv_sqrt_dt);
            if v_prev + v < 0.0 {
                driving[i - 1] = -noise.increments()[i - 1];
            }
            values[i] = half_m * v * v;
            if detect && values[i] <= spec.eps_hit {
                hit = Some(i);
                break;
            }
        }
        let Some(h) = hit else { break };
        hits.push(grid.time(h));

        match spec.mode {
            SpuriousMode::Truncate => {
                for value in values.iter_mut().skip(h) {
                    *value = 0.0;
                }
                break;
            }
            SpuriousMode::Restart => {
                let lambda = spec.waits.get(next_wait).copied().unwrap_or(0.0);
                next_wait += 1;
                if next_wait >= spec.waits.len() {
                    detect = false;
                }
                if lambda == 0.0 {
                    // Zero wait: nothing is spliced, the physical path
                    // continues through the hit with its current velocity.
                    restarts.push(grid.time(h));
                    start = h;
                } else {
                    let r = (h + wait_steps(lambda, dt)).min(n);
                    for value in values.iter_mut().take(r + 1).skip(h) {
                        *value = 0.0;
                    }
                    restarts.push(grid.time(r));
                    v = 0.0;
                    start = r;
                }
            }
        }
    }

    Ok(SpuriousPath {
        energy: EnergyPath::new(*grid, values)?,
        stopping_times: StoppingTimes { hits, restarts },
        driving_noise: NoisePath::from_increments(driving, dt)?,
    })
}

/// Root-mean-square midpoint residual of an energy path against the
/// Stratonovich equation, over all steps.
///
/// See [`spurious_residual_segment`] for the per-step definition and for
/// which noise to pass.
pub fn spurious_residual(
    path: &EnergyPath,
    noise: &NoisePath,
    params: &LangevinParams,
) -> Result<f64> {
    spurious_residual_segment(path, noise, params, 0, path.grid().n_steps())
}

/// Root-mean-square midpoint residual over the steps `start..end`.
///
/// Per step the residual is
///
/// ```text
///     r_i = ΔK_i - a(K_mid) dt - b(K_mid) ΔW~_i,     K_mid = (K_i + K_{i+1}) / 2
/// ```
///
/// with the Stratonovich drift `a(K) = -(2γ/m) K` and diffusion
/// `b(K) = sqrt(2 σ² K / m)`. The midpoint evaluation makes the rule
/// Stratonovich-consistent: a discrete path *solves* the equation when each
/// `r_i` is `O(dt^{3/2})`, while a path that fails the equation (an Itô path
/// tested against these coefficients, say) leaves an `O(dt)` systematic
/// residual. On a zero plateau (`K_i = K_{i+1} = 0`) both coefficients
/// vanish and the residual is exactly zero — which is precisely why the
/// spliced paths pass this test and count as genuine Stratonovich solutions.
///
/// `noise` must carry the increments `ΔW~` driving the *energy* equation:
/// the raw input increments for a path integrated in the energy variable
/// (e.g. the Heun scheme), the sign-folded increments for a velocity-derived
/// path ([`energy_driving_noise`], [`SpuriousPath::driving_noise`]).
pub fn spurious_residual_segment(
    path: &EnergyPath,
    noise: &NoisePath,
    params: &LangevinParams,
    start: usize,
    end: usize,
) -> Result<f64> {
    noise.matches(path.grid())?;
    let n = path.grid().n_steps();
    if start >= end || end > n {
        return Err(Error::domain(alloc::format!(
            "step range {start}..{end} is empty or exceeds the {n} available steps"
        )));
    }
    let dt = path.grid().dt();
    let values = path.values();
    let increments = noise.increments();
    let mut sum_sq = 0.0;
    for i in start..end {
        let k_mid = 0.5 * (values[i] + values[i + 1]);
        let dk = values[i + 1] - values[i];
        let r =
            dk - strat_drift(params, k_mid) * dt - energy_diffusion(params, k_mid) * increments[i];
        sum_sq += r * r;
    }
    Ok(libm::sqrt(sum_sq / (end - start) as f64))
}
