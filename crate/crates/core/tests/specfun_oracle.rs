//! Live cross-checks of the closed-form special-function evaluators against
//! adaptive quadrature of their defining integrals.
//!
//! The shipped evaluators (series, ODE marches, asymptotics, `erf`) never
//! call the integrator, so agreement here is evidence from an independent
//! route, re-derived at test time rather than pinned.

use langevin_core::model::LangevinParams;
use langevin_core::specfun::{
    dawson_minus, dawson_plus, hyp2f2, integral_dawson_minus, integrate, normal_cdf,
    QuadratureConfig,
};

fn quad_config() -> QuadratureConfig {
    QuadratureConfig::new(1e-13, 1e-13, 4000).unwrap()
}

/// `∫₀ˣ e^{t²} dt` by quadrature.
fn growing_integral(x: f64) -> f64 {
    integrate(|t| libm::exp(t * t), 0.0, x, &quad_config()).unwrap()
}

/// `∫₀ˣ e^{-t²} dt` by quadrature (no erf call).
fn decaying_integral(x: f64) -> f64 {
    integrate(|t| libm::exp(-t * t), 0.0, x, &quad_config()).unwrap()
}

#[test]
fn dawson_plus_matches_defining_integral() {
    // D₊(x) = e^{-x²} ∫₀ˣ e^{t²} dt across all three evaluator regimes
    // (series ≤ 0.5, ODE march ≤ 10 — the sweep covers its lower half —
    // and the small-x limit D₊(x) ≈ x).
    for i in 1..=20 {
        let x = 0.25 * i as f64;
        let oracle = libm::exp(-x * x) * growing_integral(x);
        let got = dawson_plus(x).unwrap();
        let rel = libm::fabs(got - oracle) / oracle;
        assert!(rel < 1e-10, "x = {x}: got {got}, oracle {oracle}, rel {rel}");
    }
}

#[test]
fn dawson_minus_matches_defining_integral() {
    // D₋(x) = e^{x²} ∫₀ˣ e^{-t²} dt. The e^{x²} factor amplifies absolute
    // error, so the comparison is relative.
    for i in 1..=20 {
        let x = 0.25 * i as f64;
        let oracle = libm::exp(x * x) * decaying_integral(x);
        let got = dawson_minus(x).unwrap();
        let rel = libm::fabs(got - oracle) / oracle;
        assert!(rel < 1e-10, "x = {x}: got {got}, oracle {oracle}, rel {rel}");
    }
}

#[test]
fn dawson_values_at_one_match_quadrature_to_1e8() {
    // The two Dawson integrals at x = 1, each within 1e-8 of quadrature.
    let d_plus = dawson_plus(1.0).unwrap();
    let d_minus = dawson_minus(1.0).unwrap();
    let plus_oracle = libm::exp(-1.0) * growing_integral(1.0);
    let minus_oracle = libm::exp(1.0) * decaying_integral(1.0);
    assert!(libm::fabs(d_plus - plus_oracle) < 1e-8);
    assert!(libm::fabs(d_minus - minus_oracle) < 1e-8);
}

#[test]
fn integral_of_dawson_minus_matches_nested_quadrature() {
    // ∫₀ˣ D₋(t) dt = ∫₀ˣ e^{t²} (∫₀ᵗ e^{-s²} ds) dt, with the inner
    // integral itself evaluated by quadrature: the oracle route shares no
    // code with the shipped all-positive series.
    for &x in &[0.5, 1.0, 2.0, 3.0] {
        let oracle = integrate(
            |t| libm::exp(t * t) * decaying_integral(t),
            0.0,
            x,
            &quad_config(),
        )
        .unwrap();
        let got = integral_dawson_minus(x).unwrap();
        let rel = libm::fabs(got - oracle) / oracle;
        assert!(rel < 1e-9, "x = {x}: got {got}, oracle {oracle}, rel {rel}");
    }
}

#[test]
fn integral_of_dawson_minus_matches_hypergeometric_form() {
    // ∫₀ˣ D₋ = (x²/2) ₂F₂(1,1; 3/2,2; x²) on [0, 2], within 1e-8.
    for i in 0..=20 {
        let x = 0.1 * i as f64;
        let series = integral_dawson_minus(x).unwrap();
        let hyper = 0.5 * x * x * hyp2f2(x * x).unwrap();
        assert!(
            libm::fabs(series - hyper) < 1e-8,
            "x = {x}: series {series}, hypergeometric {hyper}"
        );
    }
}

#[test]
fn normal_cdf_matches_density_quadrature() {
    // Φ(x) = 1/2 + ∫₀ˣ φ(t) dt with φ the standard normal density.
    let inv_sqrt_2pi = 1.0 / libm::sqrt(2.0 * core::f64::consts::PI);
    for &x in &[-3.0, -1.0, -0.25, 0.5, 1.0, 2.5] {
        let tail = integrate(
            |t| inv_sqrt_2pi * libm::exp(-0.5 * t * t),
            0.0,
            x,
            &quad_config(),
        )
        .unwrap();
        let oracle = 0.5 + tail;
        let got = normal_cdf(x);
        assert!(
            libm::fabs(got - oracle) < 1e-12,
            "x = {x}: got {got}, oracle {oracle}"
        );
    }
}

#[test]
fn passage_time_formula_rebuilt_from_quadrature() {
    // 𝔗(v) = (m √π / γ) e^{x²} D₊(x) - (2m/γ) ∫₀ˣ D₋, with x = √(mγ)|v|/σ,
    // rebuilt here entirely from quadrature blocks:
    // e^{x²} D₊(x) = ∫₀ˣ e^{t²} dt, and the nested double integral for ∫D₋.
    let p = LangevinParams::new(1.0, 1.0, libm::sqrt(2.0)).unwrap();
    let sqrt_pi = libm::sqrt(core::f64::consts::PI);
    for &v in &[0.5, 1.0, 2.0] {
        let x = libm::sqrt(p.m() * p.gamma()) * v / p.sigma();
        let grow = growing_integral(x);
        let tail = integrate(
            |t| libm::exp(t * t) * decaying_integral(t),
            0.0,
            x,
            &quad_config(),
        )
        .unwrap();
        let oracle = p.m() * sqrt_pi / p.gamma() * grow - 2.0 * p.m() / p.gamma() * tail;
        let got = langevin_core::mfpt::mfpt_velocity(v, &p).unwrap();
        assert!(
            libm::fabs(got - oracle) < 1e-8,
            "v = {v}: got {got}, oracle {oracle}"
        );
    }
}
