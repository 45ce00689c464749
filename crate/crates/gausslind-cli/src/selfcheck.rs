//! Installation self-checks: cross-engine closed evolution, discord
//! baselines, expansion-coefficient identities and the incomplete Gamma
//! function against an independent quadrature.
//!
//! Each check returns a one-line summary on success and a description of
//! the first violation on failure.

use gausslind::closed_dynamics::{
    bogoliubov_from_mode, covariance_from_bogoliubov, evolve_closed_squeezing, evolve_closed_transport,
    integrate_mode_function,
};
use gausslind::cosmology::{
    asymptotic_coefficients, de_sitter_covariance_closed, de_sitter_frequency, de_sitter_mode, de_sitter_squeezing,
    CosmoParams,
};
use gausslind::discord_measures::{discord, discord_pure, discord_squeezed};
use gausslind::ode::OdeOptions;
use gausslind::special_functions::upper_incomplete_gamma;
use gausslind::symplectic_core::{covariance_from_squeezing, CovarianceBlock, ParticleStatistics, SqueezingState};
use num_complex::Complex64;
use oracles::incomplete_gamma_ray_scaled;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, LN_2, PI};
use std::time::Instant;

/// Result of one self-check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    /// Acceptance-criterion number.
    pub criterion: u32,
    /// Short name.
    pub name: &'static str,
    /// Whether the check passed.
    pub passed: bool,
    /// Summary or first violation.
    pub detail: String,
    /// Wall-clock time.
    pub seconds: f64,
}

/// Outcome of a single check body.
pub type CheckResult = Result<String, String>;

/// Runs a check body and times it.
pub fn timed(criterion: u32, name: &'static str, body: impl FnOnce() -> CheckResult) -> CheckOutcome {
    let start = Instant::now();
    let r = body();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match r {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckOutcome { criterion, name, passed, detail, seconds }
}

/// All self-checks in criterion order.
pub fn run_all() -> Vec<CheckOutcome> {
    vec![
        timed(1, "closed_engines", closed_engines),
        timed(2, "discord_baseline", discord_baseline),
        timed(5, "coefficient_identities", coefficient_identities),
        timed(9, "incomplete_gamma", incomplete_gamma),
    ]
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn worst_entry(a: &CovarianceBlock, b: &CovarianceBlock) -> f64 {
    rel(a.g11, b.g11).max(rel(a.g12, b.g12)).max(rel(a.g22, b.g22))
}

/// De Sitter from `x = 100` to `x = 0.01`: mode-function (Bogoliubov),
/// squeezing and transport engines against the closed-form covariance,
/// entrywise to 1e−6 relative, with purity drift below 1e−9, in under 1 s.
///
/// Purity is read from each engine's own invariant: the mode Wronskian
/// everywhere, and the transport determinant while `γ11γ22 ≲ 10³` (beyond
/// that the entries cannot resolve `det γ − 1` at 1e−9).
pub fn closed_engines() -> CheckResult {
    let start = Instant::now();
    let f = de_sitter_frequency();
    let opts = OdeOptions::with_tolerances(1e-12, 1e-14);
    let e = |e: gausslind::error::Error| e.to_string();
    let transport = evolve_closed_transport(&f, -100.0, -0.01, &de_sitter_covariance_closed(100.0), &opts).map_err(e)?;
    let modes = integrate_mode_function(&f, -0.01, &de_sitter_mode(100.0), &opts).map_err(e)?;
    let (r0, phi0) = de_sitter_squeezing(100.0);
    let ic = SqueezingState::new(r0, phi0, 1.0).map_err(e)?;
    let squeezing = evolve_closed_squeezing(&f, -100.0, -0.01, &ic, &opts).map_err(e)?;
    let (mut worst, mut drift) = (0.0_f64, 0.0_f64);
    for i in 0..=40 {
        let x = 100.0 * 10f64.powf(-0.1 * i as f64);
        let exact = de_sitter_covariance_closed(x);
        let m = modes.eval(-x).map_err(e)?;
        let engines = [
            ("transport", transport.eval(-x).map_err(e)?),
            ("modes", covariance_from_bogoliubov(&bogoliubov_from_mode(&m, 1.0), &ParticleStatistics::VACUUM)),
            ("squeezing", covariance_from_squeezing(&squeezing.eval(-x).map_err(e)?)),
        ];
        for (name, b) in engines {
            let w = worst_entry(&b, &exact);
            if !(w < 1e-6) {
                return Err(format!("{name} engine off by {w:e} at x = {x}"));
            }
            worst = worst.max(w);
        }
        let norm = m.wronskian().im / 2.0;
        drift = drift.max((1.0 / (norm * norm) - 1.0).abs());
        if x >= 1.0 {
            drift = drift.max((1.0 / transport.eval(-x).map_err(e)?.det() - 1.0).abs());
        }
    }
    if !(drift < 1e-9) {
        return Err(format!("purity drift {drift:e}"));
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 1.0 {
        return Err(format!("took {elapsed:.2} s (limit 1 s)"));
    }
    Ok(format!("max entry error {worst:.1e}, purity drift {drift:.1e}, {elapsed:.2} s"))
}

/// `f(x) = u log₂u − w log₂w` (`u, w = (x ± 1)/2`) in the cancellation-free
/// form `log₂u + w log₂(1 + 1/w)`.
pub fn entropy_f_reference(x: f64) -> f64 {
    let u = 0.5 * (x + 1.0);
    let w = 0.5 * (x - 1.0);
    if w <= 0.0 {
        return 0.0;
    }
    u.log2() + w * (1.0 / w).ln_1p() / LN_2
}

/// Zero discord in the reference partition for 1000 random valid states,
/// and the pure-state closed form `f(√(1 + sinh²2r sin²2θ))` to 1e−10 over
/// `r ∈ [0, 30]`.
pub fn discord_baseline() -> CheckResult {
    let mut rng = StdRng::seed_from_u64(0x5eed_d15c);
    let mut states = 0;
    let mut worst_zero: f64 = 0.0;
    while states < 1000 {
        let r = rng.random_range(0.0..8.0);
        let phi = rng.random_range(-FRAC_PI_2..FRAC_PI_2);
        let lambda = 10f64.powf(rng.random_range(0.0..3.0));
        let b = covariance_from_squeezing(&SqueezingState::new(r, phi, lambda).map_err(|e| e.to_string())?);
        if b.validate().is_err() {
            continue;
        }
        states += 1;
        let d = discord(&b, 0.0).map_err(|e| e.to_string())?.discord;
        worst_zero = worst_zero.max(d.abs());
        if !(d.abs() < 1e-12) {
            return Err(format!("discord {d:e} at θ = 0 for r = {r}, φ = {phi}, λ = {lambda}"));
        }
    }
    let mut worst_pure: f64 = 0.0;
    for i in 0..=600 {
        let r = 0.05 * i as f64;
        for theta in [-FRAC_PI_4, 0.1, 0.7, 1.5] {
            let s2 = (2.0 * theta).sin();
            let expected = entropy_f_reference((1.0 + (2.0 * r).sinh().powi(2) * s2 * s2).sqrt());
            for got in [discord_pure(r, theta), discord_squeezed(r, 1.0, theta).map_err(|e| e.to_string())?.discord] {
                let err = (got - expected).abs() / expected.max(1.0);
                worst_pure = worst_pure.max(err);
                if !(err <= 1e-10) {
                    return Err(format!("pure-state discord {got} vs {expected} at r = {r}, θ = {theta}"));
                }
            }
        }
    }
    Ok(format!("max |D(0)| {worst_zero:.1e} over 1000 states; pure-state error {worst_pure:.1e}"))
}

/// The coefficient relations of the super-Hubble expansion for
/// `p ∈ {0.5, 2.1, 3.7, 6.1, 9.3}` to 1e−12.
pub fn coefficient_identities() -> CheckResult {
    let mut worst: f64 = 0.0;
    for p in [0.5, 2.1, 3.7, 6.1, 9.3] {
        let par = CosmoParams::at_pivot(1.0, p, 0.1).map_err(|e| e.to_string())?;
        let c = asymptotic_coefficients(&par).map_err(|e| e.to_string())?;
        let pairs = [
            ("B22 = B11", c.b22, c.b11),
            ("C11 = B11", c.c11, c.b11),
            ("B12 = B11", c.b12, c.b11),
            ("E22 = B11", c.e22, c.b11),
            ("C12 = -D11/2", c.c12, -c.d11 / 2.0),
            ("E12 = -2F11", c.e12, -2.0 * c.f11),
            ("G22 = 4F11", c.g22, 4.0 * c.f11),
            ("D22 = -2D11", c.d22, -2.0 * c.d11),
            ("(4-p)A22 = 2(6-p)A11 + x*^(p-3)", (4.0 - p) * c.a22, 2.0 * (6.0 - p) * c.a11 + par.x_star_factor()),
        ];
        for (name, a, b) in pairs {
            let err = (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
            worst = worst.max(err);
            if !(err <= 1e-12) {
                return Err(format!("{name} fails at p = {p}: {a} vs {b}"));
            }
        }
    }
    Ok(format!("max relative violation {worst:.1e}"))
}

/// `Γ(a, z)` against ray quadrature for non-integer `a ∈ [−10, 10]` and
/// `|z| ∈ [1e−3, 1e4]` (including both imaginary half-axes) to 1e−12, and
/// the recurrence `Γ(a+1, z) = aΓ(a, z) + z^a e^{−z}` to 1e−11.
///
/// Where `Γ(a, z)` lies below the smallest normal double the library must
/// underflow to zero instead.
pub fn incomplete_gamma() -> CheckResult {
    let orders: Vec<f64> = (0..40).map(|i| -9.7 + 0.493 * i as f64).collect();
    let mut args = Vec::new();
    for j in 0..15 {
        let r = 10f64.powf(-3.0 + 7.0 * j as f64 / 14.0);
        for arg in [-FRAC_PI_2, -PI / 3.0, 0.0, PI / 5.0, FRAC_PI_2] {
            args.push(Complex64::from_polar(r, arg));
        }
    }
    let (mut worst, mut worst_rec, mut compared) = (0.0_f64, 0.0_f64, 0);
    for &a in &orders {
        for &z in &args {
            let got = upper_incomplete_gamma(a, z).map_err(|e| format!("a = {a}, z = {z}: {e}"))?;
            let scaled = incomplete_gamma_ray_scaled(a, z);
            if scaled.norm().ln() - z.re < f64::MIN_POSITIVE.ln() {
                if got.norm() > 1e-290 {
                    return Err(format!("a = {a}, z = {z}: expected underflow, got {got}"));
                }
                continue;
            }
            let oracle = scaled * (-z).exp();
            let err = (got - oracle).norm() / oracle.norm();
            if !(err <= 1e-12) {
                return Err(format!("a = {a}, z = {z}: {got} vs quadrature {oracle} (rel {err:e})"));
            }
            worst = worst.max(err);
            compared += 1;
            let next = upper_incomplete_gamma(a + 1.0, z).map_err(|e| e.to_string())?;
            let tail = (a * z.ln() - z).exp();
            let res = (next - (got * a + tail)).norm() / next.norm().max(tail.norm());
            if !(res <= 1e-11) {
                return Err(format!("recurrence residual {res:e} at a = {a}, z = {z}"));
            }
            worst_rec = worst_rec.max(res);
        }
    }
    Ok(format!("{compared} points, max error {worst:.1e}, max recurrence residual {worst_rec:.1e}"))
}
