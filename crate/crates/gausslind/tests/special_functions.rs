//! Incomplete gamma and oscillatory moment integrals against ray quadrature.

use gausslind::error::Error;
use gausslind::special_functions::{a_alpha, cal_a, gamma, upper_incomplete_gamma};
use num_complex::Complex64;
use oracles::{incomplete_gamma_ray_scaled, integrate_panels, uniform_breaks};
use std::f64::consts::PI;

/// Non-integer orders spanning [−10, 10].
fn orders() -> Vec<f64> {
    (0..40).map(|i| -9.7 + 0.493 * i as f64).collect()
}

/// Arguments with |z| log-spaced over [1e−3, 1e4] on rays in the right half
/// plane, including both imaginary half-axes.
fn arguments() -> Vec<Complex64> {
    let mut zs = Vec::new();
    for j in 0..15 {
        let r = 10f64.powf(-3.0 + 7.0 * j as f64 / 14.0);
        for &arg in &[-PI / 2.0, -PI / 3.0, 0.0, PI / 5.0, PI / 2.0] {
            zs.push(Complex64::from_polar(r, arg));
        }
    }
    zs
}

/// Where the true value lies below the smallest normal double the library
/// must underflow to (near) zero; everywhere else it must agree with the
/// oracle to 1e−12 relative.
#[test]
fn matches_ray_quadrature() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for a in orders() {
        for z in arguments() {
            let scaled = incomplete_gamma_ray_scaled(a, z);
            let log_mag = scaled.norm().ln() - z.re;
            let got = upper_incomplete_gamma(a, z).unwrap();
            if log_mag < f64::MIN_POSITIVE.ln() {
                if got.norm() > 1e-290 {
                    failures.push(format!("a = {a}, z = {z}: expected underflow, got {got}"));
                }
                continue;
            }
            let oracle = scaled * (-z).exp();
            let rel = (got - oracle).norm() / oracle.norm();
            if !rel.is_finite() || rel > 1e-12 {
                failures.push(format!("a = {a}, z = {z}: got {got}, oracle {oracle}, rel {rel:e}"));
            }
            worst = worst.max(rel);
        }
    }
    assert!(failures.is_empty(), "{} failures, e.g. {}", failures.len(), failures[0]);
    assert!(worst < 1e-12);
}

/// `Γ(a+1, z) = aΓ(a, z) + z^a e^{−z}`.
#[test]
fn recurrence_residual() {
    for a in orders() {
        for z in arguments() {
            if z.re > 600.0 {
                continue;
            }
            let lhs = upper_incomplete_gamma(a + 1.0, z).unwrap();
            let tail = (a * z.ln() - z).exp();
            let rhs = upper_incomplete_gamma(a, z).unwrap() * a + tail;
            let scale = lhs.norm().max(tail.norm());
            assert!((lhs - rhs).norm() <= 1e-11 * scale, "a = {a}, z = {z}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn zero_argument_and_branch_cut() {
    let g = upper_incomplete_gamma(2.5, Complex64::new(0.0, 0.0)).unwrap();
    assert!((g.re - gamma(2.5)).abs() < 1e-14);
    assert!(matches!(
        upper_incomplete_gamma(-1.5, Complex64::new(0.0, 0.0)),
        Err(Error::PoleOrder { .. })
    ));
    assert!(matches!(
        upper_incomplete_gamma(0.5, Complex64::new(-2.0, 0.0)),
        Err(Error::BranchCut { .. })
    ));
}

/// `A_α(x) = ∫_{1/ℓ}^{x} e^{2ix′} x′^α dx′` by direct quadrature.
#[test]
fn moment_integral_matches_quadrature() {
    let ell = 0.1;
    for &alpha in &[-4.1, -2.9, -0.5, 0.0, 1.3, 3.9] {
        for &x in &[0.05, 0.5, 3.0] {
            let breaks = uniform_breaks(1.0 / ell, x, 0.05);
            let f = |t: f64| Complex64::from_polar(t.powf(alpha), 2.0 * t);
            // Geometric refinement near small x where x^α is steep.
            let mut b = breaks;
            if x < 1.0 {
                let mut extra = Vec::new();
                let mut t = 1.0;
                while t > x * 1.05 {
                    extra.push(t);
                    t /= 1.05;
                }
                b.retain(|&v| v >= 1.0);
                b.extend(extra.into_iter().skip(1));
                b.push(x);
            }
            let oracle = integrate_panels(f, &b, 20);
            let got = a_alpha(alpha, x, ell).unwrap();
            assert!(
                (got - oracle).norm() <= 1e-10 * oracle.norm().max(1.0),
                "alpha = {alpha}, x = {x}: {got} vs {oracle}"
            );
        }
    }
}

/// `𝒜_α` is the `x → 0` limit of `A_α` once the singular power is removed:
/// for `1+α > 0`, `A_α(x) → 𝒜_α` directly.
#[test]
fn expansion_constant_is_small_x_limit() {
    let ell = 0.1;
    for &alpha in &[0.3, 1.7, 4.2] {
        let c = cal_a(alpha, ell).unwrap();
        let a = a_alpha(alpha, 1e-6, ell).unwrap();
        assert!((a - c).norm() < 1e-6 * c.norm().max(1.0), "alpha = {alpha}");
    }
}
