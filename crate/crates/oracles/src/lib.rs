//! Independent reference implementations used by the test suites.
//!
//! Nothing here shares code with the production crate: quadrature is a
//! fixed-order composite Gauss–Legendre rule with nodes computed by Newton
//! iteration, integrators are classical fixed-step Runge–Kutta, and the de
//! Sitter mode functions are re-derived in closed form. The point is to have
//! a second, structurally different route to every number the library
//! reports.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre quadrature of a complex integrand over the
/// consecutive panels defined by `breaks`.
pub fn integrate_panels<F: Fn(f64) -> Complex64>(f: F, breaks: &[f64], n: usize) -> Complex64 {
    let (x, w) = gauss_legendre(n);
    let mut total = Complex64::new(0.0, 0.0);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
        let mut s = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            s += f(mid + half * xi) * *wi;
        }
        total += s * half;
    }
    total
}

/// Real-valued convenience wrapper of [`integrate_panels`].
pub fn integrate_panels_real<F: Fn(f64) -> f64>(f: F, breaks: &[f64], n: usize) -> f64 {
    integrate_panels(|t| Complex64::new(f(t), 0.0), breaks, n).re
}

/// Uniform subdivision of `[a, b]` into panels no wider than `width`.
pub fn uniform_breaks(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = (((b - a).abs() / width).ceil() as usize).max(1);
    (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `Γ(a, z)` by quadrature along the ray `t ↦ z + t`, `t ∈ [0, ∞)`:
/// `Γ(a,z) = e^{−z} ∫₀^∞ (z+t)^{a−1} e^{−t} dt`.
///
/// Panels grow geometrically from `|z|/64` up to 1 to resolve the endpoint
/// behaviour for small `|z|`, then have unit width out to `t = 160`.
pub fn incomplete_gamma_ray(a: f64, z: Complex64) -> Complex64 {
    incomplete_gamma_ray_scaled(a, z) * (-z).exp()
}

/// `e^{z} Γ(a, z)` by the same ray quadrature, representable even where
/// `Γ(a, z)` itself underflows.
pub fn incomplete_gamma_ray_scaled(a: f64, z: Complex64) -> Complex64 {
    let r = z.norm();
    let mut breaks = vec![0.0];
    let mut s = (r / 64.0).min(0.5);
    while s < 1.0 {
        breaks.push(s);
        s *= 1.5;
    }
    let mut t = 1.0;
    while t <= 160.0 {
        breaks.push(t);
        t += 1.0;
    }
    let lnz = z;
    let integrand = |t: f64| {
        let w = lnz + t;
        ((a - 1.0) * w.ln() - t).exp()
    };
    integrate_panels(integrand, &breaks, 40)
}

/// Closed-form de Sitter mode function `v(x)` and `dv/dx` with `x = −kη`,
/// `v = (1 − i/(kη)) e^{−ikη} = (1 + i/x) e^{ix}`.
pub fn de_sitter_v(x: f64) -> (Complex64, Complex64) {
    let i = Complex64::new(0.0, 1.0);
    let e = (i * x).exp();
    let v = (1.0 + i / x) * e;
    // d/dx [(1 + i/x) e^{ix}] = (−i/x²) e^{ix} + i(1 + i/x) e^{ix}
    let dv = (-i / (x * x) + i * (1.0 + i / x)) * e;
    (v, dv)
}

/// Brute-force evaluation of the environment corrections to the de Sitter
/// covariance in the variable `x = −kη`.
///
/// The Green's function of `y″ + (1 − 2/x²) y = 0` is
/// `G(x, x′) = Im[v(x) v*(x′)]`, so a source `−S` in the momentum equation
/// produces
///
/// * `Δγ11(x) = ∫_x^{x_in} S(x′) G(x,x′)² dx′`,
/// * `Δγ12(x) = −∫ S G(x,x′) ∂ₓG(x,x′) dx′`,
/// * `Δγ22(x) = ∫ S (∂ₓG)² dx′`,
///
/// where the sign of `Δγ12` follows from `γ12 = −½ dγ11/dx`. Integration is
/// composite Gauss–Legendre with panels no wider than a quarter period and
/// additionally refined geometrically towards small `x′`.
pub fn de_sitter_green_corrections<S: Fn(f64) -> f64>(
    x: f64,
    x_in: f64,
    source: S,
) -> (f64, f64, f64) {
    let (vx, dvx) = de_sitter_v(x);
    let mut breaks = Vec::new();
    let mut t = x;
    while t < x_in.min(1.0) {
        breaks.push(t);
        t *= 1.25;
    }
    let start = breaks.last().copied().unwrap_or(x).max(x);
    if breaks.is_empty() {
        breaks.push(x);
    }
    let tail = uniform_breaks(start, x_in, PI / 8.0);
    breaks.extend_from_slice(&tail[1..]);
    let g = |xp: f64| {
        let (vp, _) = de_sitter_v(xp);
        let gg = (vx * vp.conj()).im;
        let dg = (dvx * vp.conj()).im;
        (gg, dg)
    };
    let i11 = integrate_panels_real(|xp| { let (a, _) = g(xp); source(xp) * a * a }, &breaks, 30);
    let i12 = integrate_panels_real(|xp| { let (a, b) = g(xp); -source(xp) * a * b }, &breaks, 30);
    let i22 = integrate_panels_real(|xp| { let (_, b) = g(xp); source(xp) * b * b }, &breaks, 30);
    (i11, i12, i22)
}

/// Classical fixed-step fourth-order Runge–Kutta for `y′ = f(t, y)`.
pub fn rk4<F: Fn(f64, &[f64]) -> Vec<f64>>(f: F, t0: f64, t1: f64, y0: &[f64], steps: usize) -> Vec<f64> {
    let h = (t1 - t0) / steps as f64;
    let mut y = y0.to_vec();
    let mut t = t0;
    let n = y.len();
    for _ in 0..steps {
        let k1 = f(t, &y);
        let y2: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k1[i]).collect();
        let k2 = f(t + 0.5 * h, &y2);
        let y3: Vec<f64> = (0..n).map(|i| y[i] + 0.5 * h * k2[i]).collect();
        let k3 = f(t + 0.5 * h, &y3);
        let y4: Vec<f64> = (0..n).map(|i| y[i] + h * k3[i]).collect();
        let k4 = f(t + h, &y4);
        for i in 0..n {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}

/// Gaussian discord from the two symplectic eigenvalues by direct
/// evaluation of the textbook expression, without any asymptotic branches.
pub fn discord_direct(sigma_theta: f64, sigma_zero: f64) -> f64 {
    let f = |x: f64| {
        if x <= 1.0 {
            0.0
        } else {
            let p = 0.5 * (x + 1.0);
            let m = 0.5 * (x - 1.0);
            p * p.log2() - m * m.log2()
        }
    };
    let q = sigma_zero * sigma_zero;
    f(sigma_theta) - 2.0 * f(sigma_zero) + f((sigma_theta + q) / (sigma_theta + 1.0))
}
