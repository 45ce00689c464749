//! Gaussian quantum discord, mutual information and classical correlations
//! of homogeneous two-mode states.
//!
//! With `σ(θ)` the symplectic eigenvalue of a reduced one-mode block and
//! `σ(0)` that of the full state,
//!
//! ```text
//! 𝒟(θ) = f[σ(θ)] − 2 f[σ(0)] + f[(σ(θ) + σ(0)²)/(σ(θ) + 1)]
//! f(x) = ((x+1)/2) log₂((x+1)/2) − ((x−1)/2) log₂((x−1)/2)
//! ```
//!
//! Strongly squeezed states have `σ` far beyond the range of `f64`, so the
//! core evaluates everything from `ln σ(θ)` and `ln σ(0)`: `f` is computed
//! from `ln(x − 1)`, which stays accurate both at `x → 1` and at
//! `x ~ e^{400}`.

use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::symplectic_core::{covariance_blocks_in_partition, det2, CovarianceBlock, HEISENBERG_SLACK};

/// Beyond this argument `f` is replaced by its large-`x` expansion.
const LARGE_ARGUMENT: f64 = 1e8;

/// Which evaluation produced a [`DiscordResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordRegime {
    /// Full closed-form expression.
    Exact,
    /// `e^{2r}|sin 2θ| ≫ √λ`: `𝒟 ≈ 2r/ln 2`.
    LargeSqueezingHigh,
    /// `e^{2r}|sin 2θ| ≪ √λ`: `𝒟 ≈ λ^{−1/2} e^{2r} |sin 2θ|/(2 ln 2)`.
    LargeSqueezingLow,
}

/// Discord together with the symplectic eigenvalues it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    /// Quantum discord in bits.
    pub discord: f64,
    /// `σ(θ)`; `+∞` if it overflows (see `ln_sigma_theta`).
    pub sigma_theta: f64,
    /// `σ(0)`; `+∞` if it overflows (see `ln_sigma_zero`).
    pub sigma_zero: f64,
    /// `ln σ(θ)`.
    pub ln_sigma_theta: f64,
    /// `ln σ(0)`.
    pub ln_sigma_zero: f64,
    /// Evaluation path.
    pub regime: DiscordRegime,
}

/// `ln(eᵃ + eᵇ)` without overflow.
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln(eᴸ − 1)` for `L ≥ 0` (`−∞` at `L = 0`).
pub fn ln_expm1(l: f64) -> f64 {
    if l <= 0.0 {
        f64::NEG_INFINITY
    } else if l < 1.0 {
        l.exp_m1().ln()
    } else {
        l + (-(-l).exp()).ln_1p()
    }
}

/// `f(x)` from `ln(x − 1)`; `−∞` encodes `x = 1`.
fn f_from_ln_xm1(ln_xm1: f64) -> f64 {
    if ln_xm1 == f64::NEG_INFINITY {
        return 0.0;
    }
    if ln_xm1 > LARGE_ARGUMENT.ln() {
        // f(x) = log₂(x/2) + 1/ln 2 − 1/(6 ln 2 · x²) + O(x⁻⁴)
        let ln_x = ln_xm1 + (-ln_xm1).exp().ln_1p();
        let inv_x2 = (-2.0 * ln_x).exp();
        return (ln_x - LN_2 + 1.0 - inv_x2 / 6.0) / LN_2;
    }
    // (1+m) ln(1+m) − m ln m = ln(1+m) + m ln(1 + 1/m), free of cancellation
    let m = 0.5 * ln_xm1.exp();
    (m.ln_1p() + m * m.recip().ln_1p()) / LN_2
}

/// The entropy kernel `f(x)` for `x ≥ 1`.
///
/// Arguments in `[1 − 1e−9, 1)` are clamped to 1; beyond `1e8` the
/// expansion `log₂(x/2) + 1/ln 2 − 1/(6 ln 2 x²)` is used.
///
/// # Errors
///
/// [`Error::Domain`] for `x < 1 − 1e−9` or NaN.
///
/// # Example
///
/// ```
/// use gausslind::discord_measures::entropy_kernel_f;
/// assert_eq!(entropy_kernel_f(1.0).unwrap(), 0.0);
/// assert!((entropy_kernel_f(3.0).unwrap() - 2.0).abs() < 1e-15);
/// ```
pub fn entropy_kernel_f(x: f64) -> Result<f64> {
    if x.is_nan() || x < 1.0 - HEISENBERG_SLACK {
        return Err(Error::Domain(format!("entropy kernel needs x ≥ 1, got {x}")));
    }
    if x == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    let xm1 = (x - 1.0).max(0.0);
    Ok(f_from_ln_xm1(if xm1 == 0.0 { f64::NEG_INFINITY } else { xm1.ln() }))
}

/// The three entropy-kernel terms shared by discord, mutual information
/// and classical correlations.
struct KernelTerms {
    f_theta: f64,
    f_zero: f64,
    f_cond: f64,
}

fn kernel_terms(ln_sigma_theta: f64, ln_sigma_zero: f64) -> Result<KernelTerms> {
    if ln_sigma_theta.is_nan() || ln_sigma_zero.is_nan() {
        return Err(Error::Domain("non-finite symplectic eigenvalue".into()));
    }
    let lt = ln_sigma_theta.max(0.0);
    let l0 = ln_sigma_zero.max(0.0);
    if ln_sigma_theta < -0.5 * HEISENBERG_SLACK || ln_sigma_zero < -0.5 * HEISENBERG_SLACK {
        return Err(Error::Domain(format!(
            "symplectic eigenvalues below 1: ln σ(θ) = {ln_sigma_theta}, ln σ(0) = {ln_sigma_zero}"
        )));
    }
    // (σθ + σ0²)/(σθ + 1) − 1 = (σ0² − 1)/(σθ + 1)
    let ln_cond_m1 = ln_expm1(2.0 * l0) - log_add_exp(lt, 0.0);
    Ok(KernelTerms {
        f_theta: f_from_ln_xm1(ln_expm1(lt)),
        f_zero: f_from_ln_xm1(ln_expm1(l0)),
        f_cond: f_from_ln_xm1(ln_cond_m1),
    })
}

/// Discord from `ln σ(θ)` and `ln σ(0)`, the log-domain core shared by all
/// front ends.
///
/// # Errors
///
/// [`Error::Domain`] when an eigenvalue lies below 1 (beyond the clamp) or is NaN.
pub fn discord_from_log_eigenvalues(ln_sigma_theta: f64, ln_sigma_zero: f64) -> Result<DiscordResult> {
    let t = kernel_terms(ln_sigma_theta, ln_sigma_zero)?;
    let discord = (t.f_theta - 2.0 * t.f_zero + t.f_cond).max(0.0);
    Ok(DiscordResult {
        discord,
        sigma_theta: ln_sigma_theta.max(0.0).exp(),
        sigma_zero: ln_sigma_zero.max(0.0).exp(),
        ln_sigma_theta: ln_sigma_theta.max(0.0),
        ln_sigma_zero: ln_sigma_zero.max(0.0),
        regime: DiscordRegime::Exact,
    })
}

/// `(ln σ(θ), ln σ(0))` of a covariance block.
fn log_eigenvalues(b: &CovarianceBlock, theta: f64) -> Result<(f64, f64)> {
    b.validate()?;
    log_eigenvalues_from_invariants(b.clamped_det()?, b.half_trace(), theta)
}

fn log_eigenvalues_from_invariants(det: f64, half_trace: f64, theta: f64) -> Result<(f64, f64)> {
    if !(det >= 1.0 && half_trace >= 1.0 && det.is_finite() && half_trace.is_finite()) {
        return Err(Error::Domain(format!("need det ≥ 1 and tr/2 ≥ 1, got det = {det}, tr/2 = {half_trace}")));
    }
    let (s2, c2) = (2.0 * theta).sin_cos();
    let ln_half_trace = half_trace.ln();
    let ln_zero = 0.5 * det.ln();
    // σ(θ)² = cos²2θ·det + (tr/2)²·sin²2θ, summed in log space
    let a = if c2 == 0.0 { f64::NEG_INFINITY } else { 2.0 * (c2.abs().ln() + ln_zero) };
    let bb = if s2 == 0.0 { f64::NEG_INFINITY } else { 2.0 * (s2.abs().ln() + ln_half_trace) };
    let ln_theta = 0.5 * log_add_exp(a, bb);
    Ok((ln_theta.max(ln_zero), ln_zero))
}

/// Discord from the two partition invariants, `det B` and `(γ11 + γ22)/2`.
///
/// Useful when the determinant is known more accurately than the entries
/// allow (for instance integrated alongside them), since `det` computed from
/// entries of size `e^{2r}` loses about `4r/ln 10` digits.
///
/// # Errors
///
/// [`Error::Domain`] unless `det ≥ 1` and `half_trace ≥ 1` are finite.
pub fn discord_from_invariants(det: f64, half_trace: f64, theta: f64) -> Result<DiscordResult> {
    let (lt, l0) = log_eigenvalues_from_invariants(det, half_trace, theta)?;
    discord_from_log_eigenvalues(lt, l0)
}

/// Quantum discord of a homogeneous state in partition `θ`.
///
/// # Errors
///
/// Block-validation errors and [`Error::Domain`].
///
/// # Example
///
/// ```
/// use gausslind::discord_measures::discord;
/// use gausslind::symplectic_core::CovarianceBlock;
/// let b = CovarianceBlock::new(2.0, 1.0, 1.0).unwrap();
/// assert!(discord(&b, 0.0).unwrap().discord < 1e-12);
/// ```
pub fn discord(b: &CovarianceBlock, theta: f64) -> Result<DiscordResult> {
    let (lt, l0) = log_eigenvalues(b, theta)?;
    discord_from_log_eigenvalues(lt, l0)
}

/// `ln √(1 + sinh²(2r) sin²(2θ))`, stable for any `r`.
fn ln_pure_sigma(r: f64, theta: f64) -> f64 {
    let s = (2.0 * theta).sin().abs();
    if s == 0.0 || r == 0.0 {
        return 0.0;
    }
    // ln sinh 2r
    let ln_sinh = if 2.0 * r < 1.0 { (2.0 * r).sinh().ln() } else { 2.0 * r - LN_2 + (-(-4.0 * r).exp()).ln_1p() };
    0.5 * log_add_exp(0.0, 2.0 * (ln_sinh + s.ln()))
}

/// Discord of a state given by its squeezing parameters, without ever
/// forming the (possibly overflowing) covariance entries:
/// `σ(0) = √λ`, `σ(θ) = √λ·√(1 + sinh²2r·sin²2θ)`.
///
/// # Errors
///
/// [`Error::Domain`] for `λ < 1 − 1e−9`, negative `r` or non-finite input.
pub fn discord_squeezed(r: f64, lambda: f64, theta: f64) -> Result<DiscordResult> {
    if !(r >= 0.0 && r.is_finite() && lambda.is_finite() && theta.is_finite()) || lambda < 1.0 - HEISENBERG_SLACK {
        return Err(Error::Domain(format!("invalid squeezing input r={r}, lambda={lambda}")));
    }
    let l0 = 0.5 * lambda.max(1.0).ln();
    discord_from_log_eigenvalues(l0 + ln_pure_sigma(r, theta), l0)
}

/// Discord of a pure two-mode squeezed state, `f(√(1 + sinh²2r·sin²2θ))`.
///
/// # Example
///
/// ```
/// use gausslind::discord_measures::discord_pure;
/// let d = discord_pure(50.0, std::f64::consts::FRAC_PI_4);
/// assert!((d - 100.0 / std::f64::consts::LN_2).abs() < 1.0);
/// ```
pub fn discord_pure(r: f64, theta: f64) -> f64 {
    let r = r.max(0.0);
    f_from_ln_xm1(ln_expm1(ln_pure_sigma(r, theta)))
}

/// Mutual information `𝓘 = 2f(σ(θ)) − 2f(σ(0))`.
///
/// # Errors
///
/// As [`discord`].
pub fn mutual_information(b: &CovarianceBlock, theta: f64) -> Result<f64> {
    let (lt, l0) = log_eigenvalues(b, theta)?;
    let t = kernel_terms(lt, l0)?;
    Ok(2.0 * t.f_theta - 2.0 * t.f_zero)
}

/// Sign condition under which the Gaussian classical correlation takes the
/// closed form used here,
/// `(1 + det 𝔅) det²ℭ (det 𝔄 + det γ) − (det γ − det 𝔄 det 𝔅)² ≥ 0`,
/// evaluated from the partition blocks. Returns the value of the
/// expression and the magnitude of its two terms.
pub fn classical_info_sign_condition(b: &CovarianceBlock, theta: f64) -> (f64, f64) {
    let blocks = covariance_blocks_in_partition(b, theta);
    let det_a = det2(blocks.a[0][0], blocks.a[0][1], blocks.a[1][0], blocks.a[1][1]);
    let det_b = det2(blocks.b[0][0], blocks.b[0][1], blocks.b[1][0], blocks.b[1][1]);
    let det_c = det2(blocks.c[0][0], blocks.c[0][1], blocks.c[1][0], blocks.c[1][1]);
    let det_g = b.det() * b.det();
    let first = (1.0 + det_b) * det_c * det_c * (det_a + det_g);
    let second = (det_g - det_a * det_b).powi(2);
    (first - second, first.abs() + second.abs())
}

/// Maximal classical correlation `𝓙 = f(σ(θ)) − f((σ(0)² + σ(θ))/(1 + σ(θ)))`.
///
/// The sign condition that makes this closed form valid is verified at
/// runtime (to within round-off of its two terms).
///
/// # Errors
///
/// [`Error::Domain`] if the sign condition fails, plus those of [`discord`].
pub fn max_classical_info_j(b: &CovarianceBlock, theta: f64) -> Result<f64> {
    let (value, scale) = classical_info_sign_condition(b, theta);
    if scale.is_finite() && value < -1e-9 * scale {
        return Err(Error::Domain(format!("classical-correlation sign condition violated ({value:e})")));
    }
    let (lt, l0) = log_eigenvalues(b, theta)?;
    let t = kernel_terms(lt, l0)?;
    Ok(t.f_theta - t.f_cond)
}

/// Large-squeezing approximation of the discord.
///
/// With `ρ = e^{2r}|sin 2θ|/√λ`: for `ρ > 10` returns `2r/ln 2`, for
/// `ρ < 0.1` returns `ρ/(2 ln 2)`, and otherwise (or when `r < 5`, outside
/// the asymptotic regime) falls back to the exact log-domain formula.
///
/// # Errors
///
/// As [`discord_squeezed`].
pub fn discord_asymptotic(r: f64, lambda: f64, theta: f64) -> Result<DiscordResult> {
    let exact = discord_squeezed(r, lambda, theta)?;
    if r < 5.0 {
        return Ok(exact);
    }
    let s = (2.0 * theta).sin().abs();
    let ln_ratio = 2.0 * r + s.ln() - 0.5 * lambda.ln();
    if ln_ratio > 10.0_f64.ln() {
        Ok(DiscordResult { discord: 2.0 * r / LN_2, regime: DiscordRegime::LargeSqueezingHigh, ..exact })
    } else if ln_ratio < 0.1_f64.ln() {
        Ok(DiscordResult { discord: ln_ratio.exp() / (2.0 * LN_2), regime: DiscordRegime::LargeSqueezingLow, ..exact })
    } else {
        Ok(exact)
    }
}
