//! Environment-free evolution of a parametric oscillator
//! `H = ½(p² + ω²(k, τ) v²)` for one Fourier mode pair.
//!
//! Three independent engines produce the covariance block:
//!
//! * the **mode-function** engine integrates `v″ + ω² v = 0` and maps
//!   `(v, v′)` to Bogoliubov coefficients `u = (v + iv′/k)/2`,
//!   `w = ((v − iv′/k)/2)*`;
//! * the **transport** engine integrates
//!   `γ11′ = 2kγ12`, `γ12′ = kγ22 − (ω²/k)γ11`, `γ22′ = −2(ω²/k)γ12`;
//! * the **squeezing** engine integrates the `(r, φ, θ_k)` equations
//!   `r′ = (k/2)(ω²/k² − 1) sin 2φ`,
//!   `φ′ = −(k/2)(ω²/k² + 1) + (k/2)(ω²/k² − 1) cos 2φ / tanh 2r`,
//!   `θ_k′ = (k/2)(ω²/k² + 1) − (k/2)(ω²/k² − 1) cos 2φ tanh r`.
//!
//! Primes denote derivatives with respect to the time variable `τ` of the
//! supplied [`FrequencyFunction`].

use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Trajectory};
use crate::symplectic_core::{CovarianceBlock, ParticleStatistics, SqueezingState};

/// Squeezing amplitudes at or below this value are rejected by the
/// squeezing engine (the `1/tanh 2r` term is singular).
pub const MIN_ENGINE_SQUEEZING: f64 = 1e-6;

/// `ω²(k, τ)` for a fixed wavenumber `k`.
#[derive(Clone)]
pub struct FrequencyFunction {
    k: f64,
    omega_sq: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for FrequencyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FrequencyFunction").field("k", &self.k).finish_non_exhaustive()
    }
}

impl FrequencyFunction {
    /// Wraps a callable `ω²(k, τ)`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] unless `k` is finite and positive.
    pub fn new<F>(k: f64, omega_sq: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self { k, omega_sq: Arc::new(omega_sq) })
    }

    /// Constant frequency `ω² = ω0²`.
    ///
    /// # Errors
    ///
    /// As [`FrequencyFunction::new`].
    pub fn constant(k: f64, omega0_sq: f64) -> Result<Self> {
        Self::new(k, move |_, _| omega0_sq)
    }

    /// The wavenumber.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// `ω²(k, τ)`.
    pub fn omega_sq(&self, t: f64) -> f64 {
        (self.omega_sq)(self.k, t)
    }
}

/// Mode function `v` and its time derivative at time `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeState {
    /// `v_k`.
    pub v: Complex64,
    /// `dv_k/dτ`.
    pub dv: Complex64,
    /// `τ`.
    pub time: f64,
}

impl ModeState {
    /// Vacuum initial data `(1, −ik)` at `time`.
    pub fn vacuum(k: f64, time: f64) -> Self {
        Self { v: Complex64::new(1.0, 0.0), dv: Complex64::new(0.0, -k), time }
    }

    /// Wronskian `W = v v*′ − v* v′` (equal to `2ik` for normalised modes).
    pub fn wronskian(&self) -> Complex64 {
        self.v * self.dv.conj() - self.v.conj() * self.dv
    }
}

/// Bogoliubov coefficients `(u, w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovPair {
    /// `u_k`.
    pub u: Complex64,
    /// `w_k`.
    pub w: Complex64,
}

impl BogoliubovPair {
    /// `|u|² − |w|²`, equal to 1 for a valid pair.
    pub fn normalization(&self) -> f64 {
        self.u.norm_sqr() - self.w.norm_sqr()
    }
}

/// Dense mode-function trajectory.
#[derive(Debug, Clone)]
pub struct ModeTrajectory {
    k: f64,
    inner: Trajectory,
}

impl ModeTrajectory {
    /// Mode state at `t` (dense output).
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn eval(&self, t: f64) -> Result<ModeState> {
        let y = self.inner.eval(t)?;
        Ok(state_from_vec(&y, t))
    }

    /// Mode states at the integrator's accepted steps.
    pub fn steps(&self) -> impl Iterator<Item = ModeState> + '_ {
        self.inner.times.iter().zip(&self.inner.states).map(|(t, y)| state_from_vec(y, *t))
    }

    /// The wavenumber the trajectory was computed for.
    pub fn k(&self) -> f64 {
        self.k
    }

    /// First and last times.
    pub fn span(&self) -> (f64, f64) {
        (self.inner.t_start(), self.inner.t_end())
    }

    /// Number of right-hand-side evaluations.
    pub fn evaluations(&self) -> usize {
        self.inner.evaluations
    }
}

fn state_from_vec(y: &[f64], t: f64) -> ModeState {
    ModeState { v: Complex64::new(y[0], y[1]), dv: Complex64::new(y[2], y[3]), time: t }
}

/// Integrates `v″ + ω²(k, τ) v = 0` from `ic.time` to `t1` (either direction).
///
/// # Errors
///
/// [`Error::StepFailure`] if the tolerance cannot be met,
/// [`Error::NonFinite`] if `ω²` blows up.
pub fn integrate_mode_function(freq: &FrequencyFunction, t1: f64, ic: &ModeState, opts: &OdeOptions) -> Result<ModeTrajectory> {
    let y0 = [ic.v.re, ic.v.im, ic.dv.re, ic.dv.im];
    let inner = ode::integrate(
        |t, y, dy| {
            let w2 = freq.omega_sq(t);
            dy[0] = y[2];
            dy[1] = y[3];
            dy[2] = -w2 * y[0];
            dy[3] = -w2 * y[1];
        },
        ic.time,
        t1,
        &y0,
        opts,
    )?;
    Ok(ModeTrajectory { k: freq.k(), inner })
}

/// Bogoliubov coefficients of a mode state: `u + w* = v`, `u − w* = iv′/k`.
pub fn bogoliubov_from_mode(m: &ModeState, k: f64) -> BogoliubovPair {
    let i = Complex64::new(0.0, 1.0);
    let plus = m.v;
    let minus = i * m.dv / k;
    BogoliubovPair { u: 0.5 * (plus + minus), w: (0.5 * (plus - minus)).conj() }
}

/// Covariance block evolved from initial particle statistics `(𝒩, 𝒞)` by
/// a Bogoliubov pair:
///
/// * `γ11 = (2𝒩+1)|u+w*|² + 2 Re[(u+w*)² 𝒞]`
/// * `γ22 = (2𝒩+1)|u−w*|² − 2 Re[(u−w*)² 𝒞]`
/// * `γ12 = 2(2𝒩+1) Im(uw) − 2 Im[(u*² − w²) 𝒞*]`
pub fn covariance_from_bogoliubov(p: &BogoliubovPair, init: &ParticleStatistics) -> CovarianceBlock {
    let n2 = 2.0 * init.n + 1.0;
    let plus = p.u + p.w.conj();
    let minus = p.u - p.w.conj();
    CovarianceBlock {
        g11: n2 * plus.norm_sqr() + 2.0 * (plus * plus * init.c).re,
        g12: 2.0 * n2 * (p.u * p.w).im - 2.0 * ((p.u.conj() * p.u.conj() - p.w * p.w) * init.c.conj()).im,
        g22: n2 * minus.norm_sqr() - 2.0 * (minus * minus * init.c).re,
    }
}

/// Time derivative of a covariance block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockRate {
    /// `dγ11/dτ`.
    pub d11: f64,
    /// `dγ12/dτ`.
    pub d12: f64,
    /// `dγ22/dτ`.
    pub d22: f64,
}

impl BlockRate {
    /// Rate of change of `det B` implied by this rate.
    pub fn det_rate(&self, b: &CovarianceBlock) -> f64 {
        self.d11 * b.g22 + b.g11 * self.d22 - 2.0 * b.g12 * self.d12
    }
}

/// Closed transport equations at time `t`.
pub fn transport_rhs_closed(b: &CovarianceBlock, freq: &FrequencyFunction, t: f64) -> BlockRate {
    let k = freq.k();
    let w = freq.omega_sq(t) / k;
    BlockRate { d11: 2.0 * k * b.g12, d12: k * b.g22 - w * b.g11, d22: -2.0 * w * b.g12 }
}

/// Time derivatives of the squeezing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingRate {
    /// `dr/dτ`.
    pub dr: f64,
    /// `dφ/dτ`.
    pub dphi: f64,
    /// `dθ_k/dτ`.
    pub dtheta: f64,
}

/// Closed squeezing-parameter equations at time `t`.
///
/// # Errors
///
/// [`Error::DegenerateSqueezing`] when `r ≤ 1e−6`.
pub fn squeezing_rhs_closed(r: f64, phi: f64, freq: &FrequencyFunction, t: f64) -> Result<SqueezingRate> {
    if !(r > MIN_ENGINE_SQUEEZING) {
        return Err(Error::DegenerateSqueezing { r });
    }
    let k = freq.k();
    let ratio = freq.omega_sq(t) / (k * k);
    let (s2, c2) = (2.0 * phi).sin_cos();
    let plus = 0.5 * k * (ratio + 1.0);
    let minus = 0.5 * k * (ratio - 1.0);
    Ok(SqueezingRate {
        dr: minus * s2,
        dphi: -plus + minus * c2 / (2.0 * r).tanh(),
        dtheta: plus - minus * c2 * r.tanh(),
    })
}

/// Dense covariance trajectory from the transport engine.
#[derive(Debug, Clone)]
pub struct CovarianceTrajectory {
    inner: Trajectory,
}

impl CovarianceTrajectory {
    pub(crate) fn from_inner(inner: Trajectory) -> Self {
        Self { inner }
    }

    /// Covariance block at `t` (dense output).
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn eval(&self, t: f64) -> Result<CovarianceBlock> {
        let y = self.inner.eval(t)?;
        Ok(CovarianceBlock { g11: y[0], g12: y[1], g22: y[2] })
    }

    /// Full dense state at `t` (includes auxiliary components such as the
    /// separately integrated determinant of the open engine).
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn eval_state(&self, t: f64) -> Result<Vec<f64>> {
        self.inner.eval(t)
    }

    /// Final covariance block.
    pub fn last(&self) -> CovarianceBlock {
        let y = self.inner.last();
        CovarianceBlock { g11: y[0], g12: y[1], g22: y[2] }
    }

    /// Accepted step times and states.
    pub fn steps(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.inner.times.iter().copied().zip(self.inner.states.iter().map(Vec::as_slice))
    }

    /// First and last times.
    pub fn span(&self) -> (f64, f64) {
        (self.inner.t_start(), self.inner.t_end())
    }
}

/// Transport engine: integrates the closed covariance equations from `t0`
/// to `t1` starting from `ic`.
///
/// # Errors
///
/// Integrator errors.
pub fn evolve_closed_transport(
    freq: &FrequencyFunction,
    t0: f64,
    t1: f64,
    ic: &CovarianceBlock,
    opts: &OdeOptions,
) -> Result<CovarianceTrajectory> {
    let inner = ode::integrate(
        |t, y, dy| {
            let rate = transport_rhs_closed(&CovarianceBlock { g11: y[0], g12: y[1], g22: y[2] }, freq, t);
            dy[0] = rate.d11;
            dy[1] = rate.d12;
            dy[2] = rate.d22;
        },
        t0,
        t1,
        &[ic.g11, ic.g12, ic.g22],
        opts,
    )?;
    Ok(CovarianceTrajectory { inner })
}

/// Dense squeezing-parameter trajectory.
#[derive(Debug, Clone)]
pub struct SqueezingTrajectory {
    inner: Trajectory,
    lambda: f64,
}

impl SqueezingTrajectory {
    /// Squeezing state at `t`, including `θ_k`.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn eval(&self, t: f64) -> Result<SqueezingState> {
        let y = self.inner.eval(t)?;
        Ok(SqueezingState { r: y[0], phi: y[1], lambda: self.lambda, theta_rot: Some(y[2]) })
    }

    /// Final state.
    pub fn last(&self) -> SqueezingState {
        let y = self.inner.last();
        SqueezingState { r: y[0], phi: y[1], lambda: self.lambda, theta_rot: Some(y[2]) }
    }
}

/// Squeezing engine: integrates `(r, φ, θ_k)` from `t0` to `t1`. The area
/// parameter `λ` is constant in closed evolution.
///
/// # Errors
///
/// [`Error::DegenerateSqueezing`] if `r` starts or falls below `1e−6`
/// (callers should hand off to the transport engine), plus integrator errors.
pub fn evolve_closed_squeezing(
    freq: &FrequencyFunction,
    t0: f64,
    t1: f64,
    ic: &SqueezingState,
    opts: &OdeOptions,
) -> Result<SqueezingTrajectory> {
    if !(ic.r > MIN_ENGINE_SQUEEZING) {
        return Err(Error::DegenerateSqueezing { r: ic.r });
    }
    let mut degenerate = None;
    let inner = ode::integrate(
        |t, y, dy| match squeezing_rhs_closed(y[0], y[1], freq, t) {
            Ok(rate) => {
                dy[0] = rate.dr;
                dy[1] = rate.dphi;
                dy[2] = rate.dtheta;
            }
            Err(_) => {
                degenerate.get_or_insert(y[0]);
                dy.fill(f64::NAN);
            }
        },
        t0,
        t1,
        &[ic.r, ic.phi, ic.theta_rot.unwrap_or(0.0)],
        opts,
    );
    match (inner, degenerate) {
        (Ok(inner), _) => Ok(SqueezingTrajectory { inner, lambda: ic.lambda }),
        (Err(_), Some(r)) => Err(Error::DegenerateSqueezing { r }),
        (Err(e), None) => Err(e),
    }
}

/// Mode-function engine: covariance at `t1` from vacuum-normalised modes
/// started at `t0` and the initial particle statistics.
///
/// # Errors
///
/// Integrator errors.
pub fn evolve_closed_modes(
    freq: &FrequencyFunction,
    t0: f64,
    t1: f64,
    init: &ParticleStatistics,
    opts: &OdeOptions,
) -> Result<(ModeTrajectory, CovarianceBlock)> {
    let modes = integrate_mode_function(freq, t1, &ModeState::vacuum(freq.k(), t0), opts)?;
    let end = modes.eval(t1)?;
    let cov = covariance_from_bogoliubov(&bogoliubov_from_mode(&end, freq.k()), init);
    Ok((modes, cov))
}

/// Residual of the third-order equation
/// `γ11‴/k³ + 4(ω²/k²)γ11′/k + (2/k)(ω²/k²)′γ11 = 0`, evaluated by finite
/// differences of the dense transport output at `t` with step `h`, and
/// normalised by the largest of the three terms.
///
/// The transport system implies this equation identically, so the residual
/// is an independent check of the integrated trajectory.
///
/// # Errors
///
/// [`Error::Domain`] if the stencil leaves the trajectory span.
pub fn third_order_residual(traj: &CovarianceTrajectory, freq: &FrequencyFunction, t: f64, h: f64) -> Result<f64> {
    let k = freq.k();
    let g = |s: f64| traj.eval(s).map(|b| b.g11);
    let (fm2, fm1, f0, fp1, fp2) = (g(t - 2.0 * h)?, g(t - h)?, g(t)?, g(t + h)?, g(t + 2.0 * h)?);
    let d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    let d3 = (fp2 - 2.0 * fp1 + 2.0 * fm1 - fm2) / (2.0 * h * h * h);
    let w = |s: f64| freq.omega_sq(s) / (k * k);
    let dw = (w(t - 2.0 * h) - 8.0 * w(t - h) + 8.0 * w(t + h) - w(t + 2.0 * h)) / (12.0 * h);
    let terms = [d3 / k.powi(3), 4.0 * w(t) * d1 / k, 2.0 * dw * f0 / k];
    let scale = terms.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    Ok(terms.iter().sum::<f64>() / scale.max(f64::MIN_POSITIVE))
}

/// Geometry of the phase-space contour of the Wigner function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerEllipse {
    /// Semi-major axis.
    pub semi_major: f64,
    /// Semi-minor axis.
    pub semi_minor: f64,
    /// Tilt angle (the squeezing angle `φ`).
    pub tilt: f64,
    /// Enclosed area.
    pub area: f64,
    /// `√λ e^{−2r}`, the combination that controls discord suppression.
    pub squeezed_variance: f64,
}

/// Ellipse of the `n_sigma` contour: axes `λ^{1/4} e^{±r}·n_sigma/√2`, tilt
/// `φ`, area `π√λ·n_sigma²/2`.
///
/// # Example
///
/// ```
/// use gausslind::closed_dynamics::wigner_ellipse;
/// use gausslind::symplectic_core::SqueezingState;
/// let e = wigner_ellipse(&SqueezingState::new(0.0, 0.0, 1.0).unwrap(), 2f64.sqrt());
/// assert!((e.semi_major - 1.0).abs() < 1e-15 && (e.semi_minor - 1.0).abs() < 1e-15);
/// ```
pub fn wigner_ellipse(s: &SqueezingState, n_sigma: f64) -> WignerEllipse {
    let scale = s.lambda.powf(0.25) * n_sigma / std::f64::consts::SQRT_2;
    WignerEllipse {
        semi_major: scale * s.r.exp(),
        semi_minor: scale * (-s.r).exp(),
        tilt: s.phi,
        area: std::f64::consts::PI * s.lambda.sqrt() * n_sigma * n_sigma / 2.0,
        squeezed_variance: s.lambda.sqrt() * (-2.0 * s.r).exp(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_is_stationary_for_free_oscillator() {
        let f = FrequencyFunction::constant(2.0, 4.0).unwrap();
        let r = transport_rhs_closed(&CovarianceBlock::VACUUM, &f, 0.3);
        assert_eq!((r.d11, r.d12, r.d22), (0.0, 0.0, 0.0));
    }

    #[test]
    fn det_rate_vanishes() {
        let f = FrequencyFunction::new(1.3, |k, t| k * k - 2.0 / (t * t)).unwrap();
        let b = CovarianceBlock::new(3.0, 1.2, 2.1).unwrap();
        let r = transport_rhs_closed(&b, &f, -0.7);
        assert!(r.det_rate(&b).abs() < 1e-14);
    }

    #[test]
    fn vacuum_bogoliubov() {
        let p = bogoliubov_from_mode(&ModeState::vacuum(1.7, 0.0), 1.7);
        assert_eq!(p.u, Complex64::new(1.0, 0.0));
        assert_eq!(p.w, Complex64::new(0.0, 0.0));
        let c = covariance_from_bogoliubov(&p, &ParticleStatistics::VACUUM);
        assert_eq!(c, CovarianceBlock::VACUUM);
    }

    #[test]
    fn squeezing_rate_examples() {
        let f = FrequencyFunction::constant(1.0, 1.0).unwrap();
        assert_eq!(squeezing_rhs_closed(0.5, 0.0, &f, 0.0).unwrap().dr, 0.0);
        assert!(matches!(squeezing_rhs_closed(1e-7, 0.0, &f, 0.0), Err(Error::DegenerateSqueezing { .. })));
    }

    #[test]
    fn ellipse_axes() {
        let e = wigner_ellipse(&SqueezingState::new(1.0, std::f64::consts::FRAC_PI_4, 1.0).unwrap(), 2f64.sqrt());
        assert!((e.semi_major - 1f64.exp()).abs() < 1e-15 && (e.semi_minor - (-1f64).exp()).abs() < 1e-15);
        assert!((e.semi_major * e.semi_minor - 1.0).abs() < 1e-15);
    }
}
