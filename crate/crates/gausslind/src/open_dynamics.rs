//! Evolution in the presence of a linearly coupled (Caldeira–Leggett)
//! environment, at the level of the covariance block.
//!
//! The environment enters only through a non-negative source in the
//! momentum equation,
//!
//! ```text
//! γ11′ = 2kγ12,   γ12′ = kγ22 − (ω²/k)γ11,   γ22′ = −2(ω²/k)γ12 + k·S(τ),
//! ```
//!
//! which makes the determinant grow as `det′ = k·S·γ11` (decoherence). The
//! same system is solved three ways: transport ODEs with the determinant as
//! an extra, separately integrated state (so that purity stays accurate
//! when the entries are huge), generalised squeezing ODEs for `(λ, r, φ)`,
//! and Green's-function integrals over a stored mode-function trajectory.

use num_complex::Complex64;
use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use crate::closed_dynamics::{
    transport_rhs_closed, BlockRate, CovarianceTrajectory, FrequencyFunction, ModeTrajectory, MIN_ENGINE_SQUEEZING,
};
use crate::error::{Error, Result};
use crate::ode::{self, OdeOptions, Trajectory};
use crate::quadrature::{self, half_period_breaks, QuadOptions};
use crate::symplectic_core::{squeezing_from_covariance_and_det, CovarianceBlock, SqueezingState, MIN_SQUEEZING};

/// Dimensionless environment source `S(τ) ≥ 0` entering `dγ22/dτ = … + k·S`.
///
/// In terms of the coupling `Γ` and environment correlator `C̃_E`,
/// `S = 2Γ(2π)^{3/2} C̃_E/k²`.
#[derive(Clone)]
pub struct EnvironmentKernel {
    source: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    breakpoints: Vec<f64>,
    description: String,
}

impl fmt::Debug for EnvironmentKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnvironmentKernel")
            .field("description", &self.description)
            .field("breakpoints", &self.breakpoints)
            .finish_non_exhaustive()
    }
}

impl EnvironmentKernel {
    /// Wraps a source callable.
    pub fn new<F>(description: impl Into<String>, source: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self { source: Arc::new(source), breakpoints: Vec::new(), description: description.into() }
    }

    /// The decoupled environment, `S ≡ 0`.
    pub fn none() -> Self {
        Self::new("no environment", |_| 0.0)
    }

    /// Constant source on `[t_on, t_off]` and zero elsewhere.
    pub fn constant_window(level: f64, t_on: f64, t_off: f64) -> Self {
        let (lo, hi) = if t_on <= t_off { (t_on, t_off) } else { (t_off, t_on) };
        Self::new(format!("constant source {level} on [{lo}, {hi}]"), move |t| if t >= lo && t <= hi { level } else { 0.0 })
            .with_breakpoints(vec![lo, hi])
    }

    /// Declares times at which the source is discontinuous; integrators
    /// stop there instead of stepping across.
    pub fn with_breakpoints(mut self, mut points: Vec<f64>) -> Self {
        points.retain(|p| p.is_finite());
        points.sort_by(f64::total_cmp);
        points.dedup();
        self.breakpoints = points;
        self
    }

    /// Returns a copy with the source multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let inner = Arc::clone(&self.source);
        Self {
            source: Arc::new(move |t| factor * inner(t)),
            breakpoints: self.breakpoints.clone(),
            description: format!("{factor} × ({})", self.description),
        }
    }

    /// `S(τ)`.
    pub fn source(&self, t: f64) -> f64 {
        (self.source)(t)
    }

    /// Declared discontinuities, increasing.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Human-readable description.
    pub fn description(&self) -> &str {
        &self.description
    }
}

/// Environment corrections to the free covariance,
/// `γ11 = |v|² + I`, `γ12 = Re(v v*′)/k + J`, `γ22 = |v′|²/k² + K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenIntegrals {
    /// Correction to `γ11`.
    pub i: f64,
    /// Correction to `γ12`.
    pub j: f64,
    /// Correction to `γ22`.
    pub k: f64,
}

impl GreenIntegrals {
    /// `I·K − J²`, non-negative by the Cauchy–Schwarz inequality.
    pub fn cauchy_schwarz_gap(&self) -> f64 {
        self.i * self.k - self.j * self.j
    }
}

/// Open transport equations at time `t`.
pub fn transport_rhs_open(b: &CovarianceBlock, freq: &FrequencyFunction, kern: &EnvironmentKernel, t: f64) -> BlockRate {
    let mut rate = transport_rhs_closed(b, freq, t);
    rate.d22 += freq.k() * kern.source(t);
    rate
}

/// Determinant growth `d det/dτ = k·S(τ)·γ11`.
pub fn det_rhs(b: &CovarianceBlock, kern: &EnvironmentKernel, k: f64, t: f64) -> f64 {
    k * kern.source(t) * b.g11
}

/// Time derivatives of the generalised squeezing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralizedSqueezingRate {
    /// `dλ/dτ`.
    pub dlambda: f64,
    /// `dr/dτ`.
    pub dr: f64,
    /// `dφ/dτ`.
    pub dphi: f64,
}

/// Generalised squeezing equations with source `s = k·S(τ)`:
///
/// * `λ′ = s √λ (cosh 2r − cos 2φ sinh 2r)`
/// * `r′ = (k/2)(ω²/k² − 1) sin 2φ − s (sinh 2r − cos 2φ cosh 2r)/(4√λ)`
/// * `φ′ = −(k/2)(ω²/k² + 1) + (k/2)(ω²/k² − 1) cos 2φ/tanh 2r − s sin 2φ/(4√λ sinh 2r)`
///
/// # Errors
///
/// [`Error::DegenerateSqueezing`] when `r ≤ 1e−6`; [`Error::BelowHeisenberg`]
/// when `λ < 1 − 1e−9`.
pub fn generalized_squeezing_rhs(
    s: &SqueezingState,
    freq: &FrequencyFunction,
    kern: &EnvironmentKernel,
    t: f64,
) -> Result<GeneralizedSqueezingRate> {
    if !(s.r > MIN_ENGINE_SQUEEZING) {
        return Err(Error::DegenerateSqueezing { r: s.r });
    }
    if !(s.lambda >= 1.0 - crate::symplectic_core::HEISENBERG_SLACK) {
        return Err(Error::BelowHeisenberg { det: s.lambda });
    }
    let k = freq.k();
    let ratio = freq.omega_sq(t) / (k * k);
    let src = k * kern.source(t);
    let sqrt_l = s.lambda.sqrt();
    let (s2, c2) = (2.0 * s.phi).sin_cos();
    let (sp, cp) = s.phi.sin_cos();
    let (sh, ch) = ((2.0 * s.r).sinh(), (2.0 * s.r).cosh());
    // cosh 2r − cos 2φ sinh 2r without cancellation
    let g11_unit = (2.0 * s.r).exp() * sp * sp + (-2.0 * s.r).exp() * cp * cp;
    // sinh 2r − cos 2φ cosh 2r = −(e^{−2r} cos²φ − e^{2r} sin²φ)
    let mixed = (2.0 * s.r).exp() * sp * sp - (-2.0 * s.r).exp() * cp * cp;
    debug_assert!((mixed - (sh - c2 * ch)).abs() <= 1e-9 * ch.max(1.0));
    Ok(GeneralizedSqueezingRate {
        dlambda: src * sqrt_l * g11_unit,
        dr: 0.5 * k * (ratio - 1.0) * s2 - src * mixed / (4.0 * sqrt_l),
        dphi: -0.5 * k * (ratio + 1.0) + 0.5 * k * (ratio - 1.0) * c2 / (2.0 * s.r).tanh() - src * s2 / (4.0 * sqrt_l * sh),
    })
}

/// Evaluates the Green's-function corrections at time `t` by adaptive
/// quadrature over the stored mode trajectory, which must start at the
/// initial time `τ_in` of the evolution:
///
/// * `I = k ∫ S(τ′) Im²[v(τ′) v*(τ)] dτ′`
/// * `J = ∫ S(τ′) Im[v(τ′) v*(τ)] Im[v(τ′) v*′(τ)] dτ′`
/// * `K = (1/k) ∫ S(τ′) Im²[v(τ′) v*′(τ)] dτ′`
///
/// with `τ′` running from `τ_in` to `τ` (the integrals are oriented so that
/// they are non-negative for either direction of time). The interval is
/// split at every half period `π/(2k)` of the `e^{2ikτ′}` factor and at the
/// kernel's breakpoints before adaptive refinement.
///
/// # Errors
///
/// [`Error::QuadratureFailure`] if the tolerance cannot be met,
/// [`Error::Domain`] if `t` lies outside the trajectory.
pub fn green_covariance(modes: &ModeTrajectory, kern: &EnvironmentKernel, t: f64, quad_tol: f64) -> Result<GreenIntegrals> {
    let k = modes.k();
    let (t_in, _) = modes.span();
    let now = modes.eval(t)?;
    let (lo, hi) = if t_in <= t { (t_in, t) } else { (t, t_in) };
    let mut breaks = half_period_breaks(lo, hi, std::f64::consts::PI / k);
    breaks.extend(kern.breakpoints().iter().copied().filter(|b| *b > lo && *b < hi));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    if breaks.len() < 2 {
        return Ok(GreenIntegrals { i: 0.0, j: 0.0, k: 0.0 });
    }
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: quad_tol, max_panels: 200_000 };
    let failure = Cell::new(None);
    let weights = |tp: f64| -> (f64, f64, f64) {
        let s = kern.source(tp);
        if s == 0.0 {
            return (0.0, 0.0, 0.0);
        }
        match modes.eval(tp) {
            Ok(m) => {
                let a = (m.v * now.v.conj()).im;
                let b = (m.v * now.dv.conj()).im;
                (s * a * a * k, s * a * b, s * b * b / k)
            }
            Err(e) => {
                failure.set(Some(e));
                (0.0, 0.0, 0.0)
            }
        }
    };
    let ik = quadrature::integrate(
        |tp| {
            let (i, _, kk) = weights(tp);
            Complex64::new(i, kk)
        },
        &breaks,
        &opts,
    )?;
    let j = quadrature::integrate(|tp| Complex64::new(weights(tp).1, 0.0), &breaks, &opts)?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    // The breakpoints always run upwards, so I and K come out non-negative
    // whichever direction the evolution runs in τ.
    Ok(GreenIntegrals { i: ik.value.re, j: j.value.re, k: ik.value.im })
}

/// One synchronised output record of an open evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpenSample {
    /// Time `τ`.
    pub time: f64,
    /// Covariance block.
    pub block: CovarianceBlock,
    /// Separately integrated determinant `λ = det γ`.
    pub det: f64,
    /// Generalised squeezing parameters where `r` is above `1e−8`.
    pub squeezing: Option<SqueezingState>,
    /// Purity `1/det`.
    pub purity: f64,
}

/// Dense open-evolution trajectory; the state is `(γ11, γ12, γ22, det)`.
#[derive(Debug, Clone)]
pub struct OpenTrajectory {
    pieces: Vec<CovarianceTrajectory>,
}

impl OpenTrajectory {
    fn piece_for(&self, t: f64) -> &CovarianceTrajectory {
        self.pieces
            .iter()
            .find(|p| {
                let (a, b) = p.span();
                let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
                t >= lo && t <= hi
            })
            .unwrap_or_else(|| self.pieces.last().expect("at least one piece"))
    }

    /// Synchronised record at `t` (dense output).
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn sample(&self, t: f64) -> Result<OpenSample> {
        let y = self.piece_for(t).eval_state(t)?;
        Ok(make_sample(t, &y))
    }

    /// Records at every accepted integrator step, in time order of integration.
    pub fn steps(&self) -> Vec<OpenSample> {
        self.pieces.iter().flat_map(|p| p.steps().map(|(t, y)| make_sample(t, y))).collect()
    }

    /// The last record.
    pub fn last(&self) -> OpenSample {
        let p = self.pieces.last().expect("at least one piece");
        let (_, t1) = p.span();
        p.steps().last().map(|(t, y)| make_sample(t, y)).unwrap_or_else(|| make_sample(t1, &[1.0, 0.0, 1.0, 1.0]))
    }
}

fn make_sample(t: f64, y: &[f64]) -> OpenSample {
    let block = CovarianceBlock { g11: y[0], g12: y[1], g22: y[2] };
    let det = y[3];
    let squeezing = squeezing_from_covariance_and_det(&block, det).ok().filter(|s| s.r > MIN_SQUEEZING);
    OpenSample { time: t, block, det, squeezing, purity: 1.0 / det.max(1.0) }
}

/// Integrates the open transport system together with `det′ = k·S·γ11`
/// from `t0` to `t1`, restarting the integrator at every kernel breakpoint.
///
/// # Errors
///
/// [`Error::Domain`] if the source is negative or non-finite anywhere it is
/// evaluated; integrator errors otherwise.
pub fn evolve_open(
    freq: &FrequencyFunction,
    kern: &EnvironmentKernel,
    t0: f64,
    t1: f64,
    ic: &CovarianceBlock,
    opts: &OdeOptions,
) -> Result<OpenTrajectory> {
    ic.validate()?;
    let k = freq.k();
    let forward = t1 >= t0;
    let (lo, hi) = if forward { (t0, t1) } else { (t1, t0) };
    let mut stops: Vec<f64> = kern.breakpoints().iter().copied().filter(|b| *b > lo && *b < hi).collect();
    if !forward {
        stops.reverse();
    }
    stops.push(t1);
    let mut pieces = Vec::with_capacity(stops.len());
    let mut start = t0;
    let mut y0 = vec![ic.g11, ic.g12, ic.g22, ic.det().max(1.0)];
    for stop in stops {
        let bad = Cell::new(None);
        let traj = ode::integrate(
            |t, y, dy| {
                let b = CovarianceBlock { g11: y[0], g12: y[1], g22: y[2] };
                let s = kern.source(t);
                if !(s >= 0.0 && s.is_finite()) {
                    bad.set(Some(s));
                }
                let rate = transport_rhs_closed(&b, freq, t);
                dy[0] = rate.d11;
                dy[1] = rate.d12;
                dy[2] = rate.d22 + k * s;
                dy[3] = k * s * b.g11;
            },
            start,
            stop,
            &y0,
            opts,
        );
        if let Some(s) = bad.get() {
            return Err(Error::Domain(format!("environment source must be finite and non-negative, got {s}")));
        }
        let traj: Trajectory = traj?;
        y0 = traj.last().to_vec();
        pieces.push(CovarianceTrajectory::from_inner(traj));
        start = stop;
    }
    Ok(OpenTrajectory { pieces })
}

/// Dense trajectory of the generalised squeezing engine.
#[derive(Debug, Clone)]
pub struct GeneralizedSqueezingTrajectory {
    inner: Trajectory,
}

impl GeneralizedSqueezingTrajectory {
    /// State at `t` (dense output).
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] outside the integrated span.
    pub fn eval(&self, t: f64) -> Result<SqueezingState> {
        let y = self.inner.eval(t)?;
        Ok(SqueezingState { r: y[0], phi: y[1], lambda: y[2], theta_rot: None })
    }
}

/// Generalised squeezing engine: integrates `(r, φ, λ)` from `t0` to `t1`.
///
/// Advisory only: it requires `r > 1e−6` throughout; the transport engine
/// is the engine of record.
///
/// # Errors
///
/// [`Error::DegenerateSqueezing`] if `r` drops below the threshold, plus
/// integrator errors.
pub fn evolve_open_squeezing(
    freq: &FrequencyFunction,
    kern: &EnvironmentKernel,
    t0: f64,
    t1: f64,
    ic: &SqueezingState,
    opts: &OdeOptions,
) -> Result<GeneralizedSqueezingTrajectory> {
    if !(ic.r > MIN_ENGINE_SQUEEZING) {
        return Err(Error::DegenerateSqueezing { r: ic.r });
    }
    let failure = Cell::new(None);
    let res = ode::integrate(
        |t, y, dy| {
            let s = SqueezingState { r: y[0], phi: y[1], lambda: y[2], theta_rot: None };
            match generalized_squeezing_rhs(&s, freq, kern, t) {
                Ok(rate) => {
                    dy[0] = rate.dr;
                    dy[1] = rate.dphi;
                    dy[2] = rate.dlambda;
                }
                Err(e) => {
                    failure.set(Some(e));
                    dy.fill(f64::NAN);
                }
            }
        },
        t0,
        t1,
        &[ic.r, ic.phi, ic.lambda],
        opts,
    );
    match (res, failure.take()) {
        (Ok(inner), _) => Ok(GeneralizedSqueezingTrajectory { inner }),
        (Err(_), Some(e)) => Err(e),
        (Err(e), None) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_only_enters_momentum_equation() {
        let f = FrequencyFunction::constant(2.0, 4.0).unwrap();
        let kern = EnvironmentKernel::new("const", |_| 0.5);
        let r = transport_rhs_open(&CovarianceBlock::VACUUM, &f, &kern, 0.0);
        assert_eq!((r.d11, r.d12, r.d22), (0.0, 0.0, 1.0));
        let b = CovarianceBlock::new(3.0, 0.4, 1.5).unwrap();
        let r = transport_rhs_open(&b, &f, &kern, 0.0);
        assert!((r.det_rate(&b) - det_rhs(&b, &kern, 2.0, 0.0)).abs() < 1e-12);
    }

    #[test]
    fn zero_source_reduces_to_closed_squeezing() {
        let f = FrequencyFunction::new(1.0, |k, t| k * k - 2.0 / (t * t)).unwrap();
        let s = SqueezingState::new(0.8, -0.4, 3.0).unwrap();
        let open = generalized_squeezing_rhs(&s, &f, &EnvironmentKernel::none(), -0.5).unwrap();
        let closed = crate::closed_dynamics::squeezing_rhs_closed(0.8, -0.4, &f, -0.5).unwrap();
        assert_eq!(open.dlambda, 0.0);
        assert!((open.dr - closed.dr).abs() < 1e-15 && (open.dphi - closed.dphi).abs() < 1e-15);
    }

    #[test]
    fn negative_source_is_rejected() {
        let f = FrequencyFunction::constant(1.0, 1.0).unwrap();
        let kern = EnvironmentKernel::new("negative", |_| -1.0);
        let e = evolve_open(&f, &kern, 0.0, 1.0, &CovarianceBlock::VACUUM, &OdeOptions::default()).unwrap_err();
        assert!(matches!(e, Error::Domain(_)));
    }
}
