//! Cosmological perturbations in de Sitter space coupled to an environment.
//!
//! Everything is written in terms of the dimensionless time `x = −kη > 0`,
//! which decreases from the sub-Hubble (`x ≫ 1`) to the super-Hubble
//! (`x ≪ 1`) regime; Hubble crossing is `x = 1` and the scale factor grows
//! as `a ∝ 1/x`. The generic engines of [`crate::closed_dynamics`] and
//! [`crate::open_dynamics`] are driven with `k = 1` and `τ = −x`, so that
//! `ω²(τ) = 1 − 2/τ²`.
//!
//! The environment is switched on by a Heaviside window once the physical
//! wavelength exceeds the correlation length `ℓ_E`, i.e. for `x < 1/(ℓ_E H)`,
//! with a power-law strength
//! `S(x) = 2 (k_Γ/k)² (x_*/x)^{p−3}`.
//!
//! Provided here: the closed de Sitter solution, the environment kernel,
//! the exact environment-dressed covariance (through incomplete Gamma
//! functions), its super-Hubble expansion and coefficient table, the
//! `σ²(0)` expansions, the power-spectrum correction, decoherence
//! thresholds and the quantum discord along all three routes.

use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

use crate::closed_dynamics::{bogoliubov_from_mode, BogoliubovPair, FrequencyFunction, ModeState};
use crate::discord_measures::{discord_from_invariants, discord_from_log_eigenvalues, log_add_exp, DiscordResult};
use crate::error::{Error, Result};
use crate::ode::OdeOptions;
use crate::open_dynamics::{evolve_open, EnvironmentKernel, OpenTrajectory};
use crate::quadrature::{self, QuadOptions};
use crate::special_functions::{a_alpha, cal_a, gamma};
use crate::symplectic_core::CovarianceBlock;

/// Distance from a singular power-law index below which closed forms are
/// rejected.
pub const SINGULAR_P_TOL: f64 = 1e-6;

/// Within this distance of `p = 3` or `p = 6` the coefficient table is
/// evaluated by symmetric Richardson extrapolation, because individual
/// constants diverge there while their combinations stay finite.
pub const REMOVABLE_P_WINDOW: f64 = 1e-4;

const RICHARDSON_STEP: f64 = 2e-3;

/// Physical parameters of a cosmological run.
///
/// `x_star = −kη_*` is the value of `x` at the reference time `η_*` at which
/// the pivot `k_* = a_*H` crosses the Hubble radius; it therefore equals
/// `k/k_*` and the two are validated for consistency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmoParams {
    /// `k/k_*`.
    pub k_over_kstar: f64,
    /// `k_Γ/k_*`, the environment strength at the reference time.
    pub kgamma_over_kstar: f64,
    /// Power-law index of the interaction strength, `Γ ∝ a^p`.
    pub p: f64,
    /// `ℓ_E H`, the environment correlation length in Hubble units.
    pub ell_h: f64,
    /// `x_* = −kη_*`.
    pub x_star: f64,
}

impl CosmoParams {
    /// Validated constructor with `x_* = k/k_*`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] for `k/k_* ≤ 0`, `k_Γ/k_* < 0`,
    /// non-finite `p` or `ℓ_E H ∉ (0, 1)`.
    pub fn new(k_over_kstar: f64, kgamma_over_kstar: f64, p: f64, ell_h: f64) -> Result<Self> {
        let params = Self { k_over_kstar, kgamma_over_kstar, p, ell_h, x_star: k_over_kstar };
        params.validate()?;
        Ok(params)
    }

    /// Parameters specified the way figures usually quote them: through
    /// `k_Γ/k` at `k = k_*` (so `x_* = 1`).
    ///
    /// # Errors
    ///
    /// As [`CosmoParams::new`].
    pub fn at_pivot(kgamma_over_k: f64, p: f64, ell_h: f64) -> Result<Self> {
        Self::new(1.0, kgamma_over_k, p, ell_h)
    }

    /// Checks the parameter invariants.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] on the first violated invariant.
    pub fn validate(&self) -> Result<()> {
        if !(self.k_over_kstar.is_finite() && self.k_over_kstar > 0.0) {
            return Err(Error::InvalidParameter(format!("k/k* must be positive, got {}", self.k_over_kstar)));
        }
        if !(self.kgamma_over_kstar.is_finite() && self.kgamma_over_kstar >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "kGamma/k* must be non-negative, got {}",
                self.kgamma_over_kstar
            )));
        }
        if !self.p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must be finite, got {}", self.p)));
        }
        if !(self.ell_h > 0.0 && self.ell_h < 1.0) {
            return Err(Error::InvalidParameter(format!("ellH must lie in (0, 1), got {}", self.ell_h)));
        }
        if !(self.x_star.is_finite() && self.x_star > 0.0)
            || (self.x_star - self.k_over_kstar).abs() > 1e-12 * self.k_over_kstar
        {
            return Err(Error::InvalidParameter(format!(
                "x* = {} must equal k/k* = {}",
                self.x_star, self.k_over_kstar
            )));
        }
        Ok(())
    }

    /// Returns a copy with a different wavenumber (and matching `x_*`).
    ///
    /// # Errors
    ///
    /// As [`CosmoParams::new`].
    pub fn with_k_over_kstar(&self, k_over_kstar: f64) -> Result<Self> {
        Self::new(k_over_kstar, self.kgamma_over_kstar, self.p, self.ell_h)
    }

    /// Returns a copy with a different power-law index.
    pub fn with_p(&self, p: f64) -> Self {
        Self { p, ..*self }
    }

    /// `κ = (k_Γ/k)²`.
    pub fn kappa(&self) -> f64 {
        (self.kgamma_over_kstar / self.k_over_kstar).powi(2)
    }

    /// `x_*^{p−3}`.
    pub fn x_star_factor(&self) -> f64 {
        self.x_star.powf(self.p - 3.0)
    }

    /// `x_in = 1/(ℓ_E H)`, where the environment switches on.
    pub fn x_in(&self) -> f64 {
        1.0 / self.ell_h
    }

    /// `S(x) = 2κ (x_*/x)^{p−3}` for `x < 1/(ℓ_E H)`, zero otherwise.
    pub fn source(&self, x: f64) -> f64 {
        if x < self.x_in() {
            2.0 * self.kappa() * (self.x_star / x).powf(self.p - 3.0)
        } else {
            0.0
        }
    }
}

/// `ω² = k² − 2/η²`.
pub fn omega_sq_de_sitter(k: f64, eta: f64) -> f64 {
    k * k - 2.0 / (eta * eta)
}

/// The de Sitter frequency in the engines' time variable `τ = kη = −x`
/// (with `k = 1`).
pub fn de_sitter_frequency() -> FrequencyFunction {
    FrequencyFunction::new(1.0, omega_sq_de_sitter).expect("unit wavenumber is valid")
}

/// Bunch–Davies mode `v = (1 − i/(kη)) e^{−ikη}` and `dv/dτ` at `x = −kη`,
/// returned at engine time `τ = −x`.
pub fn de_sitter_mode(x: f64) -> ModeState {
    let phase = Complex64::from_polar(1.0, x);
    let v = phase * Complex64::new(1.0, 1.0 / x);
    let dv = phase * Complex64::new(1.0 / x, 1.0 / (x * x) - 1.0);
    ModeState { v, dv, time: -x }
}

/// Bogoliubov coefficients of the de Sitter mode:
/// `u = e^{ix}(1 + i/x − 1/(2x²))`, `w = e^{ix}/(2x²)` up to conjugation
/// conventions; `|w| = 1/(2x²)`.
pub fn de_sitter_bogoliubov(x: f64) -> BogoliubovPair {
    bogoliubov_from_mode(&de_sitter_mode(x), 1.0)
}

/// Closed de Sitter covariance `{1 + 1/x², 1/x³, 1 − 1/x² + 1/x⁴}`.
pub fn de_sitter_covariance_closed(x: f64) -> CovarianceBlock {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    CovarianceBlock { g11: 1.0 + inv2, g12: inv2 * inv, g22: 1.0 - inv2 + inv2 * inv2 }
}

/// Squeezing parameters of the closed de Sitter state,
/// `r = ½ arccosh(1 + 1/(2x⁴))` and `φ = ½ atan2(−2x, 1 − 2x²)`.
///
/// The two-argument form realises the branch choice "`½ arctan(2kη/(1−2k²η²))`,
/// shifted by `−π/2` for `x > 1/√2`", which keeps `φ` continuous with
/// `sin 2φ < 0`: `φ → −π/2` deep inside the Hubble radius and `φ ≈ −x` on
/// super-Hubble scales.
pub fn de_sitter_squeezing(x: f64) -> (f64, f64) {
    let x4 = x.powi(4);
    // sinh 2r = √(1 + 4x⁴)/(2x⁴)
    let r = if x < 1e-3 {
        // asinh y = ln 2y + 1/(4y²) + …, with 1/(4y²) = x⁸/(1 + 4x⁴)
        0.5 * (0.5 * (4.0 * x4).ln_1p() + (1.0 / x4).ln() + x4 * x4 / (1.0 + 4.0 * x4))
    } else {
        0.5 * ((1.0 + 4.0 * x4).sqrt() / (2.0 * x4)).asinh()
    };
    let phi = 0.5 * (-2.0 * x).atan2(1.0 - 2.0 * x * x);
    (r, phi)
}

/// The Heaviside power-law environment as a kernel in engine time `τ = −x`.
pub fn cosmo_kernel(params: &CosmoParams) -> EnvironmentKernel {
    let p = *params;
    EnvironmentKernel::new(
        format!(
            "de Sitter power law: kGamma/k* = {}, p = {}, ellH = {}, x* = {}",
            p.kgamma_over_kstar, p.p, p.ell_h, p.x_star
        ),
        move |tau| p.source(-tau),
    )
    .with_breakpoints(vec![-p.x_in()])
}

fn near(p: f64, target: f64, tol: f64) -> bool {
    (p - target).abs() < tol
}

fn check_not_near(p: f64, set: &[f64], context: &'static str) -> Result<()> {
    if set.iter().any(|&s| near(p, s, SINGULAR_P_TOL)) {
        Err(Error::SingularExponent { p, context })
    } else {
        Ok(())
    }
}

fn check_x(x: f64, params: &CosmoParams) -> Result<()> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::Domain(format!("x must be positive, got {x}")));
    }
    params.validate()
}

/// The three environment integrals `I_ij(x)` (real), defined so that
/// `γ_ij = γ_ij^{closed} − 2κ I_ij`; the third one already contains the
/// `(1 − 2/x²)·I11` contribution of `γ22`.
fn environment_integrals(x: f64, params: &CosmoParams) -> Result<[f64; 3]> {
    let (p, lh) = (params.p, params.ell_h);
    let am = [a_alpha(1.0 - p, x, lh)?, a_alpha(2.0 - p, x, lh)?, a_alpha(3.0 - p, x, lh)?];
    let pw = x.powf(2.0 - p) / (2.0 - p) + x.powf(4.0 - p) / (4.0 - p)
        - lh.powf(p - 2.0) / (2.0 - p)
        - lh.powf(p - 4.0) / (4.0 - p);
    let big_x = params.x_star_factor();
    let i = Complex64::i();
    let osc = Complex64::from_polar(1.0, -2.0 * x);
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);
    let i11 = big_x * (1.0 + x2) / (2.0 * x2) * pw
        + 2.0
            * (big_x / (4.0 * x2)
                * osc
                * (Complex64::new(x2 - 1.0, -2.0 * x) * (am[0] - am[2]) - Complex64::new(4.0 * x, 2.0 * x2 - 2.0) * am[1]))
                .re;
    let comb = -am[0] + 2.0 * i * am[1] + am[2];
    let xi = Complex64::new(x, -1.0);
    let i12 = 0.5 * big_x / x3 * pw + 2.0 * (-i * big_x / (4.0 * x3) * osc * xi * (x * xi - 1.0) * comb).re;
    let poly = 3.0 + 2.0 * x * (3.0 * i + x * (-3.0 - 2.0 * i * x + x2));
    let i22 = 1.5 * big_x / x4 * pw + 2.0 * (big_x / (4.0 * x4) * osc * poly * comb).re;
    Ok([i11, i12, i22 + (1.0 - 2.0 / x2) * i11])
}

/// Exact environment-dressed covariance at `x`, assembled from the
/// oscillatory moments `A_α` (incomplete Gamma functions). Before the
/// environment switches on (`x ≥ 1/(ℓ_E H)`) it equals the closed solution.
///
/// # Errors
///
/// [`Error::SingularExponent`] for `p` within `1e−6` of 2 or 4,
/// [`Error::Domain`] for `x ≤ 0`, and special-function errors.
pub fn exact_open_covariance(x: f64, params: &CosmoParams) -> Result<CovarianceBlock> {
    check_x(x, params)?;
    let closed = de_sitter_covariance_closed(x);
    if x >= params.x_in() || params.kappa() == 0.0 {
        return Ok(closed);
    }
    check_not_near(params.p, &[2.0, 4.0], "the exact environment-dressed covariance")?;
    let [i11, i12, i22] = environment_integrals(x, params)?;
    let two_kappa = 2.0 * params.kappa();
    Ok(CovarianceBlock {
        g11: closed.g11 - two_kappa * i11,
        g12: closed.g12 - two_kappa * i12,
        g22: closed.g22 - two_kappa * i22,
    })
}

/// `det γ(x)` of the exact solution, obtained by integrating the
/// determinant growth `d det/d(−x) = S(x)·γ11(x)` with the exact `γ11`.
///
/// Computing the determinant from the entries instead loses every digit on
/// super-Hubble scales, where the entries grow like `x^{−4}` but the
/// determinant only like `x^{2−p}`.
///
/// # Errors
///
/// As [`exact_open_covariance`], plus [`Error::QuadratureFailure`].
pub fn exact_open_det(x: f64, params: &CosmoParams) -> Result<f64> {
    check_x(x, params)?;
    let x_in = params.x_in();
    if x >= x_in || params.kappa() == 0.0 {
        return Ok(1.0);
    }
    check_not_near(params.p, &[2.0, 4.0], "the exact environment-dressed covariance")?;
    // geometric panels resolve the power law at small x, unit panels the
    // oscillation at large x
    let mut breaks = quadrature::geometric_breaks(x, x_in.min(1.0).max(x), 1.5);
    if x_in > 1.0 {
        let start = breaks.last().copied().unwrap_or(x);
        breaks.extend(quadrature::half_period_breaks(start, x_in, PI).into_iter().skip(1));
    }
    breaks.dedup();
    let failure = std::cell::Cell::new(None);
    let opts = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-8, max_panels: 20_000 };
    let (value, _) = quadrature::integrate_real(
        |y| match exact_open_covariance(y, params) {
            Ok(b) => params.source(y) * b.g11,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        &breaks,
        &opts,
    )?;
    if let Some(e) = failure.take() {
        return Err(e);
    }
    Ok(1.0 + value)
}

/// Integrates the open transport equations from `x_in = 1/(ℓ_E H)`, seeded
/// with the closed solution, down to `x_end`. Samples are addressed by
/// engine time `τ = −x`.
///
/// # Errors
///
/// Integrator errors; [`Error::Domain`] unless `0 < x_end < x_in`.
pub fn transport_open(params: &CosmoParams, x_end: f64, opts: &OdeOptions) -> Result<OpenTrajectory> {
    check_x(x_end, params)?;
    let x_in = params.x_in();
    if x_end >= x_in {
        return Err(Error::Domain(format!("x_end = {x_end} must lie below x_in = {x_in}")));
    }
    evolve_open(&de_sitter_frequency(), &cosmo_kernel(params), -x_in, -x_end, &de_sitter_covariance_closed(x_in), opts)
}

/// Coefficients of the super-Hubble expansion of the environment integrals,
/// `I_ij ≈ Σ c·x^n` with the non-analytic `A·x^{m−p}` leading terms:
///
/// * `I11 ≈ A11 x^{6−p} + B11/x² + C11 + D11 x + E11 x³ + F11 x⁴ + G11 x⁵ + H11 x⁶`
/// * `I12 ≈ A12 x^{5−p} + B12/x³ + C12 + D12 x² + E12 x³ + F12 x⁴ + G12 x⁵ + H12 x⁶`
/// * `I22 ≈ A22 x^{4−p} + B22/x⁴ + C22/x² + D22/x + E22 + F22 x + … + K22 x⁶`
///
/// (the last including the `(1 − 2/x²) I11` part of `γ22`), together with
/// the constants `𝒜^R_α`, `𝒜^I_α` at `α = 1−p, 2−p, 3−p`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[allow(missing_docs)]
pub struct AsymptoticCoefficients {
    pub a11: f64,
    pub b11: f64,
    pub c11: f64,
    pub d11: f64,
    pub e11: f64,
    pub f11: f64,
    pub g11: f64,
    pub h11: f64,
    pub a12: f64,
    pub b12: f64,
    pub c12: f64,
    pub d12: f64,
    pub e12: f64,
    pub f12: f64,
    pub g12: f64,
    pub h12: f64,
    pub a22: f64,
    pub b22: f64,
    pub c22: f64,
    pub d22: f64,
    pub e22: f64,
    pub f22: f64,
    pub g22: f64,
    pub h22: f64,
    pub i22: f64,
    pub j22: f64,
    pub k22: f64,
    /// `𝒜^R_α` at `α = 1−p, 2−p, 3−p`.
    pub cal_a_r: [f64; 3],
    /// `𝒜^I_α` at `α = 1−p, 2−p, 3−p`.
    pub cal_a_i: [f64; 3],
}

const N_COEFFS: usize = 33;

impl AsymptoticCoefficients {
    fn to_array(self) -> [f64; N_COEFFS] {
        [
            self.a11, self.b11, self.c11, self.d11, self.e11, self.f11, self.g11, self.h11, self.a12, self.b12,
            self.c12, self.d12, self.e12, self.f12, self.g12, self.h12, self.a22, self.b22, self.c22, self.d22,
            self.e22, self.f22, self.g22, self.h22, self.i22, self.j22, self.k22, self.cal_a_r[0], self.cal_a_r[1],
            self.cal_a_r[2], self.cal_a_i[0], self.cal_a_i[1], self.cal_a_i[2],
        ]
    }

    fn from_array(v: [f64; N_COEFFS]) -> Self {
        Self {
            a11: v[0],
            b11: v[1],
            c11: v[2],
            d11: v[3],
            e11: v[4],
            f11: v[5],
            g11: v[6],
            h11: v[7],
            a12: v[8],
            b12: v[9],
            c12: v[10],
            d12: v[11],
            e12: v[12],
            f12: v[13],
            g12: v[14],
            h12: v[15],
            a22: v[16],
            b22: v[17],
            c22: v[18],
            d22: v[19],
            e22: v[20],
            f22: v[21],
            g22: v[22],
            h22: v[23],
            i22: v[24],
            j22: v[25],
            k22: v[26],
            cal_a_r: [v[27], v[28], v[29]],
            cal_a_i: [v[30], v[31], v[32]],
        }
    }

    /// Truncated series of `(I11, I12, I22)` at `x`.
    pub fn series(&self, x: f64, p: f64) -> [f64; 3] {
        self.series_terms(p).map(|terms| terms.iter().map(|t| t.eval(x, p)).sum())
    }

    /// The series as explicit power-law terms `c·x^{n − m·p}`.
    pub fn series_terms(&self, _p: f64) -> [Vec<PowerTerm>; 3] {
        let t = |c: f64, n: i32, m: i32| PowerTerm { c, n, m };
        [
            vec![
                t(self.a11, 6, 1),
                t(self.b11, -2, 0),
                t(self.c11, 0, 0),
                t(self.d11, 1, 0),
                t(self.e11, 3, 0),
                t(self.f11, 4, 0),
                t(self.g11, 5, 0),
                t(self.h11, 6, 0),
            ],
            vec![
                t(self.a12, 5, 1),
                t(self.b12, -3, 0),
                t(self.c12, 0, 0),
                t(self.d12, 2, 0),
                t(self.e12, 3, 0),
                t(self.f12, 4, 0),
                t(self.g12, 5, 0),
                t(self.h12, 6, 0),
            ],
            vec![
                t(self.a22, 4, 1),
                t(self.b22, -4, 0),
                t(self.c22, -2, 0),
                t(self.d22, -1, 0),
                t(self.e22, 0, 0),
                t(self.f22, 1, 0),
                t(self.g22, 2, 0),
                t(self.h22, 3, 0),
                t(self.i22, 4, 0),
                t(self.j22, 5, 0),
                t(self.k22, 6, 0),
            ],
        ]
    }
}

/// A generalised power-law term `c·x^{n − m·p}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTerm {
    /// Coefficient.
    pub c: f64,
    /// Integer part of the exponent.
    pub n: i32,
    /// Multiple of `−p` in the exponent.
    pub m: i32,
}

impl PowerTerm {
    /// `c·x^{n − m·p}`.
    pub fn eval(&self, x: f64, p: f64) -> f64 {
        self.c * x.powf(f64::from(self.n) - f64::from(self.m) * p)
    }
}

/// Product of two generalised polynomials, with like powers merged.
pub fn multiply_terms(a: &[PowerTerm], b: &[PowerTerm]) -> Vec<PowerTerm> {
    let mut out: Vec<PowerTerm> = Vec::new();
    for u in a {
        for v in b {
            add_term(&mut out, PowerTerm { c: u.c * v.c, n: u.n + v.n, m: u.m + v.m });
        }
    }
    out
}

fn add_term(out: &mut Vec<PowerTerm>, t: PowerTerm) {
    match out.iter_mut().find(|o| o.n == t.n && o.m == t.m) {
        Some(o) => o.c += t.c,
        None => out.push(t),
    }
}

fn raw_coefficients(p: f64, ell_h: f64, x_star: f64) -> Result<AsymptoticCoefficients> {
    let big_x = x_star.powf(p - 3.0);
    let ca = [cal_a(1.0 - p, ell_h)?, cal_a(2.0 - p, ell_h)?, cal_a(3.0 - p, ell_h)?];
    let (r, i) = (ca.map(|c| c.re), ca.map(|c| c.im));
    let denom = (p - 8.0) * (p - 5.0) * (p - 2.0);
    let a11 = -2.0 * big_x / denom;
    let a12 = -big_x * (p - 6.0) / denom;
    let a22 = -(26.0 + p * (p - 11.0)) * big_x / denom;
    let b11 = 0.5 * big_x * (ell_h.powf(p - 4.0) / (p - 4.0) + ell_h.powf(p - 2.0) / (p - 2.0) - r[0] - 2.0 * i[1] + r[2]);
    let d11 = big_x / 3.0 * (-i[0] + 2.0 * r[1] + i[2]);
    let f11 = big_x / 9.0 * (r[0] + 2.0 * i[1] - r[2]);
    Ok(AsymptoticCoefficients {
        a11,
        b11,
        c11: b11,
        d11,
        e11: 2.0 * d11 / 5.0,
        f11,
        g11: -6.0 * d11 / 35.0,
        h11: -f11 / 5.0,
        a12,
        b12: b11,
        c12: -d11 / 2.0,
        d12: -3.0 * d11 / 5.0,
        e12: -2.0 * f11,
        f12: 3.0 * d11 / 7.0,
        g12: 3.0 * f11 / 5.0,
        h12: -2.0 * d11 / 27.0,
        a22,
        b22: b11,
        c22: -b11,
        d22: -2.0 * d11,
        e22: b11,
        f22: 7.0 * d11 / 5.0,
        g22: 4.0 * f11,
        h22: -34.0 * d11 / 35.0,
        i22: -8.0 * f11 / 5.0,
        j22: 218.0 * d11 / 945.0,
        k22: 43.0 * f11 / 175.0,
        cal_a_r: r,
        cal_a_i: i,
    })
}

/// Integer indices at which the coefficient table has genuine poles:
/// `p = 2, 5, 8` from the `A` family, `p = 4` from `ℓ^{p−4}/(p−4)`, and
/// `p ≥ 7` where the `𝒜` constants acquire non-cancelling logarithms
/// (within [`SINGULAR_P_TOL`]).
pub fn is_singular_index(p: f64) -> bool {
    let n = p.round();
    near(p, n, SINGULAR_P_TOL) && n >= 2.0 && n != 3.0 && n != 6.0
}

/// Evaluates the coefficient table of the super-Hubble expansion.
///
/// Near `p = 3` and `p = 6` individual constants `𝒜_α` diverge while every
/// coefficient stays finite; there the table is obtained by symmetric
/// Richardson extrapolation from `p ± h`, `p ± 2h` with `h = 2·10⁻³`.
///
/// # Errors
///
/// [`Error::SingularExponent`] within `1e−6` of an integer `p ≥ 2` other
/// than 3 and 6; special-function errors.
pub fn asymptotic_coefficients(params: &CosmoParams) -> Result<AsymptoticCoefficients> {
    params.validate()?;
    let p = params.p;
    if is_singular_index(p) {
        return Err(Error::SingularExponent { p, context: "the super-Hubble expansion coefficients" });
    }
    let eval = |q: f64| raw_coefficients(q, params.ell_h, params.x_star);
    if near(p, 3.0, REMOVABLE_P_WINDOW) || near(p, 6.0, REMOVABLE_P_WINDOW) {
        let h = RICHARDSON_STEP;
        let (p1, m1, p2, m2) = (eval(p + h)?, eval(p - h)?, eval(p + 2.0 * h)?, eval(p - 2.0 * h)?);
        let (p1, m1, p2, m2) = (p1.to_array(), m1.to_array(), p2.to_array(), m2.to_array());
        let mut out = [0.0; N_COEFFS];
        for j in 0..N_COEFFS {
            out[j] = (4.0 * (p1[j] + m1[j]) - (p2[j] + m2[j])) / 6.0;
        }
        return Ok(AsymptoticCoefficients::from_array(out));
    }
    eval(p)
}

/// Super-Hubble approximation of the covariance from the expansion
/// coefficients, `γ_ij ≈ γ_ij^{closed} − 2κ·(truncated series)`.
///
/// # Errors
///
/// [`Error::Domain`] unless `0 < x < 0.1`; coefficient errors.
pub fn approx_open_covariance(x: f64, params: &CosmoParams) -> Result<CovarianceBlock> {
    check_x(x, params)?;
    if x >= 0.1 {
        return Err(Error::Domain(format!("the super-Hubble approximation needs x < 0.1, got {x}")));
    }
    let closed = de_sitter_covariance_closed(x);
    if params.kappa() == 0.0 {
        return Ok(closed);
    }
    let c = asymptotic_coefficients(params)?;
    let [s11, s12, s22] = c.series(x, params.p);
    let two_kappa = 2.0 * params.kappa();
    Ok(CovarianceBlock { g11: closed.g11 - two_kappa * s11, g12: closed.g12 - two_kappa * s12, g22: closed.g22 - two_kappa * s22 })
}

/// Leading-order super-Hubble purity parameter as printed in closed form,
/// `σ²(0) ≈ 1 + 2(k_Γ/k_*)²(k/k_*)^{p−5}[(k/k_*)^{2−p}(a_*/a)^{2−p}/(p−2) − (ℓ_E H)^{p−4}/(p−4)]`
/// with `a_*/a = x/x_*`.
///
/// # Errors
///
/// [`Error::SingularExponent`] near `p = 2, 4`; [`Error::Domain`] unless `x < 0.1`.
pub fn sigma0_sq_approx(x: f64, params: &CosmoParams) -> Result<f64> {
    check_x(x, params)?;
    if x >= 0.1 {
        return Err(Error::Domain(format!("the super-Hubble approximation needs x < 0.1, got {x}")));
    }
    let p = params.p;
    check_not_near(p, &[2.0, 4.0], "the leading-order purity expansion")?;
    let kk = params.k_over_kstar;
    let pref = 2.0 * params.kgamma_over_kstar.powi(2) * kk.powf(p - 5.0);
    let growing = kk.powf(2.0 - p) * (x / params.x_star).powf(2.0 - p) / (p - 2.0);
    Ok(1.0 + pref * (growing - params.ell_h.powf(p - 4.0) / (p - 4.0)))
}

/// The two coefficients of `σ²(0) ≈ 1 + Σ₀ + Σ_{2−p} x^{2−p}`, including
/// the terms quadratic in `κ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaCoefficients {
    /// Constant `Σ₀`.
    pub sigma_0: f64,
    /// Coefficient `Σ_{2−p}` of `x^{2−p}`.
    pub sigma_2mp: f64,
}

/// `Σ₀` and `Σ_{2−p}` from the expansion coefficients.
///
/// # Errors
///
/// Coefficient errors.
pub fn sigma_coefficients(params: &CosmoParams) -> Result<SigmaCoefficients> {
    let c = asymptotic_coefficients(params)?;
    let k = params.kappa();
    let sigma_0 = k * (-2.0 * c.c11 + 4.0 * c.e12 - 2.0 * c.e22 - 2.0 * c.f11 - 2.0 * c.g22)
        + k * k
            * (-4.0 * c.c12 * c.c12 + 4.0 * c.d11 * c.d22 - 8.0 * c.b12 * c.e12
                + 4.0 * c.c11 * c.e22
                + 4.0 * c.b22 * c.f11
                + 4.0 * c.b11 * c.g22);
    let sigma_2mp = k * (-2.0 * c.a11 + 4.0 * c.a12 - 2.0 * c.a22)
        + k * k * (4.0 * c.a22 * c.b11 - 8.0 * c.a12 * c.b12 + 4.0 * c.a11 * c.b22);
    Ok(SigmaCoefficients { sigma_0, sigma_2mp })
}

/// `σ²(0) ≈ 1 + Σ₀ + Σ_{2−p} x^{2−p}`.
///
/// # Errors
///
/// [`Error::Domain`] unless `0 < x < 0.1`; coefficient errors.
pub fn sigma0_sq_sigma_form(x: f64, params: &CosmoParams) -> Result<f64> {
    check_x(x, params)?;
    if x >= 0.1 {
        return Err(Error::Domain(format!("the super-Hubble approximation needs x < 0.1, got {x}")));
    }
    let s = sigma_coefficients(params)?;
    Ok(1.0 + s.sigma_0 + s.sigma_2mp * x.powf(2.0 - params.p))
}

/// `det γ` of the truncated-series covariance as a generalised polynomial
/// in `x` (terms `c·x^{n − m·p}`), with all powers of `κ` kept.
///
/// # Errors
///
/// Coefficient errors.
pub fn approx_det_terms(params: &CosmoParams) -> Result<Vec<PowerTerm>> {
    let c = asymptotic_coefficients(params)?;
    let two_kappa = 2.0 * params.kappa();
    let t = |c: f64, n: i32| PowerTerm { c, n, m: 0 };
    let closed = [vec![t(1.0, 0), t(1.0, -2)], vec![t(1.0, -3)], vec![t(1.0, 0), t(-1.0, -2), t(1.0, -4)]];
    let series = c.series_terms(params.p);
    let entries: Vec<Vec<PowerTerm>> = closed
        .iter()
        .zip(series.iter())
        .map(|(cl, se)| {
            let mut v = cl.clone();
            for s in se {
                add_term(&mut v, PowerTerm { c: -two_kappa * s.c, ..*s });
            }
            v
        })
        .collect();
    let mut det = multiply_terms(&entries[0], &entries[2]);
    for term in multiply_terms(&entries[1], &entries[1]) {
        add_term(&mut det, PowerTerm { c: -term.c, ..term });
    }
    Ok(det)
}

/// Regime of the power-spectrum correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumRegime {
    /// `p < 4`: dominated by the environment switch-on.
    PLt4,
    /// `4 < p < 8`: frozen, scale-dependent through `(k/k_*)^{p−5}`.
    P4To8,
    /// `p > 8`: keeps growing on super-Hubble scales.
    PGt8,
}

impl SpectrumRegime {
    /// Short label used in output files.
    pub fn label(&self) -> &'static str {
        match self {
            SpectrumRegime::PLt4 => "pLt4",
            SpectrumRegime::P4To8 => "p4to8",
            SpectrumRegime::PGt8 => "pGt8",
        }
    }
}

/// Relative correction `ΔP_ζ/P_ζ` to the curvature power spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSpectrumCorrection {
    /// The correction; for [`SpectrumRegime::PGt8`] the prefactor of
    /// `(η/η_*)^{8−p}`.
    pub value: f64,
    /// Which closed form applies.
    pub regime: SpectrumRegime,
    /// Whether the correction still evolves on super-Hubble scales.
    pub time_dependent: bool,
}

/// `(6 − p)/sin(πp/2)`, finite through `p = 6`.
fn six_minus_p_over_sin(p: f64) -> f64 {
    let d = p - 6.0;
    // sin(πp/2) = sin(3π + πd/2) = −sin(πd/2)
    if d.abs() < 1e-4 {
        // (6 − p)/sin(πp/2) = d/sin(πd/2) = (2/π)(1 + (πd/2)²/6 + …)
        let z = 0.5 * PI * d;
        (2.0 / PI) * (1.0 + z * z / 6.0 + 7.0 * z.powi(4) / 360.0)
    } else {
        -d / (0.5 * PI * p).sin()
    }
}

/// Environmental correction to the power spectrum in the three regimes:
///
/// * `p < 4`: `(k_Γ/k_*)²(k/k_*)^{p−5} (ℓ_E H)^{p−4}/(4−p)`
/// * `4 < p < 8`: `(k_Γ/k_*)²(k/k_*)^{p−5} 2^{p−4}(3−p)(6−p)·(−π/(2 sin(πp/2) Γ(p−1)))`,
///   which is scale invariant at `p = 5` with value `π(k_Γ/k_*)²/3`
/// * `p > 8`: `4(k_Γ/k_*)²(k/k_*)³/((p−8)(p−5)(p−2))`, multiplying the
///   growing factor `(η/η_*)^{8−p}`.
///
/// # Errors
///
/// [`Error::SingularExponent`] within `1e−6` of `p = 4` or `p = 8`.
pub fn power_spectrum_correction(params: &CosmoParams) -> Result<PowerSpectrumCorrection> {
    params.validate()?;
    let p = params.p;
    check_not_near(p, &[4.0, 8.0], "the power-spectrum correction")?;
    let kappa_star = params.kgamma_over_kstar.powi(2) * params.k_over_kstar.powf(p - 5.0);
    Ok(if p < 4.0 {
        PowerSpectrumCorrection {
            value: kappa_star * params.ell_h.powf(p - 4.0) / (4.0 - p),
            regime: SpectrumRegime::PLt4,
            time_dependent: false,
        }
    } else if p < 8.0 {
        let value =
            kappa_star * 2f64.powf(p - 4.0) * (3.0 - p) * (-PI * six_minus_p_over_sin(p) / (2.0 * gamma(p - 1.0)));
        PowerSpectrumCorrection { value, regime: SpectrumRegime::P4To8, time_dependent: false }
    } else {
        PowerSpectrumCorrection {
            value: 4.0 * params.kgamma_over_kstar.powi(2) * params.k_over_kstar.powi(3)
                / ((p - 8.0) * (p - 5.0) * (p - 2.0)),
            regime: SpectrumRegime::PGt8,
            time_dependent: true,
        }
    })
}

/// The value of `k_Γ/k_*` above which the pivot scale has decohered by the
/// time the scale factor is `a = a_*·a_over_astar`:
/// `(ℓ_E H)^{2−p/2}` for `p < 2` and `(a/a_*)^{1−p/2}` for `p > 2`; at
/// `p = 2` both expressions are evaluated and the larger is returned.
pub fn decoherence_threshold(params: &CosmoParams, a_over_astar: f64) -> f64 {
    let p = params.p;
    let early = params.ell_h.powf(2.0 - 0.5 * p);
    let late = a_over_astar.powf(1.0 - 0.5 * p);
    if near(p, 2.0, 1e-12) {
        early.max(late)
    } else if p < 2.0 {
        early
    } else {
        late
    }
}

/// Which representation of the open covariance a discord evaluation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiscordMethod {
    /// Closed forms through incomplete Gamma functions, `x ≤ 1/(ℓ_E H)`.
    Exact,
    /// Super-Hubble expansion, `x < 0.1`; valid to astronomically small `x`.
    Approx,
    /// Direct integration of the transport equations.
    Transport,
}

/// Quantum discord between `±k` (or any `θ` partition) of the de Sitter
/// state at `x`.
///
/// `Approx` assembles `σ²(0) = 1 + Σ₀ + Σ_{2−p}x^{2−p}` and
/// `σ²(θ) ≈ σ²(0) + (1 − 2κB11)² sin²2θ/(4x⁸)` in log space; the other
/// two routes use the determinant (integrated separately) and the
/// half-trace of the covariance.
///
/// # Errors
///
/// Domain errors outside a method's validity window, plus the errors of
/// the underlying route.
pub fn discord_cosmo(x: f64, theta: f64, params: &CosmoParams, method: DiscordMethod) -> Result<DiscordResult> {
    check_x(x, params)?;
    match method {
        DiscordMethod::Exact => {
            let b = exact_open_covariance(x, params)?;
            let det = exact_open_det(x, params)?;
            discord_from_invariants(det, b.half_trace(), theta)
        }
        DiscordMethod::Transport => {
            let x_in = params.x_in();
            let (det, half_trace) = if x >= x_in {
                (1.0, de_sitter_covariance_closed(x).half_trace())
            } else {
                let s = transport_open(params, x, &OdeOptions::default())?.last();
                (s.det, s.block.half_trace())
            };
            discord_from_invariants(det.max(1.0), half_trace, theta)
        }
        DiscordMethod::Approx => {
            if x >= 0.1 {
                return Err(Error::Domain(format!("the super-Hubble approximation needs x < 0.1, got {x}")));
            }
            let (sigma0_sq, b11) = if params.kappa() == 0.0 {
                (1.0, 0.0)
            } else {
                (sigma0_sq_sigma_form(x, params)?, asymptotic_coefficients(params)?.b11)
            };
            let ln_s0_sq = sigma0_sq.max(1.0).ln();
            let s2 = (2.0 * theta).sin();
            let amp = (1.0 - 2.0 * params.kappa() * b11).abs();
            let ln_extra = if s2 == 0.0 || amp == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * amp.ln() + 2.0 * s2.abs().ln() - 2.0 * LN_2 - 8.0 * x.ln()
            };
            discord_from_log_eigenvalues(0.5 * log_add_exp(ln_s0_sq, ln_extra), 0.5 * ln_s0_sq)
        }
    }
}

/// Closed-case discord `f(√(1 + sinh²2r sin²2θ))` with the de Sitter
/// squeezing amplitude, evaluated in log space so that it stays accurate
/// to `x ≈ 10^{−300}`.
pub fn discord_closed(x: f64, theta: f64) -> f64 {
    let (r, _) = de_sitter_squeezing(x);
    crate::discord_measures::discord_pure(r, theta)
}

/// Number of e-folds `N = ln(a/a_H) = −ln x` since Hubble crossing.
pub fn efolds(x: f64) -> f64 {
    -x.ln()
}

/// The angle `−π/4` selecting the `±k` partition.
pub const THETA_PM_K: f64 = -0.25 * PI;

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn fig() -> CosmoParams {
        CosmoParams::at_pivot(10.0, 2.1, 0.1).unwrap()
    }

    #[test]
    fn closed_solution_examples() {
        let b = de_sitter_covariance_closed(1.0);
        assert_eq!((b.g11, b.g12, b.g22), (2.0, 1.0, 1.0));
        assert_eq!(b.det(), 1.0);
        assert_eq!(omega_sq_de_sitter(2.0, -0.5), -4.0);
        let m = de_sitter_mode(1.0);
        assert!((m.v.norm_sqr() - 2.0).abs() < 1e-15);
        assert!((m.wronskian() - Complex64::new(0.0, 2.0)).norm() < 1e-15);
        assert!((de_sitter_bogoliubov(1.0).w.norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn squeezing_examples() {
        let (r, _) = de_sitter_squeezing(1.0);
        assert!((r - 0.5 * 1.5f64.acosh()).abs() < 1e-15);
        let (r, phi) = de_sitter_squeezing(1e-4);
        assert!((r + 2.0 * 1e-4f64.ln()).abs() < 1e-6 && (phi + 1e-4).abs() < 1e-11);
        let (_, phi) = de_sitter_squeezing(1e4);
        assert!((phi + FRAC_PI_2).abs() < 1e-4);
        let lo = de_sitter_squeezing(0.5f64.sqrt() - 1e-12).1;
        let hi = de_sitter_squeezing(0.5f64.sqrt() + 1e-12).1;
        assert!((lo - hi).abs() < 1e-10 && (lo + 0.25 * PI).abs() < 1e-10);
    }

    #[test]
    fn kernel_switches_on_inside_correlation_length() {
        let p = fig();
        let k = cosmo_kernel(&p);
        assert_eq!(k.source(-11.0), 0.0);
        let expected = 2.0 * 100.0 * (1.0f64 / 0.5).powf(2.1 - 3.0);
        assert!((k.source(-0.5) - expected).abs() <= 1e-14 * expected);
        let flat = CosmoParams::at_pivot(1.0, 3.0, 0.1).unwrap();
        assert_eq!(flat.source(0.3), flat.source(7.0));
    }

    #[test]
    fn parameter_validation() {
        assert!(CosmoParams::at_pivot(1.0, 2.5, 1.5).is_err());
        let mut p = fig();
        p.x_star = 2.0;
        assert!(p.validate().is_err());
        assert_eq!(
            exact_open_covariance(0.1, &fig().with_p(4.0)).unwrap_err().kind(),
            "SingularExponent"
        );
        assert!(asymptotic_coefficients(&fig().with_p(5.0)).is_err());
        assert!(asymptotic_coefficients(&fig().with_p(3.0)).is_ok());
    }

    #[test]
    fn a11_example() {
        let c = asymptotic_coefficients(&CosmoParams::at_pivot(1.0, 0.0, 0.1).unwrap()).unwrap();
        assert!((c.a11 - 0.025).abs() < 1e-15);
    }

    #[test]
    fn spectrum_at_p5_is_pi_over_3() {
        let s = power_spectrum_correction(&CosmoParams::new(3.0, 0.2, 5.0, 0.01).unwrap()).unwrap();
        assert!((s.value - PI / 3.0 * 0.04).abs() < 1e-15);
        assert_eq!(s.regime, SpectrumRegime::P4To8);
    }

    #[test]
    fn thresholds() {
        let p4 = CosmoParams::at_pivot(1.0, 4.0, 0.1).unwrap();
        assert!((decoherence_threshold(&p4, 10f64.exp()) - (-10f64).exp()).abs() < 1e-18);
        let p0 = CosmoParams::at_pivot(1.0, 0.0, 0.1).unwrap();
        assert!((decoherence_threshold(&p0, 1e5) - 0.01).abs() < 1e-15);
    }
}
