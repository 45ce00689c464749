//! The JSON scenario description.
//!
//! All physical inputs are the dimensionless ratios the theory is written
//! in: `x = −kη`, `k/k_*`, `k_Γ/k_*`, `p`, `ℓ_E H` and the partition angle
//! `θ`. Unknown fields are rejected so that typos surface as configuration
//! errors instead of silently falling back to defaults.

use crate::failure::CliError;
use gausslind::cosmology::{CosmoParams, THETA_PM_K};
use gausslind::ode::OdeOptions;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

/// What a run computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Closed covariance evolution sampled on the grid.
    EvolveClosed,
    /// Open (environment-coupled) covariance evolution sampled on the grid.
    EvolveOpen,
    /// Discord over a `(p, log₁₀ k_Γ/k_*)` grid at fixed `x`.
    DiscordMap,
    /// Phase-space ellipse of the de Sitter state per e-fold.
    EllipseSeries,
    /// Power-spectrum correction over a `k/k_*` grid.
    Spectrum,
    /// The installation self-checks.
    Selfcheck,
}

impl Mode {
    /// The snake-case name used in configs and file headers.
    pub fn name(self) -> &'static str {
        match self {
            Mode::EvolveClosed => "evolve_closed",
            Mode::EvolveOpen => "evolve_open",
            Mode::DiscordMap => "discord_map",
            Mode::EllipseSeries => "ellipse_series",
            Mode::Spectrum => "spectrum",
            Mode::Selfcheck => "selfcheck",
        }
    }
}

/// Cosmological environment parameters. `p` and `k_Γ/k_*` may be omitted
/// by modes that sweep them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CosmoConfig {
    /// `k/k_*` (default 1, the pivot scale).
    #[serde(default = "one")]
    pub k_over_kstar: f64,
    /// `k_Γ/k_*`.
    #[serde(default)]
    pub kgamma_over_kstar: Option<f64>,
    /// Power-law index of the interaction strength.
    #[serde(default)]
    pub p: Option<f64>,
    /// `ℓ_E H`.
    pub ell_h: f64,
}

fn one() -> f64 {
    1.0
}

impl CosmoConfig {
    /// Validated library parameters.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] when `p` or `k_Γ/k_*` is missing, or the library
    /// validation fails.
    pub fn params(&self) -> Result<CosmoParams, CliError> {
        let p = self.p.ok_or_else(|| CliError::Config("cosmo.p is required for this mode".into()))?;
        let kg = self
            .kgamma_over_kstar
            .ok_or_else(|| CliError::Config("cosmo.kgamma_over_kstar is required for this mode".into()))?;
        CosmoParams::new(self.k_over_kstar, kg, p, self.ell_h).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Built-in frequency presets `ω²(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum FrequencyPreset {
    /// `ω² = 1 − 2/τ²` with `k = 1` and engine time `τ = −x`; the grid
    /// variable is `x = −kη` and the initial state the Bunch–Davies vacuum.
    #[default]
    DeSitter,
    /// Constant `ω²` with wavenumber `k`; the grid variable is the time
    /// itself and the initial state the vacuum `{1, 0, 1}`.
    Constant {
        /// Wavenumber.
        k: f64,
        /// `ω²`.
        omega_sq: f64,
    },
}


/// Built-in environment presets for the source `S(t)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvironmentPreset {
    /// No environment.
    #[default]
    None,
    /// The cosmological power-law source defined by `cosmo`.
    Cosmo,
    /// `S = level` for grid values between `on` and `off`.
    ConstantWindow {
        /// Source strength (≥ 0).
        level: f64,
        /// Grid value where the source switches on.
        on: f64,
        /// Grid value where it switches off.
        off: f64,
    },
}


/// Sample spacing of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    /// Logarithmic (the default; both ends must be positive).
    #[default]
    Log,
    /// Uniform.
    Linear,
}

/// Sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// First sample.
    pub x_start: f64,
    /// Last sample.
    pub x_end: f64,
    /// Number of samples (≥ 2).
    pub points: usize,
    /// Spacing.
    #[serde(default)]
    pub spacing: Spacing,
}

impl Grid {
    /// The sample values, monotone from `x_start` to `x_end` (endpoints exact).
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] for fewer than two points, equal or non-finite
    /// endpoints, or non-positive endpoints on a log grid.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.points < 2 {
            return Err(CliError::Config(format!("grid.points must be at least 2, got {}", self.points)));
        }
        if !(self.x_start.is_finite() && self.x_end.is_finite()) || self.x_start == self.x_end {
            return Err(CliError::Config("grid endpoints must be finite and distinct".into()));
        }
        let n = self.points - 1;
        let v = match self.spacing {
            Spacing::Log => {
                if !(self.x_start > 0.0 && self.x_end > 0.0) {
                    return Err(CliError::Config("log grid endpoints must be positive".into()));
                }
                let (a, b) = (self.x_start.ln(), self.x_end.ln());
                (0..=n).map(|i| (a + (b - a) * i as f64 / n as f64).exp()).collect::<Vec<_>>()
            }
            Spacing::Linear => {
                (0..=n).map(|i| self.x_start + (self.x_end - self.x_start) * i as f64 / n as f64).collect()
            }
        };
        let mut v = v;
        v[0] = self.x_start;
        v[n] = self.x_end;
        Ok(v)
    }
}

/// A closed interval sampled at `points` values: `[min, max, points]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis(pub f64, pub f64, pub usize);

impl Axis {
    /// Uniformly spaced values (a single point yields `min`).
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] for zero points or a non-finite or reversed range.
    pub fn values(&self, name: &str) -> Result<Vec<f64>, CliError> {
        let Axis(lo, hi, n) = *self;
        if n == 0 || !(lo.is_finite() && hi.is_finite()) || hi < lo {
            return Err(CliError::Config(format!("map.{name} must be [min, max, points] with min ≤ max and points ≥ 1")));
        }
        if n == 1 {
            return Ok(vec![lo]);
        }
        Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect())
    }
}

/// Which covariance representation a discord map uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapMethod {
    /// Super-Hubble expansion (default; valid for `x < 0.1`).
    #[default]
    Approx,
    /// Closed forms through incomplete Gamma functions.
    Exact,
    /// Transport integration.
    Transport,
}

/// Discord-map axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapConfig {
    /// `p` axis.
    pub p: Axis,
    /// `log₁₀(k_Γ/k_*)` axis.
    pub log10_kgamma_over_kstar: Axis,
    /// Evaluation point `x = −kη`.
    pub x: f64,
    /// Covariance representation.
    #[serde(default)]
    pub method: MapMethod,
}

/// Integrator tolerances.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance.
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    /// Absolute tolerance.
    #[serde(default = "default_atol")]
    pub atol: f64,
}

fn default_rtol() -> f64 {
    1e-10
}

fn default_atol() -> f64 {
    1e-12
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: default_rtol(), atol: default_atol() }
    }
}

impl Tolerances {
    /// Integrator options.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] unless both tolerances are positive and finite.
    pub fn ode(&self) -> Result<OdeOptions, CliError> {
        if !(self.rtol > 0.0 && self.rtol.is_finite() && self.atol > 0.0 && self.atol.is_finite()) {
            return Err(CliError::Config("tolerances must be positive".into()));
        }
        Ok(OdeOptions::with_tolerances(self.rtol, self.atol))
    }
}

fn default_theta() -> f64 {
    THETA_PM_K
}

/// One run of the tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// What to compute.
    pub mode: Mode,
    /// Cosmological parameters.
    #[serde(default)]
    pub cosmo: Option<CosmoConfig>,
    /// Frequency preset (default de Sitter).
    #[serde(default)]
    pub frequency: FrequencyPreset,
    /// Environment preset (default none).
    #[serde(default)]
    pub environment: EnvironmentPreset,
    /// Sampling grid.
    #[serde(default)]
    pub grid: Option<Grid>,
    /// Partition angle `θ` in radians (default `−π/4`, the `±k` partition).
    #[serde(default = "default_theta")]
    pub theta: f64,
    /// Output file, relative to the output directory (default `<mode>.csv`).
    #[serde(default)]
    pub output_path: Option<String>,
    /// Integrator tolerances.
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Discord-map axes.
    #[serde(default)]
    pub map: Option<MapConfig>,
}

impl ScenarioConfig {
    /// Parses a JSON document.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] on malformed JSON or unknown fields.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid configuration: {e}")))
    }

    /// Reads and parses a configuration file.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] when the file cannot be read or parsed.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// SHA-256 (hex) of the canonical JSON serialisation, so that formatting
    /// and defaulted fields do not change the hash.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("configuration serialises");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }

    /// The sampling grid.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] when absent or invalid.
    pub fn grid_values(&self) -> Result<Vec<f64>, CliError> {
        self.grid
            .ok_or_else(|| CliError::Config(format!("mode {} needs a grid", self.mode.name())))?
            .values()
    }

    /// The cosmology block.
    ///
    /// # Errors
    ///
    /// [`CliError::Config`] when absent.
    pub fn cosmo(&self) -> Result<CosmoConfig, CliError> {
        self.cosmo.ok_or_else(|| CliError::Config(format!("mode {} needs a cosmo block", self.mode.name())))
    }

    /// The output file name.
    pub fn output_name(&self) -> String {
        self.output_path.clone().unwrap_or_else(|| format!("{}.csv", self.mode.name()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_takes_defaults() {
        let c = ScenarioConfig::from_json(r#"{"mode": "evolve_closed", "grid": {"x_start": 100, "x_end": 0.01, "points": 5}}"#)
            .unwrap();
        assert_eq!(c.frequency, FrequencyPreset::DeSitter);
        assert_eq!(c.theta, THETA_PM_K);
        assert_eq!(c.output_name(), "evolve_closed.csv");
        let g = c.grid_values().unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 100.0);
        assert_eq!(g[4], 0.01);
        assert!((g[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_fields_and_presets_are_rejected() {
        assert!(ScenarioConfig::from_json(r#"{"mode": "evolve_closed", "gird": {}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"mode": "evolve_closed", "frequency": {"preset": "anti_de_sitter"}}"#).is_err());
        assert!(ScenarioConfig::from_json(r#"{"mode": "fly"}"#).is_err());
    }

    #[test]
    fn grids_are_validated() {
        let g = Grid { x_start: 1.0, x_end: 1.0, points: 3, spacing: Spacing::Log };
        assert!(g.values().is_err());
        let g = Grid { x_start: -1.0, x_end: 1.0, points: 3, spacing: Spacing::Log };
        assert!(g.values().is_err());
        let g = Grid { x_start: -1.0, x_end: 1.0, points: 3, spacing: Spacing::Linear };
        assert_eq!(g.values().unwrap(), vec![-1.0, 0.0, 1.0]);
        let g = Grid { x_start: 0.0, x_end: 1.0, points: 1, spacing: Spacing::Linear };
        assert!(g.values().is_err());
    }

    #[test]
    fn hash_ignores_formatting() {
        let a = ScenarioConfig::from_json(r#"{"mode":"spectrum"}"#).unwrap();
        let b = ScenarioConfig::from_json("{\n  \"mode\": \"spectrum\",\n  \"theta\": -0.7853981633974483\n}").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }
}
