//! Evaluation of each run mode into a [`Table`].

use crate::config::{EnvironmentPreset, FrequencyPreset, MapMethod, Mode, ScenarioConfig};
use crate::failure::CliError;
use crate::output::{num, Table};
use crate::selfcheck;
use gausslind::closed_dynamics::{evolve_closed_transport, wigner_ellipse, FrequencyFunction};
use gausslind::cosmology::{
    de_sitter_covariance_closed, de_sitter_frequency, discord_cosmo, efolds, is_singular_index,
    power_spectrum_correction, transport_open, CosmoParams, DiscordMethod,
};
use gausslind::discord_measures::discord_from_invariants;
use gausslind::error::Error;
use gausslind::open_dynamics::{evolve_open, EnvironmentKernel};
use gausslind::symplectic_core::{squeezing_from_covariance_and_det, CovarianceBlock, SqueezingState};
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// Offset applied to singular power-law indices in discord maps.
pub const SINGULAR_P_NUDGE: f64 = 1e-3;

/// Runs a scenario and writes its CSV into `out_dir`; returns the file path.
///
/// A failing self-check still writes its report before the error is
/// returned.
///
/// # Errors
///
/// Configuration, numerical and output failures.
pub fn run(config: &ScenarioConfig, out_dir: &Path) -> Result<PathBuf, CliError> {
    let table = evaluate(config)?;
    let path = out_dir.join(config.output_name());
    table.write(&path, config.mode.name(), &config.hash())?;
    if config.mode == Mode::Selfcheck {
        selfcheck_verdict(&table)?;
    }
    Ok(path)
}

/// Evaluates a scenario without writing anything.
///
/// # Errors
///
/// Configuration and numerical failures.
pub fn evaluate(config: &ScenarioConfig) -> Result<Table, CliError> {
    match config.mode {
        Mode::EvolveClosed => evolve_closed_table(config),
        Mode::EvolveOpen => evolve_open_table(config),
        Mode::DiscordMap => discord_map_table(config),
        Mode::EllipseSeries => ellipse_table(config),
        Mode::Spectrum => spectrum_table(config),
        Mode::Selfcheck => Ok(selfcheck_table()),
    }
}

/// The frequency function, the map from grid values to engine time, and
/// the initial block at the first grid value.
struct Dynamics {
    freq: FrequencyFunction,
    time_sign: f64,
    initial: CovarianceBlock,
}

impl Dynamics {
    fn new(preset: FrequencyPreset, x_start: f64) -> Result<Self, CliError> {
        match preset {
            FrequencyPreset::DeSitter => {
                if !(x_start > 0.0) {
                    return Err(CliError::Config("the de Sitter preset needs a positive grid (x = −kη)".into()));
                }
                Ok(Self { freq: de_sitter_frequency(), time_sign: -1.0, initial: de_sitter_covariance_closed(x_start) })
            }
            FrequencyPreset::Constant { k, omega_sq } => {
                let freq = FrequencyFunction::constant(k, omega_sq).map_err(|e| CliError::Config(e.to_string()))?;
                Ok(Self { freq, time_sign: 1.0, initial: CovarianceBlock::VACUUM })
            }
        }
    }

    fn time(&self, x: f64) -> f64 {
        self.time_sign * x
    }
}

/// `(r, φ)` from a block and its separately known determinant; the angle is
/// undefined (reported as 0) once `r` falls below the inversion threshold.
fn squeezing_columns(b: &CovarianceBlock, det: f64) -> Result<(f64, f64), CliError> {
    match squeezing_from_covariance_and_det(b, det) {
        Ok(s) => Ok((s.r, s.phi)),
        Err(Error::DegenerateSqueezing { r }) => Ok((r, 0.0)),
        Err(e) => Err(e.into()),
    }
}

fn evolve_closed_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let grid = config.grid_values()?;
    let dynamics = Dynamics::new(config.frequency, grid[0])?;
    let opts = config.tolerances.ode()?;
    let (t0, t1) = (dynamics.time(grid[0]), dynamics.time(grid[grid.len() - 1]));
    let traj = evolve_closed_transport(&dynamics.freq, t0, t1, &dynamics.initial, &opts)?;
    // closed evolution conserves det γ exactly; entries of size e^{2r}
    // cannot resolve it, so the initial value is carried along
    let lambda = dynamics.initial.clamped_det()?;
    let mut table = Table::new(&["x", "g11", "g12", "g22", "r", "phi", "purity"]);
    table.notes.push(format!("frequency: {:?}", config.frequency));
    for &x in &grid {
        let b = traj.eval(dynamics.time(x))?;
        let (r, phi) = squeezing_columns(&b, lambda)?;
        table.push(vec![num(x), num(b.g11), num(b.g12), num(b.g22), num(r), num(phi), num(1.0 / lambda)]);
    }
    Ok(table)
}

fn evolve_open_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let grid = config.grid_values()?;
    let opts = config.tolerances.ode()?;
    let mut table = Table::new(&["x", "g11", "g12", "g22", "det", "purity", "r", "phi", "discord"]);
    let emit = |table: &mut Table, x: f64, b: CovarianceBlock, det: f64| -> Result<(), CliError> {
        let (r, phi) = squeezing_columns(&b, det)?;
        let d = discord_from_invariants(det.max(1.0), b.half_trace(), config.theta)?;
        table.push(vec![
            num(x),
            num(b.g11),
            num(b.g12),
            num(b.g22),
            num(det),
            num(1.0 / det.max(1.0)),
            num(r),
            num(phi),
            num(d.discord),
        ]);
        Ok(())
    };
    match config.environment {
        EnvironmentPreset::Cosmo => {
            if config.frequency != FrequencyPreset::DeSitter {
                return Err(CliError::Config("the cosmo environment requires the de Sitter frequency".into()));
            }
            let params = config.cosmo()?.params()?;
            table.notes.push(format!("cosmo: {params:?}"));
            let x_min = grid.iter().copied().fold(f64::INFINITY, f64::min);
            if !(x_min > 0.0) {
                return Err(CliError::Config("the de Sitter preset needs a positive grid (x = −kη)".into()));
            }
            let traj = if x_min < params.x_in() { Some(transport_open(&params, x_min, &opts)?) } else { None };
            for &x in &grid {
                match (&traj, x < params.x_in()) {
                    (Some(t), true) => {
                        let s = t.sample(-x)?;
                        emit(&mut table, x, s.block, s.det)?;
                    }
                    _ => emit(&mut table, x, de_sitter_covariance_closed(x), 1.0)?,
                }
            }
        }
        env => {
            let dynamics = Dynamics::new(config.frequency, grid[0])?;
            let kernel = match env {
                EnvironmentPreset::None => EnvironmentKernel::none(),
                EnvironmentPreset::ConstantWindow { level, on, off } => {
                    if !(level >= 0.0 && level.is_finite()) {
                        return Err(CliError::Config("environment.level must be non-negative".into()));
                    }
                    EnvironmentKernel::constant_window(level, dynamics.time(on), dynamics.time(off))
                }
                EnvironmentPreset::Cosmo => unreachable!("handled above"),
            };
            table.notes.push(format!("frequency: {:?}; environment: {}", config.frequency, kernel.description()));
            let (t0, t1) = (dynamics.time(grid[0]), dynamics.time(grid[grid.len() - 1]));
            let traj = evolve_open(&dynamics.freq, &kernel, t0, t1, &dynamics.initial, &opts)?;
            for &x in &grid {
                let s = traj.sample(dynamics.time(x))?;
                emit(&mut table, x, s.block, s.det)?;
            }
        }
    }
    Ok(table)
}

fn discord_map_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let cosmo = config.cosmo()?;
    let map = config.map.ok_or_else(|| CliError::Config("mode discord_map needs a map block".into()))?;
    let ps = map.p.values("p")?;
    let lkgs = map.log10_kgamma_over_kstar.values("log10_kgamma_over_kstar")?;
    let method = match map.method {
        MapMethod::Approx => DiscordMethod::Approx,
        MapMethod::Exact => DiscordMethod::Exact,
        MapMethod::Transport => DiscordMethod::Transport,
    };
    // validate the shared parameters once, so that bad input is a config error
    CosmoParams::new(cosmo.k_over_kstar, 0.0, ps[0], cosmo.ell_h).map_err(|e| CliError::Config(e.to_string()))?;
    if !(map.x > 0.0 && map.x.is_finite()) {
        return Err(CliError::Config("map.x must be positive".into()));
    }
    let cells: Vec<(f64, f64)> = ps.iter().flat_map(|&p| lkgs.iter().map(move |&l| (p, l))).collect();
    let results: Vec<Result<Vec<String>, CliError>> = cells
        .par_iter()
        .map(|&(p, lkg)| {
            let p_eval = if is_singular_index(p) { p + SINGULAR_P_NUDGE } else { p };
            let params = CosmoParams::new(cosmo.k_over_kstar, 10f64.powf(lkg), p_eval, cosmo.ell_h)?;
            let d = discord_cosmo(map.x, config.theta, &params, method)?;
            let log10_purity = -2.0 * d.ln_sigma_zero / std::f64::consts::LN_10;
            Ok(vec![num(p), num(lkg), num(p_eval), num(d.discord), num(log10_purity)])
        })
        .collect();
    let mut table = Table::new(&["p", "log10_kgamma_over_kstar", "p_eval", "discord", "log10_purity"]);
    table.notes.push(format!("x: {}; theta: {}; method: {:?}", num(map.x), num(config.theta), map.method));
    for r in results {
        table.push(r?);
    }
    Ok(table)
}

fn ellipse_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    if config.frequency != FrequencyPreset::DeSitter {
        return Err(CliError::Config("ellipse_series follows the de Sitter run".into()));
    }
    let grid = config.grid_values()?;
    let dynamics = Dynamics::new(config.frequency, grid[0])?;
    let opts = config.tolerances.ode()?;
    let traj = evolve_closed_transport(
        &dynamics.freq,
        dynamics.time(grid[0]),
        dynamics.time(grid[grid.len() - 1]),
        &dynamics.initial,
        &opts,
    )?;
    let lambda = dynamics.initial.clamped_det()?;
    let mut table = Table::new(&["N", "semi_major", "semi_minor", "tilt"]);
    table.notes.push("axes of the sqrt(2)-sigma contour, lambda^(1/4) e^(+-r); N = ln(a/a_H) = -ln x".into());
    for &x in &grid {
        let b = traj.eval(dynamics.time(x))?;
        let (r, phi) = squeezing_columns(&b, lambda)?;
        let e = wigner_ellipse(&SqueezingState { r, phi, lambda, theta_rot: None }, std::f64::consts::SQRT_2);
        // `+ 0.0` turns the −0 at Hubble crossing into 0.
        table.push(vec![num(efolds(x) + 0.0), num(e.semi_major), num(e.semi_minor), num(e.tilt)]);
    }
    Ok(table)
}

fn spectrum_table(config: &ScenarioConfig) -> Result<Table, CliError> {
    let base = config.cosmo()?.params()?;
    let grid = config.grid_values()?;
    if grid.iter().any(|&k| !(k > 0.0)) {
        return Err(CliError::Config("spectrum grid values are k/k* and must be positive".into()));
    }
    let mut table = Table::new(&["k_over_kstar", "delta_p_over_p", "regime", "time_dependent"]);
    table.notes.push(format!("p: {}; kgamma_over_kstar: {}; ell_h: {}", num(base.p), num(base.kgamma_over_kstar), num(base.ell_h)));
    for &k in &grid {
        let params = base.with_k_over_kstar(k).map_err(|e| CliError::Config(e.to_string()))?;
        let c = power_spectrum_correction(&params)?;
        table.push(vec![num(k), num(c.value), c.regime.label().into(), c.time_dependent.to_string()]);
    }
    Ok(table)
}

fn selfcheck_table() -> Table {
    let mut table = Table::new(&["criterion", "check", "status", "seconds", "detail"]);
    for o in selfcheck::run_all() {
        table.push(vec![
            o.criterion.to_string(),
            o.name.into(),
            if o.passed { "PASS" } else { "FAIL" }.into(),
            num(o.seconds),
            format!("\"{}\"", o.detail.replace('"', "'")),
        ]);
    }
    table
}

fn selfcheck_verdict(table: &Table) -> Result<(), CliError> {
    let failed: Vec<&str> = table.rows.iter().filter(|r| r[2] == "FAIL").map(|r| r[1].as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(failed.join(", ")))
    }
}
