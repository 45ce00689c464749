//! Adaptive Dormand–Prince 5(4) integrator with continuous output.
//!
//! Step control follows the PI controller of Hairer, Nørsett & Wanner
//! (`DOPRI5`), with the mixed error norm
//! `‖e‖ = sqrt(mean((eᵢ / (atol + rtol·max(|yᵢ|, |ŷᵢ|)))²))`. Every accepted
//! step stores the coefficients of the fifth-order continuous extension so
//! that the trajectory can be evaluated anywhere inside the span, which the
//! Green's-function quadrature relies on.
//!
//! The integration direction is inferred from the sign of `t1 − t0`.

use crate::error::{Error, Result};

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Relative tolerance.
    pub rtol: f64,
    /// Absolute tolerance.
    pub atol: f64,
    /// Largest admissible step magnitude (`∞` for unbounded).
    pub h_max: f64,
    /// Maximum number of attempted steps.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    /// `rtol = 1e−10`, `atol = 1e−12`, unbounded step, 10⁶ steps.
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: f64::INFINITY, max_steps: 1_000_000 }
    }
}

impl OdeOptions {
    /// Options with the given tolerances and default limits.
    pub fn with_tolerances(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }
}

// Butcher tableau of Dormand & Prince (1980).
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// Error coefficients b − b̂.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Continuous-extension coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step with its continuous-extension coefficients.
#[derive(Debug, Clone)]
struct DenseSegment {
    t: f64,
    h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseSegment {
    fn eval(&self, t: f64, out: &mut [f64]) {
        let theta = (t - self.t) / self.h;
        let theta1 = 1.0 - theta;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        for i in 0..out.len() {
            out[i] = r1[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
    }
}

/// Result of an integration: accepted step points plus dense output.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Times of the accepted steps, including both endpoints.
    pub times: Vec<f64>,
    /// States at [`Trajectory::times`].
    pub states: Vec<Vec<f64>>,
    segments: Vec<DenseSegment>,
    /// Number of right-hand-side evaluations performed.
    pub evaluations: usize,
}

impl Trajectory {
    /// Dimension of the state vector.
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }

    /// First time of the trajectory.
    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    /// Last time of the trajectory.
    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one point")
    }

    /// Final state.
    pub fn last(&self) -> &[f64] {
        self.states.last().expect("trajectory has at least one point")
    }

    /// Continuous-output evaluation at `t` inside the integrated span.
    ///
    /// # Errors
    ///
    /// [`Error::Domain`] if `t` lies outside the span.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let (lo, hi) = if self.t_start() <= self.t_end() {
            (self.t_start(), self.t_end())
        } else {
            (self.t_end(), self.t_start())
        };
        let slack = 1e-12 * (hi - lo).abs().max(hi.abs());
        if !(t >= lo - slack && t <= hi + slack) {
            return Err(Error::Domain(format!("t = {t} outside trajectory span [{lo}, {hi}]")));
        }
        let mut out = vec![0.0; self.dim()];
        if self.segments.is_empty() {
            out.copy_from_slice(&self.states[0]);
            return Ok(out);
        }
        let forward = self.t_end() >= self.t_start();
        // Segments are ordered along the direction of integration.
        let idx = self
            .segments
            .partition_point(|s| if forward { s.t + s.h < t } else { s.t + s.h > t })
            .min(self.segments.len() - 1);
        self.segments[idx].eval(t, &mut out);
        Ok(out)
    }
}

/// Integrates `y′ = f(t, y)` from `t0` to `t1` with adaptive step control.
///
/// `f(t, y, dy)` writes the derivative into `dy`.
///
/// # Errors
///
/// * [`Error::NonFinite`] if the right-hand side produces a non-finite value.
/// * [`Error::StepFailure`] if the step size underflows or the step budget is
///   exhausted.
pub fn integrate<F>(mut f: F, t0: f64, t1: f64, y0: &[f64], opts: &OdeOptions) -> Result<Trajectory>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    if !(t0.is_finite() && t1.is_finite()) || y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }
    let mut traj = Trajectory { times: vec![t0], states: vec![y0.to_vec()], segments: Vec::new(), evaluations: 0 };
    if t0 == t1 {
        return Ok(traj);
    }
    let dir = (t1 - t0).signum();
    let span = (t1 - t0).abs();

    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut k5 = vec![0.0; n];
    let mut k6 = vec![0.0; n];
    let mut k7 = vec![0.0; n];
    let mut ytmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];

    f(t0, &y, &mut k1);
    traj.evaluations += 1;
    check_finite(&k1, t0)?;

    let mut h = initial_step(&mut f, t0, &y, &k1, dir, span, opts, &mut traj.evaluations).min(opts.h_max);
    let mut t = t0;
    let mut facold: f64 = 1e-4;
    let mut last_rejected = false;
    const SAFE: f64 = 0.9;
    const BETA: f64 = 0.04;
    const EXPO1: f64 = 0.2 - BETA * 0.75;
    const FACC1: f64 = 5.0; // 1/0.2
    const FACC2: f64 = 0.1; // 1/10

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t).abs();
        let mut last = false;
        if h >= remaining * (1.0 - 1e-14) {
            h = remaining;
            last = true;
        }
        if h < 1e-14 * t.abs().max(span) {
            return Err(Error::StepFailure { t, reason: format!("step size underflow (h = {h:e})") });
        }
        let hs = dir * h;

        for i in 0..n {
            ytmp[i] = y[i] + hs * A21 * k1[i];
        }
        f(t + C2 * hs, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * hs, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * hs, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * hs, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + hs * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        let t_new = if last { t1 } else { t + hs };
        f(t + hs, &ytmp, &mut k6);
        for i in 0..n {
            ynew[i] = y[i] + hs * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t_new, &ynew, &mut k7);
        traj.evaluations += 6;

        let mut err = 0.0;
        let mut finite = true;
        for i in 0..n {
            let e = hs * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
            finite &= ynew[i].is_finite() && k7[i].is_finite();
        }
        err = (err / n as f64).sqrt();
        if !finite || !err.is_finite() {
            // Shrink hard and retry; give up only if the step collapses.
            h *= 0.1;
            last_rejected = true;
            if h < 1e-14 * t.abs().max(span) {
                return Err(Error::NonFinite { t });
            }
            continue;
        }

        let fac11 = err.powf(EXPO1);
        let fac = (fac11 / facold.powf(BETA) / SAFE).clamp(FACC2, FACC1);
        let mut h_new = h / fac;

        if err <= 1.0 {
            facold = err.max(1e-4);
            // Dense output coefficients.
            let mut r = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
            for i in 0..n {
                let ydiff = ynew[i] - y[i];
                let bspl = hs * k1[i] - ydiff;
                r[0][i] = y[i];
                r[1][i] = ydiff;
                r[2][i] = bspl;
                r[3][i] = ydiff - hs * k7[i] - bspl;
                r[4][i] = hs * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            traj.segments.push(DenseSegment { t, h: t_new - t, rcont: r });
            t = t_new;
            y.copy_from_slice(&ynew);
            k1.copy_from_slice(&k7);
            traj.times.push(t);
            traj.states.push(y.clone());
            if last {
                return Ok(traj);
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            h = h_new.min(opts.h_max);
        } else {
            h_new = h / (fac11 / SAFE).min(FACC1);
            last_rejected = true;
            h = h_new;
        }
    }
    Err(Error::StepFailure { t, reason: format!("step budget of {} exhausted", opts.max_steps) })
}

fn check_finite(v: &[f64], t: f64) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Starting step from the heuristic of Hairer, Nørsett & Wanner (II.4).
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    t0: f64,
    y0: &[f64],
    f0: &[f64],
    dir: f64,
    span: f64,
    opts: &OdeOptions,
    evals: &mut usize,
) -> f64
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let sc: Vec<f64> = y0.iter().map(|y| opts.atol + opts.rtol * y.abs()).collect();
    let norm = |v: &[f64]| (v.iter().zip(&sc).map(|(a, s)| (a / s) * (a / s)).sum::<f64>() / n as f64).sqrt();
    let d0 = norm(y0);
    let d1 = norm(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);
    let y1: Vec<f64> = y0.iter().zip(f0).map(|(y, d)| y + dir * h0 * d).collect();
    let mut f1 = vec![0.0; n];
    f(t0 + dir * h0, &y1, &mut f1);
    *evals += 1;
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let dm = d1.max(d2);
    let h1 = if dm <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / dm).powf(0.2) };
    let h = (100.0 * h0).min(h1).min(span);
    if h.is_finite() && h > 0.0 {
        h
    } else {
        1e-6 * span
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let tr = integrate(|_, y, d| d[0] = -y[0], 0.0, 5.0, &[1.0], &OdeOptions::default()).unwrap();
        assert!((tr.last()[0] - (-5.0f64).exp()).abs() < 1e-11);
        // Dense output between steps.
        let mid = tr.eval(2.345).unwrap()[0];
        assert!((mid - (-2.345f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn harmonic_oscillator_backwards() {
        let tr = integrate(
            |_, y, d| {
                d[0] = y[1];
                d[1] = -y[0];
            },
            10.0,
            0.0,
            &[10f64.cos(), -10f64.sin()],
            &OdeOptions::default(),
        )
        .unwrap();
        assert!((tr.last()[0] - 1.0).abs() < 1e-9);
        for t in [0.3, 4.7, 9.99] {
            assert!((tr.eval(t).unwrap()[0] - t.cos()).abs() < 1e-9);
        }
        assert!(tr.eval(10.5).is_err());
    }

    #[test]
    fn non_finite_rhs_is_reported() {
        let r = integrate(|_, _, d| d[0] = f64::NAN, 0.0, 1.0, &[1.0], &OdeOptions::default());
        assert!(matches!(r, Err(Error::NonFinite { .. })));
    }
}
