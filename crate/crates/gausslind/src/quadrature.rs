//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature of complex-valued
//! integrands, with user-supplied breakpoints.
//!
//! Oscillatory integrands are handled by seeding the interval list with
//! breakpoints at every half period ([`half_period_breaks`]) so that no
//! panel ever contains more than half an oscillation before refinement
//! starts. The panel with the largest error estimate is bisected until the
//! summed estimate drops below `max(abs_tol, rel_tol·|I|)`.

use num_complex::Complex64;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Kronrod abscissae, Gauss and Kronrod weights of the 21-point rule
// (QUADPACK `qk21`).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target.
    pub rel_tol: f64,
    /// Maximum number of panels.
    pub max_panels: usize,
}

impl Default for QuadOptions {
    /// Relative tolerance `1e−10`, negligible absolute tolerance.
    fn default() -> Self {
        Self { abs_tol: 1e-300, rel_tol: 1e-10, max_panels: 20_000 }
    }
}

/// Integral estimate and error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    /// Integral estimate.
    pub value: Complex64,
    /// Estimated absolute error.
    pub error: f64,
    /// Number of integrand evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = Complex64::new(0.0, 0.0);
    let mut kron = fc * WGK[10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kron += sum * WGK[j];
        if j % 2 == 1 {
            gauss += sum * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    Panel { a, b, value, error }
}

/// Adaptive integration of `f` over the consecutive panels given by `breaks`
/// (at least two increasing or decreasing points).
///
/// # Errors
///
/// [`Error::QuadratureFailure`] when the panel budget is exhausted before the
/// error target is met, [`Error::Domain`] for invalid breakpoints or a
/// non-finite integrand.
pub fn integrate<F: FnMut(f64) -> Complex64>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> Result<QuadResult> {
    if breaks.len() < 2 || breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::Domain("quadrature needs at least two finite breakpoints".into()));
    }
    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in breaks.windows(2) {
        if w[0] != w[1] {
            heap.push(kronrod(&mut f, w[0], w[1]));
            evaluations += 21;
        }
    }
    loop {
        let (value, error) = heap
            .iter()
            .fold((Complex64::new(0.0, 0.0), 0.0), |(v, e), p| (v + p.value, e + p.error));
        if !(value.re.is_finite() && value.im.is_finite()) {
            return Err(Error::Domain("non-finite integrand".into()));
        }
        let target = opts.abs_tol.max(opts.rel_tol * value.norm());
        if error <= target {
            return Ok(QuadResult { value, error, evaluations });
        }
        if heap.len() >= opts.max_panels {
            return Err(Error::QuadratureFailure { tol: target, estimate: error });
        }
        let worst = heap.pop().expect("non-empty panel list");
        let mid = 0.5 * (worst.a + worst.b);
        if mid == worst.a || mid == worst.b {
            return Err(Error::QuadratureFailure { tol: target, estimate: error });
        }
        heap.push(kronrod(&mut f, worst.a, mid));
        heap.push(kronrod(&mut f, mid, worst.b));
        evaluations += 42;
    }
}

/// Real-valued convenience wrapper of [`integrate`].
pub fn integrate_real<F: FnMut(f64) -> f64>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> Result<(f64, f64)> {
    let r = integrate(|t| Complex64::new(f(t), 0.0), breaks, opts)?;
    Ok((r.value.re, r.error))
}

/// Breakpoints from `a` to `b` (either order) containing every multiple of
/// `period/2` strictly inside the interval, plus both endpoints.
pub fn half_period_breaks(a: f64, b: f64, period: f64) -> Vec<f64> {
    let half = 0.5 * period.abs();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    let mut out = vec![lo];
    if half > 0.0 && half.is_finite() {
        let mut k = (lo / half).floor() + 1.0;
        while k * half < hi {
            let p = k * half;
            if p > lo {
                out.push(p);
            }
            k += 1.0;
        }
    }
    out.push(hi);
    if a > b {
        out.reverse();
    }
    out
}

/// Geometric refinement of `[a, b]` with `0 < a < b`: points `a·r^j`.
///
/// Used for integrands with power-law behaviour near the small endpoint.
pub fn geometric_breaks(a: f64, b: f64, ratio: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut t = a * ratio;
    while t < b {
        out.push(t);
        t *= ratio;
    }
    out.push(b);
    out
}

/// Merges two increasing breakpoint lists into one increasing list.
pub fn merge_breaks(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut v: Vec<f64> = a.iter().chain(b).copied().collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}
