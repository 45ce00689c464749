//! Covariance-matrix algebra for homogeneous two-mode Gaussian states.
//!
//! Phase-space vectors are ordered `R = (v_R, p_R, v_I, p_I)` and the
//! symplectic form is `J = diag(J₁, J₁)` with `J₁ = [[0, 1], [−1, 0]]`. A
//! homogeneous state has covariance `γ = diag(B, B)` in the R/I partition,
//! where `B` is a [`CovarianceBlock`]; every other bipartition is reached
//! through a symplectic matrix `T`, under which `γ ↦ T γ Tᵀ`.
//!
//! Large squeezing produces covariance entries spanning dozens of orders
//! of magnitude, so determinants are evaluated with a fused-multiply-add
//! 2×2 kernel and the squeezing parameterisation is converted with
//! cancellation-free formulas (`e^{±2r}` forms instead of `cosh ± sinh`).

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Dense 2×2 real matrix, row-major.
pub type Matrix2 = [[f64; 2]; 2];
/// Dense 4×4 real matrix, row-major.
pub type Matrix4 = [[f64; 4]; 4];

/// Determinants in `[1 − HEISENBERG_SLACK, 1)` are rounded up to 1.
pub const HEISENBERG_SLACK: f64 = 1e-9;

/// Squeezing amplitudes at or below this value leave the angle undefined.
pub const MIN_SQUEEZING: f64 = 1e-8;

/// `a·d − b·c` with a single rounding error in the result (Kahan's
/// algorithm), so that nearly-singular products of huge entries keep their
/// significant digits.
pub fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    let w = b * c;
    let e = b.mul_add(-c, w);
    let f = a.mul_add(d, -w);
    f + e
}

/// Wraps an angle into `(−π, π]`.
pub fn canonical_angle(a: f64) -> f64 {
    let t = (a + PI).rem_euclid(2.0 * PI) - PI;
    if t <= -PI {
        PI
    } else {
        t
    }
}

/// The 2×2 covariance block `(γ11, γ12, γ22)` of one sector of a
/// homogeneous two-mode state in the R/I partition.
///
/// Fields are public for ergonomic use inside integrators; use
/// [`CovarianceBlock::new`] to obtain a validated block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceBlock {
    /// `⟨{v̂, v̂}⟩`-type entry (field-field).
    pub g11: f64,
    /// Symmetrised field-momentum entry (`γ12 = γ21`).
    pub g12: f64,
    /// Momentum-momentum entry.
    pub g22: f64,
}

impl CovarianceBlock {
    /// Vacuum block `{1, 0, 1}`.
    pub const VACUUM: CovarianceBlock = CovarianceBlock { g11: 1.0, g12: 0.0, g22: 1.0 };

    /// Validated constructor.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidCovariance`] for non-finite or non-positive diagonal
    /// entries, [`Error::BelowHeisenberg`] when `det < 1 − 1e−9`.
    ///
    /// # Example
    ///
    /// ```
    /// use gausslind::symplectic_core::CovarianceBlock;
    /// let b = CovarianceBlock::new(2.0, 1.0, 1.0).unwrap();
    /// assert_eq!(b.det(), 1.0);
    /// assert!(CovarianceBlock::new(0.5, 0.0, 1.0).is_err());
    /// ```
    pub fn new(g11: f64, g12: f64, g22: f64) -> Result<Self> {
        let b = CovarianceBlock { g11, g12, g22 };
        b.validate()?;
        Ok(b)
    }

    /// Checks the block invariants (see [`CovarianceBlock::new`]).
    pub fn validate(&self) -> Result<()> {
        if !(self.g11.is_finite() && self.g12.is_finite() && self.g22.is_finite()) {
            return Err(Error::InvalidCovariance(format!("non-finite entries {self:?}")));
        }
        if self.g11 <= 0.0 || self.g22 <= 0.0 {
            return Err(Error::InvalidCovariance(format!("non-positive diagonal {self:?}")));
        }
        let det = self.det();
        if det < 1.0 - HEISENBERG_SLACK {
            return Err(Error::BelowHeisenberg { det });
        }
        Ok(())
    }

    /// Determinant `γ11·γ22 − γ12²`, accurate to a few ulps for the stored
    /// entries.
    pub fn det(&self) -> f64 {
        det2(self.g11, self.g12, self.g12, self.g22)
    }

    /// Determinant with the Heisenberg clamp applied: values in
    /// `[1 − 1e−9, 1)` are returned as exactly 1.
    ///
    /// # Errors
    ///
    /// [`Error::BelowHeisenberg`] below the clamp window.
    pub fn clamped_det(&self) -> Result<f64> {
        let det = self.det();
        if det >= 1.0 {
            Ok(det)
        } else if det >= 1.0 - HEISENBERG_SLACK {
            Ok(1.0)
        } else {
            Err(Error::BelowHeisenberg { det })
        }
    }

    /// Half-trace `(γ11 + γ22)/2 = 2𝒩 + 1`.
    pub fn half_trace(&self) -> f64 {
        0.5 * (self.g11 + self.g22)
    }

    /// The block as a 2×2 matrix.
    pub fn matrix(&self) -> Matrix2 {
        [[self.g11, self.g12], [self.g12, self.g22]]
    }

    /// The full R/I-partition covariance `diag(B, B)`.
    pub fn to_covariance4(&self) -> Covariance4 {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in self.matrix().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[i][j] = *v;
                m[i + 2][j + 2] = *v;
            }
        }
        Covariance4 { m }
    }
}

/// A full 4×4 two-mode covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Covariance4 {
    /// Symmetric entries.
    pub m: Matrix4,
}

impl Covariance4 {
    /// Validated constructor: symmetric to relative `1e−12` and
    /// `det ≥ 1 − 1e−9`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidCovariance`] or [`Error::BelowHeisenberg`].
    pub fn new(m: Matrix4) -> Result<Self> {
        let scale = m.iter().flatten().fold(0.0_f64, |a, v| a.max(v.abs()));
        if !scale.is_finite() {
            return Err(Error::InvalidCovariance("non-finite entries".into()));
        }
        for i in 0..4 {
            for j in 0..i {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale {
                    return Err(Error::InvalidCovariance(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let c = Covariance4 { m };
        let det = c.det();
        if det < 1.0 - HEISENBERG_SLACK {
            return Err(Error::BelowHeisenberg { det });
        }
        Ok(c)
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> f64 {
        det4(&self.m)
    }

    /// The 2×2 sub-block with row offset `r` and column offset `c` (each 0 or 2).
    pub fn block(&self, r: usize, c: usize) -> Matrix2 {
        [[self.m[r][c], self.m[r][c + 1]], [self.m[r + 1][c], self.m[r + 1][c + 1]]]
    }
}

fn det4(m: &Matrix4) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let piv = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap_or(col);
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..4 {
            let f = a[row][col] / a[col][col];
            for k in col..4 {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    det
}

/// Matrix product of two 4×4 matrices.
pub fn matmul4(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

/// Transpose of a 4×4 matrix.
pub fn transpose4(a: &Matrix4) -> Matrix4 {
    let mut out = [[0.0; 4]; 4];
    for (i, row) in a.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

/// The two-mode symplectic form `J = diag(J₁, J₁)`.
pub fn symplectic_form() -> Matrix4 {
    [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]]
}

/// The four angles `(α, β, δ, θ)` characterising a bipartition, stored in
/// `(−π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionAngles {
    /// Rotation inside the first subsystem.
    pub alpha: f64,
    /// Phase of the mixing into the second subsystem.
    pub beta: f64,
    /// Phase of the mixing into the first subsystem.
    pub delta: f64,
    /// Mixing angle between the R and I sectors.
    pub theta: f64,
}

impl PartitionAngles {
    /// Canonicalising constructor.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] when an angle is not finite.
    pub fn new(alpha: f64, beta: f64, delta: f64, theta: f64) -> Result<Self> {
        if ![alpha, beta, delta, theta].iter().all(|a| a.is_finite()) {
            return Err(Error::InvalidParameter("partition angles must be finite".into()));
        }
        Ok(Self {
            alpha: canonical_angle(alpha),
            beta: canonical_angle(beta),
            delta: canonical_angle(delta),
            theta: canonical_angle(theta),
        })
    }

    /// The reference R/I partition (all angles zero).
    pub fn real_imaginary() -> Self {
        Self { alpha: 0.0, beta: 0.0, delta: 0.0, theta: 0.0 }
    }

    /// The `±k` partition `(0, −π, π/2, −π/4)`.
    pub fn plus_minus_k() -> Self {
        Self::new(0.0, -PI, 0.5 * PI, -0.25 * PI).expect("finite angles")
    }

    /// Member `θ` of the one-parameter family `(0, 3π/2 + 2θ, π/2, θ)`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] when `theta` is not finite.
    pub fn one_parameter(theta: f64) -> Result<Self> {
        Self::new(0.0, 1.5 * PI + 2.0 * theta, 0.5 * PI, theta)
    }
}

/// The general partition matrix `T^{R/I→1/2}(α, β, δ, θ)`.
///
/// # Example
///
/// ```
/// use gausslind::symplectic_core::{general_partition_matrix, is_symplectic, PartitionAngles};
/// let t = general_partition_matrix(&PartitionAngles::plus_minus_k());
/// assert!(is_symplectic(&t, 1e-14));
/// ```
pub fn general_partition_matrix(angles: &PartitionAngles) -> Matrix4 {
    let PartitionAngles { alpha, beta, delta, theta } = *angles;
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sd, cd) = delta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (se, ce) = (alpha - beta - delta).sin_cos();
    [
        [ca * ct, -sa * ct, -cd * st, sd * st],
        [sa * ct, ca * ct, -sd * st, -cd * st],
        [cb * st, -sb * st, ce * ct, se * ct],
        [sb * st, cb * st, -se * ct, ce * ct],
    ]
}

/// The one-parameter partition matrix `T(θ)`; `θ = −π/4` is the `±k`
/// partition.
pub fn one_param_partition_matrix(theta: f64) -> Matrix4 {
    let (s, c) = theta.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    [
        [c, 0.0, 0.0, s],
        [0.0, c, -s, 0.0],
        [s * s2, s * c2, c * c2, -c * s2],
        [-s * c2, s * s2, c * s2, c * c2],
    ]
}

/// `max |T J Tᵀ − J|` for a 4×4 matrix.
pub fn symplectic_deviation(t: &Matrix4) -> f64 {
    let j = symplectic_form();
    let tjt = matmul4(&matmul4(t, &j), &transpose4(t));
    let mut dev: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            dev = dev.max((tjt[a][b] - j[a][b]).abs());
        }
    }
    dev
}

/// True iff `‖T J Tᵀ − J‖_max ≤ tol`.
pub fn is_symplectic(t: &Matrix4, tol: f64) -> bool {
    symplectic_deviation(t) <= tol
}

/// Tolerance used by [`transform_covariance`] for the symplectic check.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// Change of partition `γ ↦ T γ Tᵀ`.
///
/// # Errors
///
/// [`Error::NonSymplectic`] when `T` fails the symplectic check at `1e−10`.
pub fn transform_covariance(g: &Covariance4, t: &Matrix4) -> Result<Covariance4> {
    let deviation = symplectic_deviation(t);
    if !(deviation <= SYMPLECTIC_TOL) {
        return Err(Error::NonSymplectic { deviation });
    }
    let mut m = matmul4(&matmul4(t, &g.m), &transpose4(t));
    for i in 0..4 {
        for j in 0..i {
            let s = 0.5 * (m[i][j] + m[j][i]);
            m[i][j] = s;
            m[j][i] = s;
        }
    }
    Ok(Covariance4 { m })
}

/// The three 2×2 blocks of `T(θ) diag(B, B) T(θ)ᵀ = [[A, C], [Cᵀ, B′]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionBlocks {
    /// Reduced covariance of the first subsystem.
    pub a: Matrix2,
    /// Reduced covariance of the second subsystem.
    pub b: Matrix2,
    /// Cross-correlation block.
    pub c: Matrix2,
}

impl PartitionBlocks {
    /// Reassembles the 4×4 covariance matrix.
    pub fn assemble(&self) -> Covariance4 {
        let mut m = [[0.0; 4]; 4];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = self.a[i][j];
                m[i + 2][j + 2] = self.b[i][j];
                m[i][j + 2] = self.c[i][j];
                m[j + 2][i] = self.c[i][j];
            }
        }
        Covariance4 { m }
    }
}

/// Closed-form blocks `γ_A`, `γ_B`, `γ_C` of a homogeneous state in the
/// one-parameter partition `θ`.
pub fn covariance_blocks_in_partition(b: &CovarianceBlock, theta: f64) -> PartitionBlocks {
    let CovarianceBlock { g11, g12, g22 } = *b;
    let (st, ct) = theta.sin_cos();
    let (s2, c2) = (2.0 * theta).sin_cos();
    let (s4, c4) = (4.0 * theta).sin_cos();
    let half_sum = 0.5 * (g11 + g22);
    let half_diff = 0.5 * (g11 - g22);
    let a = [[g11 * ct * ct + g22 * st * st, g12 * c2], [g12 * c2, g22 * ct * ct + g11 * st * st]];
    let b11 = half_sum + half_diff * c2 * c4 - g12 * c2 * s4;
    let b12 = g12 * c2 * c4 + half_diff * c2 * s4;
    let b22 = half_sum - half_diff * c2 * c4 + g12 * c2 * s4;
    let c11 = half_diff * s2 * s2 + 0.5 * g12 * s4;
    let c12 = -0.5 * half_diff * s4 + g12 * s2 * s2;
    PartitionBlocks { a, b: [[b11, b12], [b12, b22]], c: [[c11, c12], [c12, -c11]] }
}

/// State purity `Tr ρ² = 1/det B`.
///
/// # Errors
///
/// [`Error::BelowHeisenberg`] when `det < 1 − 1e−9`.
///
/// # Example
///
/// ```
/// use gausslind::symplectic_core::{purity, CovarianceBlock};
/// assert_eq!(purity(&CovarianceBlock::new(2.0, 0.0, 2.0).unwrap()).unwrap(), 0.25);
/// ```
pub fn purity(b: &CovarianceBlock) -> Result<f64> {
    Ok(1.0 / b.clamped_det()?)
}

/// Symplectic eigenvalue of the reduced covariance in partition `θ`,
/// `σ(θ) = √(cos²2θ·det + ((γ11+γ22)/2)²·sin²2θ)`.
///
/// Evaluated with `hypot` so that entries up to the overflow threshold are
/// supported; the determinant is clamped at the Heisenberg bound.
pub fn sigma_theta(b: &CovarianceBlock, theta: f64) -> f64 {
    let det = b.det().max(1.0);
    let (s2, c2) = (2.0 * theta).sin_cos();
    (c2.abs() * det.sqrt()).hypot(s2.abs() * b.half_trace())
}

/// Pair occupation `𝒩` and inter-mode correlation `𝒞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleStatistics {
    /// Mean occupation `𝒩 = (γ11+γ22)/4 − 1/2`.
    pub n: f64,
    /// Correlation `𝒞 = (γ11−γ22)/4 + iγ12/2`.
    pub c: Complex64,
}

impl ParticleStatistics {
    /// The vacuum (`𝒩 = 0`, `𝒞 = 0`).
    pub const VACUUM: ParticleStatistics = ParticleStatistics { n: 0.0, c: Complex64::new(0.0, 0.0) };
}

/// Particle statistics of a covariance block.
pub fn particle_statistics(b: &CovarianceBlock) -> ParticleStatistics {
    ParticleStatistics {
        n: 0.25 * (b.g11 + b.g22) - 0.5,
        c: Complex64::new(0.25 * (b.g11 - b.g22), 0.5 * b.g12),
    }
}

/// Generalised squeezing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingState {
    /// Squeezing amplitude `r ≥ 0`.
    pub r: f64,
    /// Squeezing angle `φ`.
    pub phi: f64,
    /// Ellipse-area parameter `λ = det γ ≥ 1`.
    pub lambda: f64,
    /// Rotation angle `θ_k`; carried along but not needed for the covariance.
    pub theta_rot: Option<f64>,
}

impl SqueezingState {
    /// Validated constructor (`r ≥ 0`, `λ ≥ 1 − 1e−9`, all finite).
    ///
    /// # Errors
    ///
    /// [`Error::InvalidParameter`] or [`Error::BelowHeisenberg`].
    pub fn new(r: f64, phi: f64, lambda: f64) -> Result<Self> {
        if !(r.is_finite() && phi.is_finite() && lambda.is_finite()) || r < 0.0 {
            return Err(Error::InvalidParameter(format!("invalid squeezing state r={r}, phi={phi}, lambda={lambda}")));
        }
        if lambda < 1.0 - HEISENBERG_SLACK {
            return Err(Error::BelowHeisenberg { det: lambda });
        }
        Ok(Self { r, phi, lambda: lambda.max(1.0), theta_rot: None })
    }
}

/// Inverts the squeezing parameterisation of a block.
///
/// `λ = det B`, `sinh 2r = √((γ11−γ22)² + 4γ12²)/(2√λ)` (equivalent to
/// `cosh 2r = (γ11+γ22)/(2√λ)` but free of cancellation near `r = 0` and
/// of overflow at large `r`), and `φ = ½ atan2(−2γ12, γ22−γ11) ∈ (−π/2, π/2]`.
///
/// # Errors
///
/// [`Error::DegenerateSqueezing`] when `r ≤ 1e−8`, plus the block
/// validation errors.
pub fn squeezing_from_covariance(b: &CovarianceBlock) -> Result<SqueezingState> {
    b.validate()?;
    squeezing_from_covariance_and_det(b, b.clamped_det()?)
}

/// As [`squeezing_from_covariance`], but with `λ = det B` supplied by the
/// caller (for instance integrated separately, when forming `γ11γ22 − γ12²`
/// from huge entries would cancel catastrophically).
///
/// # Errors
///
/// [`Error::BelowHeisenberg`] for `det < 1 − 1e−9`,
/// [`Error::DegenerateSqueezing`] when `r ≤ 1e−8`.
pub fn squeezing_from_covariance_and_det(b: &CovarianceBlock, det: f64) -> Result<SqueezingState> {
    if !(det >= 1.0 - HEISENBERG_SLACK) {
        return Err(Error::BelowHeisenberg { det });
    }
    let lambda = det.max(1.0);
    let sqrt_l = lambda.sqrt();
    let diff = b.g22 - b.g11;
    let sinh2r = diff.hypot(2.0 * b.g12) / (2.0 * sqrt_l);
    let r = 0.5 * sinh2r.asinh();
    if r <= MIN_SQUEEZING {
        return Err(Error::DegenerateSqueezing { r });
    }
    let mut phi = 0.5 * (-2.0 * b.g12).atan2(diff);
    if phi <= -0.5 * PI {
        phi += PI;
    }
    Ok(SqueezingState { r, phi, lambda, theta_rot: None })
}

/// Builds the covariance block of a squeezing state,
/// `γ11 = √λ(e^{2r} sin²φ + e^{−2r} cos²φ)`,
/// `γ12 = −√λ sin 2φ sinh 2r`, `γ22 = √λ(e^{2r} cos²φ + e^{−2r} sin²φ)`.
///
/// These are the `cosh 2r ∓ cos 2φ sinh 2r` forms rewritten without
/// subtraction.
pub fn covariance_from_squeezing(s: &SqueezingState) -> CovarianceBlock {
    let sqrt_l = s.lambda.sqrt();
    let (sp, cp) = s.phi.sin_cos();
    let up = (2.0 * s.r).exp();
    let down = (-2.0 * s.r).exp();
    CovarianceBlock {
        g11: sqrt_l * (up * sp * sp + down * cp * cp),
        g12: -sqrt_l * (2.0 * s.phi).sin() * (2.0 * s.r).sinh(),
        g22: sqrt_l * (up * cp * cp + down * sp * sp),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn reference_and_pm_k_partitions() {
        let id = general_partition_matrix(&PartitionAngles::real_imaginary());
        for (i, row) in id.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
            }
        }
        let pm = general_partition_matrix(&PartitionAngles::plus_minus_k());
        let one = one_param_partition_matrix(-0.25 * PI);
        for i in 0..4 {
            for j in 0..4 {
                assert!((pm[i][j] - one[i][j]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn scaled_identity_is_not_symplectic() {
        let mut m = [[0.0; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2.0;
        }
        assert!(!is_symplectic(&m, 1e-6));
        let g = CovarianceBlock::VACUUM.to_covariance4();
        assert!(matches!(transform_covariance(&g, &m), Err(Error::NonSymplectic { .. })));
    }

    #[test]
    fn det4_of_block_diagonal() {
        let b = CovarianceBlock::new(3.0, 1.0, 2.0).unwrap();
        assert!(close(b.to_covariance4().det(), 25.0, 1e-14));
    }

    #[test]
    fn sigma_theta_examples() {
        let b = CovarianceBlock::new(2.0, 0.0, 1.0).unwrap();
        assert!(close(sigma_theta(&b, 0.25 * PI), 1.5, 1e-15));
        let s = covariance_from_squeezing(&SqueezingState::new(1.0, 0.3, 1.0).unwrap());
        assert!(close(sigma_theta(&s, 0.25 * PI), 2.0_f64.cosh(), 1e-13));
    }

    #[test]
    fn squeezing_examples() {
        let s = covariance_from_squeezing(&SqueezingState::new(1.0, 0.0, 1.0).unwrap());
        assert!(close(s.g11, (-2.0_f64).exp(), 1e-15) && s.g12 == 0.0 && close(s.g22, 2.0_f64.exp(), 1e-15));
        let s = covariance_from_squeezing(&SqueezingState::new(1.0, 0.25 * PI, 4.0).unwrap());
        assert!(close(s.g12, -2.0 * 2.0_f64.sinh(), 1e-15));
        assert!(matches!(
            squeezing_from_covariance(&CovarianceBlock::VACUUM),
            Err(Error::DegenerateSqueezing { .. })
        ));
        let back = squeezing_from_covariance(&covariance_from_squeezing(&SqueezingState::new(1.0, 0.25 * PI, 1.0).unwrap())).unwrap();
        assert!(close(back.r, 1.0, 1e-12) && close(back.phi, 0.25 * PI, 1e-12) && close(back.lambda, 1.0, 1e-12));
    }

    #[test]
    fn heisenberg_clamp() {
        let b = CovarianceBlock { g11: 1.0, g12: 0.0, g22: 1.0 - 5e-10 };
        assert_eq!(purity(&b).unwrap(), 1.0);
        let b = CovarianceBlock { g11: 1.0, g12: 0.0, g22: 0.99 };
        assert!(matches!(purity(&b), Err(Error::BelowHeisenberg { .. })));
    }

    #[test]
    fn angles_are_canonical() {
        let a = PartitionAngles::new(3.0 * PI, -PI, 7.0, -7.0).unwrap();
        assert!(close(a.alpha, PI, 1e-15) && a.beta == PI);
        assert!(a.delta > -PI && a.delta <= PI && a.theta > -PI && a.theta <= PI);
        assert!(PartitionAngles::new(f64::NAN, 0.0, 0.0, 0.0).is_err());
    }
}
