//! Covariance algebra: partitions, squeezing parameterisation, statistics.

use gausslind::error::Error;
use gausslind::symplectic_core::{
    covariance_blocks_in_partition, covariance_from_squeezing, general_partition_matrix, is_symplectic, matmul4,
    one_param_partition_matrix, particle_statistics, purity, sigma_theta, squeezing_from_covariance, squeezing_from_covariance_and_det,
    transform_covariance, transpose4, CovarianceBlock, Matrix4, PartitionAngles, SqueezingState,
};
use proptest::prelude::*;
use std::f64::consts::PI;

fn diag_blocks(b: &CovarianceBlock) -> Matrix4 {
    [
        [b.g11, b.g12, 0.0, 0.0],
        [b.g12, b.g22, 0.0, 0.0],
        [0.0, 0.0, b.g11, b.g12],
        [0.0, 0.0, b.g12, b.g22],
    ]
}

fn block(r: f64, phi: f64, lambda: f64) -> CovarianceBlock {
    covariance_from_squeezing(&SqueezingState::new(r, phi, lambda).unwrap())
}

#[test]
fn named_partitions() {
    let ri = general_partition_matrix(&PartitionAngles::real_imaginary());
    for (i, row) in ri.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            assert_eq!(*v, if i == j { 1.0 } else { 0.0 });
        }
    }
    // the ±k partition is the θ = −π/4 member of the one-parameter family
    let pm = general_partition_matrix(&PartitionAngles::plus_minus_k());
    let one = one_param_partition_matrix(-PI / 4.0);
    let fam = general_partition_matrix(&PartitionAngles::one_parameter(-PI / 4.0).unwrap());
    for i in 0..4 {
        for j in 0..4 {
            assert!((pm[i][j] - one[i][j]).abs() < 1e-15);
            assert!((fam[i][j] - one[i][j]).abs() < 1e-15);
        }
    }
}

#[test]
fn non_symplectic_matrix_is_rejected() {
    let g = gausslind::symplectic_core::Covariance4::new(diag_blocks(&CovarianceBlock::VACUUM)).unwrap();
    let mut t = one_param_partition_matrix(0.3);
    t[0][0] *= 1.01;
    assert!(matches!(transform_covariance(&g, &t), Err(Error::NonSymplectic { .. })));
}

#[test]
fn de_sitter_ellipse_parameters() {
    // γ = {2, 1, 1} is the de Sitter state at Hubble crossing
    let s = squeezing_from_covariance(&CovarianceBlock::new(2.0, 1.0, 1.0).unwrap()).unwrap();
    assert!((s.r - 0.5 * (5f64.sqrt() / 2.0).asinh()).abs() < 1e-15);
    assert!((s.r - 0.481212).abs() < 1e-6);
    let back = covariance_from_squeezing(&s);
    assert!((back.g11 - 2.0).abs() < 1e-14 && (back.g12 - 1.0).abs() < 1e-14 && (back.g22 - 1.0).abs() < 1e-14);
    let s = squeezing_from_covariance(&block(1.0, PI / 4.0, 1.0)).unwrap();
    assert!((s.r - 1.0).abs() < 1e-12 && (s.phi - PI / 4.0).abs() < 1e-12 && (s.lambda - 1.0).abs() < 1e-12);
}

#[test]
fn below_heisenberg_is_rejected() {
    assert!(matches!(CovarianceBlock::new(1.0, 0.5, 1.0), Err(Error::BelowHeisenberg { .. })));
    assert!(matches!(SqueezingState::new(0.1, 0.0, 0.5), Err(Error::BelowHeisenberg { .. })));
}

proptest! {
    #[test]
    fn squeezing_round_trip(r in 1e-6f64..30.0, phi in -1.5f64..1.5, log_lambda in 0.0f64..8.0) {
        let lambda = 10f64.powf(log_lambda);
        let b = block(r, phi, lambda);
        // λ travels alongside: entries of size √λ e^{2r} cannot carry it
        let s = squeezing_from_covariance_and_det(&b, lambda).unwrap();
        let back = covariance_from_squeezing(&s);
        for (x, y) in [(back.g11, b.g11), (back.g22, b.g22)] {
            prop_assert!((x - y).abs() <= 1e-12 * y, "{} vs {}", x, y);
        }
        prop_assert!((back.g12 - b.g12).abs() <= 1e-12 * b.g11.max(b.g22));
        // r is recovered from entry differences of size √λ·sinh 2r, so its
        // error is bounded by entry rounding, ~1e−16 absolute
        prop_assert!((s.r - r).abs() <= 1e-12 * r + 1e-15, "r {} vs {}", s.r, r);
    }

    #[test]
    fn block_alone_round_trips_while_det_is_representable(r in 1e-3f64..3.0, phi in -1.5f64..1.5, lambda in 1.0f64..1e4) {
        let b = block(r, phi, lambda);
        let s = squeezing_from_covariance(&b).unwrap();
        prop_assert!((s.r - r).abs() <= 1e-9 * r);
        prop_assert!((s.lambda - lambda).abs() <= 1e-9 * lambda);
        prop_assert!((s.phi - phi).abs() <= 1e-9);
    }

    #[test]
    fn partitions_are_symplectic(a in -4.0f64..4.0, b in -4.0f64..4.0, d in -4.0f64..4.0, t in -4.0f64..4.0) {
        let angles = PartitionAngles::new(a, b, d, t).unwrap();
        prop_assert!(is_symplectic(&general_partition_matrix(&angles), 1e-13));
        prop_assert!(is_symplectic(&one_param_partition_matrix(t), 1e-13));
    }

    #[test]
    fn partition_blocks_match_matrix_product(r in 0.0f64..3.0, phi in -1.5f64..1.5, lambda in 1.0f64..10.0, theta in -3.2f64..3.2) {
        let b = block(r, phi, lambda);
        let t = one_param_partition_matrix(theta);
        let full = matmul4(&matmul4(&t, &diag_blocks(&b)), &transpose4(&t));
        let got = covariance_blocks_in_partition(&b, theta).assemble().m;
        let scale = b.g11.max(b.g22);
        for i in 0..4 {
            for j in 0..4 {
                prop_assert!((full[i][j] - got[i][j]).abs() <= 1e-12 * scale, "({}, {})", i, j);
            }
        }
        // σ(θ) is the symplectic eigenvalue of the reduced block
        let a = covariance_blocks_in_partition(&b, theta).a;
        let det_a = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        prop_assert!((sigma_theta(&b, theta) - det_a.sqrt()).abs() <= 1e-10 * det_a.sqrt());
    }

    #[test]
    fn occupation_correlation_identity(r in 0.0f64..8.0, phi in -1.5f64..1.5, lambda in 1.0f64..100.0) {
        let b = block(r, phi, lambda);
        let st = particle_statistics(&b);
        let lhs = 4.0 * st.c.norm_sqr();
        let rhs = (2.0 * st.n + 1.0).powi(2) - lambda;
        let scale = (2.0 * st.n + 1.0).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} vs {}", lhs, rhs);
    }

    #[test]
    fn purity_is_inverse_area(r in 0.0f64..3.0, phi in -1.5f64..1.5, lambda in 1.0f64..100.0) {
        let p = purity(&block(r, phi, lambda)).unwrap();
        prop_assert!((p * lambda - 1.0).abs() < 1e-9);
    }
}
