use super::*;
use crate::qmatrix::{affine_of_superop, expm, pauli, CMat, Superoperator};
use crate::testutil;
use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, PI};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn spec_validation() {
    // non-Hermitian GKS
    let mut a = CMat::zeros(3);
    a.set(0, 1, c(1.0, 0.0));
    assert!(matches!(
        GeneratorSpec::new(a, CMat::zeros(2)),
        Err(GeneratorError::GksNotHermitian { .. })
    ));
    // negative eigenvalue, reported in the error
    let mut a = CMat::zeros(3);
    a.set(0, 0, c(-0.1, 0.0));
    match GeneratorSpec::new(a, CMat::zeros(2)) {
        Err(GeneratorError::GksNotPsd { min_eigenvalue }) => {
            assert!((min_eigenvalue + 0.1).abs() < 1e-12)
        }
        other => panic!("expected PSD rejection, got {other:?}"),
    }
    // non-Hermitian Hamiltonian
    let mut h = CMat::zeros(2);
    h.set(0, 1, c(0.0, 1.0));
    h.set(1, 0, c(0.0, 1.0));
    assert!(matches!(
        GeneratorSpec::new(CMat::zeros(3), h),
        Err(GeneratorError::HamiltonianNotHermitian { .. })
    ));
}

#[test]
fn lindblad_zero_generator() {
    let spec = GeneratorSpec::new(CMat::zeros(3), CMat::zeros(2)).unwrap();
    assert!(spec.lindblad_superop().mat().max_abs() < 1e-15);
}

#[test]
fn lindblad_pure_hamiltonian_rotates_bloch() {
    // H = σ_z/2 precesses x into y
    let spec = GeneratorSpec::new(CMat::zeros(3), pauli(3).scale_re(0.5)).unwrap();
    let l = spec.lindblad_superop();
    for t in [0.3, 1.0, PI / 2.0] {
        let aff = affine_of_superop(&expm(&l, t).unwrap());
        let expected = [
            [t.cos(), -t.sin(), 0.0],
            [t.sin(), t.cos(), 0.0],
            [0.0, 0.0, 1.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((aff.mtilde[i][j] - expected[i][j]).abs() < 1e-12);
            }
            assert!(aff.m[i].abs() < 1e-12);
        }
    }
}

#[test]
fn lindblad_linear_in_inputs() {
    let mut rng = testutil::rng(20);
    let a1 = testutil::random_psd3(&mut rng, 1.0);
    let a2 = testutil::random_psd3(&mut rng, 1.0);
    let h = testutil::random_herm2(&mut rng, 1.0);
    let s1 = GeneratorSpec::new(a1.clone(), CMat::zeros(2))
        .unwrap()
        .lindblad_superop();
    let s2 = GeneratorSpec::new(a2.clone(), h.clone())
        .unwrap()
        .lindblad_superop();
    let sum = GeneratorSpec::new(&a1 + &a2, h).unwrap().lindblad_superop();
    assert!((&s1 + &s2).max_abs_diff(&sum) < 1e-13);
}

#[test]
fn canonical_generator_spectrum() {
    // nonzero eigenvalues of L_θ are {−2 sin²θ, −2 cos²θ, −2}, plus 0 from
    // trace preservation
    for theta in [0.0, 0.2, FRAC_PI_6, 0.6, FRAC_PI_4] {
        let mut got: Vec<f64> = canonical_superop_eigenvalues(theta)
            .unwrap()
            .iter()
            .map(|z| {
                assert!(z.im.abs() < 1e-10);
                z.re
            })
            .collect();
        got.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let s2 = theta.sin().powi(2);
        let c2 = theta.cos().powi(2);
        let mut expected = [0.0, -2.0 * s2, -2.0 * c2, -2.0];
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (e, g) in expected.iter().zip(&got) {
            assert!(
                (e - g).abs() < 1e-10,
                "theta={theta}: expected {e}, got {g}"
            );
        }
    }
}

#[test]
fn canonical_angle_axis_projector() {
    // P = e₃e₃ᵀ: θ = 0 and G sends e₁ to e₃ with det +1
    let mut p = CMat::zeros(3);
    p.set(2, 2, c(1.0, 0.0));
    let (theta, g) = canonical_angle(&p).unwrap();
    assert!(theta.abs() < 1e-12);
    let rebuilt = &(&g * &canonical_gks(theta)) * &g.transpose();
    assert!(rebuilt.max_abs_diff(&p) < 1e-12);
    assert!((det3_pub(&g) - 1.0).abs() < 1e-12);
    assert!((g.at(2, 0).re.abs() - 1.0).abs() < 1e-12); // first column is ±e₃
}

#[test]
fn canonical_angle_maximal_theta() {
    // P = vv† with v = (1, i, 0)/√2 has θ = π/4
    let v = [c(1.0, 0.0), c(0.0, 1.0), c(0.0, 0.0)];
    let p = CMat::from_fn(3, |i, j| v[i] * v[j].conj() * 0.5);
    let (theta, g) = canonical_angle(&p).unwrap();
    assert!((theta - FRAC_PI_4).abs() < 1e-12);
    let rebuilt = &(&g * &canonical_gks(theta)) * &g.transpose();
    assert!(rebuilt.max_abs_diff(&p) < 1e-12);
}

#[test]
fn canonical_angle_fixed_point() {
    // A(θ) itself comes back with θ unchanged
    for theta in [0.1, 0.3, 0.7] {
        let p = canonical_gks(theta);
        let (got, g) = canonical_angle(&p).unwrap();
        assert!((got - theta).abs() < 1e-12, "theta={theta}");
        let rebuilt = &(&g * &canonical_gks(got)) * &g.transpose();
        assert!(rebuilt.max_abs_diff(&p) < 1e-12);
    }
}

#[test]
fn canonical_angle_paper_family() {
    // A = ww† with w = (cos θ, i sin θ, 0) recovers θ (the frame absorbs the
    // sign convention)
    let theta = FRAC_PI_6;
    let w = [c(theta.cos(), 0.0), c(0.0, theta.sin()), c(0.0, 0.0)];
    let p = CMat::from_fn(3, |i, j| w[i] * w[j].conj());
    let (got, g) = canonical_angle(&p).unwrap();
    assert!((got - theta).abs() < 1e-12);
    let rebuilt = &(&g * &canonical_gks(got)) * &g.transpose();
    assert!(rebuilt.max_abs_diff(&p) < 1e-12);
}

#[test]
fn canonical_angle_random_projectors() {
    let mut rng = testutil::rng(21);
    for _ in 0..200 {
        let mut w = [
            testutil::random_c64(&mut rng),
            testutil::random_c64(&mut rng),
            testutil::random_c64(&mut rng),
        ];
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in w.iter_mut() {
            *z /= n;
        }
        let p = CMat::from_fn(3, |i, j| w[i] * w[j].conj());
        let (theta, g) = canonical_angle(&p).unwrap();
        assert!((0.0..=FRAC_PI_4 + 1e-12).contains(&theta));
        assert!((&g.transpose() * &g).max_abs_diff(&CMat::identity(3)) < 1e-12);
        assert!((det3_pub(&g) - 1.0).abs() < 1e-10);
        let rebuilt = &(&g * &canonical_gks(theta)) * &g.transpose();
        assert!(rebuilt.max_abs_diff(&p) < 1e-10);
    }
}

#[test]
fn canonical_angle_rejects_higher_rank() {
    assert!(matches!(
        canonical_angle(&CMat::identity(3).scale_re(1.0 / 3.0)),
        Err(GeneratorError::NotRankOne { .. })
    ));
}

#[test]
fn su2_identity_and_axis_rotations() {
    assert!(
        su2_of_so3(&CMat::identity(3))
            .unwrap()
            .max_abs_diff(&CMat::identity(2))
            < 1e-14
    );

    // rotation by π about z: U = ±iσ_z, so conjugation flips σ_x
    let g = CMat::from_real(&[&[-1.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 1.0]]);
    let u = su2_of_so3(&g).unwrap();
    let flipped = &(&u * &pauli(1)) * &u.dagger();
    assert!(flipped.max_abs_diff(&pauli(1).scale_re(-1.0)) < 1e-12);

    // rotation by π/2 about y sends σ_z to σ_x
    let g = CMat::from_real(&[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0]]);
    let u = su2_of_so3(&g).unwrap();
    let rotated = &(&u * &pauli(3)) * &u.dagger();
    assert!(rotated.max_abs_diff(&pauli(1)) < 1e-12);
}

#[test]
fn su2_adjoint_identity_random() {
    // U σ_i U† = Σ_j G_ji σ_j, and extracting the adjoint returns G
    let mut rng = testutil::rng(22);
    for _ in 0..200 {
        let mut w = [
            testutil::random_c64(&mut rng),
            testutil::random_c64(&mut rng),
            testutil::random_c64(&mut rng),
        ];
        let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in w.iter_mut() {
            *z /= n;
        }
        let p = CMat::from_fn(3, |i, j| w[i] * w[j].conj());
        let (_, g) = canonical_angle(&p).unwrap();
        let u = su2_of_so3(&g).unwrap();
        assert!(u.unitary_residual() < 1e-12);
        for i in 0..3 {
            let lhs = &(&u * &pauli(i + 1)) * &u.dagger();
            let mut rhs = CMat::zeros(2);
            for j in 0..3 {
                rhs = &rhs + &pauli(j + 1).scale(g.at(j, i));
            }
            assert!(lhs.max_abs_diff(&rhs) < 1e-10);
        }
        assert!(so3_of_su2(&u).max_abs_diff(&g) < 1e-10);
    }
}

#[test]
fn su2_rejects_non_rotation() {
    // reflection: orthogonal but det −1
    let g = CMat::from_real(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, -1.0]]);
    assert!(matches!(
        su2_of_so3(&g),
        Err(GeneratorError::NotRotation { .. })
    ));
}

#[test]
fn spectral_split_axis_projector() {
    let mut a = CMat::zeros(3);
    a.set(0, 0, c(1.0, 0.0));
    let spec = GeneratorSpec::new(a, CMat::zeros(2)).unwrap();
    let d = spec.spectral_split().unwrap();
    assert!((d.lambda[1] - 1.0).abs() < 1e-12);
    assert!(d.lambda[2].abs() < 1e-12 && d.lambda[3].abs() < 1e-12);
    let part = d.canonical[0].as_ref().unwrap();
    assert!(part.theta.abs() < 1e-12);
    assert!(d.canonical[1].is_none() && d.canonical[2].is_none());
    assert!(part.frame.max_abs_diff(&CMat::identity(3)) < 1e-12);
}

#[test]
fn spectral_split_degenerate_spectrum() {
    let spec = GeneratorSpec::new(CMat::identity(3).scale_re(1.0 / 3.0), CMat::zeros(2)).unwrap();
    let d = spec.spectral_split().unwrap();
    for k in 1..4 {
        assert!((d.lambda[k] - 1.0 / 3.0).abs() < 1e-12);
    }
    // reconstruction holds for any eigenbasis choice
    let mut sum = Superoperator::zero();
    for slot in 0..3 {
        sum = &sum + &d.dissipative_superop(slot).unwrap();
    }
    assert!(sum.max_abs_diff(&spec.lindblad_superop()) < 1e-10);
}

#[test]
fn reconstruction_invariant_random_specs() {
    // L = L_H + Σ_k λ_k · (conjugation by U_k of L_{θ_k})
    let mut rng = testutil::rng(23);
    for trial in 0..500 {
        let spec = testutil::random_generator_spec(&mut rng, 1.0, 1.0);
        let d = spec.spectral_split().unwrap();
        // the weighted canonical projectors rebuild the GKS matrix itself
        let mut gks = CMat::zeros(3);
        for slot in 0..3 {
            if let Some(part) = &d.canonical[slot] {
                let a_k = &(&part.frame * &canonical_gks(part.theta)) * &part.frame.transpose();
                gks = &gks + &a_k.scale_re(d.lambda[slot + 1]);
            }
        }
        assert!(gks.max_abs_diff(spec.gks()) < 1e-10);
        let mut sum = hamiltonian_superop(&d.hamiltonian).mat().clone();
        for slot in 0..3 {
            if let Some(part) = &d.canonical[slot] {
                let canon = dissipator_superop(&canonical_gks(part.theta));
                let cu = Superoperator::conjugation(&part.basis_change).unwrap();
                let cu_dag = Superoperator::conjugation(&part.basis_change.dagger()).unwrap();
                let conj = &(&cu * &canon) * &cu_dag;
                sum = &sum + &conj.mat().scale_re(d.lambda[slot + 1]);
            }
        }
        let direct = spec.lindblad_superop();
        assert!(
            sum.max_abs_diff(direct.mat()) < 1e-9,
            "trial {trial}: residual {}",
            sum.max_abs_diff(direct.mat())
        );
    }
}

fn det3_pub(g: &CMat) -> f64 {
    let a = |i: usize, j: usize| g.at(i, j).re;
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}
