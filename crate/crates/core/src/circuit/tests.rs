use super::*;
use crate::channel::{quasi_extreme_split, CanonicalChannel};
use crate::qmatrix::{pauli, trace_distance, DensityMatrix};
use crate::testutil;
use std::f64::consts::{FRAC_PI_4, LN_2};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Channel of a gate list under the stage semantics, as a superoperator.
fn gates_channel(gates: &[Gate]) -> Superoperator {
    stage_superop(&Stage::Unitary(gates.to_vec()))
}

#[test]
fn rotation_gate_conventions() {
    let y = ry(std::f64::consts::PI);
    // Ry(π) = [[0, −1], [1, 0]]
    assert!((y.at(0, 1) + c(1.0, 0.0)).norm() < 1e-15);
    assert!((y.at(1, 0) - c(1.0, 0.0)).norm() < 1e-15);
    let z = rz(std::f64::consts::FRAC_PI_2);
    assert!((z.at(0, 0) - C64::new(0.0, -std::f64::consts::FRAC_PI_4).exp()).norm() < 1e-15);
}

#[test]
fn cnot_basis_action() {
    // CNOT(control = system, target = ancilla) on |0⟩⟨0| ⊗ |1⟩⟨1|
    let rho1 = DensityMatrix::from_ket([c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
    let joint = JointState::prepared(&rho1);
    let out = apply_gates(
        &[Gate::Cnot {
            control: SYSTEM,
            target: ANCILLA,
        }],
        &joint,
    );
    // expect |1⟩⟨1| ⊗ |1⟩⟨1|, i.e. all weight on index 3
    assert!((out.mat().at(3, 3) - c(1.0, 0.0)).norm() < 1e-14);
    assert!(out.mat().trace().re - 1.0 < 1e-14);
}

#[test]
fn apply_gates_empty_is_identity() {
    let mut rng = testutil::rng(40);
    let rho = testutil::random_density(&mut rng);
    let joint = JointState::prepared(&rho);
    let out = apply_gates(&[], &joint);
    assert!(out.mat().max_abs_diff(joint.mat()) < 1e-15);
}

#[test]
fn reset_reprepares_ancilla() {
    let mut rng = testutil::rng(41);
    let rho = testutil::random_density(&mut rng);
    let mut joint = JointState::prepared(&rho);
    // entangle, then reset the ancilla
    joint = apply_gates(
        &[
            Gate::Ry {
                target: ANCILLA,
                angle: 1.1,
            },
            Gate::Cnot {
                control: ANCILLA,
                target: SYSTEM,
            },
            Gate::Reset { target: ANCILLA },
        ],
        &joint,
    );
    let m = joint.mat();
    // ancilla back in |0⟩: no support on indices 2, 3
    for i in 2..4 {
        for j in 0..4 {
            assert!(m.at(i, j).norm() < 1e-14);
            assert!(m.at(j, i).norm() < 1e-14);
        }
    }
    assert!((m.trace().re - 1.0).abs() < 1e-13);
}

#[test]
fn dilation_identity_and_flip() {
    let id = CMat::identity(2);
    let zero = CMat::zeros(2);
    let u = dilation_unitary(&[id.clone(), zero.clone()]).unwrap();
    assert!(u.unitary_residual() < 1e-12);
    let ch = dilation_channel(&u);
    assert!(ch.max_abs_diff(&Superoperator::identity()) < 1e-12);

    let u = dilation_unitary(&[pauli(1), zero]).unwrap();
    let ch = dilation_channel(&u);
    let expected = Superoperator::conjugation(&pauli(1)).unwrap();
    assert!(ch.max_abs_diff(&expected) < 1e-12);
}

/// tr_E [ U (|0⟩⟨0| ⊗ ρ) U† ] as a superoperator.
fn dilation_channel(u: &CMat) -> Superoperator {
    let mut s = CMat::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let mut e = CMat::zeros(2);
            e.set(i, j, c(1.0, 0.0));
            let mut anc = CMat::zeros(2);
            anc.set(0, 0, c(1.0, 0.0));
            let joint = anc.kron(&e);
            let evolved = &(u * &joint) * &u.dagger();
            let out = CMat::from_fn(2, |a, b| evolved.at(a, b) + evolved.at(2 + a, 2 + b));
            for a in 0..2 {
                for b in 0..2 {
                    s.set(a + 2 * b, i + 2 * j, out.at(a, b));
                }
            }
        }
    }
    Superoperator::new(s).unwrap()
}

#[test]
fn dilation_reproduces_kraus_action_randomly() {
    let mut rng = testutil::rng(42);
    for _ in 0..200 {
        let v = testutil::random_unitary(&mut rng, 4);
        let kraus = [
            CMat::from_fn(2, |sp, s| v.at(sp, s)),
            CMat::from_fn(2, |sp, s| v.at(2 + sp, s)),
        ];
        let u = dilation_unitary(&kraus).unwrap();
        assert!(u.unitary_residual() < 1e-12);
        let ch = dilation_channel(&u);
        let expected = Superoperator::from_kraus(&kraus).unwrap();
        assert!(ch.max_abs_diff(&expected) < 1e-10);
    }
}

#[test]
fn dilation_rejects_incomplete_kraus() {
    let bad = [CMat::identity(2).scale_re(0.5), CMat::zeros(2)];
    assert!(matches!(
        dilation_unitary(&bad),
        Err(CircuitError::IncompleteKraus { .. })
    ));
}

#[test]
fn two_level_factor_identity_and_blocks() {
    let id4 = CMat::identity(4);
    let (ua, ub, ta, tb) = two_level_factor(&id4).unwrap();
    assert!(ua.max_abs_diff(&id4) < 1e-15 && ub.max_abs_diff(&id4) < 1e-15);
    assert!(ta.max_abs_diff(&CMat::identity(2)) < 1e-15);
    assert!(tb.max_abs_diff(&CMat::identity(2)) < 1e-15);

    // generic two-level unitary in the supported pattern
    let (beta, alpha, p1, p2): (f64, f64, f64, f64) = (0.35, 0.8, 0.2, -0.6);
    let mut u = CMat::zeros(4);
    u.set(0, 0, C64::new(0.0, -p1).exp() * beta.cos());
    u.set(0, 3, -C64::new(0.0, -p2).exp() * beta.sin());
    u.set(3, 0, C64::new(0.0, p2).exp() * beta.sin());
    u.set(3, 3, C64::new(0.0, p1).exp() * beta.cos());
    u.set(1, 1, c(alpha.cos(), 0.0));
    u.set(1, 2, c(-alpha.sin(), 0.0));
    u.set(2, 1, c(alpha.sin(), 0.0));
    u.set(2, 2, c(alpha.cos(), 0.0));
    let (ua, ub, _, tb) = two_level_factor(&u).unwrap();
    assert!((&ua * &ub).max_abs_diff(&u) < 1e-12);
    assert!((&ub * &ua).max_abs_diff(&u) < 1e-12);
    assert!((tb.at(0, 0).re - alpha.cos()).abs() < 1e-15);

    // inner-only unitary: uA = I
    let mut v = CMat::identity(4);
    v.set(1, 1, c(0.0, 1.0));
    v.set(2, 2, c(0.0, -1.0));
    v.set(1, 2, c(0.0, 0.0));
    let (ua, _, _, _) = two_level_factor(&v).unwrap();
    assert!(ua.max_abs_diff(&CMat::identity(4)) < 1e-15);

    // off-pattern input is rejected
    let mut w = CMat::identity(4);
    w.set(0, 1, c(0.5, 0.0));
    assert!(matches!(
        two_level_factor(&w),
        Err(CircuitError::OffPattern { .. })
    ));
}

#[test]
fn synthesize_identity_is_empty() {
    assert!(synthesize(&CMat::identity(4)).unwrap().is_empty());
    // global phase is irrelevant
    let phased = CMat::identity(4).scale(C64::new(0.0, 0.7).exp());
    assert!(synthesize(&phased).unwrap().is_empty());
}

#[test]
fn synthesize_controlled_ry_matches_known_sequence() {
    let alpha = 0.6;
    // controlled-Ry(2α), control = ancilla
    let mut u = CMat::identity(4);
    let r = ry(2.0 * alpha);
    for i in 0..2 {
        for j in 0..2 {
            u.set(2 + i, 2 + j, r.at(i, j));
        }
    }
    let gates = synthesize(&u).unwrap();
    assert_eq!(
        gates,
        vec![
            Gate::Ry {
                target: SYSTEM,
                angle: alpha
            },
            Gate::Cnot {
                control: ANCILLA,
                target: SYSTEM
            },
            Gate::Ry {
                target: SYSTEM,
                angle: -alpha
            },
            Gate::Cnot {
                control: ANCILLA,
                target: SYSTEM
            },
        ]
    );
    let product = gates_product(&gates).unwrap();
    assert!(phase_distance(&product, &u) < 1e-12);
}

#[test]
fn synthesize_member_dilations() {
    let mut rng = testutil::rng(43);
    for _ in 0..40 {
        use rand::Rng;
        let theta = rng.gen::<f64>() * FRAC_PI_4;
        let t = 0.05 + rng.gen::<f64>() * 2.5;
        let ch = CanonicalChannel::new(theta, t).unwrap();
        let pair = quasi_extreme_split(&ch).unwrap();
        for member in &pair.members {
            // dilations of the structured Kraus pairs match the two-level pattern
            assert!(two_level_factor(&member.dilation).is_ok());
            let gates = synthesize(&member.dilation).unwrap();
            let product = gates_product(&gates).unwrap();
            assert!(
                phase_distance(&product, &member.dilation) < 1e-9,
                "theta={theta} t={t}: {}",
                phase_distance(&product, &member.dilation)
            );
            // the executed circuit reproduces the member channel
            let mut gates_with_reset = vec![Gate::Reset { target: ANCILLA }];
            gates_with_reset.extend(gates);
            let ch_s = gates_channel(&gates_with_reset);
            assert!(ch_s.max_abs_diff(&member.superop()) < 1e-9);
        }
    }
}

#[test]
fn synthesize_rejects_generic_unitaries() {
    let mut rng = testutil::rng(44);
    // a Haar-random two-qubit unitary is almost surely outside the supported
    // patterns
    let u = testutil::random_unitary(&mut rng, 4);
    assert!(matches!(
        synthesize(&u),
        Err(CircuitError::UnsupportedPattern)
    ));
    let not_unitary = CMat::identity(4).scale_re(2.0);
    assert!(matches!(
        synthesize(&not_unitary),
        Err(CircuitError::NotUnitary { .. })
    ));
}

#[test]
fn program_validation_rules() {
    let ok = ChannelProgram {
        stages: vec![Stage::Mixture(vec![
            (0.5, vec![Gate::Reset { target: ANCILLA }]),
            (0.5, vec![Gate::Reset { target: ANCILLA }]),
        ])],
    };
    assert!(ok.validate().is_ok());
    let bad_probs = ChannelProgram {
        stages: vec![Stage::Mixture(vec![
            (0.6, vec![Gate::Reset { target: ANCILLA }]),
            (0.6, vec![Gate::Reset { target: ANCILLA }]),
        ])],
    };
    assert!(matches!(
        bad_probs.validate(),
        Err(CircuitError::BadProbabilities { .. })
    ));
    let no_reset = ChannelProgram {
        stages: vec![Stage::Mixture(vec![(1.0, vec![])])],
    };
    assert!(matches!(
        no_reset.validate(),
        Err(CircuitError::MissingReset)
    ));
}

#[test]
fn run_program_empty_returns_input() {
    let mut rng = testutil::rng(45);
    let rho = testutil::random_density(&mut rng);
    let (out, report) = run_program(
        &ChannelProgram::default(),
        &rho,
        RunMode::Deterministic,
        0,
        0,
    )
    .unwrap();
    assert!(trace_distance(&out, &rho) < 1e-12);
    assert_eq!(report.gate_count, 0);
}

fn member_mixture_program(theta: f64, t: f64) -> (ChannelProgram, Superoperator) {
    let ch = CanonicalChannel::new(theta, t).unwrap();
    let pair = quasi_extreme_split(&ch).unwrap();
    let mut branches = Vec::new();
    for member in &pair.members {
        let mut gates = vec![Gate::Reset { target: ANCILLA }];
        gates.extend(synthesize(&member.dilation).unwrap());
        branches.push((0.5, gates));
    }
    (
        ChannelProgram {
            stages: vec![Stage::Mixture(branches)],
        },
        ch.superop(),
    )
}

#[test]
fn run_program_deterministic_mixture_matches_channel() {
    let (program, expected) = member_mixture_program(FRAC_PI_4, LN_2);
    let mut rng = testutil::rng(46);
    for _ in 0..5 {
        let rho = testutil::random_density(&mut rng);
        let (out, _) = run_program(&program, &rho, RunMode::Deterministic, 0, 0).unwrap();
        let oracle = expected.apply(rho.mat());
        assert!(out.mat().max_abs_diff(&oracle) < 1e-10);
    }
}

#[test]
fn run_program_sampled_converges_and_is_reproducible() {
    let (program, expected) = member_mixture_program(0.5, 0.8);
    let rho = DensityMatrix::from_bloch([0.3, 0.1, -0.4]).unwrap();
    let n = 10_000u64;
    let (out1, rep1) = run_program(&program, &rho, RunMode::Sampled, 7, n).unwrap();
    let (out2, _) = run_program(&program, &rho, RunMode::Sampled, 7, n).unwrap();
    // bit-identical under the same seed
    assert_eq!(out1.mat(), out2.mat());
    let (det, _) = run_program(&program, &rho, RunMode::Deterministic, 7, 0).unwrap();
    let dist = trace_distance(&out1, &det);
    assert!(dist <= 5.0 / (n as f64).sqrt(), "distance {dist}");
    assert!(rep1.std_error.unwrap() > 0.0);
    let oracle = expected.apply(rho.mat());
    assert!(det.mat().max_abs_diff(&oracle) < 1e-10);

    assert!(matches!(
        run_program(&program, &rho, RunMode::Sampled, 7, 0),
        Err(CircuitError::NoTrajectories)
    ));
}

#[test]
fn physicality_after_each_stage() {
    let (program, _) = member_mixture_program(0.3, 1.2);
    let mut rng = testutil::rng(47);
    let rho = testutil::random_density(&mut rng);
    let mut state = rho.mat().clone();
    for stage in &program.stages {
        let s = stage_superop(stage);
        state = s.apply(&state);
        let dm = DensityMatrix::new((&state + &state.dagger()).scale_re(0.5));
        assert!(dm.is_ok());
    }
}

#[test]
fn gate_product_soundness_random_block_diagonals() {
    let mut rng = testutil::rng(48);
    for _ in 0..50 {
        let v0 = testutil::random_unitary(&mut rng, 2);
        let v1 = testutil::random_unitary(&mut rng, 2);
        let mut u = CMat::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                u.set(i, j, v0.at(i, j));
                u.set(2 + i, 2 + j, v1.at(i, j));
            }
        }
        let gates = synthesize(&u).unwrap();
        let product = gates_product(&gates).unwrap();
        assert!(phase_distance(&product, &u) < 1e-9);
    }
}

#[test]
fn circuit_text_format() {
    let program = ChannelProgram {
        stages: vec![
            Stage::Unitary(vec![
                Gate::Ry {
                    target: SYSTEM,
                    angle: 0.5,
                },
                Gate::Cnot {
                    control: SYSTEM,
                    target: ANCILLA,
                },
            ]),
            Stage::Mixture(vec![
                (0.5, vec![Gate::Reset { target: ANCILLA }]),
                (
                    0.5,
                    vec![
                        Gate::Reset { target: ANCILLA },
                        Gate::Rz {
                            target: ANCILLA,
                            angle: -1.25,
                        },
                    ],
                ),
            ]),
        ],
    };
    let text = write_program(&program);
    let expected = "\
ry q1 5.0000000000000000e-1
cnot q1 q0
begin mixture
branch 5.0000000000000000e-1
reset q0
branch 5.0000000000000000e-1
reset q0
rz q0 -1.2500000000000000e0
end mixture
";
    assert_eq!(text, expected);
}
