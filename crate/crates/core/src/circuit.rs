//! One-ancilla circuit synthesis and execution: dilation unitaries for
//! two-Kraus channels, two-level factorisation, the controlled-gate ABC
//! decomposition into CNOT + RY/RZ, and a two-qubit density-matrix simulator
//! for channel programs.
//!
//! Qubit 0 is the ancilla (environment) and qubit 1 the system; joint states
//! use the ancilla-first tensor ordering `|a s⟩` with index `2a + s`.

use crate::qmatrix::{CMat, DensityMatrix, QmatError, Superoperator, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

pub const ANCILLA: usize = 0;
pub const SYSTEM: usize = 1;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("Kraus completeness violated (residual {residual:.3e})")]
    IncompleteKraus { residual: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error(
        "matrix does not match the supported two-level sparsity pattern \
             (off-pattern magnitude {magnitude:.3e})"
    )]
    OffPattern { magnitude: f64 },
    #[error("unsupported unitary: only two-level and block-diagonal patterns are synthesised")]
    UnsupportedPattern,
    #[error("sampled execution needs at least one trajectory")]
    NoTrajectories,
    #[error("mixture probabilities must be non-negative and sum to 1 (sum {sum})")]
    BadProbabilities { sum: f64 },
    #[error("mixture stages must begin with an ancilla reset")]
    MissingReset,
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// A primitive gate. Angles are radians; `Ry(θ)` and `Rz(θ)` are the standard
/// Pauli-rotation conventions `e^{-iθσ_y/2}`, `e^{-iθσ_z/2}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    Ry { target: usize, angle: f64 },
    Rz { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    Reset { target: usize },
}

/// One stage of a channel program.
#[derive(Clone, Debug, PartialEq)]
pub enum Stage {
    Unitary(Vec<Gate>),
    Mixture(Vec<(f64, Vec<Gate>)>),
}

/// Circuit IR: an ordered list of unitary and probabilistic-mixture stages.
///
/// Stage semantics are system-level channels: the ancilla enters every stage
/// in `|0⟩` and is discarded afterwards, so a stage's gates define the map
/// `ρ ↦ tr_E[ gates (|0⟩⟨0| ⊗ ρ) gates† ]` (with RESET handled as the
/// trace-and-reprepare channel).
#[derive(Clone, Debug, Default)]
pub struct ChannelProgram {
    pub stages: Vec<Stage>,
}

impl ChannelProgram {
    pub fn validate(&self) -> Result<(), CircuitError> {
        for stage in &self.stages {
            if let Stage::Mixture(branches) = stage {
                let sum: f64 = branches.iter().map(|(p, _)| p).sum();
                if branches.iter().any(|(p, _)| *p < 0.0) || (sum - 1.0).abs() > 1e-12 {
                    return Err(CircuitError::BadProbabilities { sum });
                }
                for (_, gates) in branches {
                    match gates.first() {
                        Some(Gate::Reset { target }) if *target == ANCILLA => {}
                        _ => return Err(CircuitError::MissingReset),
                    }
                }
            }
        }
        Ok(())
    }

    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    /// Total gate count over all stages and branches.
    pub fn gate_count(&self) -> usize {
        self.stages
            .iter()
            .map(|s| match s {
                Stage::Unitary(g) => g.len(),
                Stage::Mixture(bs) => bs.iter().map(|(_, g)| g.len()).sum(),
            })
            .sum()
    }
}

/// Joint ancilla ⊗ system density matrix.
#[derive(Clone, Debug)]
pub struct JointState(CMat);

impl JointState {
    /// `|0⟩⟨0| ⊗ ρ`.
    pub fn prepared(rho: &DensityMatrix) -> Self {
        let mut anc = CMat::zeros(2);
        anc.set(0, 0, C64::new(1.0, 0.0));
        JointState(anc.kron(rho.mat()))
    }

    pub fn from_mat(m: CMat) -> Result<Self, CircuitError> {
        if m.dim() != 4 {
            return Err(CircuitError::Numeric(QmatError::BadDim {
                expected: 4,
                got: m.dim(),
            }));
        }
        Ok(JointState(m))
    }

    pub fn mat(&self) -> &CMat {
        &self.0
    }

    /// Partial trace over the ancilla.
    pub fn system_state(&self) -> CMat {
        CMat::from_fn(2, |s, sp| self.0.at(s, sp) + self.0.at(2 + s, 2 + sp))
    }
}

/// 4x4 matrix of a unitary gate (`Reset` has none).
pub fn gate_matrix(g: &Gate) -> Option<CMat> {
    match g {
        Gate::Ry { target, angle } => Some(embed_1q(&ry(*angle), *target)),
        Gate::Rz { target, angle } => Some(embed_1q(&rz(*angle), *target)),
        Gate::Cnot { control, target } => {
            // basis action |a s⟩: flip `target` bit when `control` bit is 1
            Some(CMat::from_fn(4, |i, j| {
                let (a, s) = (j / 2, j % 2);
                let bits = [a, s];
                let mut out = bits;
                if bits[*control] == 1 {
                    out[*target] ^= 1;
                }
                if i == 2 * out[0] + out[1] {
                    C64::new(1.0, 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            }))
        }
        Gate::Reset { .. } => None,
    }
}

pub fn ry(angle: f64) -> CMat {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    CMat::from_real(&[&[c, -s], &[s, c]])
}

pub fn rz(angle: f64) -> CMat {
    let e = C64::new(0.0, -angle / 2.0).exp();
    let mut m = CMat::zeros(2);
    m.set(0, 0, e);
    m.set(1, 1, e.conj());
    m
}

fn embed_1q(u: &CMat, qubit: usize) -> CMat {
    let id = CMat::identity(2);
    if qubit == ANCILLA {
        u.kron(&id)
    } else {
        id.kron(u)
    }
}

/// Ordered product of a gate list as a 4x4 matrix (first gate rightmost);
/// errors if the list contains a RESET.
pub fn gates_product(gates: &[Gate]) -> Result<CMat, CircuitError> {
    let mut acc = CMat::identity(4);
    for g in gates {
        let m = gate_matrix(g).ok_or(CircuitError::UnsupportedPattern)?;
        acc = &m * &acc;
    }
    Ok(acc)
}

/// Applies a gate list to a joint state by unitary conjugation; RESET traces
/// out its qubit and re-prepares `|0⟩`.
pub fn apply_gates(gates: &[Gate], state: &JointState) -> JointState {
    let mut rho = state.mat().clone();
    for g in gates {
        match gate_matrix(g) {
            Some(u) => rho = &(&u * &rho) * &u.dagger(),
            None => {
                if let Gate::Reset { target } = g {
                    rho = reset_qubit(&rho, *target);
                }
            }
        }
    }
    JointState(rho)
}

fn reset_qubit(rho: &CMat, qubit: usize) -> CMat {
    // trace out `qubit`, re-prepare |0⟩ in its slot
    let idx = |kq: usize, kk: usize| if qubit == 0 { 2 * kq + kk } else { 2 * kk + kq };
    let reduced = CMat::from_fn(2, |i, j| (0..2).map(|k| rho.at(idx(k, i), idx(k, j))).sum());
    let mut zero = CMat::zeros(2);
    zero.set(0, 0, C64::new(1.0, 0.0));
    if qubit == 0 {
        zero.kron(&reduced)
    } else {
        reduced.kron(&zero)
    }
}

/// Stinespring dilation of a two-Kraus channel: the 4x4 unitary with
/// `U(|0⟩_E ⊗ |ψ⟩) = Σ_j |j⟩_E ⊗ K_j|ψ⟩`, the remaining two columns completed
/// deterministically by Gram-Schmidt against canonical basis vectors.
pub fn dilation_unitary(kraus: &[CMat; 2]) -> Result<CMat, CircuitError> {
    let sum = &(&kraus[0].dagger() * &kraus[0]) + &(&kraus[1].dagger() * &kraus[1]);
    let residual = sum.max_abs_diff(&CMat::identity(2));
    if residual > 1e-10 {
        return Err(CircuitError::IncompleteKraus { residual });
    }
    let mut cols: Vec<[C64; 4]> = Vec::with_capacity(4);
    for s in 0..2 {
        let mut col = [C64::new(0.0, 0.0); 4];
        for j in 0..2 {
            for sp in 0..2 {
                col[2 * j + sp] = kraus[j].at(sp, s);
            }
        }
        cols.push(col);
    }
    // complete with Gram-Schmidt, seeding each missing column from its own
    // canonical basis vector first so block-structured Kraus pairs keep their
    // two-level pattern
    for seed in [2usize, 3, 0, 1] {
        if cols.len() == 4 {
            break;
        }
        let mut v = [C64::new(0.0, 0.0); 4];
        v[seed] = C64::new(1.0, 0.0);
        for c in &cols {
            let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for i in 0..4 {
                v[i] -= c[i] * overlap;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-6 {
            for z in v.iter_mut() {
                *z /= n;
            }
            cols.push(v);
        }
    }
    debug_assert_eq!(cols.len(), 4);
    let u = CMat::from_fn(4, |i, j| cols[j][i]);
    let res = u.unitary_residual();
    if res > 1e-9 {
        return Err(CircuitError::NotUnitary { residual: res });
    }
    Ok(u)
}

/// Outer two-level block `{|00⟩, |11⟩}` and inner block `{|01⟩, |10⟩}` of the
/// supported sparsity pattern.
const OUTER: [usize; 2] = [0, 3];
const INNER: [usize; 2] = [1, 2];

fn off_pattern_magnitude(u: &CMat) -> f64 {
    let mut mag = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            let same_block = (OUTER.contains(&i) && OUTER.contains(&j))
                || (INNER.contains(&i) && INNER.contains(&j));
            if !same_block {
                mag = mag.max(u.at(i, j).norm());
            }
        }
    }
    mag
}

/// Factors a unitary of the two-level sparsity pattern into commuting outer-
/// and inner-block unitaries `u = uA · uB` and the embedded 2x2 blocks.
pub fn two_level_factor(u: &CMat) -> Result<(CMat, CMat, CMat, CMat), CircuitError> {
    let mag = off_pattern_magnitude(u);
    if mag > 1e-10 {
        return Err(CircuitError::OffPattern { magnitude: mag });
    }
    let tilde_a = CMat::from_fn(2, |i, j| u.at(OUTER[i], OUTER[j]));
    let tilde_b = CMat::from_fn(2, |i, j| u.at(INNER[i], INNER[j]));
    let mut ua = CMat::identity(4);
    let mut ub = CMat::identity(4);
    for i in 0..2 {
        for j in 0..2 {
            ua.set(OUTER[i], OUTER[j], tilde_a.at(i, j));
            ub.set(INNER[i], INNER[j], tilde_b.at(i, j));
        }
    }
    Ok((ua, ub, tilde_a, tilde_b))
}

/// ZYZ Euler angles: `v = e^{iα} Rz(β) Ry(γ) Rz(δ)`.
fn zyz_angles(v: &CMat) -> (f64, f64, f64, f64) {
    let det = v.at(0, 0) * v.at(1, 1) - v.at(0, 1) * v.at(1, 0);
    let alpha = det.arg() / 2.0;
    let ph = C64::new(0.0, -alpha).exp();
    let m = v.scale(ph); // now in SU(2)
    let (m00, m10) = (m.at(0, 0), m.at(1, 0));
    let gamma = 2.0 * f64::atan2(m10.norm(), m00.norm());
    let (beta, delta);
    if m00.norm() >= m10.norm() {
        // m11 = e^{i(β+δ)/2} cos(γ/2)
        let sum = 2.0 * m.at(1, 1).arg();
        if m10.norm() > 1e-12 {
            let diff = 2.0 * m10.arg();
            beta = (sum + diff) / 2.0;
            delta = (sum - diff) / 2.0;
        } else {
            beta = sum;
            delta = 0.0;
        }
    } else {
        // m10 = e^{i(β−δ)/2} sin(γ/2)
        let diff = 2.0 * m10.arg();
        if m00.norm() > 1e-12 {
            let sum = 2.0 * m.at(1, 1).arg();
            beta = (sum + diff) / 2.0;
            delta = (sum - diff) / 2.0;
        } else {
            beta = diff;
            delta = 0.0;
        }
    }
    (alpha, beta, gamma, delta)
}

const ANGLE_TOL: f64 = 1e-14;

fn push_rz(gates: &mut Vec<Gate>, target: usize, angle: f64) {
    if angle.abs() > ANGLE_TOL {
        gates.push(Gate::Rz { target, angle });
    }
}

fn push_ry(gates: &mut Vec<Gate>, target: usize, angle: f64) {
    if angle.abs() > ANGLE_TOL {
        gates.push(Gate::Ry { target, angle });
    }
}

/// Gate list (application order) realising a single-qubit unitary up to
/// global phase as Rz·Ry·Rz.
pub fn single_qubit_gates(v: &CMat, target: usize) -> Vec<Gate> {
    let (_, beta, gamma, delta) = zyz_angles(v);
    let mut gates = Vec::new();
    push_rz(&mut gates, target, delta);
    push_ry(&mut gates, target, gamma);
    push_rz(&mut gates, target, beta);
    gates
}

/// Controlled-`w` via the ABC decomposition: two CNOTs, single-qubit RY/RZ on
/// the target, and an RZ on the control absorbing the determinant phase.
/// Exact up to global phase.
fn controlled_gates(w: &CMat, control: usize, target: usize) -> Vec<Gate> {
    let (alpha, beta, gamma, delta) = zyz_angles(w);
    let mut gates = Vec::new();
    if beta.abs() <= ANGLE_TOL && delta.abs() <= ANGLE_TOL {
        // pure y-rotation: A = Ry(γ/2), B = Ry(−γ/2)
        if gamma.abs() > ANGLE_TOL {
            push_ry(&mut gates, target, gamma / 2.0);
            gates.push(Gate::Cnot { control, target });
            push_ry(&mut gates, target, -gamma / 2.0);
            gates.push(Gate::Cnot { control, target });
        }
    } else {
        // C = Rz((δ−β)/2), B = Ry(−γ/2) Rz(−(δ+β)/2), A = Rz(β) Ry(γ/2)
        push_rz(&mut gates, target, (delta - beta) / 2.0);
        gates.push(Gate::Cnot { control, target });
        push_rz(&mut gates, target, -(delta + beta) / 2.0);
        push_ry(&mut gates, target, -gamma / 2.0);
        gates.push(Gate::Cnot { control, target });
        push_ry(&mut gates, target, gamma / 2.0);
        push_rz(&mut gates, target, beta);
    }
    push_rz(&mut gates, control, alpha);
    gates
}

/// Synthesises a supported 4x4 unitary into CNOT + RY/RZ gates whose ordered
/// product equals it up to global phase.
///
/// Supported shapes: identity; block-diagonal along either qubit (a free
/// rotation plus one controlled gate); and the two-level outer/inner pattern
/// of dilation unitaries, handled by conjugating with one CNOT into
/// block-diagonal form. Anything else is out of scope.
pub fn synthesize(u: &CMat) -> Result<Vec<Gate>, CircuitError> {
    let res = u.unitary_residual();
    if res > 1e-10 {
        return Err(CircuitError::NotUnitary { residual: res });
    }
    if phase_distance_to_identity(u) < 1e-12 {
        return Ok(Vec::new());
    }
    if let Some(gates) = synth_block_diagonal(u) {
        return Ok(gates);
    }
    if off_pattern_magnitude(u) <= 1e-10 {
        // CNOT (control = system, target = ancilla) maps the outer block to
        // the ancilla-0 subspace and the inner block to ancilla-1
        let cnot = Gate::Cnot {
            control: SYSTEM,
            target: ANCILLA,
        };
        let g = gate_matrix(&cnot).unwrap();
        let m = &(&g * u) * &g;
        if let Some(inner) = synth_block_diagonal(&m) {
            let mut gates = vec![cnot];
            gates.extend(inner);
            gates.push(cnot);
            return Ok(gates);
        }
    }
    Err(CircuitError::UnsupportedPattern)
}

/// Synthesis for unitaries block-diagonal along one qubit:
/// `(1 ⊗ V₀) · controlled-(V₀†V₁)`.
fn synth_block_diagonal(u: &CMat) -> Option<Vec<Gate>> {
    for (control, target) in [(ANCILLA, SYSTEM), (SYSTEM, ANCILLA)] {
        let idx = |c: usize, t: usize| -> usize {
            if control == ANCILLA {
                2 * c + t
            } else {
                2 * t + c
            }
        };
        let mut off = 0.0f64;
        for c in 0..2 {
            for cp in 0..2 {
                if c == cp {
                    continue;
                }
                for t0 in 0..2 {
                    for t1 in 0..2 {
                        off = off.max(u.at(idx(c, t0), idx(cp, t1)).norm());
                    }
                }
            }
        }
        if off > 1e-10 {
            continue;
        }
        let v0 = CMat::from_fn(2, |i, j| u.at(idx(0, i), idx(0, j)));
        let v1 = CMat::from_fn(2, |i, j| u.at(idx(1, i), idx(1, j)));
        // u = (1 ⊗ V₀) · controlled-(V₀†V₁): the controlled gate acts first
        let w = &v0.dagger() * &v1;
        let mut gates = controlled_gates(&w, control, target);
        if phase_distance_to_identity(&v0) > 1e-12 {
            gates.extend(single_qubit_gates(&v0, target));
        }
        return Some(gates);
    }
    None
}

/// Max-abs distance to the identity after removing the global phase
/// (normalising the largest-magnitude entry to positive real).
pub fn phase_distance_to_identity(u: &CMat) -> f64 {
    phase_distance(u, &CMat::identity(u.dim()))
}

/// Max-abs distance between two matrices up to global phase.
pub fn phase_distance(a: &CMat, b: &CMat) -> f64 {
    let n = a.dim();
    let mut best = (0, 0);
    let mut mag = 0.0;
    for i in 0..n {
        for j in 0..n {
            let m = b.at(i, j).norm();
            if m > mag {
                mag = m;
                best = (i, j);
            }
        }
    }
    if mag < 1e-300 {
        return a.max_abs_diff(b);
    }
    let za = a.at(best.0, best.1);
    if za.norm() < 1e-300 {
        return a.max_abs_diff(b);
    }
    let phase = (b.at(best.0, best.1) / mag) * (za.conj() / za.norm());
    a.scale(phase).max_abs_diff(b)
}

/// Execution mode of [`run_program`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunMode {
    /// Compose stage channels exactly, averaging mixtures.
    Deterministic,
    /// Draw one branch per mixture per trajectory and average the outcomes.
    Sampled,
}

/// Execution report of [`run_program`].
#[derive(Clone, Debug)]
pub struct RunReport {
    pub gate_count: usize,
    pub stage_count: usize,
    pub trajectories: u64,
    /// Standard error estimate of the trajectory mean (sampled mode only).
    pub std_error: Option<f64>,
}

/// Exact system-level superoperator of one stage (ancilla prepared in `|0⟩`,
/// gates applied, ancilla traced out; mixtures averaged exactly).
pub fn stage_superop(stage: &Stage) -> Superoperator {
    let branch_superop = |gates: &[Gate]| -> CMat {
        let mut s = CMat::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                let mut e = CMat::zeros(2);
                e.set(i, j, C64::new(1.0, 0.0));
                let mut anc = CMat::zeros(2);
                anc.set(0, 0, C64::new(1.0, 0.0));
                let joint = JointState(anc.kron(&e));
                let out = apply_gates(gates, &joint).system_state();
                for a in 0..2 {
                    for b in 0..2 {
                        s.set(a + 2 * b, i + 2 * j, out.at(a, b));
                    }
                }
            }
        }
        s
    };
    let m = match stage {
        Stage::Unitary(gates) => branch_superop(gates),
        Stage::Mixture(branches) => {
            let mut acc = CMat::zeros(4);
            for (p, gates) in branches {
                acc = &acc + &branch_superop(gates).scale_re(*p);
            }
            acc
        }
    };
    Superoperator::new(m).expect("stage superoperator is finite")
}

/// Exact superoperator of a whole program (deterministic semantics).
///
/// Compiled programs repeat one Trotter block many times, so stage
/// superoperators are memoised by stage content.
pub fn program_superop(p: &ChannelProgram) -> Superoperator {
    let mut seen: Vec<(&Stage, Superoperator)> = Vec::new();
    let mut acc = Superoperator::identity();
    for stage in &p.stages {
        let s = match seen.iter().find(|(k, _)| *k == stage) {
            Some((_, s)) => s.clone(),
            None => {
                let s = stage_superop(stage);
                seen.push((stage, s.clone()));
                s
            }
        };
        acc = &s * &acc;
    }
    acc
}

/// Runs a channel program on an initial system state.
///
/// Sampled mode draws every branch choice from a generator seeded by
/// `(seed, trajectory index)` only, so results are reproducible and
/// trajectory-order independent.
pub fn run_program(
    p: &ChannelProgram,
    rho0: &DensityMatrix,
    mode: RunMode,
    seed: u64,
    trajectories: u64,
) -> Result<(DensityMatrix, RunReport), CircuitError> {
    p.validate()?;
    let mut report = RunReport {
        gate_count: p.gate_count(),
        stage_count: p.stage_count(),
        trajectories: 0,
        std_error: None,
    };
    match mode {
        RunMode::Deterministic => {
            let s = program_superop(p);
            let out = s.apply_density(rho0)?;
            Ok((out, report))
        }
        RunMode::Sampled => {
            if trajectories == 0 {
                return Err(CircuitError::NoTrajectories);
            }
            // resolve gate matrices once per distinct stage; trajectories
            // only draw branches and multiply
            enum Op {
                Unitary(CMat, CMat),
                Reset(usize),
            }
            let resolve = |gates: &[Gate]| -> Vec<Op> {
                gates
                    .iter()
                    .map(|g| match gate_matrix(g) {
                        Some(u) => {
                            let ud = u.dagger();
                            Op::Unitary(u, ud)
                        }
                        None => match g {
                            Gate::Reset { target } => Op::Reset(*target),
                            _ => unreachable!(),
                        },
                    })
                    .collect()
            };
            enum ResolvedStage {
                Unitary(Vec<Op>),
                Mixture(Vec<(f64, Vec<Op>)>),
            }
            let mut memo: Vec<(&Stage, std::rc::Rc<ResolvedStage>)> = Vec::new();
            let resolved: Vec<std::rc::Rc<ResolvedStage>> = p
                .stages
                .iter()
                .map(|stage| {
                    if let Some((_, r)) = memo.iter().find(|(k, _)| *k == stage) {
                        return r.clone();
                    }
                    let r = std::rc::Rc::new(match stage {
                        Stage::Unitary(gates) => ResolvedStage::Unitary(resolve(gates)),
                        Stage::Mixture(branches) => ResolvedStage::Mixture(
                            branches.iter().map(|(pr, g)| (*pr, resolve(g))).collect(),
                        ),
                    });
                    memo.push((stage, r.clone()));
                    r
                })
                .collect();
            let apply_ops = |ops: &[Op], rho: &mut CMat| {
                for op in ops {
                    match op {
                        Op::Unitary(u, ud) => *rho = &(u * &*rho) * ud,
                        Op::Reset(t) => *rho = reset_qubit(rho, *t),
                    }
                }
            };
            let mut mean = CMat::zeros(2);
            let mut finals: Vec<CMat> = Vec::with_capacity(trajectories as usize);
            for traj in 0..trajectories {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(traj);
                let mut state = JointState::prepared(rho0).0;
                for stage in &resolved {
                    // ancilla is refreshed at stage boundaries
                    state = reset_qubit(&state, ANCILLA);
                    match stage.as_ref() {
                        ResolvedStage::Unitary(ops) => apply_ops(ops, &mut state),
                        ResolvedStage::Mixture(branches) => {
                            let x: f64 = rng.gen();
                            let mut acc = 0.0;
                            let mut chosen = &branches[branches.len() - 1].1;
                            for (prob, ops) in branches {
                                acc += prob;
                                if x < acc {
                                    chosen = ops;
                                    break;
                                }
                            }
                            apply_ops(chosen, &mut state);
                        }
                    }
                }
                let sys = JointState(state).system_state();
                mean = &mean + &sys;
                finals.push(sys);
            }
            let mean = mean.scale_re(1.0 / trajectories as f64);
            let herm = (&mean + &mean.dagger()).scale_re(0.5);
            let tr = herm.trace().re;
            let rho = DensityMatrix::new(herm.scale_re(1.0 / tr))?;
            // scatter of the trajectory mean, measured in Frobenius norm
            let var: f64 = finals
                .iter()
                .map(|s| {
                    let d = s - &mean;
                    d.fro_norm().powi(2)
                })
                .sum::<f64>();
            let n = trajectories as f64;
            let std_error = if trajectories > 1 {
                (var / (n * (n - 1.0))).sqrt()
            } else {
                f64::NAN
            };
            report.trajectories = trajectories;
            report.std_error = Some(std_error);
            Ok((rho, report))
        }
    }
}

/// Circuit text format: one lowercase gate per line, mixtures delimited by
/// `begin mixture` / `branch <prob>` / `end mixture`; angles and
/// probabilities carry 17 significant digits.
pub fn write_program(p: &ChannelProgram) -> String {
    let mut out = String::new();
    let fmt_gate = |g: &Gate| -> String {
        match g {
            Gate::Ry { target, angle } => format!("ry q{} {:.16e}\n", target, angle),
            Gate::Rz { target, angle } => format!("rz q{} {:.16e}\n", target, angle),
            Gate::Cnot { control, target } => format!("cnot q{} q{}\n", control, target),
            Gate::Reset { target } => format!("reset q{}\n", target),
        }
    };
    for stage in &p.stages {
        match stage {
            Stage::Unitary(gates) => {
                for g in gates {
                    out.push_str(&fmt_gate(g));
                }
            }
            Stage::Mixture(branches) => {
                out.push_str("begin mixture\n");
                for (prob, gates) in branches {
                    out.push_str(&format!("branch {:.16e}\n", prob));
                    for g in gates {
                        out.push_str(&fmt_gate(g));
                    }
                }
                out.push_str("end mixture\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests;
