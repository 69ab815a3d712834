//! End-to-end compiler and validation harness: spectral split, Trotter plan,
//! per-factor circuit construction, exact-oracle comparison and cost tables.

mod jobspec;

pub use jobspec::{parse_grid, parse_jobspec, parse_state, write_jobspec, write_state, BenchGrid};

use crate::channel::{quasi_extreme_split, CanonicalChannel, ChannelError};
use crate::circuit::{
    phase_distance_to_identity, program_superop, run_program, single_qubit_gates, synthesize,
    ChannelProgram, CircuitError, Gate, RunMode, RunReport, Stage, ANCILLA, SYSTEM,
};
use crate::generator::{GeneratorDecomposition, GeneratorError, GeneratorSpec};
use crate::qmatrix::{expm, hermitian_eigen, one_to_one_norm, CMat, DensityMatrix, QmatError, C64};
use crate::trotter::{self, ComponentKind, TrotterError, TrotterPlan};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Trotter(#[from] TrotterError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// A complete compilation job.
#[derive(Clone, Debug)]
pub struct JobSpec {
    pub generator: GeneratorSpec,
    pub t: f64,
    pub eps: f64,
    pub mode: RunMode,
    pub trajectories: u64,
    pub seed: u64,
    pub k_override: Option<u32>,
}

impl JobSpec {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(PipelineError::InvalidJob(format!(
                "t must be >= 0, got {}",
                self.t
            )));
        }
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(PipelineError::InvalidJob(format!(
                "eps must be in (0, 1], got {}",
                self.eps
            )));
        }
        if let Some(k) = self.k_override {
            if k < 1 {
                return Err(PipelineError::InvalidJob("k must be >= 1".into()));
            }
        }
        if self.mode == RunMode::Sampled && self.trajectories == 0 {
            return Err(PipelineError::InvalidJob(
                "sampled mode needs at least one trajectory".into(),
            ));
        }
        Ok(())
    }
}

/// Seed of the fixed random probe states used by [`validate`].
const PROBE_SEED: u64 = 0x1db1_0ced;
const RANDOM_PROBES: usize = 18;

fn build_stage(
    decomp: &GeneratorDecomposition,
    kind: ComponentKind,
    duration: f64,
) -> Result<Stage, PipelineError> {
    match kind {
        ComponentKind::Hamiltonian => {
            let (eigs, q) = hermitian_eigen(&decomp.hamiltonian)?;
            let v = CMat::from_fn(2, |i, j| {
                (0..2)
                    .map(|k| {
                        q.at(i, k) * C64::new(0.0, -eigs[k] * duration).exp() * q.at(j, k).conj()
                    })
                    .sum()
            });
            Ok(Stage::Unitary(single_qubit_gates(&v, SYSTEM)))
        }
        ComponentKind::Dissipative { slot } => {
            let part = decomp.canonical[slot]
                .as_ref()
                .expect("plan only references active components");
            let weight = decomp.lambda[slot + 1];
            let ch = CanonicalChannel::new(part.theta, duration * weight)?;
            let pair = quasi_extreme_split(&ch)?;
            let u = &part.basis_change;
            let rotate = phase_distance_to_identity(u) > 1e-12;
            let mut branches = Vec::with_capacity(2);
            for member in &pair.members {
                let mut gates = vec![Gate::Reset { target: ANCILLA }];
                if rotate {
                    gates.extend(single_qubit_gates(&u.dagger(), SYSTEM));
                }
                gates.extend(synthesize(&member.dilation)?);
                if rotate {
                    gates.extend(single_qubit_gates(u, SYSTEM));
                }
                branches.push((0.5, gates));
            }
            Ok(Stage::Mixture(branches))
        }
    }
}

/// One Trotter block compiled to stages, shared by [`compile`] and the
/// repeated-block fast paths.
fn compile_block(job: &JobSpec) -> Result<(TrotterPlan, Vec<Stage>), PipelineError> {
    job.validate()?;
    let decomp = job.generator.spectral_split()?;
    let plan = trotter::plan(&decomp, job.t, job.eps, job.k_override)?;
    let mut stages = Vec::with_capacity(plan.factors.len());
    for factor in &plan.factors {
        let kind = plan.components[factor.gen_index].kind;
        stages.push(build_stage(&decomp, kind, factor.duration)?);
    }
    Ok((plan, stages))
}

/// Compiles a job to an explicit channel program (the per-block stages
/// repeated `reps` times) plus the plan that sized it.
pub fn compile(job: &JobSpec) -> Result<(ChannelProgram, TrotterPlan), PipelineError> {
    let (plan, block) = compile_block(job)?;
    let mut stages = Vec::with_capacity(block.len() * plan.reps as usize);
    for _ in 0..plan.reps {
        stages.extend(block.iter().cloned());
    }
    let program = ChannelProgram { stages };
    program.validate()?;
    Ok((program, plan))
}

/// Compiles and runs a job on an initial state using the job's execution
/// mode, seed and trajectory count.
pub fn simulate(
    job: &JobSpec,
    rho0: &DensityMatrix,
) -> Result<(DensityMatrix, RunReport, TrotterPlan), PipelineError> {
    let (program, plan) = compile(job)?;
    let (rho, report) = run_program(&program, rho0, job.mode, job.seed, job.trajectories)?;
    Ok((rho, report, plan))
}

/// Validation report comparing a compiled program against the exact oracle
/// `e^{tL}`. Serialises with a stable key order; the runtime is deliberately
/// excluded so identical jobs produce bit-identical JSON.
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub t: f64,
    pub eps: f64,
    pub k: u32,
    pub r: f64,
    pub reps: u64,
    pub n_exp: u64,
    pub gate_count: u64,
    /// Max-entry difference between the program and oracle superoperators.
    pub superop_max_abs: f64,
    /// Estimated (1→1) distance between program and oracle.
    pub superop_one_to_one: f64,
    /// Max trace distance over the fixed probe states.
    pub trace_dist_max: f64,
    pub bound_satisfied: bool,
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// The fixed probe set: six Pauli eigenstates plus seeded random pure states.
pub fn probe_states() -> Vec<DensityMatrix> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut probes = vec![
        DensityMatrix::from_ket([one, zero]).unwrap(),
        DensityMatrix::from_ket([zero, one]).unwrap(),
        DensityMatrix::from_ket([one * h, one * h]).unwrap(),
        DensityMatrix::from_ket([one * h, -one * h]).unwrap(),
        DensityMatrix::from_ket([one * h, i * h]).unwrap(),
        DensityMatrix::from_ket([one * h, -i * h]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..RANDOM_PROBES {
        let g: Vec<f64> = (0..4).map(|_| StandardNormal.sample(&mut rng)).collect();
        probes.push(
            DensityMatrix::from_ket([C64::new(g[0], g[1]), C64::new(g[2], g[3])])
                .expect("Gaussian ket is nonzero"),
        );
    }
    probes
}

fn trace_distance_raw(a: &CMat, b: &CMat) -> f64 {
    let d = a - b;
    let herm = (&d + &d.dagger()).scale_re(0.5);
    let (eigs, _) = hermitian_eigen(&herm).expect("hermitised difference");
    eigs.iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

/// Compiles a job, composes the exact program superoperator (block powered to
/// `reps`) and compares it against the oracle `e^{tL}`.
pub fn validate(job: &JobSpec) -> Result<ValidationReport, PipelineError> {
    let start = Instant::now();
    let (plan, block) = compile_block(job)?;
    let block_program = ChannelProgram { stages: block };
    block_program.validate()?;
    let program_s = program_superop(&block_program).pow(plan.reps);
    let oracle = expm(&job.generator.lindblad_superop(), job.t)?;

    let diff = &oracle - &program_s;
    let superop_max_abs = diff.mat().max_abs();
    let superop_one_to_one = one_to_one_norm(&diff);
    let mut trace_dist_max = 0.0f64;
    for probe in probe_states() {
        let a = oracle.apply(probe.mat());
        let b = program_s.apply(probe.mat());
        trace_dist_max = trace_dist_max.max(trace_distance_raw(&a, &b));
    }
    Ok(ValidationReport {
        t: job.t,
        eps: job.eps,
        k: plan.k,
        r: plan.r,
        reps: plan.reps,
        n_exp: plan.n_exp,
        gate_count: (block_program.gate_count() as u64) * plan.reps,
        superop_max_abs,
        superop_one_to_one,
        trace_dist_max,
        bound_satisfied: superop_one_to_one <= job.eps,
        runtime_ms: start.elapsed().as_millis(),
    })
}

/// One row of a bench table.
#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub t: f64,
    pub eps: f64,
    pub k: u32,
    pub r: f64,
    pub reps: u64,
    pub n_exp: u64,
    pub gate_count: u64,
    pub measured_error: f64,
    pub runtime_ms: u128,
}

/// Runs the validation pipeline over the Cartesian (t, eps) grid and tabulates
/// plan sizes against measured error.
pub fn bench(grid: &BenchGrid) -> Result<Vec<BenchRow>, PipelineError> {
    let mut rows = Vec::new();
    for &t in &grid.ts {
        for &eps in &grid.epss {
            let job = JobSpec {
                generator: grid.generator.clone(),
                t,
                eps,
                mode: RunMode::Deterministic,
                trajectories: 0,
                seed: 0,
                k_override: grid.k_override,
            };
            let report = validate(&job)?;
            rows.push(BenchRow {
                t,
                eps,
                k: report.k,
                r: report.r,
                reps: report.reps,
                n_exp: report.n_exp,
                gate_count: report.gate_count,
                measured_error: report.superop_one_to_one,
                runtime_ms: report.runtime_ms,
            });
        }
    }
    Ok(rows)
}

/// CSV rendering of a bench table, header included.
pub fn bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from("t,eps,k,r,reps,n_exp,gate_count,measured_error,runtime_ms\n");
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.t,
            row.eps,
            row.k,
            row.r,
            row.reps,
            row.n_exp,
            row.gate_count,
            row.measured_error,
            row.runtime_ms
        ));
    }
    out
}
