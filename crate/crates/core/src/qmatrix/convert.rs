//! Conversions between the four channel representations: superoperator,
//! Kraus list, Choi matrix and Bloch-affine map.

use super::{
    hermitian_eigen, pauli, vec_col, BlochAffine, CMat, QmatError, Superoperator, C64, PSD_TOL,
    TP_TOL,
};

/// Basis matrix `E_ij = |i⟩⟨j|` on the qubit.
fn basis2(i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(2);
    m.set(i, j, C64::new(1.0, 0.0));
    m
}

/// Choi matrix `τ = (T ⊗ 1)|Ω⟩⟨Ω|`, system-first ordering:
/// `τ[(a,i),(b,j)] = ½ T(E_ij)[a,b]` with row index `2a + i`.
pub fn choi_of_superop(g: &Superoperator) -> CMat {
    let mut tau = CMat::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let t = g.apply(&basis2(i, j));
            for a in 0..2 {
                for b in 0..2 {
                    tau.set(2 * a + i, 2 * b + j, t.at(a, b) * 0.5);
                }
            }
        }
    }
    tau
}

/// Inverse of [`choi_of_superop`].
pub fn superop_of_choi(tau: &CMat) -> Result<Superoperator, QmatError> {
    if tau.dim() != 4 {
        return Err(QmatError::BadDim {
            expected: 4,
            got: tau.dim(),
        });
    }
    let mut s = CMat::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            // column of S for input E_ij, column-major vec index i + 2j
            for a in 0..2 {
                for b in 0..2 {
                    s.set(a + 2 * b, i + 2 * j, tau.at(2 * a + i, 2 * b + j) * 2.0);
                }
            }
        }
    }
    Superoperator::new(s)
}

/// Kraus operators from a Choi matrix, one per eigenvalue above the rank
/// cutoff `1e-8`; errors if the numerical rank exceeds `max_rank`.
///
/// The returned list is padded with zero matrices up to `max_rank` and ordered
/// by descending eigenvalue, eigenvector phases fixed so the first significant
/// component is real positive.
pub fn kraus_of_choi(tau: &CMat, max_rank: usize) -> Result<Vec<CMat>, QmatError> {
    if tau.dim() != 4 {
        return Err(QmatError::BadDim {
            expected: 4,
            got: tau.dim(),
        });
    }
    let (eigs, v) = hermitian_eigen(tau)?;
    let rank = eigs.iter().filter(|l| **l > 1e-8).count();
    if rank > max_rank {
        return Err(QmatError::RankTooHigh {
            rank,
            max: max_rank,
        });
    }
    let mut kraus = Vec::with_capacity(max_rank);
    for k in 0..max_rank.min(4) {
        let lam = eigs[k].max(0.0);
        let mut w = [v.at(0, k), v.at(1, k), v.at(2, k), v.at(3, k)];
        if let Some(first) = w.iter().find(|z| z.norm() > 1e-8).copied() {
            let ph = first / first.norm();
            for z in w.iter_mut() {
                *z *= ph.conj();
            }
        }
        let scale = (2.0 * lam).sqrt();
        // τ eigenvector index (a, i) = 2a + i maps to K[a][i]
        kraus.push(CMat::from_fn(2, |a, i| w[2 * a + i] * scale));
    }
    Ok(kraus)
}

/// Bloch-affine map of a superoperator: `m_i = ½ tr(σ_i T(I))`,
/// `M̃_ij = ½ tr(σ_i T(σ_j))`.
pub fn affine_of_superop(g: &Superoperator) -> BlochAffine {
    let t_id = g.apply(&CMat::identity(2));
    let mut m = [0.0; 3];
    let mut mt = [[0.0; 3]; 3];
    for i in 0..3 {
        m[i] = 0.5 * (&pauli(i + 1) * &t_id).trace().re;
        for j in 0..3 {
            let t_sig = g.apply(&pauli(j + 1));
            mt[i][j] = 0.5 * (&pauli(i + 1) * &t_sig).trace().re;
        }
    }
    BlochAffine { mtilde: mt, m }
}

/// Superoperator of a Bloch-affine map (assumes a Hermiticity- and
/// trace-preserving map, which the affine form encodes by construction).
pub fn superop_of_affine(aff: &BlochAffine) -> Superoperator {
    // T(X) for X = x0 I + Σ x_j σ_j: x0 (I + m·σ) + Σ_ij M̃_ij x_j σ_i
    let apply = |x: &CMat| -> CMat {
        let x0 = 0.5 * x.trace();
        let xs: Vec<C64> = (0..3).map(|j| (&pauli(j + 1) * x).trace() * 0.5).collect();
        let mut out = CMat::identity(2).scale(x0);
        for i in 0..3 {
            let mut coeff = x0 * aff.m[i];
            for j in 0..3 {
                coeff += xs[j] * aff.mtilde[i][j];
            }
            out = &out + &pauli(i + 1).scale(coeff);
        }
        out
    };
    let mut s = CMat::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let col = vec_col(&apply(&basis2(i, j)));
            for (r, z) in col.iter().enumerate() {
                s.set(r, i + 2 * j, *z);
            }
        }
    }
    Superoperator::new(s).expect("affine map produces a finite 4x4 matrix")
}

/// Conjugates a 4x4 matrix by the two-qubit SWAP, i.e. reorders a system-first
/// Choi matrix into reference-first block form and back.
pub fn swap_conjugate(m: &CMat) -> CMat {
    // |ab⟩ → |ba⟩: index 2a + b → 2b + a
    let perm = [0usize, 2, 1, 3];
    CMat::from_fn(4, |i, j| m.at(perm[i], perm[j]))
}

/// Outcome of a CPT check with the residuals that drove it.
#[derive(Clone, Debug)]
pub struct CptDiagnostics {
    pub is_cpt: bool,
    /// Smallest eigenvalue of the Choi matrix (≥ `-PSD_TOL` passes).
    pub min_choi_eigenvalue: f64,
    /// Max-abs deviation of the partial trace of the Choi matrix from `I/2`.
    pub tp_residual: f64,
}

pub(super) fn cpt_diagnostics(g: &Superoperator) -> CptDiagnostics {
    let tau = choi_of_superop(g);
    let herm_res = tau.herm_residual();
    let min_eig = if herm_res > 1e-9 {
        // not even Hermiticity-preserving; report via a large negative marker
        f64::NEG_INFINITY
    } else {
        let (eigs, _) = hermitian_eigen(&tau).expect("Hermitian within tolerance");
        *eigs.last().unwrap()
    };
    // partial trace over the system (first tensor factor)
    let mut tp_residual = 0.0f64;
    for i in 0..2 {
        for j in 0..2 {
            let v: C64 = (0..2).map(|a| tau.at(2 * a + i, 2 * a + j)).sum();
            let expect = if i == j { 0.5 } else { 0.0 };
            tp_residual = tp_residual.max((v - C64::new(expect, 0.0)).norm());
        }
    }
    CptDiagnostics {
        is_cpt: min_eig >= -PSD_TOL && tp_residual <= TP_TOL,
        min_choi_eigenvalue: min_eig,
        tp_residual,
    }
}
