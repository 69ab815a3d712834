//! Closed-form canonical semigroup channels `T^{(θ)}_t` and their convex
//! decomposition into two quasi-extreme channels, each implementable with two
//! Kraus operators and a single-ancilla dilation.

use crate::circuit::dilation_unitary;
use crate::qmatrix::{
    choi_of_superop, hermitian_eigen, pinv_sqrt_psd, sqrtm_psd, superop_of_affine, svd2,
    swap_conjugate, BlochAffine, CMat, QmatError, Superoperator, C64,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("theta = {0} outside [0, π/4]")]
    ThetaOutOfRange(f64),
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("Choi matrix has numerical rank {rank} > 2")]
    RankTooHigh { rank: usize },
    #[error("quasi-extreme split failed an internal consistency check: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// The canonical channel `T^{(θ)}_t = e^{t L_θ}` in closed form: diagonal
/// damping factors `Λ₁ = e^{−2t sin²θ}`, `Λ₂ = e^{−2t cos²θ}`, `Λ₃ = e^{−2t}`
/// and the fixed-point offset `m₃ = sin(2θ)(1 − Λ₃)` along z.
#[derive(Clone, Debug)]
pub struct CanonicalChannel {
    pub theta: f64,
    pub t: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    pub m3: f64,
    pub affine: BlochAffine,
}

impl CanonicalChannel {
    pub fn new(theta: f64, t: f64) -> Result<Self, ChannelError> {
        if !(0.0..=std::f64::consts::FRAC_PI_4 + 1e-12).contains(&theta) {
            return Err(ChannelError::ThetaOutOfRange(theta));
        }
        if t < 0.0 || !t.is_finite() {
            return Err(ChannelError::NegativeTime(t));
        }
        let s2 = theta.sin().powi(2);
        let c2 = theta.cos().powi(2);
        let lambda1 = (-2.0 * s2 * t).exp();
        let lambda2 = (-2.0 * c2 * t).exp();
        let lambda3 = (-2.0 * t).exp();
        let m3 = (2.0 * theta).sin() * (1.0 - lambda3);
        let mut mtilde = [[0.0; 3]; 3];
        mtilde[0][0] = lambda1;
        mtilde[1][1] = lambda2;
        mtilde[2][2] = lambda3;
        let affine = BlochAffine {
            mtilde,
            m: [0.0, 0.0, m3],
        };
        Ok(CanonicalChannel {
            theta,
            t,
            lambda1,
            lambda2,
            lambda3,
            m3,
            affine,
        })
    }

    pub fn superop(&self) -> Superoperator {
        superop_of_affine(&self.affine)
    }

    /// System-first Choi matrix of the channel.
    pub fn choi(&self) -> CMat {
        choi_of_superop(&self.superop())
    }
}

/// Damping-basis eigenvalues `(−2 sin²θ, −2 cos²θ, −2)` of the canonical
/// generator; the fourth superoperator eigenvalue is 0 (trace preservation).
pub fn damping_eigenvalues(theta: f64) -> [f64; 3] {
    let s2 = theta.sin().powi(2);
    let c2 = theta.cos().powi(2);
    [-2.0 * s2, -2.0 * c2, -2.0]
}

/// One quasi-extreme member of the convex split.
#[derive(Clone, Debug)]
pub struct QuasiExtremeMember {
    /// Two Kraus operators with `Σ K†K = I`.
    pub kraus: [CMat; 2],
    /// The unitary completing the member's contraction block, the witness
    /// of its generalised extremality.
    pub contraction_unitary: CMat,
    /// Single-ancilla dilation unitary (ancilla-first tensor ordering).
    pub dilation: CMat,
    /// System-first Choi matrix.
    pub choi: CMat,
}

impl QuasiExtremeMember {
    pub fn superop(&self) -> Superoperator {
        Superoperator::from_kraus(&self.kraus).expect("member Kraus are valid")
    }
}

/// Convex split `T = ½ T₁ + ½ T₂` of a canonical channel into quasi-extreme
/// channels.
#[derive(Clone, Debug)]
pub struct QuasiExtremePair {
    /// Phases of the two antidiagonal entries of the first split unitary.
    pub phi1: f64,
    pub phi2: f64,
    /// `(a, b, c, d)`: twice the square roots of the parent Jamiolkowski
    /// diagonal in the reference-first block convention.
    pub abcd: [f64; 4],
    pub members: [QuasiExtremeMember; 2],
}

/// Support cutoff for the block pseudo-inverses; `t = 0` and boundary-θ
/// channels legitimately make `A` or `I − A` singular.
const SUPPORT_TOL: f64 = 1e-12;

/// Splits a canonical channel into two quasi-extreme channels following the
/// block-correspondence construction: form the adjoint-channel matrix
/// `β(T̂)` with blocks `(A, C, I−A)`, extract the contraction
/// `R = A^{-1/2} C (I−A)^{-1/2}`, split `R = ½(U₁+U₂)` into unitaries through
/// its SVD, and map each extreme block matrix back to a channel.
pub fn quasi_extreme_split(ch: &CanonicalChannel) -> Result<QuasiExtremePair, ChannelError> {
    let parent = ch.superop();
    let tau_sys = choi_of_superop(&parent);
    // reference-first block convention for the β machinery
    let tau_ref = swap_conjugate(&tau_sys);
    let beta = tau_ref.scale_re(2.0);
    let beta_hat = u23_conjugate(&beta).conj();

    let block = |r0: usize, c0: usize, m: &CMat| CMat::from_fn(2, |i, j| m.at(r0 + i, c0 + j));
    let a = block(0, 0, &beta_hat);
    let c = block(0, 2, &beta_hat);
    let b = block(2, 2, &beta_hat);
    let id2 = CMat::identity(2);
    let ia = &id2 - &a;
    if b.max_abs_diff(&ia) > 1e-9 {
        return Err(ChannelError::Inconsistent(format!(
            "adjoint block B != I - A (residual {:.3e})",
            b.max_abs_diff(&ia)
        )));
    }

    let a_pinv_sqrt = pinv_sqrt_psd(&a, SUPPORT_TOL)?;
    let ia_pinv_sqrt = pinv_sqrt_psd(&ia, SUPPORT_TOL)?;
    let r = &(&a_pinv_sqrt * &c) * &ia_pinv_sqrt;

    // split the contraction into the average of two unitaries through its
    // SVD R = V D W† (D in [0, 1]): U_{1,2} = V (D ± i √(I − D²)) W†
    let (v, d, w) = svd2(&r)?;
    let dd = [d[0].min(1.0), d[1].min(1.0)];
    let make_u = |sign: f64| -> CMat {
        let diag = CMat::from_fn(2, |i, j| {
            if i == j {
                C64::new(dd[i], sign * (1.0 - dd[i] * dd[i]).max(0.0).sqrt())
            } else {
                C64::new(0.0, 0.0)
            }
        });
        &(&v * &diag) * &w.dagger()
    };
    let u1 = make_u(1.0);
    let u2 = make_u(-1.0);

    let a_sqrt = sqrtm_psd(&a)?;
    let ia_sqrt = sqrtm_psd(&ia)?;
    let mut members = Vec::with_capacity(2);
    for u in [&u1, &u2] {
        let c_i = &(&a_sqrt * u) * &ia_sqrt;
        let mut beta_hat_i = CMat::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                beta_hat_i.set(i, j, a.at(i, j));
                beta_hat_i.set(i, j + 2, c_i.at(i, j));
                beta_hat_i.set(i + 2, j, c_i.at(j, i).conj());
                beta_hat_i.set(i + 2, j + 2, ia.at(i, j));
            }
        }
        // undo the adjoint correspondence (it is an involution)
        let beta_i = u23_conjugate(&beta_hat_i.conj());
        let tau_i_sys = swap_conjugate(&beta_i.scale_re(0.5));
        let kraus = kraus_of_member(&tau_i_sys)?;
        let dilation = dilation_unitary(&kraus)
            .map_err(|e| ChannelError::Inconsistent(format!("dilation failed: {e}")))?;
        members.push(QuasiExtremeMember {
            kraus,
            contraction_unitary: u.clone(),
            dilation,
            choi: tau_i_sys,
        });
    }
    let members: [QuasiExtremeMember; 2] = [members.remove(0), members.remove(0)];

    // ½(T₁ + T₂) must reproduce the parent
    let avg = (&members[0].superop() + &members[1].superop())
        .mat()
        .scale_re(0.5);
    let residual = avg.max_abs_diff(parent.mat());
    if residual > 1e-9 {
        return Err(ChannelError::Inconsistent(format!(
            "member average deviates from parent by {residual:.3e}"
        )));
    }

    let abcd = [
        2.0 * tau_ref.at(0, 0).re.max(0.0).sqrt(),
        2.0 * tau_ref.at(1, 1).re.max(0.0).sqrt(),
        2.0 * tau_ref.at(2, 2).re.max(0.0).sqrt(),
        2.0 * tau_ref.at(3, 3).re.max(0.0).sqrt(),
    ];
    Ok(QuasiExtremePair {
        phi1: u1.at(0, 1).arg(),
        phi2: u1.at(1, 0).arg(),
        abcd,
        members,
    })
}

/// Two Kraus operators from a rank ≤ 2 system-first Choi matrix, taken from
/// the two leading eigenpairs (reshaped by the fixed vectorisation convention
/// and scaled by `√(2·eigenvalue)`).
pub fn kraus_of_member(choi: &CMat) -> Result<[CMat; 2], ChannelError> {
    let (eigs, v) = hermitian_eigen(choi)?;
    let rank = eigs.iter().filter(|l| **l > 1e-8).count();
    if rank > 2 {
        return Err(ChannelError::RankTooHigh { rank });
    }
    let mut kraus = Vec::with_capacity(2);
    for k in 0..2 {
        let lam = eigs[k].max(0.0);
        let mut wv = [v.at(0, k), v.at(1, k), v.at(2, k), v.at(3, k)];
        if let Some(first) = wv.iter().find(|z| z.norm() > 1e-8).copied() {
            let ph = first / first.norm();
            for z in wv.iter_mut() {
                *z *= ph.conj();
            }
        }
        let scale = (2.0 * lam).sqrt();
        kraus.push(CMat::from_fn(2, |a, i| wv[2 * a + i] * scale));
    }
    let kraus: [CMat; 2] = [kraus.remove(0), kraus.remove(0)];
    // completeness Σ K†K = I
    let sum = &(&kraus[0].dagger() * &kraus[0]) + &(&kraus[1].dagger() * &kraus[1]);
    let res = sum.max_abs_diff(&CMat::identity(2));
    if res > 1e-10 {
        return Err(ChannelError::Inconsistent(format!(
            "Kraus completeness residual {res:.3e}"
        )));
    }
    Ok(kraus)
}

/// Conjugation by the self-adjoint permutation exchanging the two middle
/// basis states.
fn u23_conjugate(m: &CMat) -> CMat {
    let perm = [0usize, 2, 1, 3];
    CMat::from_fn(4, |i, j| m.at(perm[i], perm[j]))
}
