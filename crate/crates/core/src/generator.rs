//! Single-qubit Lindblad generators: validation, the GKS-form superoperator,
//! and the spectral decomposition into canonical one-parameter dissipative
//! semigroups conjugated by SU(2) basis changes.

use crate::qmatrix::{eigenvalues, hermitian_eigen, pauli, CMat, QmatError, Superoperator, C64};
use thiserror::Error;

/// GKS matrices must be Hermitian PSD within this tolerance.
pub const GKS_PSD_TOL: f64 = 1e-10;
/// Eigenvalue weights below this are treated as inactive components.
pub const ACTIVE_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("GKS matrix must be 3x3 and the Hamiltonian 2x2")]
    BadShape,
    #[error("GKS matrix not Hermitian (residual {residual:.3e})")]
    GksNotHermitian { residual: f64 },
    #[error("GKS matrix not positive semidefinite (eigenvalue {min_eigenvalue:.6e})")]
    GksNotPsd { min_eigenvalue: f64 },
    #[error("Hamiltonian not Hermitian (residual {residual:.3e})")]
    HamiltonianNotHermitian { residual: f64 },
    #[error("projector is not rank one (secondary eigenvalue {second:.3e})")]
    NotRankOne { second: f64 },
    #[error("matrix is not a rotation in SO(3) (residual {residual:.3e})")]
    NotRotation { residual: f64 },
    #[error(transparent)]
    Numeric(#[from] QmatError),
}

/// A Lindblad generator in GKS form: the pair `(A, H)` of a 3x3 PSD matrix of
/// rates and a 2x2 Hamiltonian, with the normalized Paulis `σ_i/√2` as the
/// operator basis.
#[derive(Clone, Debug)]
pub struct GeneratorSpec {
    gks: CMat,
    hamiltonian: CMat,
}

impl GeneratorSpec {
    pub fn new(gks: CMat, hamiltonian: CMat) -> Result<Self, GeneratorError> {
        if gks.dim() != 3 || hamiltonian.dim() != 2 {
            return Err(GeneratorError::BadShape);
        }
        if !gks.is_finite() || !hamiltonian.is_finite() {
            return Err(GeneratorError::Numeric(QmatError::NonFinite));
        }
        let hr = gks.herm_residual();
        if hr > GKS_PSD_TOL {
            return Err(GeneratorError::GksNotHermitian { residual: hr });
        }
        let (eigs, _) = hermitian_eigen(&gks)?;
        let min = *eigs.last().unwrap();
        if min < -GKS_PSD_TOL {
            return Err(GeneratorError::GksNotPsd {
                min_eigenvalue: min,
            });
        }
        let hh = hamiltonian.herm_residual();
        if hh > 1e-12 {
            return Err(GeneratorError::HamiltonianNotHermitian { residual: hh });
        }
        Ok(GeneratorSpec { gks, hamiltonian })
    }

    pub fn gks(&self) -> &CMat {
        &self.gks
    }

    pub fn hamiltonian(&self) -> &CMat {
        &self.hamiltonian
    }

    /// The 4x4 superoperator of
    /// `ρ ↦ i[ρ,H] + Σ_{k,l} A_{l,k}([F_k, ρ F_l†] + [F_k ρ, F_l†])`.
    pub fn lindblad_superop(&self) -> Superoperator {
        let mut s = hamiltonian_superop(&self.hamiltonian).mat().clone();
        s = &s + &dissipator_superop(&self.gks).mat().clone();
        Superoperator::new(s).expect("finite by construction")
    }

    /// Spectral decomposition of the GKS matrix into weighted canonical
    /// components.
    pub fn spectral_split(&self) -> Result<GeneratorDecomposition, GeneratorError> {
        let (eigs, v) = hermitian_eigen(&self.gks)?;
        let mut canonical: [Option<CanonicalPart>; 3] = [None, None, None];
        for k in 0..3 {
            if eigs[k] <= ACTIVE_TOL {
                continue;
            }
            let w = [v.at(0, k), v.at(1, k), v.at(2, k)];
            let (theta, frame) = canonical_angle_of_vector(w);
            let basis_change = su2_of_so3(&frame)?;
            canonical[k] = Some(CanonicalPart {
                theta,
                frame,
                basis_change,
            });
        }
        Ok(GeneratorDecomposition {
            lambda: [1.0, eigs[0], eigs[1], eigs[2]],
            hamiltonian: self.hamiltonian.clone(),
            canonical,
        })
    }
}

/// Superoperator of the Hamiltonian part `ρ ↦ i[ρ, H] = i(ρH − Hρ)`.
pub fn hamiltonian_superop(h: &CMat) -> Superoperator {
    let id = CMat::identity(2);
    let i = C64::new(0.0, 1.0);
    let s = &h.transpose().kron(&id).scale(i) - &id.kron(h).scale(i);
    Superoperator::new(s).expect("finite by construction")
}

/// Superoperator of the dissipative part for a GKS matrix `a`.
pub fn dissipator_superop(a: &CMat) -> Superoperator {
    let id = CMat::identity(2);
    let f: Vec<CMat> = (1..=3)
        .map(|i| pauli(i).scale_re(1.0 / 2f64.sqrt()))
        .collect();
    let mut s = CMat::zeros(4);
    for k in 0..3 {
        for l in 0..3 {
            let c = a.at(l, k);
            if c.norm() == 0.0 {
                continue;
            }
            let fl_fk = &f[l] * &f[k];
            // 2 F_k ρ F_l − F_l F_k ρ − ρ F_l F_k, vectorised column-major
            let term = &(&f[l].transpose().kron(&f[k]).scale_re(2.0) - &id.kron(&fl_fk))
                - &fl_fk.transpose().kron(&id);
            s = &s + &term.scale(c);
        }
    }
    Superoperator::new(s).expect("finite by construction")
}

/// The canonical one-parameter GKS matrix family `A(θ)`, `θ ∈ [0, π/4]`.
///
/// The sign of the off-diagonal entries is fixed so that the generated
/// semigroup relaxes toward `|0⟩` (positive Bloch-z offset), matching the
/// closed-form damping factors in [`crate::channel::CanonicalChannel`].
pub fn canonical_gks(theta: f64) -> CMat {
    let (c, s) = (theta.cos(), theta.sin());
    let z = C64::new(0.0, 0.0);
    CMat::from_rows(&[
        vec![C64::new(c * c, 0.0), C64::new(0.0, c * s), z],
        vec![C64::new(0.0, -c * s), C64::new(s * s, 0.0), z],
        vec![z, z, z],
    ])
}

/// One active dissipative component of a decomposition: the canonical angle
/// `θ_k`, the SO(3) frame `G_k` with `A_k = G_k A(θ_k) G_kᵀ`, and its SU(2)
/// image `U_k`.
#[derive(Clone, Debug)]
pub struct CanonicalPart {
    pub theta: f64,
    pub frame: CMat,
    pub basis_change: CMat,
}

/// Spectral decomposition `A = Σ λ_k A_k` of a generator, with each rank-one
/// eigenprojector reduced to canonical form. `lambda[0] = 1` is the weight of
/// the Hamiltonian part; `lambda[1..]` are the GKS eigenvalues in descending
/// order. Zero-weight components are `None`.
#[derive(Clone, Debug)]
pub struct GeneratorDecomposition {
    pub lambda: [f64; 4],
    pub hamiltonian: CMat,
    pub canonical: [Option<CanonicalPart>; 3],
}

impl GeneratorDecomposition {
    /// The λ-weighted superoperator of dissipative component `slot`
    /// (0-based into `canonical`).
    pub fn dissipative_superop(&self, slot: usize) -> Option<Superoperator> {
        let part = self.canonical[slot].as_ref()?;
        let a_k = &(&part.frame * &canonical_gks(part.theta)) * &part.frame.transpose();
        Some(
            Superoperator::new(
                dissipator_superop(&a_k)
                    .mat()
                    .scale_re(self.lambda[slot + 1]),
            )
            .expect("finite"),
        )
    }

    /// Superoperator of the Hamiltonian component, `None` when `H = 0`.
    pub fn hamiltonian_superop(&self) -> Option<Superoperator> {
        let s = hamiltonian_superop(&self.hamiltonian);
        if s.mat().max_abs() <= ACTIVE_TOL {
            None
        } else {
            Some(s)
        }
    }
}

/// Reduces a rank-one PSD 3x3 projector `P = w w†` to canonical form:
/// `θ ∈ [0, π/4]` and `G ∈ SO(3)` with `G A(θ) Gᵀ = P`.
pub fn canonical_angle(p: &CMat) -> Result<(f64, CMat), GeneratorError> {
    if p.dim() != 3 {
        return Err(GeneratorError::BadShape);
    }
    let (eigs, v) = hermitian_eigen(p)?;
    if eigs[1].abs() > 1e-10 || (eigs[0] - 1.0).abs() > 1e-10 {
        return Err(GeneratorError::NotRankOne { second: eigs[1] });
    }
    let w = [v.at(0, 0), v.at(1, 0), v.at(2, 0)];
    Ok(canonical_angle_of_vector(w))
}

fn canonical_angle_of_vector(w: [C64; 3]) -> (f64, CMat) {
    let x0: Vec<f64> = w.iter().map(|z| z.re).collect();
    let y0: Vec<f64> = w.iter().map(|z| z.im).collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    // global phase making the real and imaginary parts orthogonal
    let alpha = 0.5 * f64::atan2(-2.0 * dot(&x0, &y0), dot(&x0, &x0) - dot(&y0, &y0));
    let (ca, sa) = (alpha.cos(), alpha.sin());
    let mut x = [0.0f64; 3];
    let mut y = [0.0f64; 3];
    for i in 0..3 {
        x[i] = ca * x0[i] - sa * y0[i];
        y[i] = sa * x0[i] + ca * y0[i];
    }
    let mut c = dot(&x, &x).sqrt();
    let mut s = dot(&y, &y).sqrt();
    if c < s {
        // multiply w by i: (x + iy) ↦ (−y) + ix, swapping the roles of x and y
        let old_x = x;
        x = y.map(|v| -v);
        y = old_x;
        std::mem::swap(&mut c, &mut s);
    }
    let g1: [f64; 3] = [x[0] / c, x[1] / c, x[2] / c];
    // A(θ) = v v† with v = (cos θ, −i sin θ, 0), so G v = w e^{iα} needs the
    // second column aligned with −y
    let g2: [f64; 3] = if s > 1e-8 {
        [-y[0] / s, -y[1] / s, -y[2] / s]
    } else {
        // degenerate imaginary part: complete the frame deterministically
        complete_orthonormal(&g1)
    };
    let g3 = [
        g1[1] * g2[2] - g1[2] * g2[1],
        g1[2] * g2[0] - g1[0] * g2[2],
        g1[0] * g2[1] - g1[1] * g2[0],
    ];
    let g = CMat::from_fn(3, |i, j| C64::new([g1, g2, g3][j][i], 0.0));
    (f64::atan2(s, c), g)
}

fn complete_orthonormal(g1: &[f64; 3]) -> [f64; 3] {
    // axis least aligned with g1, then Gram-Schmidt
    let mut best = 0;
    for i in 1..3 {
        if g1[i].abs() < g1[best].abs() {
            best = i;
        }
    }
    let mut v = [0.0; 3];
    v[best] = 1.0;
    let proj: f64 = v.iter().zip(g1).map(|(a, b)| a * b).sum();
    for i in 0..3 {
        v[i] -= proj * g1[i];
    }
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.map(|a| a / n)
}

/// SU(2) element implementing a rotation: `U σ_i U† = Σ_j G_ji σ_j`.
///
/// Both `±U` satisfy the identity; the sign is fixed by requiring the first
/// significant entry to have non-negative real part.
pub fn su2_of_so3(g: &CMat) -> Result<CMat, GeneratorError> {
    if g.dim() != 3 {
        return Err(GeneratorError::BadShape);
    }
    let imag = g.max_abs_diff(&g.conj()) / 2.0;
    let ortho = (&g.transpose() * g).max_abs_diff(&CMat::identity(3));
    let det = det3(g);
    let res = imag.max(ortho).max((det - 1.0).abs());
    if res > 1e-10 {
        return Err(GeneratorError::NotRotation { residual: res });
    }
    // quaternion extraction, pivoted on the largest of (1 + tr) and
    // (1 + 2 G_mm − tr) so every case stays uniformly accurate
    let gr = |i: usize, j: usize| g.at(i, j).re;
    let trace = gr(0, 0) + gr(1, 1) + gr(2, 2);
    // q = (cos(φ/2), sin(φ/2) n)
    let pivots = [trace, gr(0, 0), gr(1, 1), gr(2, 2)];
    let mut m = 0;
    for i in 1..4 {
        if pivots[i] > pivots[m] {
            m = i;
        }
    }
    let q: [f64; 4] = match m {
        0 => {
            let s = 2.0 * (trace + 1.0).max(0.0).sqrt();
            [
                s / 4.0,
                (gr(2, 1) - gr(1, 2)) / s,
                (gr(0, 2) - gr(2, 0)) / s,
                (gr(1, 0) - gr(0, 1)) / s,
            ]
        }
        1 => {
            let s = 2.0 * (1.0 + gr(0, 0) - gr(1, 1) - gr(2, 2)).max(0.0).sqrt();
            [
                (gr(2, 1) - gr(1, 2)) / s,
                s / 4.0,
                (gr(0, 1) + gr(1, 0)) / s,
                (gr(0, 2) + gr(2, 0)) / s,
            ]
        }
        2 => {
            let s = 2.0 * (1.0 - gr(0, 0) + gr(1, 1) - gr(2, 2)).max(0.0).sqrt();
            [
                (gr(0, 2) - gr(2, 0)) / s,
                (gr(0, 1) + gr(1, 0)) / s,
                s / 4.0,
                (gr(1, 2) + gr(2, 1)) / s,
            ]
        }
        _ => {
            let s = 2.0 * (1.0 - gr(0, 0) - gr(1, 1) + gr(2, 2)).max(0.0).sqrt();
            [
                (gr(1, 0) - gr(0, 1)) / s,
                (gr(0, 2) + gr(2, 0)) / s,
                (gr(1, 2) + gr(2, 1)) / s,
                s / 4.0,
            ]
        }
    };
    let qn = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let mut u = CMat::identity(2).scale_re(q[0] / qn);
    for i in 0..3 {
        u = &u - &pauli(i + 1).scale(C64::new(0.0, q[i + 1] / qn));
    }
    // sign gauge
    'outer: for i in 0..2 {
        for j in 0..2 {
            let z = u.at(i, j);
            if z.norm() > 1e-8 {
                if z.re < -1e-12 || (z.re.abs() <= 1e-12 && z.im < 0.0) {
                    u = u.scale_re(-1.0);
                }
                break 'outer;
            }
        }
    }
    Ok(u)
}

/// Adjoint-representation extraction: `G_ji = ½ tr(σ_j U σ_i U†)`.
pub fn so3_of_su2(u: &CMat) -> CMat {
    let udag = u.dagger();
    CMat::from_fn(3, |j, i| {
        let m = &(&(&pauli(j + 1) * u) * &pauli(i + 1)) * &udag;
        C64::new(0.5 * m.trace().re, 0.0)
    })
}

fn det3(g: &CMat) -> f64 {
    let a = |i: usize, j: usize| g.at(i, j).re;
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// Numeric eigenvalues of the canonical generator superoperator, used as a
/// cross-check against the closed-form damping eigenvalues.
pub fn canonical_superop_eigenvalues(theta: f64) -> Result<Vec<C64>, QmatError> {
    eigenvalues(dissipator_superop(&canonical_gks(theta)).mat())
}

#[cfg(test)]
mod tests;
