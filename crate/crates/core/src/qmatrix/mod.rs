//! Dense complex linear algebra at the fixed small sizes (2, 3, 4) used
//! throughout the crate, plus the superoperator representation toolkit
//! (vectorisation, Choi, Kraus, Bloch-affine) that the generator, channel and
//! circuit layers build on.
//!
//! Conventions, fixed once here and relied on everywhere:
//!
//! * Vectorisation is **column-major**: `vec(X)[i + n*j] = X[i][j]`, so that
//!   `vec(A X B) = (Bᵀ ⊗ A) vec(X)` with the usual Kronecker product.
//! * Choi matrices are built as `τ = (T ⊗ 1)|Ω⟩⟨Ω|` with
//!   `|Ω⟩ = (|00⟩ + |11⟩)/√2` and **system-first** tensor ordering (the
//!   channel output is the first tensor factor).

mod convert;
mod eigen;
mod expm;
mod norm;

pub use convert::{
    affine_of_superop, choi_of_superop, kraus_of_choi, superop_of_affine, superop_of_choi,
    swap_conjugate, CptDiagnostics,
};
pub use eigen::{eigenvalues, hermitian_eigen, pinv_sqrt_psd, sqrtm_psd, svd2};
pub use expm::{expm, expm_mat};
pub use norm::{one_to_one_norm, one_to_one_norm_hermitian};

use num_complex::Complex64;
use std::fmt;
use std::ops::{Add, Mul, Sub};
use thiserror::Error;

pub type C64 = Complex64;

/// Hermiticity tolerance for density matrices and Hamiltonians.
pub const HERM_TOL: f64 = 1e-12;
/// Choi positivity tolerance: eigenvalues above `-PSD_TOL` count as PSD.
/// Loose enough to absorb round-off accumulated through matrix exponentials.
pub const PSD_TOL: f64 = 1e-10;
/// Trace-preservation tolerance on the partial trace of the Choi matrix.
pub const TP_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum QmatError {
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("dimension mismatch: {0}x{0} vs {1}x{1}")]
    DimMismatch(usize, usize),
    #[error("expected a {expected}x{expected} matrix, got {got}x{got}")]
    BadDim { expected: usize, got: usize },
    #[error("matrix is numerically singular")]
    Singular,
    #[error("not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("not a density matrix: {reason}")]
    NotDensity { reason: String },
    #[error("Choi matrix has numerical rank {rank}, exceeding the requested support {max}")]
    RankTooHigh { rank: usize, max: usize },
    #[error("negative evolution time {0}")]
    NegativeTime(f64),
    #[error("empty Kraus operator list")]
    EmptyKraus,
    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,
}

/// Dense square complex matrix, row-major storage.
///
/// The crate only ever uses dimensions 2 (operators), 3 (GKS matrices and
/// rotation frames) and 4 (superoperators, Choi matrices, two-qubit
/// unitaries); the domain wrappers ([`DensityMatrix`], [`Superoperator`],
/// generator types) validate dimensions at their own boundaries.
#[derive(Clone, PartialEq)]
pub struct CMat {
    n: usize,
    a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Builds a matrix from real entries.
    pub fn from_real(rows: &[&[f64]]) -> Self {
        let n = rows.len();
        CMat::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let n = rows.len();
        CMat::from_fn(n, |i, j| rows[i][j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i * self.n + j] = v;
    }

    pub fn is_finite(&self) -> bool {
        self.a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn conj(&self) -> Self {
        CMat {
            n: self.n,
            a: self.a.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        CMat::from_fn(self.n, |i, j| self.at(j, i))
    }

    pub fn dagger(&self) -> Self {
        CMat::from_fn(self.n, |i, j| self.at(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.at(i, i)).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        CMat {
            n: self.n,
            a: self.a.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    /// Kronecker product; `self` is the first (leftmost) factor.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (n1, n2) = (self.n, other.n);
        CMat::from_fn(n1 * n2, |i, j| {
            self.at(i / n2, j / n2) * other.at(i % n2, j % n2)
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!(self.n, other.n);
        self.a
            .iter()
            .zip(other.a.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn one_norm(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.at(i, j).norm()).sum())
            .fold(0.0, f64::max)
    }

    pub fn fro_norm(&self) -> f64 {
        self.a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-abs deviation from Hermiticity.
    pub fn herm_residual(&self) -> f64 {
        let mut r = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                r = r.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        r / 2.0
    }

    /// Max-abs deviation of `self† self` from the identity.
    pub fn unitary_residual(&self) -> f64 {
        (&self.dagger() * self).max_abs_diff(&CMat::identity(self.n))
    }

    /// Matrix power by binary exponentiation.
    pub fn pow(&self, mut e: u64) -> CMat {
        let mut base = self.clone();
        let mut acc = CMat::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Solves `self · X = rhs` by LU decomposition with partial pivoting.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat, QmatError> {
        if self.n != rhs.n {
            return Err(QmatError::DimMismatch(self.n, rhs.n));
        }
        let n = self.n;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for k in 0..n {
            let (mut piv, mut pmax) = (k, lu.at(k, k).norm());
            for i in k + 1..n {
                let v = lu.at(i, k).norm();
                if v > pmax {
                    piv = i;
                    pmax = v;
                }
            }
            if pmax < 1e-300 {
                return Err(QmatError::Singular);
            }
            if piv != k {
                for j in 0..n {
                    let (a, b) = (lu.at(k, j), lu.at(piv, j));
                    lu.set(k, j, b);
                    lu.set(piv, j, a);
                    let (a, b) = (x.at(k, j), x.at(piv, j));
                    x.set(k, j, b);
                    x.set(piv, j, a);
                }
            }
            let d = lu.at(k, k);
            for i in k + 1..n {
                let f = lu.at(i, k) / d;
                lu.set(i, k, f);
                for j in k + 1..n {
                    let v = lu.at(i, j) - f * lu.at(k, j);
                    lu.set(i, j, v);
                }
                for j in 0..n {
                    let v = x.at(i, j) - f * x.at(k, j);
                    x.set(i, j, v);
                }
            }
        }
        // back substitution
        for jc in 0..n {
            for i in (0..n).rev() {
                let mut s = x.at(i, jc);
                for j in i + 1..n {
                    s -= lu.at(i, j) * x.at(j, jc);
                }
                x.set(i, jc, s / lu.at(i, i));
            }
        }
        Ok(x)
    }
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.n, self.n)?;
        for i in 0..self.n {
            write!(f, "  ")?;
            for j in 0..self.n {
                let z = self.at(i, j);
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self.a.iter().zip(&other.a).map(|(x, y)| x - y).collect(),
        }
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = out.at(i, j) + aik * other.at(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

/// The Pauli matrices `σ_x, σ_y, σ_z` for `i` in `1..=3`; `i = 0` is the
/// identity.
pub fn pauli(i: usize) -> CMat {
    let z = C64::new(0.0, 0.0);
    let one = C64::new(1.0, 0.0);
    let im = C64::new(0.0, 1.0);
    match i {
        0 => CMat::identity(2),
        1 => CMat::from_rows(&[vec![z, one], vec![one, z]]),
        2 => CMat::from_rows(&[vec![z, -im], vec![im, z]]),
        3 => CMat::from_rows(&[vec![one, z], vec![z, -one]]),
        _ => panic!("pauli index out of range"),
    }
}

/// Column-major vectorisation of an `n x n` matrix.
pub fn vec_col(m: &CMat) -> Vec<C64> {
    let n = m.dim();
    let mut v = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            v.push(m.at(i, j));
        }
    }
    v
}

/// Inverse of [`vec_col`].
pub fn unvec_col(v: &[C64]) -> CMat {
    let n = (v.len() as f64).sqrt() as usize;
    assert_eq!(n * n, v.len());
    CMat::from_fn(n, |i, j| v[i + n * j])
}

/// A single-qubit density matrix: Hermitian, unit-trace, positive-semidefinite
/// 2x2 complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(CMat);

impl DensityMatrix {
    pub fn new(m: CMat) -> Result<Self, QmatError> {
        if m.dim() != 2 {
            return Err(QmatError::BadDim {
                expected: 2,
                got: m.dim(),
            });
        }
        if !m.is_finite() {
            return Err(QmatError::NonFinite);
        }
        let hr = m.herm_residual();
        if hr > HERM_TOL {
            return Err(QmatError::NotDensity {
                reason: format!("Hermiticity residual {hr:.3e} exceeds {HERM_TOL:.0e}"),
            });
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > HERM_TOL || tr.im.abs() > HERM_TOL {
            return Err(QmatError::NotDensity {
                reason: format!("trace {:.17} + {:.3e}i is not 1", tr.re, tr.im),
            });
        }
        let (eigs, _) = hermitian_eigen(&m)?;
        if let Some(min) = eigs.last() {
            if *min < -1e-12 {
                return Err(QmatError::NotDensity {
                    reason: format!("negative eigenvalue {min:.6e}"),
                });
            }
        }
        Ok(DensityMatrix(m))
    }

    pub fn mat(&self) -> &CMat {
        &self.0
    }

    /// `(I + r·σ)/2` for a Bloch vector `r` with `|r| <= 1`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self, QmatError> {
        let mut m = CMat::identity(2);
        for (i, ri) in r.iter().enumerate() {
            m = &m + &pauli(i + 1).scale_re(*ri);
        }
        DensityMatrix::new(m.scale_re(0.5))
    }

    pub fn bloch(&self) -> [f64; 3] {
        let mut r = [0.0; 3];
        for (i, ri) in r.iter_mut().enumerate() {
            *ri = (&pauli(i + 1) * &self.0).trace().re;
        }
        r
    }

    /// Pure state `|ψ⟩⟨ψ|` from an unnormalised two-component ket.
    pub fn from_ket(ket: [C64; 2]) -> Result<Self, QmatError> {
        let nrm = (ket[0].norm_sqr() + ket[1].norm_sqr()).sqrt();
        if nrm < 1e-300 {
            return Err(QmatError::NotDensity {
                reason: "zero ket".into(),
            });
        }
        let k = [ket[0] / nrm, ket[1] / nrm];
        Ok(DensityMatrix(CMat::from_fn(2, |i, j| k[i] * k[j].conj())))
    }

    /// Maximally mixed state `I/2`.
    pub fn maximally_mixed() -> Self {
        DensityMatrix(CMat::identity(2).scale_re(0.5))
    }
}

/// Trace distance `½‖a − b‖₁` via the eigenvalues of the difference.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = a.mat() - b.mat();
    let (eigs, _) = hermitian_eigen(&d).expect("difference of density matrices is Hermitian");
    eigs.iter().map(|l| l.abs()).sum::<f64>() / 2.0
}

/// A superoperator on single-qubit operators: a 4x4 complex matrix acting on
/// column-major vectorised 2x2 matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator(CMat);

impl Superoperator {
    pub fn new(m: CMat) -> Result<Self, QmatError> {
        if m.dim() != 4 {
            return Err(QmatError::BadDim {
                expected: 4,
                got: m.dim(),
            });
        }
        if !m.is_finite() {
            return Err(QmatError::NonFinite);
        }
        Ok(Superoperator(m))
    }

    pub fn identity() -> Self {
        Superoperator(CMat::identity(4))
    }

    pub fn zero() -> Self {
        Superoperator(CMat::zeros(4))
    }

    pub fn mat(&self) -> &CMat {
        &self.0
    }

    /// Superoperator of the channel `ρ ↦ Σ K_j ρ K_j†`.
    pub fn from_kraus(kraus: &[CMat]) -> Result<Self, QmatError> {
        if kraus.is_empty() {
            return Err(QmatError::EmptyKraus);
        }
        let mut s = CMat::zeros(4);
        for k in kraus {
            if k.dim() != 2 {
                return Err(QmatError::BadDim {
                    expected: 2,
                    got: k.dim(),
                });
            }
            s = &s + &k.conj().kron(k);
        }
        Superoperator::new(s)
    }

    /// Superoperator of the unitary conjugation `ρ ↦ U ρ U†`.
    pub fn conjugation(u: &CMat) -> Result<Self, QmatError> {
        Superoperator::new(u.conj().kron(u))
    }

    /// Applies the superoperator to a 2x2 matrix.
    pub fn apply(&self, x: &CMat) -> CMat {
        let v = vec_col(x);
        let mut out = [C64::new(0.0, 0.0); 4];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += self.0.at(i, j) * vj;
            }
        }
        unvec_col(&out)
    }

    /// Applies the superoperator to a density matrix, renormalising the trace
    /// against round-off.
    pub fn apply_density(&self, rho: &DensityMatrix) -> Result<DensityMatrix, QmatError> {
        let out = self.apply(rho.mat());
        // symmetrise away round-off before validating
        let herm = (&out + &out.dagger()).scale_re(0.5);
        let tr = herm.trace().re;
        DensityMatrix::new(herm.scale_re(1.0 / tr))
    }

    pub fn max_abs_diff(&self, other: &Superoperator) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    pub fn pow(&self, e: u64) -> Superoperator {
        Superoperator(self.0.pow(e))
    }

    /// CPT diagnostics: Choi positivity and trace preservation residuals.
    pub fn is_cpt(&self) -> CptDiagnostics {
        convert::cpt_diagnostics(self)
    }
}

impl Mul for &Superoperator {
    type Output = Superoperator;
    fn mul(self, other: &Superoperator) -> Superoperator {
        Superoperator(&self.0 * &other.0)
    }
}

impl Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, other: &Superoperator) -> Superoperator {
        Superoperator(&self.0 + &other.0)
    }
}

impl Sub for &Superoperator {
    type Output = Superoperator;
    fn sub(self, other: &Superoperator) -> Superoperator {
        Superoperator(&self.0 - &other.0)
    }
}

/// Bloch-affine representation of a qubit map: `r' = mtilde · r + m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochAffine {
    pub mtilde: [[f64; 3]; 3],
    pub m: [f64; 3],
}

impl BlochAffine {
    pub fn identity() -> Self {
        let mut mt = [[0.0; 3]; 3];
        for (i, row) in mt.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        BlochAffine {
            mtilde: mt,
            m: [0.0; 3],
        }
    }

    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        let mut out = self.m;
        for i in 0..3 {
            for j in 0..3 {
                out[i] += self.mtilde[i][j] * r[j];
            }
        }
        out
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &BlochAffine) -> BlochAffine {
        let mut mt = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    mt[i][j] += self.mtilde[i][k] * other.mtilde[k][j];
                }
            }
        }
        BlochAffine {
            mtilde: mt,
            m: self.apply(other.m),
        }
    }

    pub fn max_abs_diff(&self, other: &BlochAffine) -> f64 {
        let mut d = 0.0f64;
        for i in 0..3 {
            d = d.max((self.m[i] - other.m[i]).abs());
            for j in 0..3 {
                d = d.max((self.mtilde[i][j] - other.mtilde[i][j]).abs());
            }
        }
        d
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().all(|x| x.is_finite()) && self.mtilde.iter().flatten().all(|x| x.is_finite())
    }
}
