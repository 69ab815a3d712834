//! Seeded random generators for tests.

use crate::generator::GeneratorSpec;
use crate::qmatrix::{CMat, DensityMatrix, Superoperator, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_c64(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
}

pub fn random_cmat(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    CMat::from_fn(n, |_, _| random_c64(rng))
}

/// Haar-ish random unitary by Gram-Schmidt on a random complex matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    loop {
        let m = random_cmat(rng, n);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        let mut ok = true;
        for j in 0..n {
            let mut v: Vec<C64> = (0..n).map(|i| m.at(i, j)).collect();
            for c in &cols {
                let overlap: C64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for i in 0..n {
                    v[i] -= c[i] * overlap;
                }
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm < 1e-6 {
                ok = false;
                break;
            }
            for z in v.iter_mut() {
                *z /= nrm;
            }
            cols.push(v);
        }
        if ok {
            return CMat::from_fn(n, |i, j| cols[j][i]);
        }
    }
}

/// Random CPT superoperator from the Kraus blocks of a random two-qubit
/// dilation unitary.
pub fn random_cpt(rng: &mut ChaCha8Rng) -> Superoperator {
    let u = random_unitary(rng, 4);
    let kraus: Vec<CMat> = (0..2)
        .map(|j| CMat::from_fn(2, |sp, s| u.at(2 * j + sp, s)))
        .collect();
    Superoperator::from_kraus(&kraus).unwrap()
}

pub fn random_density(rng: &mut ChaCha8Rng) -> DensityMatrix {
    let u = random_unitary(rng, 2);
    let p: f64 = rng.gen();
    let m = CMat::from_fn(2, |i, j| {
        u.at(i, 0) * u.at(j, 0).conj() * p + u.at(i, 1) * u.at(j, 1).conj() * (1.0 - p)
    });
    DensityMatrix::new(m).unwrap()
}

/// Random Hermitian PSD 3x3 matrix with spectrum roughly in `[0, scale]`.
pub fn random_psd3(rng: &mut ChaCha8Rng, scale: f64) -> CMat {
    let b = random_cmat(rng, 3);
    (&b.dagger() * &b).scale_re(scale / 3.0)
}

/// Random Hermitian 2x2 matrix with entries of order `scale`.
pub fn random_herm2(rng: &mut ChaCha8Rng, scale: f64) -> CMat {
    let b = random_cmat(rng, 2);
    (&b + &b.dagger()).scale_re(scale / 2.0)
}

pub fn random_generator_spec(rng: &mut ChaCha8Rng, rate: f64, field: f64) -> GeneratorSpec {
    GeneratorSpec::new(random_psd3(rng, rate), random_herm2(rng, field)).unwrap()
}

/// Well-conditioned generator with all three GKS eigenvalues in
/// `[lo, hi]` and a Hamiltonian of comparable strength.
pub fn full_rank_generator(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> GeneratorSpec {
    let u = random_unitary(rng, 3);
    let eigs: Vec<f64> = (0..3).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
    let a = CMat::from_fn(3, |i, j| {
        (0..3)
            .map(|k| u.at(i, k) * eigs[k] * u.at(j, k).conj())
            .sum()
    });
    let a = (&a + &a.dagger()).scale_re(0.5);
    GeneratorSpec::new(a, random_herm2(rng, (lo + hi) / 2.0)).unwrap()
}
