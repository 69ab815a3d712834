//! Shared fixtures for the criterion benchmarks.

use qmarkov_core::qmatrix::CMat;
use qmarkov_core::C64;

/// A fixed full-rank GKS matrix with distinct eigenvalues.
pub fn sample_gks() -> CMat {
    let rows = [
        [(0.9, 0.0), (0.1, 0.2), (0.0, -0.1)],
        [(0.1, -0.2), (0.6, 0.0), (0.05, 0.0)],
        [(0.0, 0.1), (0.05, 0.0), (0.3, 0.0)],
    ];
    CMat::from_fn(3, |i, j| C64::new(rows[i][j].0, rows[i][j].1))
}

/// A fixed transverse-field Hamiltonian.
pub fn sample_hamiltonian() -> CMat {
    CMat::from_fn(2, |i, j| {
        let vals = [[(0.4, 0.0), (0.25, 0.0)], [(0.25, 0.0), (-0.4, 0.0)]];
        C64::new(vals[i][j].0, vals[i][j].1)
    })
}
