//! Eigen-decompositions implemented directly for the fixed small sizes:
//! cyclic complex Jacobi sweeps for Hermitian matrices and a shifted
//! Hessenberg-QR iteration for general complex eigenvalues.

use super::{CMat, QmatError, C64};

const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi sweeps.
///
/// Returns eigenvalues in **descending** order together with the unitary whose
/// columns are the matching eigenvectors. Rotation pairs whose coupling is
/// negligible relative to the local diagonal are skipped, so structural zeros
/// (and the eigenvector structure they imply) survive degeneracies.
pub fn hermitian_eigen(m: &CMat) -> Result<(Vec<f64>, CMat), QmatError> {
    let n = m.dim();
    if !m.is_finite() {
        return Err(QmatError::NonFinite);
    }
    let hr = m.herm_residual();
    if hr > 1e-9 {
        return Err(QmatError::NotHermitian { residual: hr });
    }
    // work on the exactly-Hermitian part
    let mut a = (m + &m.dagger()).scale_re(0.5);
    let mut v = CMat::identity(n);
    let scale = a.fro_norm().max(1e-300);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off += a.at(i, j).norm_sqr();
            }
        }
        if off.sqrt() <= JACOBI_TOL * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.at(p, q);
                let r = apq.norm();
                let app = a.at(p, p).re;
                let aqq = a.at(q, q).re;
                // skip negligible couplings; large rotations driven by noise
                // would otherwise scramble degenerate eigenspaces
                if r <= 1e-15 * (app.abs() + aqq.abs()).max(1e-300) {
                    continue;
                }
                let phase = apq / r; // e^{i φ}
                let tau = (aqq - app) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // J_pp = c, J_pq = s e^{iφ}, J_qp = -s e^{-iφ}, J_qq = c
                let jpq = phase * s;
                let jqp = -phase.conj() * s;
                // A <- A J (columns p, q)
                for i in 0..n {
                    let (aip, aiq) = (a.at(i, p), a.at(i, q));
                    a.set(i, p, aip * c + aiq * jqp);
                    a.set(i, q, aip * jpq + aiq * c);
                }
                // A <- J† A (rows p, q); (J†)_pq = conj(J_qp), (J†)_qp = conj(J_pq)
                for j in 0..n {
                    let (apj, aqj) = (a.at(p, j), a.at(q, j));
                    a.set(p, j, apj * c + aqj * jqp.conj());
                    a.set(q, j, apj * jpq.conj() + aqj * c);
                }
                // V <- V J
                for i in 0..n {
                    let (vip, viq) = (v.at(i, p), v.at(i, q));
                    v.set(i, p, vip * c + viq * jqp);
                    v.set(i, q, vip * jpq + viq * c);
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> = (0..n).map(|i| (a.at(i, i).re, i)).collect();
    // descending by eigenvalue, ties broken by original index for determinism
    pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap().then(x.1.cmp(&y.1)));
    let eigs: Vec<f64> = pairs.iter().map(|(l, _)| *l).collect();
    let vec = CMat::from_fn(n, |i, j| v.at(i, pairs[j].1));
    Ok((eigs, vec))
}

/// Hermitian PSD square root; eigenvalues are clamped at zero first.
pub fn sqrtm_psd(m: &CMat) -> Result<CMat, QmatError> {
    let (eigs, v) = hermitian_eigen(m)?;
    Ok(rebuild(
        &v,
        &eigs.iter().map(|l| l.max(0.0).sqrt()).collect::<Vec<_>>(),
    ))
}

/// Pseudo-inverse square root of a Hermitian PSD matrix: eigenvalues below
/// `tol` map to zero instead of blowing up, projecting onto the support.
pub fn pinv_sqrt_psd(m: &CMat, tol: f64) -> Result<CMat, QmatError> {
    let (eigs, v) = hermitian_eigen(m)?;
    let f: Vec<f64> = eigs
        .iter()
        .map(|l| if *l > tol { 1.0 / l.sqrt() } else { 0.0 })
        .collect();
    Ok(rebuild(&v, &f))
}

fn rebuild(v: &CMat, diag: &[f64]) -> CMat {
    let n = v.dim();
    CMat::from_fn(n, |i, j| {
        (0..n)
            .map(|k| v.at(i, k) * diag[k] * v.at(j, k).conj())
            .sum()
    })
}

/// Singular value decomposition of a 2x2 complex matrix: `m = U diag(s) V†`
/// with `s[0] >= s[1] >= 0`.
pub fn svd2(m: &CMat) -> Result<(CMat, [f64; 2], CMat), QmatError> {
    if m.dim() != 2 {
        return Err(QmatError::BadDim {
            expected: 2,
            got: m.dim(),
        });
    }
    let gram = &m.dagger() * m;
    let (eigs, v) = hermitian_eigen(&gram)?;
    let s = [eigs[0].max(0.0).sqrt(), eigs[1].max(0.0).sqrt()];
    let mut ucols: Vec<[C64; 2]> = Vec::with_capacity(2);
    for k in 0..2 {
        if s[k] > 1e-14 {
            let col = [
                (m.at(0, 0) * v.at(0, k) + m.at(0, 1) * v.at(1, k)) / s[k],
                (m.at(1, 0) * v.at(0, k) + m.at(1, 1) * v.at(1, k)) / s[k],
            ];
            ucols.push(col);
        } else if k == 1 {
            // orthogonal complement of the first column
            let u0 = ucols[0];
            ucols.push([-u0[1].conj(), u0[0].conj()]);
        } else {
            // zero matrix
            ucols.push([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        }
    }
    let u = CMat::from_fn(2, |i, j| ucols[j][i]);
    Ok((u, s, v))
}

/// Eigenvalues of a general small complex matrix via Hessenberg reduction and
/// shifted QR iteration. No ordering is guaranteed.
pub fn eigenvalues(m: &CMat) -> Result<Vec<C64>, QmatError> {
    if !m.is_finite() {
        return Err(QmatError::NonFinite);
    }
    let n = m.dim();
    if n == 1 {
        return Ok(vec![m.at(0, 0)]);
    }
    let mut h = hessenberg(m);
    let scale = h.fro_norm().max(1e-300);
    let mut eigs: Vec<C64> = Vec::with_capacity(n);
    let mut hi = n - 1;
    let mut iters = 0usize;
    loop {
        // zero out negligible subdiagonals
        for i in 0..hi {
            let t = 1e-15 * (h.at(i, i).norm() + h.at(i + 1, i + 1).norm()).max(1e-3 * scale);
            if h.at(i + 1, i).norm() <= t {
                h.set(i + 1, i, C64::new(0.0, 0.0));
            }
        }
        if hi == 0 {
            eigs.push(h.at(0, 0));
            break;
        }
        if h.at(hi, hi - 1).norm() == 0.0 {
            eigs.push(h.at(hi, hi));
            hi -= 1;
            continue;
        }
        if hi == 1 || h.at(hi - 1, hi - 2).norm() == 0.0 {
            let (e1, e2) = eig2(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            );
            eigs.push(e1);
            eigs.push(e2);
            if hi == 1 {
                break;
            }
            hi -= 2;
            continue;
        }
        iters += 1;
        if iters > 40 * n {
            return Err(QmatError::NoConvergence);
        }
        // active block lo..=hi
        let mut lo = hi;
        while lo > 0 && h.at(lo, lo - 1).norm() > 0.0 {
            lo -= 1;
        }
        let shift = if iters.is_multiple_of(12) {
            // exceptional shift to break rare cycles
            h.at(hi, hi - 1) + h.at(hi - 1, hi - 2).scale(0.75)
        } else {
            wilkinson(
                h.at(hi - 1, hi - 1),
                h.at(hi - 1, hi),
                h.at(hi, hi - 1),
                h.at(hi, hi),
            )
        };
        qr_step(&mut h, lo, hi, shift);
    }
    Ok(eigs)
}

fn eig2(a: C64, b: C64, c: C64, d: C64) -> (C64, C64) {
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det.scale(4.0)).sqrt();
    ((tr + disc).scale(0.5), (tr - disc).scale(0.5))
}

fn wilkinson(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let (e1, e2) = eig2(a, b, c, d);
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

fn hessenberg(m: &CMat) -> CMat {
    let n = m.dim();
    let mut a = m.clone();
    for k in 0..n.saturating_sub(2) {
        // Householder zeroing a[k+2.., k]
        let mut x: Vec<C64> = (k + 1..n).map(|i| a.at(i, k)).collect();
        let xn = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if xn < 1e-300 {
            continue;
        }
        let ph = if x[0].norm() > 1e-300 {
            x[0] / x[0].norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -ph * xn;
        x[0] -= alpha;
        let vn2 = x.iter().map(|z| z.norm_sqr()).sum::<f64>();
        if vn2 < 1e-300 {
            continue;
        }
        // A <- P A P with P = I - 2 v v†/|v|² acting on rows/cols k+1..
        // rows
        for j in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (t, xi) in x.iter().enumerate() {
                s += xi.conj() * a.at(k + 1 + t, j);
            }
            s = s.scale(2.0 / vn2);
            for (t, xi) in x.iter().enumerate() {
                let val = a.at(k + 1 + t, j) - xi * s;
                a.set(k + 1 + t, j, val);
            }
        }
        // cols
        for i in 0..n {
            let mut s = C64::new(0.0, 0.0);
            for (t, xi) in x.iter().enumerate() {
                s += a.at(i, k + 1 + t) * *xi;
            }
            s = s.scale(2.0 / vn2);
            for (t, xi) in x.iter().enumerate() {
                let val = a.at(i, k + 1 + t) - s * xi.conj();
                a.set(i, k + 1 + t, val);
            }
        }
    }
    a
}

/// One explicit shifted QR step on the Hessenberg block `lo..=hi` using Givens
/// rotations.
fn qr_step(h: &mut CMat, lo: usize, hi: usize, shift: C64) {
    let n = h.dim();
    for i in lo..=hi {
        let v = h.at(i, i) - shift;
        h.set(i, i, v);
    }
    // QR by Givens: rotations (i, i+1)
    let mut rots: Vec<(f64, C64)> = Vec::with_capacity(hi - lo);
    for i in lo..hi {
        let f = h.at(i, i);
        let g = h.at(i + 1, i);
        let (c, s) = givens(f, g);
        rots.push((c, s));
        for j in i..n {
            let (a, b) = (h.at(i, j), h.at(i + 1, j));
            h.set(i, j, a.scale(c) + s * b);
            h.set(i + 1, j, b.scale(c) - s.conj() * a);
        }
    }
    // RQ: apply rotations on the right (columns)
    for (idx, (c, s)) in rots.iter().enumerate() {
        let i = lo + idx;
        for r in 0..=(i + 1).min(hi) {
            let (a, b) = (h.at(r, i), h.at(r, i + 1));
            h.set(r, i, a.scale(*c) + b * s.conj());
            h.set(r, i + 1, b.scale(*c) - a * *s);
        }
    }
    for i in lo..=hi {
        let v = h.at(i, i) + shift;
        h.set(i, i, v);
    }
}

/// Complex Givens rotation zeroing `g`: `[c, s; -s̄, c]† [f; g] = [r; 0]`.
fn givens(f: C64, g: C64) -> (f64, C64) {
    let gn = g.norm();
    if gn < 1e-300 {
        return (1.0, C64::new(0.0, 0.0));
    }
    let fn_ = f.norm();
    let r = (fn_ * fn_ + gn * gn).sqrt();
    if fn_ < 1e-300 {
        // rotate g straight into the diagonal
        return (0.0, g.conj() / gn);
    }
    let c = fn_ / r;
    let s = (f / fn_) * g.conj() / r;
    (c, s)
}
