//! Numerical estimation of the induced (1→1) superoperator norm.
//!
//! The supremum of `‖g(X)‖₁` over `‖X‖₁ = 1` is attained on the extreme
//! points of the trace-norm unit ball, the rank-one operators `X = u v†` with
//! `u, v` unit vectors. Each unit vector needs two real parameters once global
//! phases are dropped, so the search space is four-dimensional: a coarse
//! deterministic grid followed by a Nelder-Mead polish. The result is a lower
//! bound on the true norm that the refinement drives to the supremum for
//! two-level inputs; absolute accuracy is about 1e-6.

use super::{Superoperator, C64};

const GRID: usize = 24;
const NM_STEPS: usize = 50;

#[inline]
fn unit_vec(a: f64, phi: f64) -> [C64; 2] {
    [
        C64::new(a.cos(), 0.0),
        C64::new(phi.cos() * a.sin(), phi.sin() * a.sin()),
    ]
}

/// Trace norm of a 2x2 matrix from its Frobenius norm and determinant:
/// `(s₀ + s₁)² = ‖M‖_F² + 2|det M|`.
#[inline]
fn trace_norm2(m: &[C64; 4]) -> f64 {
    let fro2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    let det = m[0] * m[3] - m[1] * m[2];
    (fro2 + 2.0 * det.norm()).max(0.0).sqrt()
}

struct Objective {
    s: [[C64; 4]; 4],
}

impl Objective {
    fn new(g: &Superoperator) -> Self {
        let mut s = [[C64::new(0.0, 0.0); 4]; 4];
        for (i, row) in s.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = g.mat().at(i, j);
            }
        }
        Objective { s }
    }

    /// `‖g(u v†)‖₁` at parameters `(a_u, φ_u, a_v, φ_v)`.
    fn eval(&self, p: &[f64; 4]) -> f64 {
        let u = unit_vec(p[0], p[1]);
        let v = unit_vec(p[2], p[3]);
        // column-major vec of u v†: (u0 v̄0, u1 v̄0, u0 v̄1, u1 v̄1)
        let x = [
            u[0] * v[0].conj(),
            u[1] * v[0].conj(),
            u[0] * v[1].conj(),
            u[1] * v[1].conj(),
        ];
        let mut y = [C64::new(0.0, 0.0); 4];
        for (i, yi) in y.iter_mut().enumerate() {
            for (j, xj) in x.iter().enumerate() {
                *yi += self.s[i][j] * xj;
            }
        }
        trace_norm2(&y)
    }
}

/// Estimate of the (1→1) norm `sup_{‖X‖₁=1} ‖g(X)‖₁`.
pub fn one_to_one_norm(g: &Superoperator) -> f64 {
    let obj = Objective::new(g);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut best = 0.0f64;
    let mut best_p = [0.0f64; 4];
    for ia in 0..GRID {
        let au = half_pi * ia as f64 / (GRID - 1) as f64;
        for ip in 0..GRID {
            let pu = two_pi * ip as f64 / GRID as f64;
            for ja in 0..GRID {
                let av = half_pi * ja as f64 / (GRID - 1) as f64;
                for jp in 0..GRID {
                    let pv = two_pi * jp as f64 / GRID as f64;
                    let p = [au, pu, av, pv];
                    let f = obj.eval(&p);
                    if f > best {
                        best = f;
                        best_p = p;
                    }
                }
            }
        }
    }
    let steps = [
        half_pi / (GRID - 1) as f64 / 2.0,
        two_pi / GRID as f64 / 2.0,
        half_pi / (GRID - 1) as f64 / 2.0,
        two_pi / GRID as f64 / 2.0,
    ];
    nelder_mead_max(|p| obj.eval(p), best_p, steps, NM_STEPS).max(best)
}

/// Local refinement of `‖g(u v†)‖₁` from explicit start parameters
/// `(a_u, φ_u, a_v, φ_v)`; lets tests polish independently-found candidates.
#[cfg(test)]
pub(crate) fn refine_rank_one(g: &Superoperator, start: [f64; 4], iters: usize) -> f64 {
    let obj = Objective::new(g);
    let h = 0.02;
    nelder_mead_max(|p| obj.eval(p), start, [h; 4], iters).max(obj.eval(&start))
}

/// Diagnostic variant restricted to Hermitian inputs, whose trace-norm unit
/// ball has the rank-one projectors `±w w†` as extreme points.
pub fn one_to_one_norm_hermitian(g: &Superoperator) -> f64 {
    let obj = Objective::new(g);
    let half_pi = std::f64::consts::FRAC_PI_2;
    let two_pi = 2.0 * std::f64::consts::PI;
    let n = GRID * 4;
    let mut best = 0.0f64;
    let mut best_p = [0.0f64; 4];
    for ia in 0..n {
        let a = half_pi * ia as f64 / (n - 1) as f64;
        for ip in 0..n {
            let phi = two_pi * ip as f64 / n as f64;
            let p = [a, phi, a, phi];
            let f = obj.eval(&p);
            if f > best {
                best = f;
                best_p = p;
            }
        }
    }
    let h = half_pi / (n - 1) as f64 / 2.0;
    let refined = nelder_mead_max(
        |q: &[f64; 2]| obj.eval(&[q[0], q[1], q[0], q[1]]),
        [best_p[0], best_p[1]],
        [h, h],
        NM_STEPS,
    );
    refined.max(best)
}

/// Maximising Nelder-Mead with a fixed iteration budget; deterministic.
fn nelder_mead_max<const D: usize>(
    f: impl Fn(&[f64; D]) -> f64,
    start: [f64; D],
    steps: [f64; D],
    iters: usize,
) -> f64 {
    let neg = |p: &[f64; D]| -f(p);
    let mut simplex: Vec<([f64; D], f64)> = Vec::with_capacity(D + 1);
    simplex.push((start, neg(&start)));
    for i in 0..D {
        let mut p = start;
        p[i] += steps[i];
        simplex.push((p, neg(&p)));
    }
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    for _ in 0..iters {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let mut centroid = [0.0; D];
        for (p, _) in simplex.iter().take(D) {
            for (c, x) in centroid.iter_mut().zip(p.iter()) {
                *c += x / D as f64;
            }
        }
        let worst = simplex[D];
        let mut refl = [0.0; D];
        for i in 0..D {
            refl[i] = centroid[i] + alpha * (centroid[i] - worst.0[i]);
        }
        let f_refl = neg(&refl);
        if f_refl < simplex[0].1 {
            let mut exp = [0.0; D];
            for i in 0..D {
                exp[i] = centroid[i] + gamma * (refl[i] - centroid[i]);
            }
            let f_exp = neg(&exp);
            simplex[D] = if f_exp < f_refl {
                (exp, f_exp)
            } else {
                (refl, f_refl)
            };
        } else if f_refl < simplex[D - 1].1 {
            simplex[D] = (refl, f_refl);
        } else {
            let mut con = [0.0; D];
            for i in 0..D {
                con[i] = centroid[i] + rho * (worst.0[i] - centroid[i]);
            }
            let f_con = neg(&con);
            if f_con < worst.1 {
                simplex[D] = (con, f_con);
            } else {
                let best = simplex[0].0;
                for entry in simplex.iter_mut().skip(1) {
                    for i in 0..D {
                        entry.0[i] = best[i] + sigma * (entry.0[i] - best[i]);
                    }
                    entry.1 = neg(&entry.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    -simplex[0].1
}
