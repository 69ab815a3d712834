//! Matrix exponential by scaling-and-squaring with a [13/13] Padé kernel.

use super::{CMat, QmatError, Superoperator, C64};

// Padé [13/13] numerator/denominator coefficients.
const B: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// 1-norm threshold below which the [13/13] approximant is accurate to unit
// round-off; above it the argument is halved until it fits.
const THETA_13: f64 = 4.25;

/// Exponential of an arbitrary square complex matrix.
pub fn expm_mat(a: &CMat) -> Result<CMat, QmatError> {
    if !a.is_finite() {
        return Err(QmatError::NonFinite);
    }
    let n = a.dim();
    let norm = a.one_norm();
    let s = if norm > THETA_13 {
        ((norm / THETA_13).log2().ceil() as u32).max(1)
    } else {
        0
    };
    let x = a.scale_re(1.0 / f64::powi(2.0, s as i32));

    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let id = CMat::identity(n);

    let w1 = &(&x6.scale_re(B[13]) + &x4.scale_re(B[11])) + &x2.scale_re(B[9]);
    let w2 =
        &(&(&x6.scale_re(B[7]) + &x4.scale_re(B[5])) + &x2.scale_re(B[3])) + &id.scale_re(B[1]);
    let u = &x * &(&(&x6 * &w1) + &w2);
    let z1 = &(&x6.scale_re(B[12]) + &x4.scale_re(B[10])) + &x2.scale_re(B[8]);
    let v = &(&(&(&x6 * &z1) + &x6.scale_re(B[6])) + &x4.scale_re(B[4]))
        + &(&x2.scale_re(B[2]) + &id.scale_re(B[0]));

    let num = &v + &u;
    let den = &v - &u;
    let mut f = den.solve(&num)?;
    for _ in 0..s {
        f = &f * &f;
    }
    Ok(f)
}

/// The exact-evolution oracle `e^{t·g}` for a semigroup generator `g`.
///
/// `t` must be non-negative: these are forward-time channels. Exponentials of
/// arbitrary (signed) arguments go through [`expm_mat`] directly.
pub fn expm(g: &Superoperator, t: f64) -> Result<Superoperator, QmatError> {
    if !t.is_finite() {
        return Err(QmatError::NonFinite);
    }
    if t < 0.0 {
        return Err(QmatError::NegativeTime(t));
    }
    let m = expm_mat(&g.mat().scale(C64::new(t, 0.0)))?;
    Superoperator::new(m)
}
