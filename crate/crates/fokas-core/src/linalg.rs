//! 2x2 complex matrix helpers shared by every module.

use nalgebra::{Matrix2 as NaMatrix2, Vector2};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Matrix2 = NaMatrix2<C64>;
pub type Vec2 = Vector2<C64>;

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity() -> Matrix2 {
    Matrix2::identity()
}

pub fn sigma3() -> Matrix2 {
    Matrix2::new(c(1.0, 0.0), C64::default(), C64::default(), c(-1.0, 0.0))
}

pub fn sigma1() -> Matrix2 {
    Matrix2::new(C64::default(), c(1.0, 0.0), c(1.0, 0.0), C64::default())
}

pub fn det(m: &Matrix2) -> C64 {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// Inverse through the adjugate; the caller guarantees a nonzero determinant.
pub fn inverse(m: &Matrix2) -> Matrix2 {
    let d = det(m);
    Matrix2::new(m[(1, 1)] / d, -m[(0, 1)] / d, -m[(1, 0)] / d, m[(0, 0)] / d)
}

pub fn max_abs(m: &Matrix2) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// exp(t A) for trace-free A, using exp(tA) = cosh(tq) I + sinh(tq)/q A with q^2 = -det A.
pub fn expm_tracefree(a: &Matrix2, t: f64) -> Matrix2 {
    let q = (-det(a)).sqrt();
    let tq = q * t;
    let ch = tq.cosh();
    // sinh(tq)/q with the removable singularity at q = 0
    let sh = if tq.norm() < 1e-6 {
        let z2 = tq * tq;
        (C64::from(1.0) + z2 / 6.0 + z2 * z2 / 120.0) * t
    } else {
        tq.sinh() / q
    };
    Matrix2::identity() * ch + a * sh
}
