//! Matrix exponential.
//!
//! Operators flagged Hermitian go through a Hermitian eigendecomposition,
//! `exp(sM) = V diag(exp(s λ)) V†`. Everything else uses scaling and
//! squaring around a degree-13 Padé approximant (Higham 2005).

use nalgebra::{ComplexField, SymmetricEigen};

use super::operator::{tol, CMatrix};
use super::LinOperator;
use crate::error::{Error, Result};
use crate::scalar::{cr, Cplx, Real};

const PADE13: [f64; 14] = [
    64_764_752_532_480_000.0,
    32_382_376_266_240_000.0,
    7_771_770_303_897_600.0,
    1_187_353_796_428_800.0,
    129_060_195_264_000.0,
    10_559_470_521_600.0,
    670_442_572_800.0,
    33_522_128_640.0,
    1_323_241_920.0,
    40_840_800.0,
    960_960.0,
    16_380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371_920_351_148_152;

/// `exp(scale · op)`.
pub fn mat_exp<T: Real>(op: &LinOperator<T>, scale: Cplx<T>) -> Result<LinOperator<T>> {
    if op.matrix().iter().any(|z| !(z.re.is_finite() && z.im.is_finite()))
        || !(scale.re.is_finite() && scale.im.is_finite())
    {
        return Err(Error::NonFinite);
    }
    let herm_out = op.hermitian_hint() && scale.im == T::zero();
    if scale == Cplx::new(T::zero(), T::zero()) || op.max_abs() == T::zero() {
        return Ok(LinOperator::identity(op.layout()));
    }
    let m = if op.hermitian_hint() {
        exp_hermitian(op.matrix(), scale)?
    } else {
        exp_pade(&op.matrix().map(|z| z * scale))?
    };
    Ok(LinOperator::from_parts(op.layout(), m, herm_out))
}

fn exp_hermitian<T: Real>(m: &CMatrix<T>, scale: Cplx<T>) -> Result<CMatrix<T>> {
    let d = m.nrows();
    if d == 0 {
        return Ok(m.clone());
    }
    // fold in the adjoint so tiny rounding asymmetries do not leak in
    let sym = (m + m.adjoint()).map(|z| z * T::lit(0.5));
    let eig = SymmetricEigen::try_new(sym, <T as Real>::epsilon(), 100_000).ok_or(Error::EigenFailure)?;
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, lam) in eig.eigenvalues.iter().enumerate() {
        let f = (scale * cr(*lam)).exp();
        for i in 0..d {
            scaled[(i, j)] *= f;
        }
    }
    Ok(scaled * v.adjoint())
}

fn one_norm<T: Real>(a: &CMatrix<T>) -> T {
    (0..a.ncols())
        .map(|j| a.column(j).iter().fold(T::zero(), |s, z| s + z.modulus()))
        .fold(T::zero(), |m, x| if x > m { x } else { m })
}

fn exp_pade<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    let d = a.nrows();
    let norm = one_norm(a);
    let mut s: i32 = 0;
    if norm > T::lit(THETA13) {
        let ratio = (norm / T::lit(THETA13)).to_f64_lossy();
        s = ratio.log2().ceil().max(0.0) as i32;
    }
    let a = a.map(|z| z * T::lit(0.5f64.powi(s)));
    let b: Vec<Cplx<T>> = PADE13.iter().map(|&x| cr(T::lit(x))).collect();
    let eye = CMatrix::<T>::identity(d, d);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let u_inner = &a6 * (a6.map(|z| z * b[13]) + a4.map(|z| z * b[11]) + a2.map(|z| z * b[9]))
        + a6.map(|z| z * b[7])
        + a4.map(|z| z * b[5])
        + a2.map(|z| z * b[3])
        + eye.map(|z| z * b[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.map(|z| z * b[12]) + a4.map(|z| z * b[10]) + a2.map(|z| z * b[8]))
        + a6.map(|z| z * b[6])
        + a4.map(|z| z * b[4])
        + a2.map(|z| z * b[2])
        + eye.map(|z| z * b[0]);
    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&v + &u))
        .ok_or_else(|| Error::NotConverged("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    if r.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::NonFinite);
    }
    Ok(r)
}

/// True when `op` is unitary to within `1e-9`.
pub fn is_unitary<T: Real>(op: &LinOperator<T>) -> bool {
    op.unitarity_error() <= tol::<T>(1e-9)
}
