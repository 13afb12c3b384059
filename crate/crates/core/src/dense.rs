//! Small helpers around faer dense matrices.

use crate::error::{Error, Result};
use faer::linalg::solvers::Solve;
use faer::{c64, Mat};

pub type CMat = Mat<c64>;

/// Pivot ratios above this are reported as ill-conditioned.
pub const COND_WARN: f64 = 1e12;

pub struct Solved {
    pub x: CMat,
    /// max|U_ii| / min|U_ii| of the LU factor, a cheap conditioning indicator.
    pub pivot_ratio: f64,
}

/// Dense LU solve with partial pivoting.
pub fn lu_solve(a: &CMat, b: &CMat, what: &str) -> Result<Solved> {
    let lu = a.partial_piv_lu();
    let u = lu.U();
    let n = u.nrows().min(u.ncols());
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let d = u[(i, i)].norm();
        lo = lo.min(d);
        hi = hi.max(d);
    }
    let ratio = hi / lo;
    if !(lo > 0.0) || !ratio.is_finite() {
        return Err(Error::SingularSystem { what: what.into(), cond: f64::INFINITY });
    }
    let x = lu.solve(b);
    if x.col_iter().any(|c| c.iter().any(|v| !v.re.is_finite() || !v.im.is_finite())) {
        return Err(Error::SingularSystem { what: what.into(), cond: ratio });
    }
    Ok(Solved { x, pivot_ratio: ratio })
}

pub fn select(a: &CMat, rows: &[usize], cols: &[usize]) -> CMat {
    Mat::from_fn(rows.len(), cols.len(), |i, j| a[(rows[i], cols[j])])
}

pub fn column(v: &[c64]) -> CMat {
    Mat::from_fn(v.len(), 1, |i, _| v[i])
}

pub fn to_vec(a: &CMat) -> Vec<c64> {
    (0..a.nrows()).map(|i| a[(i, 0)]).collect()
}

/// Induced ∞-norm (max absolute row sum).
pub fn norm_inf(a: &CMat) -> f64 {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn max_abs(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest eigenvalue modulus.
pub fn spectral_radius(a: &CMat) -> Result<f64> {
    let ev = a
        .eigenvalues()
        .map_err(|e| Error::SingularSystem { what: format!("eigenvalues: {e:?}"), cond: f64::NAN })?;
    Ok(ev.iter().map(|z| z.norm()).fold(0.0, f64::max))
}
