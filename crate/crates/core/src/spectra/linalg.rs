//! Thin wrappers over the dense solvers.

use crate::error::{Error, Result};
use faer::{Mat, Par, Side};
use num_complex::Complex64;
use std::sync::Once;

fn init() {
    static ONCE: Once = Once::new();
    ONCE.call_once(|| faer::set_global_parallelism(Par::Seq));
}

fn evd_err(e: impl std::fmt::Debug) -> Error {
    Error::NoConvergence { what: format!("dense eigensolver: {e:?}"), iterations: 0 }
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(m: &Mat<f64>) -> Result<Vec<Complex64>> {
    init();
    m.eigenvalues().map_err(evd_err)
}

/// Eigenvalues and right eigenvectors (columns) of a real square matrix.
pub fn eigen(m: &Mat<f64>) -> Result<(Vec<Complex64>, Mat<Complex64>)> {
    init();
    let e = m.eigen().map_err(evd_err)?;
    let vals = (0..m.nrows()).map(|i| e.S()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Eigenvector for the computed eigenvalue `lam` by two steps of shifted inverse
/// iteration started from `start` plus a fixed generic vector.
pub fn inverse_iteration(m: &Mat<Complex64>, lam: Complex64, scale: f64, start: faer::ColRef<'_, Complex64>) -> Mat<Complex64> {
    use faer::linalg::solvers::Solve;
    init();
    let n = m.nrows();
    let shift = lam + Complex64::new(1.0, 0.7) * (scale * 1e-13);
    let a = Mat::from_fn(n, n, |i, j| if i == j { m[(i, j)] - shift } else { m[(i, j)] });
    let lu = a.partial_piv_lu();
    let mut x = Mat::from_fn(n, 1, |i, _| {
        let s = start[i];
        let g = Complex64::new(1.0 + (i as f64 * 0.618).fract(), (i as f64 * 0.414).fract());
        if s.is_finite() { s + g * 1e-3 } else { g }
    });
    for _ in 0..2 {
        x = lu.solve(&x);
        let nx = x.norm_l2();
        if !(nx.is_finite() && nx > 0.0) {
            break;
        }
        x = x * faer::Scale(Complex64::new(1.0 / nx, 0.0));
    }
    x
}

/// Eigen-decomposition of a complex square matrix.
pub fn eigen_complex(m: &Mat<Complex64>) -> Result<(Vec<Complex64>, Mat<Complex64>)> {
    init();
    let e = m.eigen().map_err(evd_err)?;
    let vals = (0..m.nrows()).map(|i| e.S()[i]).collect();
    Ok((vals, e.U().to_owned()))
}

/// Eigenvalues of a real symmetric matrix, nondecreasing.
pub fn eigenvalues_symmetric(m: &Mat<f64>) -> Result<Vec<f64>> {
    init();
    m.self_adjoint_eigenvalues(Side::Lower).map_err(evd_err)
}

pub fn inverse_complex(m: &Mat<Complex64>) -> Mat<Complex64> {
    use faer::linalg::solvers::DenseSolveCore;
    init();
    m.partial_piv_lu().inverse()
}

/// Singular values, nonincreasing.
pub fn singular_values(m: &Mat<f64>) -> Result<Vec<f64>> {
    init();
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    m.singular_values().map_err(|e| Error::Linalg(format!("svd: {e:?}")))
}

pub fn frobenius(m: &Mat<f64>) -> f64 {
    m.norm_l2()
}

/// Orthonormal basis (columns) of the null space, singular-value cutoff `rtol·‖m‖_F`.
pub fn null_space(m: &Mat<f64>, rtol: f64) -> Result<Mat<f64>> {
    init();
    let n = m.ncols();
    if m.nrows() == 0 {
        return Ok(Mat::identity(n, n));
    }
    let tol = rtol * frobenius(m).max(f64::MIN_POSITIVE);
    let svd = if m.nrows() >= n { m.thin_svd() } else { m.svd() }.map_err(|e| Error::Linalg(format!("svd: {e:?}")))?;
    let s = svd.S();
    let k = s.dim();
    let rank = (0..k).filter(|&i| s[i] > tol).count();
    let v = svd.V();
    Ok(v.subcols(rank, n - rank).to_owned())
}

/// Numerical rank with cutoff `rtol·‖m‖_F`.
pub fn rank(m: &Mat<f64>, rtol: f64) -> Result<usize> {
    let tol = rtol * frobenius(m);
    Ok(singular_values(m)?.into_iter().filter(|&s| s > tol).count())
}
