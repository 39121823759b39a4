//! Dense linear-algebra helpers: Moore-Penrose pseudoinverse and rank.
//!
//! Both are built on a one-sided Jacobi (Hestenes) orthogonalization: plane
//! rotations are applied from the right until the columns of `W = M V` are
//! mutually orthogonal, giving the singular value decomposition
//! `M = U Σ Vᵀ` with `σ_j = ‖w_j‖` and `u_j = w_j / σ_j`. The pseudoinverse
//! then inverts every singular value that survives a relative cutoff and
//! zeroes the rest, which makes the routine safe on rank-deficient and even
//! all-zero matrices — both occur in practice (collinear lag regressors,
//! constant training bands).
//!
//! Jacobi needs more flops than a bidiagonalization SVD, but the matrices
//! here are small (tens of rows and columns) and the method keeps
//! machine-precision accuracy on exactly rank-deficient inputs, where
//! nalgebra's general SVD can return factors that do not reproduce the
//! matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Default relative cutoff: singular values at or below
/// `DEFAULT_PINV_TOL * sigma_max` are treated as zero.
pub const DEFAULT_PINV_TOL: f64 = 1e-12;

/// Jacobi sweeps converge quadratically once the columns are nearly
/// orthogonal; random inputs with up to ~50 columns finish in well under
/// ten sweeps. The cap only guards against cycling.
const MAX_SWEEPS: usize = 64;

/// Applies the plane rotation with cosine `c` and sine `s` to columns
/// `i` and `j`.
fn rotate_columns(m: &mut DMatrix<f64>, i: usize, j: usize, c: f64, s: f64) {
    for r in 0..m.nrows() {
        let a = m[(r, i)];
        let b = m[(r, j)];
        m[(r, i)] = c * a - s * b;
        m[(r, j)] = s * a + c * b;
    }
}

/// One-sided Jacobi orthogonalization. Returns `(w, v)` where `v` is
/// orthogonal, `w = input · v`, and the columns of `w` are pairwise
/// orthogonal at working precision. Column norms of `w` are the singular
/// values of the input; normalized columns are the left singular vectors.
fn orthogonalize_columns(mut w: DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = w.ncols();
    let mut v = DMatrix::<f64>::identity(n, n);

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 1)..n {
                let alpha = w.column(i).dot(&w.column(i));
                let beta = w.column(j).dot(&w.column(j));
                let gamma = w.column(i).dot(&w.column(j));
                // Skip pairs that are already orthogonal at working
                // precision. The scale is computed from the square roots so
                // a denormal-range column (whose squared norm underflows to
                // zero) is treated as a zero column instead of slipping past
                // a collapsed threshold and cycling forever.
                let scale = alpha.sqrt() * beta.sqrt();
                if scale < f64::MIN_POSITIVE || gamma.abs() <= f64::EPSILON * scale {
                    continue;
                }
                rotated = true;
                // Rotation angle that zeroes the (i, j) inner product, via
                // the stable tangent formula; `hypot` keeps `t` nonzero even
                // when `zeta^2` would overflow, so every rotation makes
                // progress.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, i, j, c, s);
                rotate_columns(&mut v, i, j, c, s);
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NoConvergence {
        what: "jacobi orthogonalization",
        limit: MAX_SWEEPS,
    })
}

fn check_inputs(m: &DMatrix<f64>, tol: f64, context: &'static str) -> Result<()> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::invalid(
            context,
            format!("{tol} is not a finite non-negative real"),
        ));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("matrix passed to pinv"));
    }
    Ok(())
}

/// Moore-Penrose pseudoinverse of `m` via one-sided Jacobi SVD.
///
/// Singular values at or below `tol * sigma_max` are dropped, so the result
/// is the pseudoinverse of the nearest rank-truncated matrix. For an
/// all-zero `p x q` input the result is the `q x p` zero matrix.
///
/// # Errors
///
/// * `InvalidParameter` if `tol` is negative or not finite.
/// * `NonFinite` if `m` contains NaN or infinity.
/// * `DimensionMismatch` if `m` has zero rows or columns.
pub fn pinv(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    check_inputs(m, tol, "pinv tolerance")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::DimensionMismatch {
            expected: "a matrix with at least one row and column".into(),
            actual: format!("{}x{}", m.nrows(), m.ncols()),
        });
    }

    // Work on the tall orientation so sweeps touch the smaller column count;
    // the pseudoinverse commutes with transposition.
    let wide = m.nrows() < m.ncols();
    let tall = if wide { m.transpose() } else { m.clone() };
    let (rows, cols) = tall.shape();

    let (w, v) = orthogonalize_columns(tall)?;
    let norms: Vec<f64> = (0..cols).map(|j| w.column(j).norm()).collect();
    let sigma_max = norms.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = tol * sigma_max;

    // M⁺ = V Σ⁺ Uᵀ accumulated one rank-one term at a time. With
    // u_j = w_j / σ_j the term for a surviving σ_j is v_j w_jᵀ / σ_j².
    let mut result = DMatrix::<f64>::zeros(cols, rows);
    for (j, &sigma) in norms.iter().enumerate() {
        if sigma > cutoff {
            result.ger(1.0 / (sigma * sigma), &v.column(j), &w.column(j), 1.0);
        }
    }

    Ok(if wide { result.transpose() } else { result })
}

/// Numerical rank of `m`: the number of singular values above
/// `tol * sigma_max`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> Result<usize> {
    check_inputs(m, tol, "rank tolerance")?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let tall = if m.nrows() < m.ncols() {
        m.transpose()
    } else {
        m.clone()
    };
    let (w, _) = orthogonalize_columns(tall)?;
    let norms: Vec<f64> = (0..w.ncols()).map(|j| w.column(j).norm()).collect();
    let sigma_max = norms.iter().cloned().fold(0.0_f64, f64::max);
    let cutoff = tol * sigma_max;
    Ok(norms.iter().filter(|&&s| s > cutoff).count())
}
