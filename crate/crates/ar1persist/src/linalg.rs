//! Dense linear-algebra primitives shared by the operator pipelines:
//! power iteration for the Perron pair of a nonnegative matrix, and a
//! right-vector-only variant for spectral radii of sub-blocks.
//!
//! Iterations start from the all-ones vector, stay nonnegative for
//! nonnegative input, and report the achieved residual so callers can
//! distinguish "converged" from "gave up". Matrix products go through
//! one BLAS-free code path (`nalgebra`), so results are deterministic
//! across worker counts.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LinalgError {
    #[error(
        "power iteration did not converge: residual {residual:.3e} > {tol:.1e} \
         after {iterations} iterations"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        tol: f64,
    },
    #[error("matrix must be square and nonempty, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },
}

/// Dominant eigenvalue with right and left eigenvectors, both
/// normalized to unit maximum entry.
#[derive(Debug, Clone)]
pub struct PowerPair {
    pub rho: f64,
    pub right: DVector<f64>,
    pub left: DVector<f64>,
    pub iterations: usize,
    /// `max(‖Qv - rho v‖_inf, ‖Q^T w - rho w‖_inf)` at exit, with both
    /// vectors at unit maximum entry.
    pub residual: f64,
}

fn check_square(m: &DMatrix<f64>) -> Result<usize, LinalgError> {
    let (rows, cols) = m.shape();
    if rows != cols || rows == 0 {
        return Err(LinalgError::BadShape { rows, cols });
    }
    Ok(rows)
}

fn normalize_sup(v: &mut DVector<f64>) -> f64 {
    let sup = v.amax();
    if sup > 0.0 {
        *v /= sup;
    }
    sup
}

/// Simultaneous power iteration on `Q` and `Q^T` from all-ones starts,
/// two matrix products per sweep. The eigenvalue estimate is the
/// two-sided Rayleigh quotient `(w . Q v) / (w . v)`, which converges
/// at twice the gap rate of the vectors themselves.
///
/// The stopping rule is `residual <= tol * max(1, |rho|)`: absolute
/// for sub-unit radii, relative for large ones, whose matvec rounding
/// floor scales with the radius and would make an absolute target
/// unreachable.
pub fn power_pair(
    m: &DMatrix<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<PowerPair, LinalgError> {
    let n = check_square(m)?;
    let mut v = DVector::from_element(n, 1.0);
    let mut w = DVector::from_element(n, 1.0);
    let mut rho = 0.0;
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let image_v = m * &v;
        let image_w = m.tr_mul(&w);
        let denom = w.dot(&v);
        if denom > 0.0 {
            rho = w.dot(&image_v) / denom;
            // v and w carry unit sup norm from the previous sweep, so
            // these are the properly scaled residuals.
            residual = (&image_v - &v * rho)
                .amax()
                .max((&image_w - &w * rho).amax());
            if residual <= tol * rho.abs().max(1.0) && it > 1 {
                return Ok(PowerPair {
                    rho,
                    right: v,
                    left: w,
                    iterations: it,
                    residual,
                });
            }
        }
        v = image_v;
        w = image_w;
        normalize_sup(&mut v);
        normalize_sup(&mut w);
    }
    Err(LinalgError::NotConverged {
        iterations: max_iter,
        residual: if residual.is_finite() { residual } else { rho },
        tol,
    })
}

/// Spectral radius by right power iteration with Rayleigh quotient
/// `(v . Q v)/(v . v)`; one matrix product per sweep. Stops at
/// `residual <= tol * max(1, |rho|)`, as in [`power_pair`].
pub fn power_radius(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<f64, LinalgError> {
    let n = check_square(m)?;
    // An all-zero block has radius zero; the iteration below would
    // collapse, so answer directly.
    if m.amax() == 0.0 {
        return Ok(0.0);
    }
    let mut v = DVector::from_element(n, 1.0);
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let image = m * &v;
        let rho = v.dot(&image) / v.dot(&v);
        residual = (&image - &v * rho).amax();
        let done = residual <= tol * rho.abs().max(1.0) && it > 1;
        v = image;
        let sup = normalize_sup(&mut v);
        if sup == 0.0 {
            // Nilpotent action on the iterate: radius 0.
            return Ok(0.0);
        }
        if done {
            return Ok(rho);
        }
    }
    Err(LinalgError::NotConverged {
        iterations: max_iter,
        residual,
        tol,
    })
}
