//! Dense symmetric eigenvalues by cyclic Jacobi rotations.
//!
//! Used as an independent oracle for the iterative principal-eigenpair solver.

use super::CellOperator;
use crate::error::{Error, Result};

/// Largest operator accepted by [`dense_oracle_eigenvalues`].
pub const DENSE_ORACLE_MAX_N: usize = 512;

const MAX_SWEEPS: usize = 100;

/// Full spectrum of `op`, sorted ascending.
pub fn dense_oracle_eigenvalues(op: &CellOperator) -> Result<Vec<f64>> {
    if op.n() > DENSE_ORACLE_MAX_N {
        return Err(Error::invalid("n", format!("dense oracle is capped at {DENSE_ORACLE_MAX_N}, got {}", op.n())));
    }
    Ok(jacobi_eigenvalues(op.to_dense(), op.n()))
}

/// Eigenvalues of the symmetric row-major `n x n` matrix `a`, sorted ascending.
///
/// Sweeps until the off-diagonal Frobenius norm drops below `1e-13` times the
/// Frobenius norm of the matrix.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix must be n x n");
    let total: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-13 * total;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    eig
}
