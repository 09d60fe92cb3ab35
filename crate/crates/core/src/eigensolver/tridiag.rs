//! Linear solves with `s I - M` for the cell operator `M`.

use super::CellOperator;
use crate::geometry::BoundaryKind;

/// Solves `(shift I - M) x = rhs`.
pub(super) fn solve_shifted(op: &CellOperator, shift: f64, rhs: &[f64]) -> Vec<f64> {
    let diag: Vec<f64> = op.diagonal().iter().map(|d| shift - d).collect();
    let off = -op.coupling();
    match op.bc() {
        BoundaryKind::IntervalNeumann => thomas(&diag, off, rhs),
        BoundaryKind::CirclePeriodic => cyclic(&diag, off, rhs),
    }
}

/// Symmetric tridiagonal solve with constant off-diagonal `off`.
fn thomas(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut upper = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut pivot = nonzero(diag[0]);
    upper[0] = off / pivot;
    x[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = nonzero(diag[i] - off * upper[i - 1]);
        upper[i] = off / pivot;
        x[i] = (rhs[i] - off * x[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        x[i] -= upper[i] * x[i + 1];
    }
    x
}

/// Tridiagonal solve with corner entries `off` (periodic wrap), via Sherman-Morrison.
fn cyclic(diag: &[f64], off: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let gamma = -nonzero(diag[0]);
    let mut modified = diag.to_vec();
    modified[0] -= gamma;
    modified[n - 1] -= off * off / gamma;
    let mut x = thomas(&modified, off, rhs);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = off;
    let z = thomas(&modified, off, &u);
    let factor = (x[0] + off * x[n - 1] / gamma) / nonzero(1.0 + z[0] + off * z[n - 1] / gamma);
    for (xi, zi) in x.iter_mut().zip(&z) {
        *xi -= factor * zi;
    }
    x
}

fn nonzero(v: f64) -> f64 {
    if v == 0.0 {
        f64::MIN_POSITIVE
    } else {
        v
    }
}
