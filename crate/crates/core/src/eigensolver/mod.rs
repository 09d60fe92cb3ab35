//! Principal eigenpair of the reduced cell operator `phi -> beta phi'' + V phi`.
//!
//! The operator is discretized on the cell-centered grid of a
//! [`CrossSection`]; it is symmetric tridiagonal (plus two corner entries in
//! the periodic case) with nonnegative off-diagonal coupling, so its largest
//! eigenvalue carries a positive eigenvector.
//!
//! The iterative solver starts from the Gershgorin bound and runs shifted
//! inverse iteration whose shift is the Collatz-Wielandt upper bound
//! `max_i (M x)_i / x_i` of the current positive iterate. The shift decreases
//! monotonically to the principal eigenvalue and the iterates stay positive;
//! the reported eigenvalue is the Rayleigh quotient of the final iterate.

mod dense;
mod tridiag;

pub use dense::{dense_oracle_eigenvalues, jacobi_eigenvalues, DENSE_ORACLE_MAX_N};

use crate::error::{Error, Result};
use crate::geometry::{BoundaryKind, CrossSection};

/// Default iteration cap of [`principal_eigenpair`].
pub const MAX_ITERATIONS: usize = 50_000;

/// Discrete cell operator `beta * D2 + diag(V)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellOperator {
    bc: BoundaryKind,
    coupling: f64,
    diag: Vec<f64>,
    potential: Vec<f64>,
}

impl CellOperator {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    /// Off-diagonal entry `beta / h^2`.
    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    /// Entry `(i, j)` of the matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let n = self.n();
        if i == j {
            return self.diag[i];
        }
        let adjacent = i.abs_diff(j) == 1;
        let wraps = self.bc == BoundaryKind::CirclePeriodic && i.abs_diff(j) == n - 1;
        if adjacent || wraps {
            self.coupling
        } else {
            0.0
        }
    }

    /// Row-major dense copy of the matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.entry(i, j);
            }
        }
        out
    }

    /// `out = M x`, with the Laplacian applied in difference form so that
    /// constants are annihilated exactly.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n();
        let c = self.coupling;
        let v = &self.potential;
        for i in 1..n - 1 {
            out[i] = c * ((x[i - 1] - x[i]) + (x[i + 1] - x[i])) + v[i] * x[i];
        }
        let (left, right) = match self.bc {
            BoundaryKind::CirclePeriodic => (x[n - 1] - x[0], x[0] - x[n - 1]),
            BoundaryKind::IntervalNeumann => (0.0, 0.0),
        };
        out[0] = c * (left + (x[1] - x[0])) + v[0] * x[0];
        out[n - 1] = c * ((x[n - 2] - x[n - 1]) + right) + v[n - 1] * x[n - 1];
    }

    /// Gershgorin bound `max_i (|d_i| + sum_j |m_ij|)`.
    pub fn gershgorin_bound(&self) -> f64 {
        self.diag.iter().map(|d| d.abs() + 2.0 * self.coupling).fold(0.0, f64::max)
    }

    /// Discrete Rayleigh quotient `x.Mx / x.x`.
    pub fn rayleigh_quotient(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; self.n()];
        self.apply(x, &mut y);
        dot(x, &y) / dot(x, x)
    }
}

/// Assembles `beta * D2 + diag(potential)` on the grid of `cs`.
///
/// Interior rows carry the stencil `(beta/h^2) (1, -2, 1)`. Neumann walls drop
/// the outward coupling, leaving `-beta/h^2` on the boundary diagonal;
/// periodic sections wrap around.
pub fn assemble(cs: &CrossSection, beta: f64, potential: &[f64]) -> Result<CellOperator> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("beta", format!("must be positive, got {beta}")));
    }
    cs.check_len("potential", potential.len())?;
    if potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("potential", "contains non-finite values"));
    }
    let n = cs.n();
    let h = cs.h();
    let coupling = beta / (h * h);
    let mut diag: Vec<f64> = potential.iter().map(|v| v - 2.0 * coupling).collect();
    if cs.kind() == BoundaryKind::IntervalNeumann {
        diag[0] = potential[0] - coupling;
        diag[n - 1] = potential[n - 1] - coupling;
    }
    Ok(CellOperator { bc: cs.kind(), coupling, diag, potential: potential.to_vec() })
}

/// Principal eigenvalue and positive eigenfunction.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalue: f64,
    /// Normalized to `max = 1`.
    pub eigenfunction: Vec<f64>,
    /// `||(M - k I) psi||_inf`.
    pub residual: f64,
    pub iterations: usize,
}

/// How the inverse-iteration shift is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[allow(clippy::manual_non_exhaustive)]
pub enum ShiftStrategy {
    /// Collatz-Wielandt upper bound of the current iterate.
    #[default]
    CollatzWielandt,
    /// A fixed shift at the center of the Gershgorin interval. Converges to an
    /// interior eigenvalue; exists only to check that the verification
    /// harness notices a broken solver.
    #[doc(hidden)]
    BrokenMidSpectrum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOptions {
    pub max_iterations: usize,
    pub shift: ShiftStrategy,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { max_iterations: MAX_ITERATIONS, shift: ShiftStrategy::CollatzWielandt }
    }
}

/// Largest eigenvalue of `op` with its positive eigenvector, starting from the all-ones vector.
pub fn principal_eigenpair(op: &CellOperator) -> Result<EigenResult> {
    principal_eigenpair_with(op, None, &EigenOptions::default())
}

/// As [`principal_eigenpair`], optionally warm-started from `start`
/// (entries must be nonnegative and not all zero).
pub fn principal_eigenpair_with(op: &CellOperator, start: Option<&[f64]>, opts: &EigenOptions) -> Result<EigenResult> {
    let n = op.n();
    let mut x = match start {
        Some(s) if s.len() == n && s.iter().all(|v| v.is_finite() && *v >= 0.0) && s.iter().any(|v| *v > 0.0) => {
            s.to_vec()
        }
        Some(_) => return Err(Error::invalid("start", "warm start must be a nonnegative nonzero vector of matching length")),
        None => vec![1.0; n],
    };
    normalize_max(&mut x);

    let sigma = op.gershgorin_bound();
    let floor = 32.0 * f64::EPSILON * sigma;
    let mut y = vec![0.0; n];
    let mut best = f64::INFINITY;
    let mut stalled = 0;
    let mut residual = f64::INFINITY;

    for it in 0..=opts.max_iterations {
        op.apply(&x, &mut y);
        let rho = dot(&x, &y) / dot(&x, &x);
        residual = x.iter().zip(&y).map(|(xi, yi)| (yi - rho * xi).abs()).fold(0.0, f64::max);

        let target = (1e-12 * sigma).min(1e-11 * (1.0 + rho.abs())).max(floor);
        if residual <= best * 0.9 {
            best = residual;
            stalled = 0;
        } else {
            stalled += 1;
        }
        if residual <= target || (stalled >= 8 && residual <= 1e-12 * sigma) {
            return Ok(EigenResult { eigenvalue: rho, eigenfunction: x, residual, iterations: it });
        }
        if it == opts.max_iterations {
            break;
        }

        let shift = match opts.shift {
            ShiftStrategy::CollatzWielandt => {
                let upper = x
                    .iter()
                    .zip(&y)
                    .filter(|(xi, _)| **xi > 1e-280)
                    .map(|(xi, yi)| yi / xi)
                    .fold(f64::NEG_INFINITY, f64::max);
                // Rounding can put the bound at or below the Rayleigh quotient
                // once the iterate has converged.
                if upper > rho {
                    upper
                } else {
                    rho + residual
                }
            }
            ShiftStrategy::BrokenMidSpectrum => {
                let trace: f64 = op.diagonal().iter().sum();
                trace / n as f64
            }
        };
        x = tridiag::solve_shifted(op, shift, &x);
        if x.iter().sum::<f64>() < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
        if opts.shift == ShiftStrategy::CollatzWielandt {
            // Positive in exact arithmetic; clip rounding noise.
            x.iter_mut().for_each(|v| *v = v.max(0.0));
        }
        normalize_max(&mut x);
        if x.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    Err(Error::NonConvergence { iterations: opts.max_iterations, residual })
}

fn normalize_max(x: &mut [f64]) {
    let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if m > 0.0 && m.is_finite() {
        x.iter_mut().for_each(|v| *v /= m);
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
