//! One-dimensional cross-sections and their cell-centered grids.
//!
//! A cross-section is either a bounded interval with no-flux walls (a
//! cylinder of bounded section) or one period of an unbounded periodic
//! section. Unknowns live at cell centers `y_i = (i + 1/2) h`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Smallest admissible number of grid cells.
pub const MIN_CELLS: usize = 4;

/// Boundary-condition kind of the cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundaryKind {
    /// Bounded interval with homogeneous Neumann walls.
    IntervalNeumann,
    /// One period of a periodic section.
    CirclePeriodic,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryKind::IntervalNeumann => "neumann",
            BoundaryKind::CirclePeriodic => "periodic",
        })
    }
}

impl FromStr for BoundaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "neumann" => Ok(BoundaryKind::IntervalNeumann),
            "periodic" => Ok(BoundaryKind::CirclePeriodic),
            other => Err(Error::invalid("bc", format!("expected `neumann` or `periodic`, got `{other}`"))),
        }
    }
}

/// The periodicity cell of the cross-section together with its grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossSection {
    kind: BoundaryKind,
    length: f64,
    n: usize,
}

impl CrossSection {
    pub fn kind(&self) -> BoundaryKind {
        self.kind
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid cells.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing `length / n`.
    pub fn h(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Coordinate of the `i`-th cell center.
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.node(i)).collect()
    }

    /// Samples `f` at every cell center.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        (0..self.n).map(|i| f(self.node(i))).collect()
    }

    /// Same geometry at a different resolution.
    pub fn with_cells(&self, n: usize) -> Result<CrossSection> {
        make_grid(self.kind, self.length, n)
    }

    pub(crate) fn check_len(&self, field: &'static str, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::invalid(field, format!("expected {} grid samples, got {len}", self.n)));
        }
        Ok(())
    }
}

/// Builds a cell-centered grid of `n` equal cells on `[0, length]`.
pub fn make_grid(kind: BoundaryKind, length: f64, n: usize) -> Result<CrossSection> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::invalid("length", format!("must be a positive finite number, got {length}")));
    }
    if n < MIN_CELLS {
        return Err(Error::invalid("n", format!("need at least {MIN_CELLS} cells, got {n}")));
    }
    Ok(CrossSection { kind, length, n })
}

/// Midpoint quadrature `h * sum(samples)` over the cell.
pub fn cell_integrate(cs: &CrossSection, samples: &[f64]) -> Result<f64> {
    cs.check_len("samples", samples.len())?;
    Ok(cs.h() * samples.iter().sum::<f64>())
}

/// Cell average `(1/L) * integral`.
pub fn cell_average(cs: &CrossSection, samples: &[f64]) -> Result<f64> {
    Ok(cell_integrate(cs, samples)? / cs.length())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn unit_grid_nodes_are_cell_centers() {
        let cs = make_grid(BoundaryKind::CirclePeriodic, 1.0, 4).unwrap();
        assert_eq!(cs.nodes(), vec![0.125, 0.375, 0.625, 0.875]);
    }

    #[test]
    fn spacing() {
        let cs = make_grid(BoundaryKind::IntervalNeumann, 2.0, 8).unwrap();
        assert_eq!(cs.h(), 0.25);
    }

    #[test]
    fn rejects_bad_inputs() {
        match make_grid(BoundaryKind::CirclePeriodic, 1.0, 3) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "n"),
            other => panic!("unexpected {other:?}"),
        }
        for bad in [0.0, -1.0, f64::NAN] {
            match make_grid(BoundaryKind::CirclePeriodic, bad, 8) {
                Err(Error::Validation { field, .. }) => assert_eq!(field, "length"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn integrates_constant_cosine_and_linear() {
        let cs = make_grid(BoundaryKind::CirclePeriodic, 1.0, 10).unwrap();
        assert!((cell_integrate(&cs, &[1.0; 10]).unwrap() - 1.0).abs() < 1e-15);

        let cs = make_grid(BoundaryKind::CirclePeriodic, 1.0, 64).unwrap();
        let cosine = cs.sample(|y| (2.0 * PI * y).cos());
        assert!(cell_integrate(&cs, &cosine).unwrap().abs() < 1e-12);
        let linear = cs.sample(|y| y);
        assert!((cell_integrate(&cs, &linear).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let cs = make_grid(BoundaryKind::CirclePeriodic, 1.0, 8).unwrap();
        assert!(matches!(cell_integrate(&cs, &[1.0; 7]), Err(Error::Validation { .. })));
    }

    #[test]
    fn every_resolved_mode_integrates_to_zero() {
        let cs = make_grid(BoundaryKind::CirclePeriodic, 2.5, 48).unwrap();
        for k in 1..cs.n() / 2 {
            let mode = cs.sample(|y| (2.0 * PI * k as f64 * y / cs.length()).cos());
            assert!(cell_integrate(&cs, &mode).unwrap().abs() < 1e-13, "mode {k}");
        }
    }

    #[test]
    fn midpoint_rule_is_second_order() {
        let f = |y: f64| (2.0 * PI * y).sin().exp();
        let values: Vec<f64> = [16, 32, 64]
            .iter()
            .map(|&n| {
                let cs = make_grid(BoundaryKind::IntervalNeumann, 0.7, n).unwrap();
                cell_integrate(&cs, &cs.sample(f)).unwrap()
            })
            .collect();
        let order = ((values[0] - values[1]) / (values[1] - values[2])).abs().log2();
        assert!(order >= 1.9, "observed order {order}");
    }

    #[test]
    fn parses_boundary_kind() {
        assert_eq!("neumann".parse::<BoundaryKind>().unwrap(), BoundaryKind::IntervalNeumann);
        assert_eq!("periodic".parse::<BoundaryKind>().unwrap(), BoundaryKind::CirclePeriodic);
        assert!("wall".parse::<BoundaryKind>().is_err());
    }
}
