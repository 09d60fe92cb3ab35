//! Minimal KPP front speeds for reaction-advection-diffusion equations
//! `u_t = alpha u_xx + beta u_yy + q1(y) u_x + f(u)` on an infinite strip or
//! cylinder, and search procedures exhibiting the non-monotone dependence of
//! that speed on the diffusion coefficients once a shear flow is present.
//!
//! The speed is computed from the variational formula
//! `c* = min_{lambda > 0} k(lambda) / lambda`, where `k(lambda)` is the
//! principal eigenvalue of the x-independent cell operator
//! `beta phi'' + (alpha lambda^2 + lambda q1 + f'(0)) phi`. An explicit
//! time-domain simulator ([`frontsim`]) provides an independent check.

pub mod asymptotics;
pub mod eigensolver;
mod error;
pub mod frontsim;
pub mod geometry;
pub mod model;
pub mod speed;
pub mod verify;

pub use error::{Error, Result};
pub use geometry::{cell_integrate, make_grid, BoundaryKind, CrossSection};
pub use model::{DiffusionSpec, FlowProfile, KppReaction, ProblemSpec, Reaction, ShearFlow};
pub use speed::{minimal_speed, speed_for_ab, SpeedResult};
