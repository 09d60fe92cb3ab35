//! Time-domain oracle: explicit integration of
//! `u_t = alpha u_xx + beta u_yy + q1(y) u_x + f(u)` on a finite strip.
//!
//! The initial condition is a step with `u = 1` on the right part of the
//! strip, so the front invades the zero state moving in `-x`. The front
//! position is the level crossing of the `y`-averaged profile and the
//! speed is a least-squares fit over the tail of the run.

use crate::error::{Error, Result};
use crate::geometry::BoundaryKind;
use crate::model::{ProblemSpec, Reaction};
use crate::speed::minimal_speed;

/// Desk-scale cap on `nx * n`.
pub const MAX_SIM_CELLS: usize = 4_000_000;
/// Relative gap above which a refined run is made.
pub const REFINE_GAP: f64 = 0.03;
/// Values below this are flushed to zero to keep the far field out of subnormals.
const FLUSH: f64 = 1e-200;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub strip_length: f64,
    pub nx: usize,
    pub t_end: f64,
    pub cfl_safety: f64,
    /// Tracked contour value.
    pub level: f64,
    /// Trailing fraction of the run used for the speed fit.
    pub fit_window: f64,
    /// Fraction of the strip to the left of the initial step.
    pub step_at: f64,
    /// Number of position samples over the run.
    pub samples: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            strip_length: 240.0,
            nx: 2400,
            t_end: 100.0,
            cfl_safety: 0.9,
            level: 0.5,
            fit_window: 0.5,
            step_at: 0.85,
            samples: 500,
        }
    }
}

impl SimConfig {
    pub fn hx(&self) -> f64 {
        self.strip_length / self.nx as f64
    }

    /// Same run with the axial grid refined by `factor`.
    pub fn refined(&self, factor: usize) -> SimConfig {
        SimConfig { nx: self.nx * factor, ..*self }
    }

    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        let alpha = spec.diffusion.axial();
        let width = (alpha / spec.growth_rate()).sqrt();
        if !(self.strip_length.is_finite() && self.strip_length >= 20.0 * width) {
            return Err(Error::invalid(
                "strip",
                format!("strip length {} is shorter than 20 front widths ({})", self.strip_length, 20.0 * width),
            ));
        }
        if self.nx < 4 {
            return Err(Error::invalid("nx", "need at least 4 cells"));
        }
        if self.nx.saturating_mul(spec.cross_section.n()) > MAX_SIM_CELLS {
            return Err(Error::invalid(
                "nx",
                format!("nx * n = {} exceeds {MAX_SIM_CELLS}", self.nx * spec.cross_section.n()),
            ));
        }
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::invalid("tend", "must be positive"));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety < 1.0) {
            return Err(Error::invalid("cfl", "must lie in (0, 1)"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::invalid("level", "must lie in (0, 1)"));
        }
        if !(self.fit_window > 0.0 && self.fit_window <= 1.0) {
            return Err(Error::invalid("fit_window", "must lie in (0, 1]"));
        }
        if !(self.step_at > 0.0 && self.step_at < 1.0) {
            return Err(Error::invalid("step_at", "must lie in (0, 1)"));
        }
        if self.samples < 4 {
            return Err(Error::invalid("samples", "need at least 4 samples"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontSimResult {
    /// Invasion speed, reported positive.
    pub measured_speed: f64,
    /// Standard error of the fitted slope.
    pub fit_residual: f64,
    /// `(t, x_front)`; the front moves towards `x = 0`.
    pub positions: Vec<(f64, f64)>,
    /// `integral u dx dy` at each sample time.
    pub mass: Vec<f64>,
    pub dt_used: f64,
    pub steps: usize,
    /// Largest excursion of `u` outside `[0, 1]` over the run.
    pub bound_violation: f64,
}

/// Explicit Euler step bound: the diffusive limit, tightened so that the
/// update is a monotone map of `[0, 1]` into itself.
pub fn stable_dt(spec: &ProblemSpec, sim: &SimConfig) -> f64 {
    let alpha = spec.diffusion.axial();
    let beta = spec.diffusion.transverse();
    let hx = sim.hx();
    let hy = spec.cross_section.h();
    let qmax = spec.flow.samples().iter().fold(0.0f64, |m, q| m.max(q.abs()));
    let lip = spec.reaction.reaction().lipschitz_bound();
    let diffusive = hx.min(hy).powi(2) / (2.0 * (alpha + beta));
    let monotone = 1.0 / (2.0 * alpha / (hx * hx) + 2.0 * beta / (hy * hy) + qmax / hx + lip);
    sim.cfl_safety * diffusive.min(monotone)
}

pub fn simulate_front(spec: &ProblemSpec, sim: &SimConfig) -> Result<FrontSimResult> {
    sim.validate(spec)?;
    match spec.reaction.reaction() {
        Reaction::Logistic { mu } => {
            let mu = *mu;
            run(spec, sim, move |u| mu * u * (1.0 - u)).map(|r| r.0)
        }
        Reaction::Polynomial { coeffs } => {
            let coeffs = coeffs.clone();
            run(spec, sim, move |u| coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)).map(|r| r.0)
        }
    }
}

/// Returns the result and the final field (rows of `nx + 2` with ghosts).
fn run<F: Fn(f64) -> f64>(spec: &ProblemSpec, sim: &SimConfig, f: F) -> Result<(FrontSimResult, Vec<f64>)> {
    let cs = &spec.cross_section;
    let (nx, ny) = (sim.nx, cs.n());
    let hx = sim.hx();
    let hy = cs.h();
    let dt = stable_dt(spec, sim);
    let ax = spec.diffusion.axial() / (hx * hx);
    let by = spec.diffusion.transverse() / (hy * hy);
    let q = spec.flow.samples();
    let periodic = cs.kind() == BoundaryKind::CirclePeriodic;

    // Rows are y-cells; each row carries one ghost cell at either x end.
    let w = nx + 2;
    let mut u = vec![0.0; w * ny];
    let step_x = sim.step_at * sim.strip_length;
    for row in u.chunks_mut(w) {
        for j in 0..nx {
            if (j as f64 + 0.5) * hx >= step_x {
                row[j + 1] = 1.0;
            }
        }
    }
    let mut next = u.clone();

    let steps = (sim.t_end / dt).ceil() as usize;
    let every = (steps / sim.samples).max(1);
    let min_distance = 5.0 * (spec.diffusion.axial() / spec.growth_rate()).sqrt();
    let mut positions = Vec::with_capacity(steps / every + 2);
    let mut mass = Vec::with_capacity(steps / every + 2);
    let mut profile = vec![0.0; nx];
    let mut violation = 0.0f64;

    let mut record = |u: &[f64], t: f64, positions: &mut Vec<(f64, f64)>, mass: &mut Vec<f64>| -> Result<()> {
        profile.iter_mut().for_each(|p| *p = 0.0);
        for row in u.chunks(w) {
            for (p, v) in profile.iter_mut().zip(&row[1..=nx]) {
                *p += v;
            }
        }
        let total: f64 = profile.iter().sum();
        profile.iter_mut().for_each(|p| *p /= ny as f64);
        mass.push(total * hx * hy);
        match crossing(&profile, hx, sim.level) {
            Some(x) if x >= min_distance => {
                positions.push((t, x));
                Ok(())
            }
            _ => Err(Error::DomainOverrun { time: t }),
        }
    };
    record(&u, 0.0, &mut positions, &mut mass)?;

    for step in 1..=steps {
        for row in u.chunks_mut(w) {
            row[0] = row[1];
            row[nx + 1] = row[nx];
        }
        for i in 0..ny {
            let up = match (i, periodic) {
                (0, true) => ny - 1,
                (0, false) => 0,
                _ => i - 1,
            };
            let down = match (i + 1 == ny, periodic) {
                (true, true) => 0,
                (true, false) => i,
                _ => i + 1,
            };
            let qi = q[i] / hx;
            let (row, above, below) = (&u[i * w..(i + 1) * w], &u[up * w..(up + 1) * w], &u[down * w..(down + 1) * w]);
            let out = &mut next[i * w..(i + 1) * w];
            for j in 1..=nx {
                let c = row[j];
                let (l, r) = (row[j - 1], row[j + 1]);
                // Upwind: information travels with velocity -q1.
                let adv = if qi > 0.0 { qi * (r - c) } else { qi * (c - l) };
                let lap = ax * ((l - c) + (r - c)) + by * ((above[j] - c) + (below[j] - c));
                let v = c + dt * (lap + adv + f(c));
                out[j] = if v.abs() < FLUSH { 0.0 } else { v };
            }
        }
        std::mem::swap(&mut u, &mut next);
        if step % every == 0 || step == steps {
            for row in u.chunks(w) {
                for &v in &row[1..=nx] {
                    violation = violation.max(-v).max(v - 1.0);
                }
            }
            record(&u, step as f64 * dt, &mut positions, &mut mass)?;
        }
    }

    let t_from = (1.0 - sim.fit_window) * positions.last().map_or(0.0, |p| p.0);
    let window: Vec<(f64, f64)> = positions.iter().copied().filter(|p| p.0 >= t_from).collect();
    let (slope, stderr) = fit_line(&window);
    let result = FrontSimResult {
        measured_speed: -slope,
        fit_residual: stderr,
        positions,
        mass,
        dt_used: dt,
        steps,
        bound_violation: violation,
    };
    Ok((result, u))
}

/// Leftmost `x` where the cell profile reaches `level`, linearly interpolated.
fn crossing(profile: &[f64], hx: f64, level: f64) -> Option<f64> {
    let j = profile.iter().position(|&p| p >= level)?;
    if j == 0 {
        return None;
    }
    let (a, b) = (profile[j - 1], profile[j]);
    let s = (level - a) / (b - a);
    Some((j as f64 - 0.5 + s) * hx)
}

/// Least-squares slope and its standard error.
fn fit_line(points: &[(f64, f64)]) -> (f64, f64) {
    let n = points.len() as f64;
    let (mt, mx) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0 / n, b + p.1 / n));
    let (stt, stx) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mt).powi(2), b + (p.0 - mt) * (p.1 - mx)));
    if stt == 0.0 {
        return (0.0, f64::INFINITY);
    }
    let slope = stx / stt;
    let sse: f64 = points.iter().map(|p| (p.1 - mx - slope * (p.0 - mt)).powi(2)).sum();
    let stderr = if points.len() > 2 { (sse / (n - 2.0) / stt).sqrt() } else { f64::INFINITY };
    (slope, stderr)
}

/// Simulated speed against the variational `c*` on the same cross-section.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub variational_c: f64,
    pub run: FrontSimResult,
    /// Run with halved `hx`, made when the first gap exceeds [`REFINE_GAP`].
    pub refined: Option<FrontSimResult>,
}

impl CrossValidation {
    /// The finest available measurement.
    pub fn measured_speed(&self) -> f64 {
        self.refined.as_ref().unwrap_or(&self.run).measured_speed
    }

    /// `|measured - c*| / c*` in percent.
    pub fn gap_pct(&self) -> f64 {
        100.0 * (self.measured_speed() - self.variational_c).abs() / self.variational_c
    }

    pub fn bound_violation(&self) -> f64 {
        self.refined.iter().chain(std::iter::once(&self.run)).fold(0.0, |m, r| m.max(r.bound_violation))
    }
}

pub fn cross_validate(spec: &ProblemSpec, sim: &SimConfig) -> Result<CrossValidation> {
    let variational_c = minimal_speed(spec)?.c_star;
    let run = simulate_front(spec, sim)?;
    let gap = (run.measured_speed - variational_c).abs() / variational_c;
    let refined = if gap > REFINE_GAP { Some(simulate_front(spec, &sim.refined(2))?) } else { None };
    Ok(CrossValidation { variational_c, run, refined })
}

/// Trajectory CSV with header `t,x_front`.
pub fn trajectory_csv(result: &FrontSimResult) -> String {
    let mut out = String::from("t,x_front\n");
    for (t, x) in &result.positions {
        out.push_str(&format!("{t},{x}\n"));
    }
    out
}
