//! Minimal front speed `c* = min_{lambda > 0} k(lambda) / lambda`.
//!
//! `k(lambda)` is the principal eigenvalue of the reduced cell operator
//! `beta phi'' + (alpha lambda^2 + lambda q1 + f'(0)) phi`. It is convex in
//! `lambda`, so `k(lambda)/lambda` is quasi-convex and a bracketed
//! golden-section search in `log lambda` finds its minimum.

use crate::eigensolver::{assemble, principal_eigenpair_with, EigenOptions, EigenResult};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryKind, CrossSection};
use crate::model::{flow_max, DiffusionSpec, KppReaction, ProblemSpec, ShearFlow};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const SCAN_POINTS: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedResult {
    pub c_star: f64,
    pub lambda_star: f64,
    pub k_at_star: f64,
    /// Final bracket `(lambda_lo, lambda_hi)` around `lambda_star`.
    pub bracket: (f64, f64),
    /// Number of `k(lambda)` evaluations.
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedOptions {
    /// Relative tolerance on `lambda_star`.
    pub lambda_rel_tol: f64,
    /// Reuse the previous eigenfunction as the next starting vector.
    pub warm_start: bool,
    /// Bracket expansion budget (each step doubles or halves `lambda`).
    pub max_doublings: usize,
    pub eigen: EigenOptions,
}

impl Default for SpeedOptions {
    fn default() -> Self {
        SpeedOptions { lambda_rel_tol: 1e-8, warm_start: true, max_doublings: 40, eigen: EigenOptions::default() }
    }
}

/// `V_lambda(y_i) = alpha lambda^2 + lambda q1(y_i) + f'(0)`.
pub fn potential(spec: &ProblemSpec, lambda: f64) -> Vec<f64> {
    let base = spec.diffusion.axial() * lambda * lambda + spec.growth_rate();
    spec.flow.samples().iter().map(|q| base + lambda * q).collect()
}

/// Principal eigenpair of the cell operator at `lambda`.
pub fn k_of_lambda(spec: &ProblemSpec, lambda: f64) -> Result<EigenResult> {
    k_of_lambda_with(spec, lambda, None, &EigenOptions::default())
}

pub fn k_of_lambda_with(spec: &ProblemSpec, lambda: f64, start: Option<&[f64]>, opts: &EigenOptions) -> Result<EigenResult> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let op = assemble(&spec.cross_section, spec.diffusion.transverse(), &potential(spec, lambda))?;
    principal_eigenpair_with(&op, start, opts)
}

/// `lambda_0 = sqrt(f'(0) / alpha)`, the minimizer in the flow-free case.
pub fn lambda_0(spec: &ProblemSpec) -> f64 {
    (spec.growth_rate() / spec.diffusion.axial()).sqrt()
}

/// Evaluates `g(t) = k(e^t) / e^t`, counting calls and carrying the warm start.
struct Objective<'a> {
    spec: &'a ProblemSpec,
    opts: &'a SpeedOptions,
    last: Option<Vec<f64>>,
    evaluations: usize,
}

impl Objective<'_> {
    fn eval(&mut self, t: f64) -> Result<(f64, f64)> {
        let lambda = t.exp();
        let start = if self.opts.warm_start { self.last.as_deref() } else { None };
        let r = k_of_lambda_with(self.spec, lambda, start, &self.opts.eigen)?;
        self.evaluations += 1;
        let k = r.eigenvalue;
        if self.opts.warm_start {
            self.last = Some(r.eigenfunction);
        }
        Ok((k / lambda, k))
    }
}

/// Minimal speed with default options.
pub fn minimal_speed(spec: &ProblemSpec) -> Result<SpeedResult> {
    minimal_speed_with(spec, &SpeedOptions::default())
}

pub fn minimal_speed_with(spec: &ProblemSpec, opts: &SpeedOptions) -> Result<SpeedResult> {
    let mut obj = Objective { spec, opts, last: None, evaluations: 0 };
    let step = std::f64::consts::LN_2;
    let t0 = lambda_0(spec).ln();

    let (mut lo, mut hi) = match expand_bracket(&mut obj, t0, step)? {
        Some(b) => b,
        None => scan_bracket(&mut obj, t0, step)?,
    };

    // Golden-section search on [lo, hi] in t = ln(lambda).
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = obj.eval(x1)?;
    let mut f2 = obj.eval(x2)?;
    let tol = opts.lambda_rel_tol.max(1e-15);
    while hi - lo > tol {
        if f1.0 <= f2.0 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = obj.eval(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = obj.eval(x2)?;
        }
    }
    let (t_star, (c_star, k_at_star)) = if f1.0 <= f2.0 { (x1, f1) } else { (x2, f2) };
    if c_star.is_nan() || c_star <= 0.0 {
        return Err(Error::Bracket(format!("non-positive minimum {c_star} of k(lambda)/lambda")));
    }
    Ok(SpeedResult {
        c_star,
        lambda_star: t_star.exp(),
        k_at_star,
        bracket: (lo.exp(), hi.exp()),
        evaluations: obj.evaluations,
    })
}

/// Walks downhill from `t0` in steps of `step` until `g` rises.
fn expand_bracket(obj: &mut Objective<'_>, t0: f64, step: f64) -> Result<Option<(f64, f64)>> {
    let g0 = obj.eval(t0)?.0;
    let g_up = obj.eval(t0 + step)?.0;
    let g_down = obj.eval(t0 - step)?.0;
    if g_up >= g0 && g_down >= g0 {
        return Ok(Some((t0 - step, t0 + step)));
    }
    let dir = if g_up < g_down { 1.0 } else { -1.0 };
    let (mut prev, mut mid, mut g_mid) = (t0, t0 + dir * step, g_up.min(g_down));
    for _ in 1..obj.opts.max_doublings {
        let next = mid + dir * step;
        let g_next = obj.eval(next)?.0;
        if g_next >= g_mid {
            return Ok(Some(if dir > 0.0 { (prev, next) } else { (next, prev) }));
        }
        prev = mid;
        mid = next;
        g_mid = g_next;
    }
    Ok(None)
}

/// Fallback: log-grid scan over the whole expansion range.
fn scan_bracket(obj: &mut Objective<'_>, t0: f64, step: f64) -> Result<(f64, f64)> {
    let span = step * obj.opts.max_doublings as f64;
    let ts: Vec<f64> = (0..SCAN_POINTS).map(|i| t0 - span + 2.0 * span * i as f64 / (SCAN_POINTS - 1) as f64).collect();
    let mut values = Vec::with_capacity(ts.len());
    for &t in &ts {
        values.push(obj.eval(t)?.0);
    }
    let best = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    if best == 0 || best == values.len() - 1 {
        return Err(Error::Bracket(format!(
            "k(lambda)/lambda did not rise within {} doublings of lambda_0 = {}",
            obj.opts.max_doublings,
            t0.exp()
        )));
    }
    Ok((ts[best - 1], ts[best + 1]))
}

/// Minimal speed for the diffusion matrix `A_b = diag(1, b)` with the unscaled flow.
pub fn speed_for_ab(b: f64, flow: &ShearFlow, reaction: &KppReaction, cs: &CrossSection) -> Result<SpeedResult> {
    speed_for_ab_with(b, flow, reaction, cs, &SpeedOptions::default())
}

pub fn speed_for_ab_with(
    b: f64,
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    opts: &SpeedOptions,
) -> Result<SpeedResult> {
    let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::a_b(b)?, flow.clone(), reaction.clone())?;
    minimal_speed_with(&spec, opts)
}

/// Relative gap between `c*(b Id, sqrt(b) q)` and `sqrt(b) c*(A_b, q)`.
pub fn rescale_identity_check(b: f64, flow: &ShearFlow, reaction: &KppReaction, cs: &CrossSection) -> Result<f64> {
    let root = b.sqrt();
    let left_spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(b)?, flow.scaled(root), reaction.clone())?;
    let left = minimal_speed(&left_spec)?.c_star;
    let right = root * speed_for_ab(b, flow, reaction, cs)?.c_star;
    Ok((left - right).abs() / right)
}

/// `(lower, upper)` bounds on `k(lambda)`: the constant test function gives
/// `alpha lambda^2 + f'(0)`, and the pointwise potential maximum gives
/// `alpha lambda^2 + lambda max q1 + f'(0)`.
pub fn analytic_bounds(spec: &ProblemSpec, lambda: f64) -> (f64, f64) {
    let base = spec.diffusion.axial() * lambda * lambda + spec.growth_rate();
    (base, base + lambda * flow_max(&spec.flow))
}

/// Lower bound on `c*(b Id, sqrt(b) q) / sqrt(b)` for small `b`, obtained by
/// testing the Rayleigh quotient against a bump supported where
/// `q1 >= max q1 - delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundCertificate {
    pub delta: f64,
    pub flow_max: f64,
    pub growth_rate: f64,
    /// Grid indices of the bump support (contiguous, possibly wrapping).
    pub support: Vec<usize>,
    /// Bump samples on the full grid, normalized to `h sum phi^2 = 1`.
    pub bump: Vec<f64>,
    /// Discrete `integral |phi'|^2` in the operator's own edge set.
    pub gradient_energy: f64,
    /// The bound is valid for `0 < b < b0 = f'(0) / gradient_energy`.
    pub b0: f64,
}

impl LowerBoundCertificate {
    /// `2 sqrt(f'(0) - b G) + max q1 - delta`, or `None` when `b >= b0`.
    pub fn at(&self, b: f64) -> Option<f64> {
        let reduced = self.growth_rate - b * self.gradient_energy;
        (b > 0.0 && reduced > 0.0).then(|| 2.0 * reduced.sqrt() + self.flow_max - self.delta)
    }

    /// The `b -> 0` value `2 sqrt(f'(0)) + max q1 - delta`.
    pub fn limit(&self) -> f64 {
        2.0 * self.growth_rate.sqrt() + self.flow_max - self.delta
    }
}

pub fn lower_bound_certificate(
    cs: &CrossSection,
    flow: &ShearFlow,
    reaction: &KppReaction,
    delta: f64,
) -> Result<LowerBoundCertificate> {
    let max = flow_max(flow);
    if flow.is_zero() {
        return Err(Error::invalid("flow", "certificate needs a nonzero flow"));
    }
    if !(delta > 0.0 && delta < max) {
        return Err(Error::invalid("delta", format!("must lie in (0, {max}), got {delta}")));
    }
    cs.check_len("flow", flow.samples().len())?;
    let q = flow.samples();
    let n = cs.n();
    let threshold = max - delta;
    let top = (0..n).max_by(|&a, &b| q[a].total_cmp(&q[b])).unwrap_or(0);
    if q[top] < threshold {
        return Err(Error::invalid("delta", format!("no grid point has q1 >= {threshold}; refine the grid or enlarge delta")));
    }

    let periodic = cs.kind() == BoundaryKind::CirclePeriodic;
    let step = |i: usize, forward: bool| -> Option<usize> {
        match (forward, periodic) {
            (true, _) if i + 1 < n => Some(i + 1),
            (true, true) => Some(0),
            (false, _) if i > 0 => Some(i - 1),
            (false, true) => Some(n - 1),
            _ => None,
        }
    };
    let mut support = std::collections::VecDeque::from([top]);
    while support.len() < n {
        match step(*support.back().unwrap(), true) {
            Some(j) if q[j] >= threshold && !support.contains(&j) => support.push_back(j),
            _ => break,
        }
    }
    while support.len() < n {
        match step(*support.front().unwrap(), false) {
            Some(j) if q[j] >= threshold && !support.contains(&j) => support.push_front(j),
            _ => break,
        }
    }
    let support: Vec<usize> = support.into_iter().collect();

    let m = support.len();
    let mut bump = vec![0.0; n];
    for (j, &i) in support.iter().enumerate() {
        bump[i] = (std::f64::consts::PI * (j + 1) as f64 / (m + 1) as f64).sin().powi(2);
    }
    let h = cs.h();
    let norm = (h * bump.iter().map(|v| v * v).sum::<f64>()).sqrt();
    bump.iter_mut().for_each(|v| *v /= norm);

    let mut edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic {
        edges.push((n - 1, 0));
    }
    let gradient_energy: f64 = edges.iter().map(|&(a, b)| (bump[a] - bump[b]).powi(2) / h).sum();
    let growth_rate = reaction.growth_rate();
    Ok(LowerBoundCertificate {
        delta,
        flow_max: max,
        growth_rate,
        support,
        bump,
        gradient_energy,
        b0: growth_rate / gradient_energy,
    })
}
