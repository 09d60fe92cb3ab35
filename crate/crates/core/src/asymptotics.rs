//! Limits of the speed along the family `A_b = diag(1, b)` and witness
//! searches for the failure of monotonicity in the diffusion.
//!
//! Both limit statements are checked numerically: the speed is computed along
//! a geometric schedule of `b` and Richardson-extrapolated with an order fitted
//! from the last three points. The counterexample searches double or halve the
//! diffusion until the inequalities implied by the limits hold, then confirm
//! the witness on a finer grid.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::CrossSection;
use crate::model::{flow_max, DiffusionSpec, KppReaction, ProblemSpec, ShearFlow};
use crate::speed::{minimal_speed_with, speed_for_ab_with, SpeedOptions, SpeedResult};

/// Maximum number of doublings or halvings in a witness search.
pub const SEARCH_BUDGET: usize = 60;
/// Grid used for counterexample searches.
pub const SEARCH_CELLS: usize = 512;
/// Grid used to confirm a counterexample.
pub const CONFIRM_CELLS: usize = 1024;

/// `max q1 + 2 sqrt(f'(0))`, the `b -> 0` limit of `c*(A_b)`.
pub fn predict_limit_b_to_zero(flow: &ShearFlow, reaction: &KppReaction) -> f64 {
    flow_max(flow) + 2.0 * reaction.growth_rate().sqrt()
}

/// `2 sqrt(f'(0))`, the `b -> infinity` limit of `c*(A_b)`.
pub fn predict_limit_b_to_infinity(reaction: &KppReaction) -> f64 {
    2.0 * reaction.growth_rate().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitDirection {
    ToZero,
    ToInfinity,
}

impl LimitDirection {
    /// Seven half-decade points: `1e-1 .. 1e-4` or `1e1 .. 1e4`.
    pub fn default_schedule(self) -> Vec<f64> {
        (0..7)
            .map(|k| {
                let e = 1.0 + 0.5 * k as f64;
                match self {
                    LimitDirection::ToZero => 10f64.powf(-e),
                    LimitDirection::ToInfinity => 10f64.powf(e),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LimitReport {
    pub direction: LimitDirection,
    pub b_values: Vec<f64>,
    pub speeds: Vec<f64>,
    pub extrapolated_limit: f64,
    pub predicted_limit: f64,
    /// `|extrapolated - predicted| / |predicted|`.
    pub relative_error: f64,
    /// Fitted exponent `p` in `c(b) - L ~ b^p` (`b^-p` towards infinity).
    pub fitted_order: Option<f64>,
    /// Set when the speeds do not approach the limit monotonically.
    pub non_monotone: bool,
}

/// Computes `c*(A_b)` along `b_schedule` and extrapolates towards the limit.
pub fn verify_limit(
    direction: LimitDirection,
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    b_schedule: &[f64],
) -> Result<LimitReport> {
    if b_schedule.len() < 4 {
        return Err(Error::invalid("b_schedule", "needs at least 4 points"));
    }
    if b_schedule.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
        return Err(Error::invalid("b_schedule", "values must be positive"));
    }
    let ordered = b_schedule.windows(2).all(|w| match direction {
        LimitDirection::ToZero => w[1] < w[0],
        LimitDirection::ToInfinity => w[1] > w[0],
    });
    if !ordered {
        return Err(Error::invalid("b_schedule", format!("must be strictly monotone towards the limit ({direction:?})")));
    }

    let opts = SpeedOptions::default();
    let speeds = b_schedule
        .par_iter()
        .map(|&b| speed_for_ab_with(b, flow, reaction, cs, &opts).map(|r| r.c_star))
        .collect::<Result<Vec<f64>>>()?;

    let predicted_limit = match direction {
        LimitDirection::ToZero => predict_limit_b_to_zero(flow, reaction),
        LimitDirection::ToInfinity => predict_limit_b_to_infinity(reaction),
    };
    let (extrapolated_limit, fitted_order, mut non_monotone) = extrapolate(direction, b_schedule, &speeds);
    let diffs: Vec<f64> = speeds.windows(2).map(|w| w[1] - w[0]).collect();
    if diffs.windows(2).any(|d| d[0] * d[1] < 0.0) {
        non_monotone = true;
    }
    Ok(LimitReport {
        direction,
        b_values: b_schedule.to_vec(),
        speeds,
        extrapolated_limit,
        predicted_limit,
        relative_error: (extrapolated_limit - predicted_limit).abs() / predicted_limit.abs(),
        fitted_order,
        non_monotone,
    })
}

/// Richardson extrapolation from the last three points of a geometric schedule.
fn extrapolate(direction: LimitDirection, b: &[f64], s: &[f64]) -> (f64, Option<f64>, bool) {
    let n = s.len();
    let (s1, s2, s3) = (s[n - 3], s[n - 2], s[n - 1]);
    let (d1, d2) = (s2 - s1, s3 - s2);
    if d1 == 0.0 && d2 == 0.0 {
        return (s3, None, false);
    }
    let rho = d2 / d1;
    if !(rho > 0.0 && rho < 1.0) {
        return (s3, None, true);
    }
    let ratio = (b[n - 1] / b[n - 2]).ln();
    let order = match direction {
        LimitDirection::ToZero => rho.ln() / ratio,
        LimitDirection::ToInfinity => -rho.ln() / ratio,
    };
    (s3 + d2 * rho / (1.0 - rho), Some(order), false)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Doubling/halving budget for each search phase.
    pub max_steps: usize,
    /// Grid on which the witness is re-checked; `None` skips confirmation.
    pub confirm_cells: Option<usize>,
    pub speed: SpeedOptions,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { max_steps: SEARCH_BUDGET, confirm_cells: Some(CONFIRM_CELLS), speed: SpeedOptions::default() }
    }
}

/// Both speeds of a witness recomputed on the confirmation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Confirmation {
    pub cells: usize,
    pub speed_small_diffusion: f64,
    pub speed_large_diffusion: f64,
    /// Whether every inequality of the witness still holds on this grid.
    pub holds: bool,
}

/// Witness for `c*(eps Id, sqrt(M1) q) > c*(M1 Id, sqrt(M1) q)` with `eps < M1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub delta: f64,
    pub m1: f64,
    pub epsilon1: f64,
    pub speed_small_diffusion: f64,
    pub speed_large_diffusion: f64,
    /// `speed_small_diffusion - speed_large_diffusion`.
    pub margin: f64,
    /// `(M, c*)` probes of the first phase followed by `(eps, c*)` probes of the second.
    pub trace: Vec<(f64, f64)>,
    /// Number of leading `trace` entries from the first phase.
    pub first_phase: usize,
    pub cells: usize,
    pub confirmation: Option<Confirmation>,
}

impl CounterexampleReport {
    /// Margin positive on the search grid and, when run, on the confirmation grid.
    pub fn verified(&self) -> bool {
        self.margin > 0.0 && self.confirmation.is_some_and(|c| c.holds)
    }
}

/// Default `delta = (max q1 - 2 sqrt(f'(0))) / 4`.
pub fn default_delta_proportional(flow: &ShearFlow, reaction: &KppReaction) -> f64 {
    (flow_max(flow) - 2.0 * reaction.growth_rate().sqrt()) / 4.0
}

/// Default `delta = max q1 / 4`.
pub fn default_delta_nonproportional(flow: &ShearFlow) -> f64 {
    flow_max(flow) / 4.0
}

fn isotropic_speed(
    d: f64,
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    opts: &SpeedOptions,
) -> Result<SpeedResult> {
    let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(d)?, flow.clone(), reaction.clone())?;
    minimal_speed_with(&spec, opts)
}

/// `c*(eps Id, sqrt(M1) q)` and `c*(M1 Id, sqrt(M1) q)`.
fn proportional_pair(
    m1: f64,
    epsilon: f64,
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    opts: &SpeedOptions,
) -> Result<(f64, f64)> {
    let scaled = flow.scaled(m1.sqrt());
    let small = isotropic_speed(epsilon, &scaled, reaction, cs, opts)?.c_star;
    let large = isotropic_speed(m1, &scaled, reaction, cs, opts)?.c_star;
    Ok((small, large))
}

pub fn find_proportional_counterexample(
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    delta: Option<f64>,
) -> Result<CounterexampleReport> {
    find_proportional_counterexample_with(flow, reaction, cs, delta, &SearchOptions::default())
}

pub fn find_proportional_counterexample_with(
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    delta: Option<f64>,
    opts: &SearchOptions,
) -> Result<CounterexampleReport> {
    let max_q = flow_max(flow);
    let speed0 = 2.0 * reaction.growth_rate().sqrt();
    let delta = delta.unwrap_or_else(|| default_delta_proportional(flow, reaction));
    if !(delta > 0.0 && speed0 + delta < max_q - delta) {
        return Err(Error::Premise(format!(
            "need 0 < 2 sqrt(f'(0)) + delta < max q1 - delta with delta > 0, got {speed0} + {delta} = {} vs {max_q} - {delta} = {}",
            speed0 + delta,
            max_q - delta
        )));
    }

    // Large diffusion: c*(M Id, sqrt(M) q) / sqrt(M) tends to 2 sqrt(f'(0)).
    let mut trace = Vec::new();
    let mut m = 1.0;
    let (m1, speed_large) = loop {
        let c = isotropic_speed(m, &flow.scaled(m.sqrt()), reaction, cs, &opts.speed)?.c_star;
        trace.push((m, c));
        if c < m.sqrt() * (speed0 + delta) {
            break (m, c);
        }
        if trace.len() > opts.max_steps {
            return Err(budget(trace, "large-diffusion speed stayed above sqrt(M) (2 sqrt(f'(0)) + delta)"));
        }
        m *= 2.0;
    };

    // Small diffusion at fixed advection sqrt(M1) q: the speed tends to sqrt(M1) max q1.
    let scaled = flow.scaled(m1.sqrt());
    let target = m1.sqrt() * (max_q - delta);
    let mut epsilon = m1 / 2.0;
    let first_phase = trace.len();
    let (epsilon1, speed_small) = loop {
        let c = isotropic_speed(epsilon, &scaled, reaction, cs, &opts.speed)?.c_star;
        trace.push((epsilon, c));
        if c > target {
            break (epsilon, c);
        }
        if trace.len() - first_phase > opts.max_steps {
            return Err(budget(trace, "small-diffusion speed stayed below sqrt(M1) (max q1 - delta)"));
        }
        epsilon /= 2.0;
    };

    let confirmation = match opts.confirm_cells {
        Some(cells) => {
            let fine = cs.with_cells(cells)?;
            let fine_flow = flow.resample(&fine)?;
            let (small, large) = proportional_pair(m1, epsilon1, &fine_flow, reaction, &fine, &opts.speed)?;
            let holds = large < m1.sqrt() * (speed0 + delta) && small > target && small > large;
            Some(Confirmation { cells, speed_small_diffusion: small, speed_large_diffusion: large, holds })
        }
        None => None,
    };

    Ok(CounterexampleReport {
        delta,
        m1,
        epsilon1,
        speed_small_diffusion: speed_small,
        speed_large_diffusion: speed_large,
        margin: speed_small - speed_large,
        trace,
        first_phase,
        cells: cs.n(),
        confirmation,
    })
}

/// Recomputes both speeds of a proportional witness on `cs`.
pub fn reverify_proportional(
    report: &CounterexampleReport,
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
) -> Result<(f64, f64)> {
    proportional_pair(report.m1, report.epsilon1, flow, reaction, cs, &SpeedOptions::default())
}

/// Witness `A_eps <= A_M` with `c*(A_M) < c*(A_eps)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonProportionalReport {
    pub delta: f64,
    pub epsilon: f64,
    pub m: f64,
    pub c_eps: f64,
    pub c_m: f64,
    /// `(eps, c*(A_eps))` probes followed by `(M, c*(A_M))` probes.
    pub trace: Vec<(f64, f64)>,
    /// Number of leading `trace` entries from the `eps` phase.
    pub first_phase: usize,
    pub cells: usize,
    pub confirmation: Option<Confirmation>,
}

impl NonProportionalReport {
    pub fn margin(&self) -> f64 {
        self.c_eps - self.c_m
    }

    pub fn verified(&self) -> bool {
        self.margin() > 0.0 && self.confirmation.is_some_and(|c| c.holds)
    }
}

pub fn find_nonproportional_counterexample(
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    delta: Option<f64>,
) -> Result<NonProportionalReport> {
    find_nonproportional_counterexample_with(flow, reaction, cs, delta, &SearchOptions::default())
}

pub fn find_nonproportional_counterexample_with(
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    delta: Option<f64>,
    opts: &SearchOptions,
) -> Result<NonProportionalReport> {
    let max_q = flow_max(flow);
    let speed0 = 2.0 * reaction.growth_rate().sqrt();
    let delta = delta.unwrap_or_else(|| default_delta_nonproportional(flow));
    if !(delta > 0.0 && speed0 + delta < max_q + speed0 - delta) {
        return Err(Error::Premise(format!(
            "need 2 sqrt(f'(0)) + delta < max q1 + 2 sqrt(f'(0)) - delta with delta > 0, got {} vs {}",
            speed0 + delta,
            max_q + speed0 - delta
        )));
    }
    let upper_target = max_q + speed0 - delta;
    let lower_target = speed0 + delta;

    let mut trace = Vec::new();
    let mut epsilon = 0.5;
    let c_eps = loop {
        let c = speed_for_ab_with(epsilon, flow, reaction, cs, &opts.speed)?.c_star;
        trace.push((epsilon, c));
        if c > upper_target {
            break c;
        }
        if trace.len() > opts.max_steps {
            return Err(budget(trace, "c*(A_eps) stayed below max q1 + 2 sqrt(f'(0)) - delta"));
        }
        epsilon /= 2.0;
    };
    let first_phase = trace.len();
    let mut m = 2.0;
    let c_m = loop {
        let c = speed_for_ab_with(m, flow, reaction, cs, &opts.speed)?.c_star;
        trace.push((m, c));
        if c < lower_target {
            break c;
        }
        if trace.len() - first_phase > opts.max_steps {
            return Err(budget(trace, "c*(A_M) stayed above 2 sqrt(f'(0)) + delta"));
        }
        m *= 2.0;
    };

    let confirmation = match opts.confirm_cells {
        Some(cells) => {
            let fine = cs.with_cells(cells)?;
            let fine_flow = flow.resample(&fine)?;
            let small = speed_for_ab_with(epsilon, &fine_flow, reaction, &fine, &opts.speed)?.c_star;
            let large = speed_for_ab_with(m, &fine_flow, reaction, &fine, &opts.speed)?.c_star;
            let holds = large < lower_target && small > upper_target;
            Some(Confirmation { cells, speed_small_diffusion: small, speed_large_diffusion: large, holds })
        }
        None => None,
    };

    Ok(NonProportionalReport { delta, epsilon, m, c_eps, c_m, trace, first_phase, cells: cs.n(), confirmation })
}

fn budget(trace: Vec<(f64, f64)>, message: &str) -> Error {
    Error::SearchBudget { steps: trace.len(), message: message.to_string(), trace }
}

/// One row of a `b`-scan; solver failures are kept in-row.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub b: f64,
    pub result: Result<SpeedResult>,
}

/// `c*(A_b)` for each `b` in `b_grid`, rows in input order.
pub fn scan_speed_vs_b(flow: &ShearFlow, reaction: &KppReaction, cs: &CrossSection, b_grid: &[f64]) -> Vec<ScanRow> {
    scan_speed_vs_b_with(flow, reaction, cs, b_grid, &SpeedOptions::default())
}

pub fn scan_speed_vs_b_with(
    flow: &ShearFlow,
    reaction: &KppReaction,
    cs: &CrossSection,
    b_grid: &[f64],
    opts: &SpeedOptions,
) -> Vec<ScanRow> {
    b_grid
        .par_iter()
        .map(|&b| ScanRow { b, result: speed_for_ab_with(b, flow, reaction, cs, opts) })
        .collect()
}

/// `n` geometrically spaced points from `from` to `to` inclusive.
pub fn geometric_grid(from: f64, to: f64, n: usize) -> Result<Vec<f64>> {
    if !(from > 0.0 && to > 0.0 && from.is_finite() && to.is_finite()) {
        return Err(Error::invalid("from", "grid endpoints must be positive"));
    }
    match n {
        0 => Err(Error::invalid("points", "need at least one point")),
        1 => Ok(vec![from]),
        _ => {
            let ratio = (to / from).ln() / (n - 1) as f64;
            Ok((0..n).map(|i| if i == n - 1 { to } else { from * (ratio * i as f64).exp() }).collect())
        }
    }
}

/// Whether the successful rows of a scan are strictly decreasing in `c*`.
pub fn is_strictly_decreasing(rows: &[ScanRow]) -> bool {
    let speeds: Vec<f64> = rows.iter().filter_map(|r| r.result.as_ref().ok().map(|s| s.c_star)).collect();
    speeds.windows(2).all(|w| w[1] < w[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_grid, BoundaryKind};
    use crate::model::FlowProfile;

    fn setup(n: usize, amplitude: f64) -> (CrossSection, ShearFlow, KppReaction) {
        let cs = make_grid(BoundaryKind::CirclePeriodic, 1.0, n).unwrap();
        let flow = if amplitude == 0.0 {
            ShearFlow::zero(&cs)
        } else {
            ShearFlow::new(FlowProfile::cosine(amplitude, 1), &cs).unwrap()
        };
        (cs, flow, KppReaction::logistic(1.0).unwrap())
    }

    #[test]
    fn predicted_limits() {
        let (_, flow, f1) = setup(64, 6.0);
        assert_eq!(predict_limit_b_to_zero(&flow, &f1), 8.0);
        let (_, zero, _) = setup(64, 0.0);
        assert_eq!(predict_limit_b_to_zero(&zero, &f1), 2.0);
        let (_, unit, _) = setup(64, 1.0);
        let f4 = KppReaction::logistic(4.0).unwrap();
        assert_eq!(predict_limit_b_to_zero(&unit, &f4), 5.0);
        assert_eq!(predict_limit_b_to_infinity(&f1), 2.0);
        assert_eq!(predict_limit_b_to_infinity(&KppReaction::logistic(0.25).unwrap()), 1.0);
        assert_eq!(predict_limit_b_to_infinity(&f4), 4.0);
    }

    #[test]
    fn flow_free_limits_are_exact() {
        let (cs, zero, f) = setup(32, 0.0);
        for dir in [LimitDirection::ToZero, LimitDirection::ToInfinity] {
            let r = verify_limit(dir, &zero, &f, &cs, &dir.default_schedule()).unwrap();
            assert!(r.speeds.iter().all(|c| (c - 2.0).abs() < 1e-10));
            assert!(r.relative_error < 1e-10);
        }
    }

    #[test]
    fn schedule_validation() {
        let (cs, flow, f) = setup(32, 6.0);
        assert!(verify_limit(LimitDirection::ToZero, &flow, &f, &cs, &[0.1, 0.01, 0.001]).is_err());
        assert!(verify_limit(LimitDirection::ToZero, &flow, &f, &cs, &[0.1, 1.0, 0.01, 0.001]).is_err());
        assert!(verify_limit(LimitDirection::ToInfinity, &flow, &f, &cs, &[1.0, 2.0, -3.0, 4.0]).is_err());
    }

    #[test]
    fn richardson_recovers_a_known_power_law() {
        let b = [1e-1, 1e-2, 1e-3, 1e-4];
        let s: Vec<f64> = b.iter().map(|x: &f64| 8.0 - 3.0 * x.sqrt()).collect();
        let (limit, order, flagged) = extrapolate(LimitDirection::ToZero, &b, &s);
        assert!((limit - 8.0).abs() < 1e-12);
        assert!((order.unwrap() - 0.5).abs() < 1e-12);
        assert!(!flagged);

        let b = [10.0, 100.0, 1000.0, 10000.0];
        let s: Vec<f64> = b.iter().map(|x| 2.0 + 5.0 / x).collect();
        let (limit, order, _) = extrapolate(LimitDirection::ToInfinity, &b, &s);
        assert!((limit - 2.0).abs() < 1e-12);
        assert!((order.unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn premise_failures() {
        let (cs, zero, f) = setup(64, 0.0);
        assert!(matches!(find_proportional_counterexample(&zero, &f, &cs, Some(1.0)), Err(Error::Premise(_))));
        assert!(matches!(find_proportional_counterexample(&zero, &f, &cs, None), Err(Error::Premise(_))));
        assert!(matches!(find_nonproportional_counterexample(&zero, &f, &cs, Some(0.5)), Err(Error::Premise(_))));

        let (cs, flow, _) = setup(64, 6.0);
        let f9 = KppReaction::logistic(9.0).unwrap();
        for delta in [1e-6, 0.5, 1.0] {
            assert!(matches!(find_proportional_counterexample(&flow, &f9, &cs, Some(delta)), Err(Error::Premise(_))));
        }
    }

    #[test]
    fn search_budget_is_reported() {
        let (cs, flow, f) = setup(64, 6.0);
        let opts = SearchOptions { max_steps: 0, confirm_cells: None, ..SearchOptions::default() };
        match find_nonproportional_counterexample_with(&flow, &f, &cs, Some(1.0), &opts) {
            Err(Error::SearchBudget { trace, .. }) => assert!(!trace.is_empty()),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    #[test]
    fn proportional_witness_on_a_coarse_grid() {
        let (cs, flow, f) = setup(128, 6.0);
        let opts = SearchOptions { confirm_cells: Some(256), ..SearchOptions::default() };
        let r = find_proportional_counterexample_with(&flow, &f, &cs, Some(1.0), &opts).unwrap();
        assert!(r.margin > 0.0 && r.epsilon1 < r.m1);
        assert!(r.verified());
        let root = r.m1.sqrt();
        for c in [r.speed_small_diffusion, r.speed_large_diffusion] {
            assert!(c >= 2.0 * root - 1e-9 && c <= 8.0 * root + 1e-9);
        }
        let (small, large) = reverify_proportional(&r, &flow, &f, &cs).unwrap();
        assert_eq!((small, large), (r.speed_small_diffusion, r.speed_large_diffusion));
    }

    #[test]
    fn nonproportional_witness_orders_the_matrices() {
        let (cs, flow, f) = setup(128, 6.0);
        let opts = SearchOptions { confirm_cells: None, ..SearchOptions::default() };
        let r = find_nonproportional_counterexample_with(&flow, &f, &cs, Some(1.0), &opts).unwrap();
        assert!(r.epsilon < 1.0 && 1.0 < r.m);
        assert!(r.c_eps > 7.0 && r.c_m < 3.0);
        assert!(r.margin() > 0.0);
    }

    #[test]
    fn scan_rows_match_direct_calls() {
        let (cs, flow, f) = setup(64, 6.0);
        let grid = geometric_grid(1e-2, 1e2, 5).unwrap();
        let rows = scan_speed_vs_b(&flow, &f, &cs, &grid);
        assert_eq!(rows.len(), 5);
        assert_eq!(rows[0].b, 1e-2);
        assert_eq!(rows[4].b, 1e2);
        let direct = speed_for_ab_with(1e2, &flow, &f, &cs, &SpeedOptions::default()).unwrap();
        assert_eq!(rows[4].result.as_ref().unwrap().c_star.to_bits(), direct.c_star.to_bits());
        assert!(is_strictly_decreasing(&rows));

        let (cs, zero, f) = setup(32, 0.0);
        for row in scan_speed_vs_b(&zero, &f, &cs, &grid) {
            assert!((row.result.unwrap().c_star - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn geometric_grid_endpoints() {
        let g = geometric_grid(1e-3, 1e3, 25).unwrap();
        assert_eq!(g.len(), 25);
        assert_eq!((g[0], g[24]), (1e-3, 1e3));
        assert!((g[12] - 1.0).abs() < 1e-12);
        assert!(geometric_grid(0.0, 1.0, 3).is_err());
    }
}
