//! One-shot acceptance harness.
//!
//! Each criterion returns a row with the measured quantity, its tolerance and
//! the wall-clock time; a row passes when the measurement is within
//! tolerance and the run fits its time budget.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::asymptotics::{
    find_nonproportional_counterexample, find_proportional_counterexample, reverify_proportional, verify_limit,
    LimitDirection, CONFIRM_CELLS, SEARCH_CELLS,
};
use crate::eigensolver::{assemble, dense_oracle_eigenvalues, principal_eigenpair_with, EigenOptions, ShiftStrategy};
use crate::error::{Error, Result};
use crate::frontsim::{cross_validate, SimConfig};
use crate::geometry::{make_grid, BoundaryKind, CrossSection};
use crate::model::{DiffusionSpec, FlowProfile, KppReaction, ProblemSpec, ShearFlow};
use crate::speed::{analytic_bounds, k_of_lambda_with, minimal_speed, rescale_identity_check};

const SEED: u64 = 0x6b70_7073;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Everything except the time-domain simulations.
    Quick,
    Full,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Suite::Quick),
            "full" => Ok(Suite::Full),
            other => Err(Error::invalid("suite", format!("expected `quick` or `full`, got `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Criterion {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Criterion::A1,
        Criterion::A2,
        Criterion::A3,
        Criterion::A4,
        Criterion::A5,
        Criterion::A6,
        Criterion::A7,
        Criterion::A8,
        Criterion::A9,
        Criterion::A10,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Criterion::A1 => "homogeneous exactness",
            Criterion::A2 => "rescaling identity",
            Criterion::A3 => "b -> 0 limit",
            Criterion::A4 => "b -> infinity limit",
            Criterion::A5 => "proportional counterexample",
            Criterion::A6 => "non-proportional counterexample",
            Criterion::A7 => "eigensolver oracle equivalence",
            Criterion::A8 => "bounds and convexity",
            Criterion::A9 => "simulation cross-validation",
            Criterion::A10 => "decreasing normalized map",
        }
    }

    pub fn budget(self) -> Duration {
        Duration::from_secs(match self {
            Criterion::A1 => 1,
            Criterion::A2 => 10,
            Criterion::A3 | Criterion::A4 | Criterion::A8 => 60,
            Criterion::A5 | Criterion::A6 => 300,
            Criterion::A7 => 30,
            Criterion::A9 => 600,
            Criterion::A10 => 20,
        })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("{self:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub suite: Suite,
    /// Eigensolver shift used by the oracle and bounds rows.
    pub shift: ShiftStrategy,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { suite: Suite::Quick, shift: ShiftStrategy::CollatzWielandt }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub criterion: Criterion,
    /// The quantity compared against `tolerance`; `NaN` when the run errored.
    pub measured: f64,
    pub tolerance: f64,
    pub within_tolerance: bool,
    pub elapsed: Duration,
    pub detail: String,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.within_tolerance && self.elapsed <= self.criterion.budget()
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<4} {:<32} measured={:<12.4e} tol={:<9.1e} time={:>7.2}s/{}s  {}",
            self.criterion,
            if self.passed() { "PASS" } else { "FAIL" },
            self.criterion.title(),
            self.measured,
            self.tolerance,
            self.elapsed.as_secs_f64(),
            self.criterion.budget().as_secs(),
            self.detail
        )
    }
}

/// Criteria included in `suite`, in order.
pub fn criteria(suite: Suite) -> Vec<Criterion> {
    Criterion::ALL.into_iter().filter(|c| suite == Suite::Full || *c != Criterion::A9).collect()
}

pub fn run_suite(opts: &VerifyOptions) -> Vec<Outcome> {
    criteria(opts.suite).into_iter().map(|c| run_criterion(c, opts)).collect()
}

/// Renders the PASS/FAIL table.
pub fn format_table(rows: &[Outcome]) -> String {
    let mut out = String::new();
    for row in rows {
        out.push_str(&row.to_string());
        out.push('\n');
    }
    let passed = rows.iter().filter(|r| r.passed()).count();
    out.push_str(&format!("{passed}/{} criteria passed\n", rows.len()));
    out
}

struct Measurement {
    measured: f64,
    tolerance: f64,
    ok: bool,
    detail: String,
}

pub fn run_criterion(criterion: Criterion, opts: &VerifyOptions) -> Outcome {
    let start = Instant::now();
    let eigen = EigenOptions { shift: opts.shift, ..EigenOptions::default() };
    let result = match criterion {
        Criterion::A1 => homogeneous_exactness(),
        Criterion::A2 => rescaling_identity(),
        Criterion::A3 => limit(LimitDirection::ToZero, 0.02),
        Criterion::A4 => limit(LimitDirection::ToInfinity, 0.01),
        Criterion::A5 => proportional(),
        Criterion::A6 => nonproportional(),
        Criterion::A7 => oracle_equivalence(&eigen),
        Criterion::A8 => bounds_and_convexity(&eigen),
        Criterion::A9 => simulation(),
        Criterion::A10 => normalized_map(),
    };
    let elapsed = start.elapsed();
    match result {
        Ok(m) => Outcome {
            criterion,
            measured: m.measured,
            tolerance: m.tolerance,
            within_tolerance: m.ok,
            elapsed,
            detail: m.detail,
        },
        Err(e) => Outcome {
            criterion,
            measured: f64::NAN,
            tolerance: f64::NAN,
            within_tolerance: false,
            elapsed,
            detail: format!("error: {e}"),
        },
    }
}

fn periodic(n: usize) -> Result<CrossSection> {
    make_grid(BoundaryKind::CirclePeriodic, 1.0, n)
}

fn cosine6(cs: &CrossSection) -> Result<ShearFlow> {
    ShearFlow::new(FlowProfile::cosine(6.0, 1), cs)
}

fn logistic() -> KppReaction {
    KppReaction::logistic(1.0).expect("logistic with mu = 1 is KPP")
}

fn homogeneous_exactness() -> Result<Measurement> {
    let cs = periodic(64)?;
    let mut worst = 0.0f64;
    for (d, expected) in [(1.0, 2.0), (4.0, 4.0)] {
        let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(d)?, ShearFlow::zero(&cs), logistic())?;
        worst = worst.max((minimal_speed(&spec)?.c_star - expected).abs());
    }
    Ok(Measurement { measured: worst, tolerance: 1e-10, ok: worst <= 1e-10, detail: "|c* - 2 sqrt(D)|, D in {1, 4}".into() })
}

fn rescaling_identity() -> Result<Measurement> {
    let cs = periodic(256)?;
    let flow = cosine6(&cs)?;
    let mut worst = 0.0f64;
    for b in [0.1, 0.5, 2.0, 10.0] {
        worst = worst.max(rescale_identity_check(b, &flow, &logistic(), &cs)?);
    }
    Ok(Measurement { measured: worst, tolerance: 1e-8, ok: worst <= 1e-8, detail: "max relative gap, b in {0.1, 0.5, 2, 10}".into() })
}

fn limit(direction: LimitDirection, tolerance: f64) -> Result<Measurement> {
    let cs = periodic(SEARCH_CELLS)?;
    let flow = cosine6(&cs)?;
    let r = verify_limit(direction, &flow, &logistic(), &cs, &direction.default_schedule())?;
    let sandwich = r.speeds.iter().all(|c| *c >= 2.0 - 1e-9 && *c <= 8.0 + 1e-9);
    Ok(Measurement {
        measured: r.relative_error,
        tolerance,
        ok: r.relative_error <= tolerance && sandwich,
        detail: format!(
            "extrapolated {:.6} vs {} (order {}), sandwich [2, 8] {}",
            r.extrapolated_limit,
            r.predicted_limit,
            r.fitted_order.map_or("n/a".to_string(), |p| format!("{p:.3}")),
            if sandwich { "holds" } else { "violated" }
        ),
    })
}

fn proportional() -> Result<Measurement> {
    let cs = periodic(SEARCH_CELLS)?;
    let flow = cosine6(&cs)?;
    let r = find_proportional_counterexample(&flow, &logistic(), &cs, Some(1.0))?;
    let (small, large) = reverify_proportional(&r, &flow, &logistic(), &cs)?;
    let drift = ((small - r.speed_small_diffusion).abs() / r.speed_small_diffusion)
        .max((large - r.speed_large_diffusion).abs() / r.speed_large_diffusion);
    let confirmed = r.verified() && r.confirmation.is_some_and(|c| c.cells == CONFIRM_CELLS);
    Ok(Measurement {
        measured: r.margin,
        tolerance: 0.0,
        ok: confirmed && r.epsilon1 < r.m1 && drift <= 1e-8,
        detail: format!(
            "M1={} eps1={} margin>0, confirmed at n={CONFIRM_CELLS}: {confirmed}, re-verification drift {drift:.1e}",
            r.m1, r.epsilon1
        ),
    })
}

fn nonproportional() -> Result<Measurement> {
    let cs = periodic(SEARCH_CELLS)?;
    let flow = cosine6(&cs)?;
    let r = find_nonproportional_counterexample(&flow, &logistic(), &cs, Some(1.0))?;
    let ordered = r.epsilon < 1.0 && 1.0 < r.m && r.c_m < 3.0 && 3.0 < 7.0 && 7.0 < r.c_eps;
    Ok(Measurement {
        measured: r.margin(),
        tolerance: 0.0,
        ok: ordered && r.margin() > 0.0,
        detail: format!("eps={} M={} c_eps={:.6} c_M={:.6}", r.epsilon, r.m, r.c_eps, r.c_m),
    })
}

/// Random cosine mixture with up to four modes.
fn random_potential(rng: &mut StdRng, cs: &CrossSection) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64)> = (0..rng.random_range(1..=4))
        .map(|k| (rng.random_range(-8.0..8.0), (k + 1) as f64, rng.random_range(0.0..2.0 * PI)))
        .collect();
    let length = cs.length();
    cs.sample(|y| modes.iter().map(|(a, k, p)| a * (2.0 * PI * k * y / length + p).cos()).sum())
}

fn random_section(rng: &mut StdRng, max_n: usize) -> Result<CrossSection> {
    let kind = if rng.random_bool(0.5) { BoundaryKind::CirclePeriodic } else { BoundaryKind::IntervalNeumann };
    make_grid(kind, rng.random_range(0.5..2.0), rng.random_range(8..=max_n))
}

fn oracle_equivalence(eigen: &EigenOptions) -> Result<Measurement> {
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let cs = random_section(&mut rng, 256)?;
        let beta = 10f64.powf(rng.random_range(-2.0..1.0));
        let v = random_potential(&mut rng, &cs);
        let op = assemble(&cs, beta, &v)?;
        let top = *dense_oracle_eigenvalues(&op)?.last().expect("nonempty spectrum");
        let err = match principal_eigenpair_with(&op, None, eigen) {
            Ok(r) => (r.eigenvalue - top).abs() / (1.0 + top.abs()),
            Err(_) => f64::INFINITY,
        };
        worst = worst.max(err);
    }
    Ok(Measurement { measured: worst, tolerance: 1e-10, ok: worst <= 1e-10, detail: "max |k - k_dense| / (1 + |k|), 50 operators".into() })
}

fn bounds_and_convexity(eigen: &EigenOptions) -> Result<Measurement> {
    let mut rng = StdRng::seed_from_u64(SEED ^ 0xa8);
    let mut sandwich = 0.0f64;
    let mut convexity = f64::NEG_INFINITY;
    for _ in 0..100 {
        let cs = random_section(&mut rng, 256)?;
        let knots = rng.random_range(3..=8);
        let points = (0..knots)
            .map(|i| {
                let y = if i == knots - 1 { cs.length() } else { cs.length() * i as f64 / (knots - 1) as f64 };
                (y, rng.random_range(-8.0..8.0))
            })
            .collect();
        let flow = ShearFlow::new(FlowProfile::PiecewiseLinear(points), &cs)?;
        let diffusion = DiffusionSpec::new(10f64.powf(rng.random_range(-1.0..1.0)), 10f64.powf(rng.random_range(-2.0..1.0)))?;
        let reaction = KppReaction::logistic(rng.random_range(0.1..4.0))?;
        let spec = ProblemSpec::new(cs, diffusion, flow, reaction)?;
        let l1 = 10f64.powf(rng.random_range(-2.0..2.0));
        let l2 = 10f64.powf(rng.random_range(-2.0..2.0));
        let k = |l: f64| k_of_lambda_with(&spec, l, None, eigen).map(|r| r.eigenvalue);
        let (k1, k2, km) = (k(l1)?, k(l2)?, k(0.5 * (l1 + l2))?);
        let (lower, upper) = analytic_bounds(&spec, l1);
        let slack = 1e-10 * (1.0 + k1.abs());
        sandwich = sandwich.max((lower - k1 - slack).max(k1 - upper - slack)).max(0.0);
        convexity = convexity.max(km - 0.5 * (k1 + k2));
    }
    Ok(Measurement {
        measured: convexity,
        tolerance: 1e-10,
        ok: sandwich == 0.0 && convexity <= 1e-10,
        detail: format!("100 pairs: sandwich excess {sandwich:.1e}, max k(mid) - mean {convexity:.3e}"),
    })
}

/// The three time-domain configurations used for cross-validation.
pub fn simulation_cases() -> Result<Vec<(&'static str, ProblemSpec, SimConfig)>> {
    let narrow = periodic(4)?;
    let fine = periodic(32)?;
    let base = SimConfig::default();
    Ok(vec![
        (
            "D=1",
            ProblemSpec::new(narrow.clone(), DiffusionSpec::isotropic(1.0)?, ShearFlow::zero(&narrow), logistic())?,
            SimConfig { strip_length: 240.0, nx: 2400, t_end: 100.0, ..base },
        ),
        (
            "D=0.25",
            ProblemSpec::new(narrow.clone(), DiffusionSpec::isotropic(0.25)?, ShearFlow::zero(&narrow), logistic())?,
            SimConfig { strip_length: 140.0, nx: 2800, t_end: 100.0, ..base },
        ),
        (
            "A_0.05",
            ProblemSpec::new(fine.clone(), DiffusionSpec::a_b(0.05)?, cosine6(&fine)?, logistic())?,
            SimConfig { strip_length: 200.0, nx: 4000, t_end: 30.0, ..base },
        ),
    ])
}

fn simulation() -> Result<Measurement> {
    let mut worst_gap = 0.0f64;
    let mut worst_bound = 0.0f64;
    let mut parts = Vec::new();
    for (name, spec, sim) in simulation_cases()? {
        let cv = cross_validate(&spec, &sim)?;
        worst_gap = worst_gap.max(cv.gap_pct());
        worst_bound = worst_bound.max(cv.bound_violation());
        parts.push(format!("{name}: {:.4} vs {:.4}", cv.measured_speed(), cv.variational_c));
    }
    Ok(Measurement {
        measured: worst_gap,
        tolerance: 5.0,
        ok: worst_gap <= 5.0 && worst_bound <= 1e-12,
        detail: format!("gap % | {} | bound excess {worst_bound:.1e}", parts.join(", ")),
    })
}

fn normalized_map() -> Result<Measurement> {
    let cs = periodic(256)?;
    let flow = cosine6(&cs)?;
    let mut values = Vec::new();
    for beta in [0.25f64, 1.0, 4.0, 16.0] {
        let spec = ProblemSpec::new(cs.clone(), DiffusionSpec::isotropic(beta)?, flow.scaled(beta.sqrt()), logistic())?;
        values.push(minimal_speed(&spec)?.c_star / beta.sqrt());
    }
    let worst = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    Ok(Measurement {
        measured: worst,
        tolerance: -1e-6,
        ok: worst < -1e-6,
        detail: format!("largest successive difference; values {values:.6?}"),
    })
}
