//! Shear flows, KPP reactions, diagonal diffusion and the assembled problem.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{cell_average, CrossSection};

/// Default number of sample points used to validate a reaction term.
pub const DEFAULT_KPP_SAMPLES: usize = 10_000;
/// Absolute slack allowed in `f(u) <= f'(0) u`.
pub const KPP_TOLERANCE: f64 = 1e-14;

/// Splits `name:key=value:key=value` into its name and key/value pairs.
fn parse_descriptor<'a>(field: &'static str, s: &'a str) -> Result<(&'a str, Vec<(&'a str, &'a str)>)> {
    let mut parts = s.trim().split(':');
    let name = parts.next().unwrap_or_default().trim();
    let mut pairs = Vec::new();
    for part in parts {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::invalid(field, format!("expected key=value, got `{part}`")))?;
        pairs.push((k.trim(), v.trim()));
    }
    Ok((name, pairs))
}

fn parse_real(field: &'static str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::invalid(field, format!("`{v}` is not a finite decimal number")))
}

/// Closed-form descriptor of the shear-flow profile `q1(y)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FlowProfile {
    Zero,
    /// `amplitude * cos(2 pi mode y / L)`.
    Cosine { amplitude: f64, mode: u32 },
    /// Linear interpolation through `(y, value)` breakpoints covering `[0, L]`.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl FlowProfile {
    pub fn cosine(amplitude: f64, mode: u32) -> Self {
        FlowProfile::Cosine { amplitude, mode }
    }

    /// Evaluates the raw (not yet mean-corrected) profile on a cell of length `length`.
    pub fn eval(&self, y: f64, length: f64) -> f64 {
        match self {
            FlowProfile::Zero => 0.0,
            FlowProfile::Cosine { amplitude, mode } => amplitude * (2.0 * PI * f64::from(*mode) * y / length).cos(),
            FlowProfile::PiecewiseLinear(points) => {
                let first = points[0];
                let last = points[points.len() - 1];
                if y <= first.0 {
                    return first.1;
                }
                if y >= last.0 {
                    return last.1;
                }
                let k = points.partition_point(|p| p.0 <= y);
                let (y0, v0) = points[k - 1];
                let (y1, v1) = points[k];
                v0 + (v1 - v0) * (y - y0) / (y1 - y0)
            }
        }
    }

    /// Multiplies the profile by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            FlowProfile::Zero => FlowProfile::Zero,
            FlowProfile::Cosine { amplitude, mode } => FlowProfile::Cosine { amplitude: amplitude * factor, mode: *mode },
            FlowProfile::PiecewiseLinear(points) => {
                FlowProfile::PiecewiseLinear(points.iter().map(|&(y, v)| (y, v * factor)).collect())
            }
        }
    }

    /// Parses breakpoint text: one `y value` pair per line (whitespace or comma
    /// separated), `#` starts a comment.
    pub fn parse_breakpoints(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
            if fields.len() != 2 {
                return Err(Error::invalid("flow", format!("breakpoint line `{line}` must hold `y value`")));
            }
            points.push((parse_real("flow", fields[0])?, parse_real("flow", fields[1])?));
        }
        Ok(FlowProfile::PiecewiseLinear(points))
    }

    fn validate(&self, cs: &CrossSection) -> Result<()> {
        match self {
            FlowProfile::Zero => Ok(()),
            FlowProfile::Cosine { amplitude, mode } => {
                if !(amplitude.is_finite() && *amplitude > 0.0) {
                    return Err(Error::invalid("flow", format!("cosine amplitude must be positive, got {amplitude}")));
                }
                if *mode == 0 {
                    return Err(Error::invalid("flow", "cosine mode must be at least 1"));
                }
                if 2 * *mode as usize >= cs.n() {
                    return Err(Error::invalid("flow", format!("mode {mode} is not resolved by {} cells", cs.n())));
                }
                Ok(())
            }
            FlowProfile::PiecewiseLinear(points) => {
                if points.len() < 2 {
                    return Err(Error::invalid("flow", "piecewise-linear profile needs at least two breakpoints"));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::invalid("flow", "breakpoint abscissae must be strictly increasing"));
                }
                if points[0].0 > 0.0 || points[points.len() - 1].0 < cs.length() {
                    return Err(Error::invalid("flow", format!("breakpoints must cover [0, {}]", cs.length())));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for FlowProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowProfile::Zero => f.write_str("zero"),
            FlowProfile::Cosine { amplitude, mode } => write!(f, "cosine:amplitude={amplitude}:mode={mode}"),
            FlowProfile::PiecewiseLinear(points) => {
                f.write_str("pwl:points=")?;
                for (i, (y, v)) in points.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{y},{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for FlowProfile {
    type Err = Error;

    /// Accepts `zero`, `cosine:amplitude=A[:mode=M]` and `pwl:points=y,v;y,v;...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, pairs) = parse_descriptor("flow", s)?;
        match name {
            "zero" if pairs.is_empty() => Ok(FlowProfile::Zero),
            "cosine" => {
                let mut amplitude = None;
                let mut mode = 1;
                for (k, v) in pairs {
                    match k {
                        "amplitude" => amplitude = Some(parse_real("flow", v)?),
                        "mode" => {
                            mode = v.parse().map_err(|_| Error::invalid("flow", format!("bad cosine mode `{v}`")))?
                        }
                        other => return Err(Error::invalid("flow", format!("unknown cosine key `{other}`"))),
                    }
                }
                let amplitude = amplitude.ok_or_else(|| Error::invalid("flow", "cosine flow needs amplitude=..."))?;
                Ok(FlowProfile::Cosine { amplitude, mode })
            }
            "pwl" => match pairs.as_slice() {
                [("points", list)] => FlowProfile::parse_breakpoints(&list.replace(';', "\n")),
                _ => Err(Error::invalid("flow", "inline pwl flow must be `pwl:points=y,v;y,v;...`")),
            },
            other => Err(Error::invalid("flow", format!("unknown flow `{other}`"))),
        }
    }
}

/// Returns `samples` minus their cell average.
pub fn normalize_zero_mean(samples: &[f64], cs: &CrossSection) -> Result<Vec<f64>> {
    let mean = cell_average(cs, samples)?;
    Ok(samples.iter().map(|s| s - mean).collect())
}

/// Shear flow `q = (q1(y), 0)` sampled on a cross-section, with zero cell average.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearFlow {
    profile: FlowProfile,
    samples: Vec<f64>,
    max_value: f64,
}

impl ShearFlow {
    /// Samples `profile` on `cs` and removes its discrete mean.
    pub fn new(profile: FlowProfile, cs: &CrossSection) -> Result<Self> {
        profile.validate(cs)?;
        let raw = cs.sample(|y| profile.eval(y, cs.length()));
        let mean = cell_average(cs, &raw)?;
        let samples: Vec<f64> = raw.iter().map(|s| s - mean).collect();
        let max_value = match &profile {
            FlowProfile::Zero => 0.0,
            FlowProfile::Cosine { amplitude, .. } => *amplitude,
            // The maximum of a piecewise-linear function sits on a breakpoint.
            FlowProfile::PiecewiseLinear(points) => {
                points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) - mean
            }
        };
        if profile != FlowProfile::Zero && samples.iter().all(|s| s.abs() <= 1e-12) {
            return Err(Error::invalid("flow", "profile is constant on the grid; a nonzero zero-mean flow is required"));
        }
        Ok(ShearFlow { profile, samples, max_value })
    }

    pub fn zero(cs: &CrossSection) -> Self {
        ShearFlow { profile: FlowProfile::Zero, samples: vec![0.0; cs.n()], max_value: 0.0 }
    }

    pub fn profile(&self) -> &FlowProfile {
        &self.profile
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn is_zero(&self) -> bool {
        self.profile == FlowProfile::Zero
    }

    /// The flow `factor * q1`.
    pub fn scaled(&self, factor: f64) -> Self {
        if factor == 1.0 {
            return self.clone();
        }
        ShearFlow {
            profile: self.profile.scaled(factor),
            samples: self.samples.iter().map(|s| s * factor).collect(),
            max_value: self.max_value * factor,
        }
    }

    /// Re-samples the same profile on another grid.
    pub fn resample(&self, cs: &CrossSection) -> Result<Self> {
        ShearFlow::new(self.profile.clone(), cs)
    }
}

/// Maximum of `q1` over the closed cell.
pub fn flow_max(flow: &ShearFlow) -> f64 {
    flow.max_value()
}

/// Closed-form reaction term `f(u)`, not yet validated.
#[derive(Debug, Clone, PartialEq)]
pub enum Reaction {
    /// `mu * u * (1 - u)`.
    Logistic { mu: f64 },
    /// `sum_k coeffs[k] * u^k`.
    Polynomial { coeffs: Vec<f64> },
}

impl Reaction {
    pub fn logistic(mu: f64) -> Self {
        Reaction::Logistic { mu }
    }

    pub fn polynomial(coeffs: Vec<f64>) -> Self {
        Reaction::Polynomial { coeffs }
    }

    pub fn eval(&self, u: f64) -> f64 {
        match self {
            Reaction::Logistic { mu } => mu * u * (1.0 - u),
            Reaction::Polynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c),
        }
    }

    /// `f'(0)`.
    pub fn growth_rate(&self) -> f64 {
        match self {
            Reaction::Logistic { mu } => *mu,
            Reaction::Polynomial { coeffs } => coeffs.get(1).copied().unwrap_or(0.0),
        }
    }

    /// An upper bound for `|f'(u)|` on `[0, 1]`.
    pub fn lipschitz_bound(&self) -> f64 {
        match self {
            Reaction::Logistic { mu } => mu.abs(),
            Reaction::Polynomial { coeffs } => coeffs.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c.abs()).sum(),
        }
    }
}

impl fmt::Display for Reaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reaction::Logistic { mu } => write!(f, "logistic:mu={mu}"),
            Reaction::Polynomial { coeffs } => {
                let list: Vec<String> = coeffs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly:coeffs={}", list.join(","))
            }
        }
    }
}

impl FromStr for Reaction {
    type Err = Error;

    /// Accepts `logistic:mu=R` and `poly:coeffs=c0,c1,c2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, pairs) = parse_descriptor("reaction", s)?;
        match (name, pairs.as_slice()) {
            ("logistic", []) => Ok(Reaction::logistic(1.0)),
            ("logistic", [("mu", v)]) => Ok(Reaction::logistic(parse_real("reaction", v)?)),
            ("poly", [("coeffs", list)]) => {
                let coeffs = list.split(',').map(|c| parse_real("reaction", c.trim())).collect::<Result<Vec<_>>>()?;
                Ok(Reaction::polynomial(coeffs))
            }
            _ => Err(Error::invalid("reaction", format!("unrecognised reaction `{s}`"))),
        }
    }
}

/// Which KPP requirement a reaction violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// `f'(0) <= 0`.
    GrowthRate,
    /// `f(0) != 0` or `f(1) != 0`.
    Endpoint,
    /// `f(u) <= 0` for some interior `u`.
    NotPositive,
    /// `f(u) > f'(0) u`.
    AboveLinearBound,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KppViolation {
    pub kind: ViolationKind,
    pub u: f64,
    pub f_u: f64,
    /// `f'(0) * u`.
    pub bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KppCheck {
    Accepted,
    Violation(KppViolation),
}

/// Checks the KPP conditions on `n_samples + 1` equispaced points of `[0, 1]`.
pub fn kpp_check(reaction: &Reaction, n_samples: usize) -> KppCheck {
    let n_samples = n_samples.max(100);
    let rate = reaction.growth_rate();
    let violation = |kind, u: f64| KppCheck::Violation(KppViolation { kind, u, f_u: reaction.eval(u), bound: rate * u });
    if !(rate.is_finite() && rate > 0.0) {
        return violation(ViolationKind::GrowthRate, 0.0);
    }
    for u in [0.0, 1.0] {
        if reaction.eval(u).abs() > KPP_TOLERANCE {
            return violation(ViolationKind::Endpoint, u);
        }
    }
    for j in 1..n_samples {
        let u = j as f64 / n_samples as f64;
        let f_u = reaction.eval(u);
        if f_u <= 0.0 {
            return violation(ViolationKind::NotPositive, u);
        }
        if f_u > rate * u + KPP_TOLERANCE {
            return violation(ViolationKind::AboveLinearBound, u);
        }
    }
    KppCheck::Accepted
}

/// A reaction that passed [`kpp_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct KppReaction {
    reaction: Reaction,
}

impl KppReaction {
    pub fn new(reaction: Reaction) -> Result<Self> {
        match kpp_check(&reaction, DEFAULT_KPP_SAMPLES) {
            KppCheck::Accepted => Ok(KppReaction { reaction }),
            KppCheck::Violation(v) => Err(Error::invalid(
                "reaction",
                format!("{reaction} is not KPP: {:?} at u = {} (f(u) = {}, f'(0) u = {})", v.kind, v.u, v.f_u, v.bound),
            )),
        }
    }

    pub fn logistic(mu: f64) -> Result<Self> {
        KppReaction::new(Reaction::logistic(mu))
    }

    pub fn growth_rate(&self) -> f64 {
        self.reaction.growth_rate()
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.reaction.eval(u)
    }

    pub fn reaction(&self) -> &Reaction {
        &self.reaction
    }
}

/// Constant diagonal diffusion `diag(axial, transverse)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionSpec {
    axial: f64,
    transverse: f64,
}

impl DiffusionSpec {
    pub fn new(axial: f64, transverse: f64) -> Result<Self> {
        if !(axial.is_finite() && axial > 0.0) {
            return Err(Error::invalid("alpha", format!("axial diffusion must be positive, got {axial}")));
        }
        if !(transverse.is_finite() && transverse > 0.0) {
            return Err(Error::invalid("beta", format!("transverse diffusion must be positive, got {transverse}")));
        }
        Ok(DiffusionSpec { axial, transverse })
    }

    /// `d * Id`.
    pub fn isotropic(d: f64) -> Result<Self> {
        DiffusionSpec::new(d, d)
    }

    /// The matrix `A_b = diag(1, b)`.
    pub fn a_b(b: f64) -> Result<Self> {
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::invalid("b", format!("must be positive, got {b}")));
        }
        DiffusionSpec::new(1.0, b)
    }

    pub fn axial(&self) -> f64 {
        self.axial
    }

    pub fn transverse(&self) -> f64 {
        self.transverse
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub cross_section: CrossSection,
    pub diffusion: DiffusionSpec,
    pub flow: ShearFlow,
    pub reaction: KppReaction,
}

impl ProblemSpec {
    pub fn new(cross_section: CrossSection, diffusion: DiffusionSpec, flow: ShearFlow, reaction: KppReaction) -> Result<Self> {
        cross_section.check_len("flow", flow.samples().len())?;
        Ok(ProblemSpec { cross_section, diffusion, flow, reaction })
    }

    pub fn growth_rate(&self) -> f64 {
        self.reaction.growth_rate()
    }

    pub fn with_diffusion(&self, diffusion: DiffusionSpec) -> Self {
        ProblemSpec { diffusion, ..self.clone() }
    }

    pub fn with_flow(&self, flow: ShearFlow) -> Result<Self> {
        ProblemSpec::new(self.cross_section.clone(), self.diffusion, flow, self.reaction.clone())
    }

    /// The same problem on a grid of `n` cells.
    pub fn refined(&self, n: usize) -> Result<Self> {
        let cs = self.cross_section.with_cells(n)?;
        let flow = if self.flow.is_zero() { ShearFlow::zero(&cs) } else { self.flow.resample(&cs)? };
        ProblemSpec::new(cs, self.diffusion, flow, self.reaction.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cell_integrate, make_grid, BoundaryKind};
    use proptest::prelude::*;

    fn grid(n: usize) -> CrossSection {
        make_grid(BoundaryKind::CirclePeriodic, 1.0, n).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let cs = grid(64);
        let zeros = normalize_zero_mean(&[3.0; 64], &cs).unwrap();
        assert!(zeros.iter().all(|z| z.abs() < 1e-15));

        let cosine = cs.sample(|y| (2.0 * PI * y).cos());
        let same = normalize_zero_mean(&cosine, &cs).unwrap();
        let shifted = normalize_zero_mean(&cs.sample(|y| (2.0 * PI * y).cos() + 0.5), &cs).unwrap();
        for i in 0..64 {
            assert!((same[i] - cosine[i]).abs() < 1e-12);
            assert!((shifted[i] - cosine[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn kpp_check_examples() {
        assert_eq!(kpp_check(&Reaction::logistic(1.0), 10_000), KppCheck::Accepted);

        // u^2 (1 - u) = u^2 - u^3
        match kpp_check(&Reaction::polynomial(vec![0.0, 0.0, 1.0, -1.0]), 10_000) {
            KppCheck::Violation(v) => assert_eq!(v.kind, ViolationKind::GrowthRate),
            KppCheck::Accepted => panic!("u^2(1-u) accepted"),
        }

        // u (1 - u)(1 + 5u) = u + 4u^2 - 5u^3 exceeds u exactly on (0, 4/5).
        match kpp_check(&Reaction::polynomial(vec![0.0, 1.0, 4.0, -5.0]), 10_000) {
            KppCheck::Violation(v) => {
                assert_eq!(v.kind, ViolationKind::AboveLinearBound);
                assert!(v.u > 0.0 && v.u < 0.8);
                assert!(v.f_u > v.bound);
            }
            KppCheck::Accepted => panic!("accepted a non-KPP reaction"),
        }
    }

    #[test]
    fn kpp_check_endpoints_and_positivity() {
        // f(1) = 1 - 1 + 0.5 != 0
        let bad_end = Reaction::polynomial(vec![0.0, 1.0, -0.5]);
        assert!(matches!(kpp_check(&bad_end, 1000), KppCheck::Violation(KppViolation { kind: ViolationKind::Endpoint, .. })));
        assert!(KppReaction::new(bad_end).is_err());
        assert!(KppReaction::logistic(-1.0).is_err());
    }

    #[test]
    fn flow_max_examples() {
        let cs = grid(64);
        let cosine = ShearFlow::new(FlowProfile::cosine(6.0, 1), &cs).unwrap();
        assert_eq!(flow_max(&cosine), 6.0);
        assert_eq!(flow_max(&ShearFlow::zero(&cs)), 0.0);

        // Tent through (0,-1), (1/2, 2), (1,-1): mean 1/2, so the normalized max is 3/2.
        let tent = FlowProfile::PiecewiseLinear(vec![(0.0, -1.0), (0.5, 2.0), (1.0, -1.0)]);
        let flow = ShearFlow::new(tent, &cs).unwrap();
        assert!((flow_max(&flow) - 1.5).abs() < 1e-14);
        assert!(flow.samples().iter().all(|&s| s <= flow_max(&flow)));
    }

    #[test]
    fn flow_samples_have_zero_mean() {
        for kind in [BoundaryKind::CirclePeriodic, BoundaryKind::IntervalNeumann] {
            let cs = make_grid(kind, 2.0, 37).unwrap();
            for profile in [
                FlowProfile::cosine(3.0, 2),
                FlowProfile::PiecewiseLinear(vec![(0.0, 0.0), (0.3, 4.0), (2.0, 1.0)]),
            ] {
                let flow = ShearFlow::new(profile, &cs).unwrap();
                assert!(cell_integrate(&cs, flow.samples()).unwrap().abs() < 1e-12);
                assert!(flow_max(&flow) > 0.0);
            }
        }
    }

    #[test]
    fn rejects_unresolved_or_degenerate_flows() {
        let cs = grid(8);
        assert!(ShearFlow::new(FlowProfile::cosine(1.0, 4), &cs).is_err());
        assert!(ShearFlow::new(FlowProfile::cosine(-1.0, 1), &cs).is_err());
        let flat = FlowProfile::PiecewiseLinear(vec![(0.0, 2.0), (1.0, 2.0)]);
        assert!(ShearFlow::new(flat, &cs).is_err());
        let short = FlowProfile::PiecewiseLinear(vec![(0.0, 2.0), (0.5, 1.0)]);
        assert!(ShearFlow::new(short, &cs).is_err());
    }

    #[test]
    fn descriptors_parse_and_print() {
        let flow: FlowProfile = "cosine:amplitude=6:mode=1".parse().unwrap();
        assert_eq!(flow, FlowProfile::cosine(6.0, 1));
        assert_eq!(flow.to_string(), "cosine:amplitude=6:mode=1");
        assert_eq!("zero".parse::<FlowProfile>().unwrap(), FlowProfile::Zero);
        let pwl: FlowProfile = "pwl:points=0,-1;0.5,2;1,-1".parse().unwrap();
        assert_eq!(pwl.to_string().parse::<FlowProfile>().unwrap(), pwl);
        assert!("cosine:mode=2".parse::<FlowProfile>().is_err());
        assert!("swirl".parse::<FlowProfile>().is_err());

        let r: Reaction = "logistic:mu=2.5".parse().unwrap();
        assert_eq!(r, Reaction::logistic(2.5));
        let p: Reaction = "poly:coeffs=0,1,-1".parse().unwrap();
        assert_eq!(p.to_string(), "poly:coeffs=0,1,-1");
        assert!("logistic:nu=1".parse::<Reaction>().is_err());
    }

    #[test]
    fn breakpoint_files() {
        let text = "# y q\n0 -1\n0.5, 2\n1 -1\n";
        let p = FlowProfile::parse_breakpoints(text).unwrap();
        assert_eq!(p, FlowProfile::PiecewiseLinear(vec![(0.0, -1.0), (0.5, 2.0), (1.0, -1.0)]));
        assert!(FlowProfile::parse_breakpoints("0 1 2\n").is_err());
    }

    #[test]
    fn diffusion_validation() {
        assert!(DiffusionSpec::new(0.0, 1.0).is_err());
        assert!(DiffusionSpec::new(1.0, -1.0).is_err());
        let ab = DiffusionSpec::a_b(0.3).unwrap();
        assert_eq!((ab.axial(), ab.transverse()), (1.0, 0.3));
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(values in proptest::collection::vec(-10.0f64..10.0, 16)) {
            let cs = grid(16);
            let once = normalize_zero_mean(&values, &cs).unwrap();
            let twice = normalize_zero_mean(&once, &cs).unwrap();
            for (a, b) in once.iter().zip(&twice) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn nonzero_profiles_have_positive_max(values in proptest::collection::vec(-5.0f64..5.0, 3..8)) {
            let cs = grid(64);
            let m = values.len();
            let points: Vec<(f64, f64)> = values.iter().enumerate().map(|(i, &v)| (i as f64 / (m - 1) as f64, v)).collect();
            if let Ok(flow) = ShearFlow::new(FlowProfile::PiecewiseLinear(points), &cs) {
                prop_assert!(flow_max(&flow) > 0.0);
            }
        }

        #[test]
        fn logistic_is_always_kpp(mu in 1e-3f64..1e3) {
            prop_assert_eq!(kpp_check(&Reaction::logistic(mu), 1000), KppCheck::Accepted);
        }
    }
}
