use std::io::Write;
use std::path::Path;

use kpp_speedlab::asymptotics::{
    find_nonproportional_counterexample_with, find_proportional_counterexample_with, geometric_grid,
    is_strictly_decreasing, scan_speed_vs_b_with, Confirmation, SearchOptions, CONFIRM_CELLS, SEARCH_CELLS,
};
use kpp_speedlab::eigensolver::{EigenOptions, ShiftStrategy, MAX_ITERATIONS};
use kpp_speedlab::frontsim::{cross_validate, trajectory_csv, SimConfig};
use kpp_speedlab::speed::{minimal_speed_with, SpeedOptions};
use kpp_speedlab::verify::{criteria, run_criterion, Suite, VerifyOptions};
use kpp_speedlab::{
    make_grid, BoundaryKind, CrossSection, DiffusionSpec, FlowProfile, KppReaction, ProblemSpec, Reaction, ShearFlow,
};

use crate::config::{ConfigError, RunConfig};

pub const THREADS_ENV: &str = "KPP_SPEEDLAB_THREADS";

const SPEED_CELLS: usize = 256;
const SIMULATE_CELLS: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] kpp_speedlab::Error),
    #[error("invalid {field}: {message}")]
    Invalid { field: &'static str, message: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    /// A search finished without a witness confirmed on the fine grid.
    #[error("counterexample not verified: {0}")]
    NotVerified(String),
    #[error("every scan row failed; first error: {0}")]
    AllRowsFailed(String),
    #[error("{failed} acceptance criteria failed")]
    VerifyFailed { failed: usize },
}

impl CliError {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        CliError::Io { path: path.as_ref().display().to_string(), source }
    }

    fn invalid(field: &'static str, message: impl Into<String>) -> Self {
        CliError::Invalid { field, message: message.into() }
    }

    pub fn exit_code(&self) -> u8 {
        use kpp_speedlab::Error as E;
        match self {
            CliError::Config(_) | CliError::Invalid { .. } | CliError::Io { .. } => 2,
            CliError::Core(E::Validation { .. }) => 2,
            CliError::Core(E::NonConvergence { .. } | E::Bracket(_) | E::SearchBudget { .. }) => 3,
            CliError::Core(E::Premise(_)) => 4,
            CliError::Core(E::DomainOverrun { .. }) => 5,
            CliError::NotVerified(_) | CliError::AllRowsFailed(_) => 3,
            CliError::VerifyFailed { .. } => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Speed,
    Scan,
    Counterexample,
    Simulate,
    Verify,
}

/// Caps the worker pool from the environment.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = match raw.trim().parse() {
        Ok(t) if t > 0 => t,
        _ => return Err(CliError::invalid("KPP_SPEEDLAB_THREADS", format!("expected a positive integer, got `{raw}`"))),
    };
    // Fails only if a pool already exists, in which case it is kept.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

pub fn dispatch(kind: Kind, config: &RunConfig, fault: bool) -> Result<(), CliError> {
    match kind {
        Kind::Speed => speed(config),
        Kind::Scan => scan(config),
        Kind::Counterexample => counterexample(config),
        Kind::Simulate => simulate(config),
        Kind::Verify => verify(config, fault),
    }
}

fn cross_section(config: &RunConfig, default_n: usize) -> Result<CrossSection, CliError> {
    Ok(make_grid(
        config.bc.unwrap_or(BoundaryKind::CirclePeriodic),
        config.length.unwrap_or(1.0),
        config.n.unwrap_or(default_n),
    )?)
}

fn flow(config: &RunConfig, cs: &CrossSection) -> Result<ShearFlow, CliError> {
    let text = config.flow.as_deref().unwrap_or("zero");
    let profile = match text.strip_prefix("pwl:file=") {
        Some(path) => {
            let body = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            FlowProfile::parse_breakpoints(&body)?
        }
        None => text.parse()?,
    };
    Ok(match profile {
        FlowProfile::Zero => ShearFlow::zero(cs),
        profile => ShearFlow::new(profile, cs)?,
    })
}

fn reaction(config: &RunConfig) -> Result<KppReaction, CliError> {
    match (&config.reaction, config.fprime0) {
        (Some(text), fprime0) => {
            let r: Reaction = text.parse()?;
            if let Some(fp) = fprime0 {
                if fp != r.growth_rate() {
                    return Err(CliError::invalid(
                        "fprime0",
                        format!("{fp} disagrees with the reaction's f'(0) = {}", r.growth_rate()),
                    ));
                }
            }
            Ok(KppReaction::new(r)?)
        }
        (None, fprime0) => Ok(KppReaction::logistic(fprime0.unwrap_or(1.0))?),
    }
}

fn problem(config: &RunConfig, default_n: usize) -> Result<ProblemSpec, CliError> {
    let cs = cross_section(config, default_n)?;
    let flow = flow(config, &cs)?;
    let diffusion = DiffusionSpec::new(config.alpha.unwrap_or(1.0), config.beta.unwrap_or(1.0))?;
    Ok(ProblemSpec::new(cs, diffusion, flow, reaction(config)?)?)
}

fn speed_options(config: &RunConfig) -> SpeedOptions {
    SpeedOptions {
        eigen: EigenOptions { max_iterations: config.max_iterations.unwrap_or(MAX_ITERATIONS), ..EigenOptions::default() },
        ..SpeedOptions::default()
    }
}

fn write_file(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn speed(config: &RunConfig) -> Result<(), CliError> {
    let spec = problem(config, SPEED_CELLS)?;
    let r = minimal_speed_with(&spec, &speed_options(config))?;
    let n = spec.cross_section.n();
    println!("c_star={:.12} lambda_star={:.12} k={:.12} n={n}", r.c_star, r.lambda_star, r.k_at_star);
    if let Some(path) = &config.csv {
        write_file(path, &format!("c_star,lambda_star,k,n\n{},{},{},{n}\n", r.c_star, r.lambda_star, r.k_at_star))?;
    }
    Ok(())
}

fn scan(config: &RunConfig) -> Result<(), CliError> {
    match config.param.as_deref() {
        None | Some("b") => {}
        Some(other) => return Err(CliError::invalid("param", format!("only `b` can be scanned, got `{other}`"))),
    }
    let cs = cross_section(config, SPEED_CELLS)?;
    let flow = flow(config, &cs)?;
    let reaction = reaction(config)?;
    let grid = geometric_grid(config.from.unwrap_or(1e-3), config.to.unwrap_or(1e3), config.points.unwrap_or(25))?;
    let rows = scan_speed_vs_b_with(&flow, &reaction, &cs, &grid, &speed_options(config));

    let mut csv = String::from("b,c_star,lambda_star,status\n");
    let mut first_error = None;
    for row in &rows {
        match &row.result {
            Ok(r) => csv.push_str(&format!("{},{},{},ok\n", row.b, r.c_star, r.lambda_star)),
            Err(e) => {
                first_error.get_or_insert_with(|| e.to_string());
                csv.push_str(&format!("{},,,failed\n", row.b));
            }
        }
    }
    let ok = rows.iter().filter(|r| r.result.is_ok()).count();
    if ok == 0 {
        return Err(CliError::AllRowsFailed(first_error.unwrap_or_default()));
    }
    let trend = if is_strictly_decreasing(&rows) { "strictly_decreasing" } else { "not_strictly_decreasing" };
    match &config.out {
        Some(path) => {
            write_file(path, &csv)?;
            println!("rows={} ok={ok} failed={} trend={trend} out={path}", rows.len(), rows.len() - ok);
        }
        None => print!("{csv}"),
    }
    Ok(())
}

fn confirmation_line(c: &Option<Confirmation>) -> String {
    match c {
        Some(c) => format!(
            "confirm_n={} speed_small_diffusion={:.12} speed_large_diffusion={:.12} holds={}",
            c.cells, c.speed_small_diffusion, c.speed_large_diffusion, c.holds
        ),
        None => "confirm_n=none".to_string(),
    }
}

fn trace_csv(trace: &[(f64, f64)], first_phase: usize, phases: [&str; 2]) -> String {
    let mut out = String::from("phase,parameter,c_star\n");
    for (i, (p, c)) in trace.iter().enumerate() {
        out.push_str(&format!("{},{p},{c}\n", phases[usize::from(i >= first_phase)]));
    }
    out
}

fn counterexample(config: &RunConfig) -> Result<(), CliError> {
    let cs = cross_section(config, SEARCH_CELLS)?;
    let flow = flow(config, &cs)?;
    let reaction = reaction(config)?;
    let opts = SearchOptions {
        confirm_cells: Some(config.confirm_n.unwrap_or(CONFIRM_CELLS)),
        speed: speed_options(config),
        ..SearchOptions::default()
    };
    match config.mode.as_deref().unwrap_or("proportional") {
        "proportional" => {
            let r = find_proportional_counterexample_with(&flow, &reaction, &cs, config.delta, &opts)?;
            println!("mode=proportional delta={} n={}", r.delta, r.cells);
            println!("M1={} epsilon1={}", r.m1, r.epsilon1);
            println!("speed_small_diffusion={:.12}", r.speed_small_diffusion);
            println!("speed_large_diffusion={:.12}", r.speed_large_diffusion);
            println!("margin={:.12}{}", r.margin, if r.margin > 0.0 { " (margin>0)" } else { "" });
            println!("{}", confirmation_line(&r.confirmation));
            println!("verified={}", r.verified());
            if let Some(path) = &config.csv {
                write_file(path, &trace_csv(&r.trace, r.first_phase, ["large_diffusion", "small_diffusion"]))?;
            }
            if !r.verified() {
                return Err(CliError::NotVerified(confirmation_line(&r.confirmation)));
            }
        }
        "nonproportional" => {
            let r = find_nonproportional_counterexample_with(&flow, &reaction, &cs, config.delta, &opts)?;
            println!("mode=nonproportional delta={} n={}", r.delta, r.cells);
            println!("epsilon={} M={}", r.epsilon, r.m);
            println!("c_eps={:.12} c_M={:.12}", r.c_eps, r.c_m);
            println!("margin={:.12}{}", r.margin(), if r.c_eps > r.c_m { " (c_eps > c_M)" } else { "" });
            println!("{}", confirmation_line(&r.confirmation));
            println!("verified={}", r.verified());
            if let Some(path) = &config.csv {
                write_file(path, &trace_csv(&r.trace, r.first_phase, ["epsilon", "M"]))?;
            }
            if !r.verified() {
                return Err(CliError::NotVerified(confirmation_line(&r.confirmation)));
            }
        }
        other => {
            return Err(CliError::invalid("mode", format!("expected `proportional` or `nonproportional`, got `{other}`")))
        }
    }
    Ok(())
}

fn simulate(config: &RunConfig) -> Result<(), CliError> {
    let spec = problem(config, SIMULATE_CELLS)?;
    let defaults = SimConfig::default();
    let sim = SimConfig {
        strip_length: config.strip.unwrap_or(defaults.strip_length),
        nx: config.nx.unwrap_or(defaults.nx),
        t_end: config.tend.unwrap_or(defaults.t_end),
        ..defaults
    };
    let cv = cross_validate(&spec, &sim)?;
    let finest = cv.refined.as_ref().unwrap_or(&cv.run);
    println!(
        "measured_speed={:.6} variational_c={:.6} gap_pct={:.3}",
        cv.measured_speed(),
        cv.variational_c,
        cv.gap_pct()
    );
    println!(
        "fit_residual={:.3e} dt={:.3e} nx={} refined={} bound_violation={:.1e}",
        finest.fit_residual,
        finest.dt_used,
        if cv.refined.is_some() { sim.nx * 2 } else { sim.nx },
        cv.refined.is_some(),
        cv.bound_violation()
    );
    if let Some(path) = &config.traj {
        write_file(path, &trajectory_csv(finest))?;
    }
    Ok(())
}

fn verify(config: &RunConfig, fault: bool) -> Result<(), CliError> {
    let suite: Suite = config.suite.as_deref().unwrap_or("quick").parse()?;
    let opts = VerifyOptions {
        suite,
        shift: if fault { ShiftStrategy::BrokenMidSpectrum } else { ShiftStrategy::CollatzWielandt },
    };
    let mut failed = 0;
    let rows = criteria(suite);
    for c in &rows {
        let row = run_criterion(*c, &opts);
        failed += usize::from(!row.passed());
        println!("{row}");
        std::io::stdout().flush().ok();
    }
    println!("{}/{} criteria passed", rows.len() - failed, rows.len());
    if failed > 0 {
        return Err(CliError::VerifyFailed { failed });
    }
    Ok(())
}
