//! Command-line front end: config parsing, subcommands and report files.

mod config;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::{
    parse_config, ClampAxis, ExperimentConfig, ExperimentSection, FamilyChoice, IntegrandSection, Mode,
    SolverSection, StructuralSection,
};

use crate::bound::{
    clamp_sweep, refinement_sweep, sweep_csv, sweep_svg, samples_csv, Ball, BoundProblem, SweepAxis, SweepResult,
};
use crate::error::{Error, Result};
use crate::integrand::{HProfile, RegularizationClamp};
use crate::solver::{
    cell_gradients, cell_gradients_csv, euler_residual, minimize, solver_spec, Grid, DEFAULT_SLOW_GROWTH_LOWER,
    DEFAULT_SLOW_GROWTH_UPPER,
};
use crate::structural::{
    admissible_window_search, exponents_with, lemma_suite_with, structural_report, SamplingPlan,
};

/// Cap on the quadrature-based lemma checks per run.
pub const STABILIZED_SAMPLES: usize = 4096;

/// Default output directory.
pub const DEFAULT_OUT: &str = "gradbound-out";

#[derive(Debug, Parser)]
#[command(
    name = "gradbound",
    version,
    about = "Structural checks, discrete minimizers and sup-bound experiments for integrals of g(x, |Du|)",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (INI); defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Directory for all output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Suppress the report on standard output.
    #[arg(long, global = true)]
    quiet: bool,
    /// Worker threads for parallel loops.
    #[arg(long, global = true, value_name = "W")]
    workers: Option<usize>,
    /// Seed for sampling and initial noise.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    /// Number of random samples.
    #[arg(long, global = true, value_name = "K")]
    samples: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Certify the structural conditions and print the admissible window.
    Check,
    /// Solve the Dirichlet problem on the finest mesh and dump the field.
    Solve,
    /// Evaluate both sides of the sup bound on the finest mesh.
    VerifyBound,
    /// Evaluate the bound on every listed mesh.
    SweepMesh,
    /// Evaluate the bound for every listed clamp constant.
    SweepClamp,
    /// Run the profile lemma suite.
    Lemmas,
}

impl Command {
    fn mode(&self) -> Mode {
        match self {
            Command::Check => Mode::Check,
            Command::Solve => Mode::Solve,
            Command::VerifyBound => Mode::VerifyBound,
            Command::SweepMesh => Mode::SweepMesh,
            Command::SweepClamp => Mode::SweepClamp,
            Command::Lemmas => Mode::Lemmas,
        }
    }
}

/// Exit code for success.
pub const EXIT_OK: i32 = 0;
/// Exit code when a certification or solve fails.
pub const EXIT_FAILED: i32 = 1;
/// Exit code for usage and config errors.
pub const EXIT_USAGE: i32 = 2;

struct Ctx {
    cfg: ExperimentConfig,
    out: PathBuf,
    quiet: bool,
    seed: u64,
    samples: usize,
    report: String,
}

impl Ctx {
    fn write(&self, name: &str, contents: &str) -> Result<()> {
        let path = self.out.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::Io { path, source: e })
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.report.push_str(s.as_ref());
        self.report.push('\n');
    }
}

fn is_usage_error(e: &Error) -> bool {
    matches!(e, Error::Config { .. } | Error::InvalidInput(_) | Error::Parse(_))
}

/// Runs the command line and returns the exit code; diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    let mode = cli.command.mode();
    let cfg = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    if let Some(m) = cfg.experiment.mode {
        if m != mode {
            eprintln!("error: the config sets mode = {} but the subcommand is {}", m.name(), mode.name());
            return EXIT_USAGE;
        }
    }
    if cli.workers == Some(0) {
        eprintln!("error: --workers must be at least 1");
        return EXIT_USAGE;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| cfg.experiment.output.clone())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Err(e) = std::fs::create_dir_all(&out) {
        eprintln!("error: cannot create output directory {}: {e}", out.display());
        return EXIT_USAGE;
    }
    let mut ctx = Ctx {
        seed: cli.seed.unwrap_or(cfg.experiment.seed),
        samples: cli.samples.unwrap_or(cfg.experiment.samples),
        cfg,
        out,
        quiet: cli.quiet,
        report: String::new(),
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.workers.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return EXIT_FAILED;
        }
    };
    let result = pool.install(|| match mode {
        Mode::Check => check(&mut ctx),
        Mode::Solve => solve(&mut ctx),
        Mode::VerifyBound => verify_bound(&mut ctx),
        Mode::SweepMesh => sweep_mesh(&mut ctx),
        Mode::SweepClamp => sweep_clamp(&mut ctx),
        Mode::Lemmas => lemmas(&mut ctx),
    });
    if !ctx.quiet && !ctx.report.is_empty() {
        print!("{}", ctx.report);
    }
    match result {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_FAILED,
        Err(e) => {
            eprintln!("error: {e}");
            if is_usage_error(&e) {
                EXIT_USAGE
            } else {
                EXIT_FAILED
            }
        }
    }
}

fn load_config(path: Option<&Path>) -> std::result::Result<ExperimentConfig, String> {
    let (text, name) = match path {
        Some(p) => (
            std::fs::read_to_string(p).map_err(|e| format!("cannot read {}: {e}", p.display()))?,
            p.display().to_string(),
        ),
        None => (String::new(), "<defaults>".into()),
    };
    parse_config(&text).map_err(|e| match e {
        Error::Config { line, msg } => format!("{name}:{line}: {msg}"),
        other => format!("{name}: {other}"),
    })
}

fn check(ctx: &mut Ctx) -> Result<bool> {
    let spec = ctx.cfg.structural_integrand()?;
    let h = HProfile::paired_with(&spec)?;
    let n = ctx.cfg.structural.n;
    let window = admissible_window_search(&spec, &h, n, &SamplingPlan::coarse(ctx.seed))?;
    ctx.line(format!("integrand: {} (n = {n})", spec.label()));
    ctx.line(format!("profile: {}", h.name()));
    ctx.line(format!("window: {window}"));
    let s = &ctx.cfg.structural;
    let (beta, theta) = match (s.beta.or(window.default_beta), s.theta.or(window.default_theta)) {
        (Some(b), Some(t)) => (b, t),
        _ => {
            ctx.line(format!(
                "structural verdict: infeasible: {}",
                window.failure.clone().unwrap_or_else(|| "no admissible parameters".into())
            ));
            ctx.write("check_report.txt", &ctx.report)?;
            return Ok(false);
        }
    };
    let params = ctx.cfg.structural_params(theta, beta);
    let mut plan = SamplingPlan::default().with_seed(ctx.seed);
    plan.quasi_random = ctx.samples.min(1 << 16);
    let report = structural_report(&spec, &h, &params, &plan, ctx.cfg.structural.epsilon)?;
    ctx.line(report.to_string());
    let ok = report.certified() && window.feasible;
    if !window.feasible {
        ctx.line(format!(
            "structural verdict: infeasible: {}",
            window.failure.clone().unwrap_or_default()
        ));
    }
    ctx.write("assumptions.csv", &report.assumptions.to_csv())?;
    ctx.write("check_report.txt", &ctx.report)?;
    Ok(ok)
}

fn solve(ctx: &mut Ctx) -> Result<bool> {
    let c = ctx.cfg.clone();
    let spec = solver_spec(&c.solver_integrand()?, c.clamp()?)?;
    let cells = *c.solver.cells.last().expect("non-empty cells");
    let grid = Grid::new(c.solver.box_lo, c.solver.box_side, cells, c.solver.components)?;
    let mut opts = c.solver.options.clone();
    opts.seed = ctx.seed;
    let sol = minimize(&spec, &grid, &c.solver.datum, &opts)?;
    let residual = euler_residual(&spec, &grid, &sol.field)?;
    let du = cell_gradients(&grid, &sol.field);
    ctx.line(format!("integrand: {}", spec.label()));
    ctx.line(format!("datum: {}, grid: {cells} x {cells} cells", c.solver.datum));
    ctx.line(sol.to_string());
    ctx.line(format!("euler residual: {residual:.6e}"));
    ctx.write("field.csv", &sol.field.to_csv())?;
    ctx.write("cell_gradients.csv", &cell_gradients_csv(&grid, &du))?;
    ctx.write("solve_report.txt", &ctx.report)?;
    Ok(sol.converged())
}

fn bound_problem(ctx: &Ctx) -> Result<BoundProblem> {
    let c = &ctx.cfg;
    let s = &c.structural;
    if s.n != 2 {
        return Err(Error::InvalidInput(format!(
            "bound experiments run in the plane; set n = 2 in [structural], got n = {}",
            s.n
        )));
    }
    let beta = s.beta.unwrap_or(1.5 / s.n as f64);
    let theta = s.theta.unwrap_or(1.0);
    let exps = exponents_with(s.n, theta, beta, s.epsilon, s.two_star_plane);
    let spec = c.solver_integrand()?;
    let mut p = BoundProblem::new(spec, c.solver.datum.clone(), c.solver.components, exps)?;
    p.clamp = c.clamp()?;
    p.lo = c.solver.box_lo;
    p.side = c.solver.box_side;
    p.cells = *c.solver.cells.last().expect("non-empty cells");
    p.options = c.solver.options.clone();
    p.options.seed = ctx.seed;
    let grid = p.grid(p.cells)?;
    let d = Ball::default_for(&grid);
    let e = &c.experiment;
    p.ball = Some(Ball::new(
        e.center.unwrap_or(d.center),
        e.rho.unwrap_or(d.rho),
        e.radius.unwrap_or(d.radius),
    )?);
    Ok(p)
}

fn describe_problem(ctx: &mut Ctx, p: &BoundProblem) {
    let e = &p.exps;
    let b = p.ball.expect("ball set");
    ctx.line(format!("integrand: {}", p.spec.label()));
    ctx.line(format!("datum: {}", p.datum));
    ctx.line(format!(
        "exponents: tau = {:.6}, 2* = {}, lhs = {:.6}, rhs = {:.6}",
        e.tau, e.two_star, e.lhs_exponent, e.rhs_exponent
    ));
    ctx.line(format!("balls: center {:?}, rho = {}, R = {}", b.center, b.rho, b.radius));
}

fn verify_bound(ctx: &mut Ctx) -> Result<bool> {
    let p = bound_problem(ctx)?;
    describe_problem(ctx, &p);
    let spec = solver_spec(&p.spec, p.clamp)?;
    let point = p.solve_point(&spec, p.cells)?;
    let (c1, c2) = point.sample.chain_constants();
    ctx.line(point.sample.to_string());
    ctx.line(format!("chain constants: lhs/V = {c1:.6e}, V/rhs = {c2:.6e}"));
    ctx.write("bound.csv", &samples_csv([&point.sample]))?;
    ctx.write("bound_report.txt", &ctx.report)?;
    Ok(true)
}

fn write_sweep(ctx: &mut Ctx, stem: &str, r: &SweepResult) -> Result<bool> {
    ctx.line(r.to_string());
    if let Some(s) = r.inactive_spread().filter(|_| r.axis != SweepAxis::MeshWidth) {
        ctx.line(format!("spread over inactive clamps = {s:.6}"));
    }
    ctx.write(&format!("{stem}.csv"), &sweep_csv(r))?;
    ctx.write(&format!("{stem}.svg"), &sweep_svg(r))?;
    ctx.write(&format!("{stem}_report.txt"), &ctx.report)?;
    Ok(r.complete())
}

fn sweep_mesh(ctx: &mut Ctx) -> Result<bool> {
    let p = bound_problem(ctx)?;
    describe_problem(ctx, &p);
    let r = refinement_sweep(&p, &ctx.cfg.solver.cells)?;
    write_sweep(ctx, "sweep_mesh", &r)
}

fn sweep_clamp(ctx: &mut Ctx) -> Result<bool> {
    let p = bound_problem(ctx)?;
    describe_problem(ctx, &p);
    let s = &ctx.cfg.solver;
    let (axis, clamps) = match s.clamp_sweep {
        ClampAxis::Upper => {
            let n = s.clamp_lower.unwrap_or(DEFAULT_SLOW_GROWTH_LOWER);
            let c = s.clamp_values.iter().map(|&m| RegularizationClamp::new(n, m)).collect::<Result<Vec<_>>>()?;
            (SweepAxis::ClampUpper, c)
        }
        ClampAxis::Lower => {
            let m = s.clamp_upper.unwrap_or(DEFAULT_SLOW_GROWTH_UPPER);
            let c = s.clamp_values.iter().map(|&n| RegularizationClamp::new(n, m)).collect::<Result<Vec<_>>>()?;
            (SweepAxis::ClampLower, c)
        }
    };
    let r = clamp_sweep(&p, &clamps, axis)?;
    write_sweep(ctx, "sweep_clamp", &r)
}

fn lemmas(ctx: &mut Ctx) -> Result<bool> {
    let spec = ctx.cfg.structural_integrand()?;
    let h = HProfile::paired_with(&spec)?;
    let s = ctx.cfg.structural.clone();
    let beta = match s.beta {
        Some(b) => b,
        None => {
            let w = admissible_window_search(&spec, &h, s.n, &SamplingPlan::coarse(ctx.seed))?;
            w.default_beta.ok_or_else(|| {
                Error::Infeasible(format!("no default beta: {}", w.failure.unwrap_or_default()))
            })?
        }
    };
    let params = ctx.cfg.structural_params(1.0, beta);
    let report = lemma_suite_with(&spec, &h, &params, ctx.seed, ctx.samples, ctx.samples.min(STABILIZED_SAMPLES))?;
    ctx.line(format!("integrand: {} (n = {})", spec.label(), s.n));
    ctx.line(report.to_string());
    ctx.write("lemmas.csv", &report.to_csv())?;
    ctx.write("lemmas_report.txt", &ctx.report)?;
    Ok(report.passed())
}
