//! Command-line front end: renders, center lists, orbit probes and theorem suites.

mod literal;

use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;
use tanpq::centers::{period2_centers, search_centers, write_centers_csv, CenterError, MAX_ORDER};
use tanpq::lab::{run_suite, LabError, SuiteConfig, DEFAULT_SEED, SUITES};
use tanpq::orbit::{iterate_orbit, OrbitBudget, OrbitOutcome};
use tanpq::render::{
    render_dynamical_plane, render_parameter_plane, with_threads, write_grid_csv, write_image, CellClass,
    ClassGrid, Colormap, RenderError, Window,
};
use tanpq::{FamilyParams, KernelError};
use thiserror::Error;

pub use literal::parse_complex;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "TANPQ_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error("verification failed")]
    Failed,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } => 2,
            CliError::Failed => 3,
            CliError::Inconclusive(_) => 4,
        }
    }
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> CliError {
    let context = context.into();
    move |source| CliError::Io { context, source }
}

fn render_err(context: &str, e: RenderError) -> CliError {
    match e {
        RenderError::Io(source) => CliError::Io {
            context: context.into(),
            source,
        },
        other => CliError::Usage(other.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "tanpq", version, about = "Parameter and dynamical planes of λ·tan^p(z^q)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Render the λ plane classified by the fate of the free asymptotic value.
    RenderParam(RenderParamArgs),
    /// Render the dynamical plane of one map.
    RenderDyn(RenderDynArgs),
    /// List virtual centers as CSV.
    Centers(CentersArgs),
    /// Print a JSON report on the orbit of the free asymptotic value.
    Probe(ProbeArgs),
    /// Run theorem suites and write JSON certificates.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[arg(long)]
    pub p: u32,
    #[arg(long)]
    pub q: u32,
}

impl FamilyArgs {
    fn params(&self) -> Result<FamilyParams, CliError> {
        FamilyParams::new(self.p, self.q).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long, default_value_t = 2000)]
    pub max_iter: u32,
    #[arg(long, default_value_t = 500)]
    pub warmup: u32,
    #[arg(long, default_value_t = 64)]
    pub max_period: u32,
}

impl BudgetArgs {
    fn budget(&self) -> Result<OrbitBudget, CliError> {
        let budget = OrbitBudget {
            max_iter: self.max_iter,
            warmup: self.warmup,
            max_period: self.max_period,
            ..OrbitBudget::default()
        };
        budget.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(budget)
    }
}

#[derive(Debug, Args)]
pub struct WindowArgs {
    /// Window center, `a+bi`.
    #[arg(long, value_parser = parse_complex, default_value = "0+0i", allow_hyphen_values = true)]
    pub center: Complex64,
    #[arg(long, default_value_t = 8.0)]
    pub width: f64,
    /// Pixels per side.
    #[arg(long, default_value_t = 800)]
    pub res: usize,
}

impl WindowArgs {
    fn window(&self) -> Result<Window, CliError> {
        Window::square(self.center, self.width, self.res).map_err(|e| CliError::Usage(e.to_string()))
    }
}

#[derive(Debug, Args)]
pub struct ThreadArgs {
    /// Worker threads; falls back to TANPQ_THREADS, then to the hardware count.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl ThreadArgs {
    fn count(&self) -> Result<usize, CliError> {
        if let Some(n) = self.threads {
            return positive_threads(n);
        }
        match std::env::var(THREADS_ENV) {
            Ok(v) => {
                let n = v
                    .trim()
                    .parse()
                    .map_err(|_| CliError::Usage(format!("{THREADS_ENV}={v:?} is not a thread count")))?;
                positive_threads(n)
            }
            Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
        }
    }
}

fn positive_threads(n: usize) -> Result<usize, CliError> {
    if n == 0 {
        Err(CliError::Usage("thread count must be positive".into()))
    } else {
        Ok(n)
    }
}

#[derive(Debug, Args)]
pub struct RenderParamArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// PPM output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional per-cell CSV dump.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderDynArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[command(flatten)]
    pub window: WindowArgs,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CentersArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Order of the virtual cycle, 2 to 5.
    #[arg(long)]
    pub order: u32,
    /// Lowest pole index for order 2.
    #[arg(long, default_value_t = -2, allow_hyphen_values = true)]
    pub m_min: i64,
    /// Highest pole index for order 2.
    #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
    pub m_max: i64,
    /// Seed window for orders 3 to 5: one Newton seed per cell.
    #[arg(long, value_parser = parse_complex, default_value = "0+0i", allow_hyphen_values = true)]
    pub center: Complex64,
    #[arg(long, default_value_t = 8.0)]
    pub width: f64,
    #[arg(long, default_value_t = 16)]
    pub seeds: usize,
    #[command(flatten)]
    pub threads: ThreadArgs,
    /// CSV output path; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub lambda: Complex64,
    #[command(flatten)]
    pub budget: BudgetArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Comma-separated suite names, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Directory for certificates and images.
    #[arg(long, default_value = "certificates")]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Resolution of the period-two boundedness render.
    #[arg(long, default_value_t = 800)]
    pub s2_res: usize,
    #[command(flatten)]
    pub budget: BudgetArgs,
    #[command(flatten)]
    pub threads: ThreadArgs,
}

/// Parses `argv` (program name first). Help and version requests come back as
/// `Err` with exit code 0 in the clap error.
pub fn parse_args<I, T>(argv: I) -> Result<Cli, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    if let Command::Centers(args) = &cli.command {
        if !(2..=MAX_ORDER).contains(&args.order) {
            return Err(clap::Error::raw(
                clap::error::ErrorKind::ValueValidation,
                format!("order {} is outside the supported range 2..={MAX_ORDER}\n", args.order),
            ));
        }
    }
    Ok(cli)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::RenderParam(args) => render_param(args),
        Command::RenderDyn(args) => render_dyn(args),
        Command::Centers(args) => centers(args),
        Command::Probe(args) => probe(args),
        Command::Verify(args) => verify(args),
    }
}

fn write_outputs<C: CellClass>(grid: &ClassGrid<C>, out: &Path, csv: Option<&Path>) -> Result<(), CliError> {
    let file = File::create(out).map_err(io_err(format!("creating {}", out.display())))?;
    write_image(grid, &Colormap::default(), file).map_err(|e| render_err(&format!("writing {}", out.display()), e))?;
    if let Some(csv) = csv {
        let file = File::create(csv).map_err(io_err(format!("creating {}", csv.display())))?;
        write_grid_csv(grid, file).map_err(|e| render_err(&format!("writing {}", csv.display()), e))?;
    }
    Ok(())
}

fn render_param(args: RenderParamArgs) -> Result<(), CliError> {
    let params = args.family.params()?;
    let window = args.window.window()?;
    let budget = args.budget.budget()?;
    let threads = args.threads.count()?;
    let start = Instant::now();
    let grid = with_threads(threads, || render_parameter_plane(params, &window, &budget))
        .map_err(|e| render_err("thread pool", e))?;
    write_outputs(&grid, &args.out, args.csv.as_deref())?;
    eprintln!(
        "render-param: wrote {} ({}x{}, {} threads, {:.2?})",
        args.out.display(),
        window.px_w,
        window.px_h,
        threads,
        start.elapsed()
    );
    Ok(())
}

fn render_dyn(args: RenderDynArgs) -> Result<(), CliError> {
    let params = args.family.params()?;
    let window = args.window.window()?;
    let budget = args.budget.budget()?;
    let threads = args.threads.count()?;
    let start = Instant::now();
    let grid = with_threads(threads, || render_dynamical_plane(params, args.lambda, &window, &budget))
        .map_err(|e| render_err("thread pool", e))?;
    write_outputs(&grid, &args.out, args.csv.as_deref())?;
    eprintln!(
        "render-dyn: wrote {} ({}x{}, {} threads, {:.2?})",
        args.out.display(),
        window.px_w,
        window.px_h,
        threads,
        start.elapsed()
    );
    Ok(())
}

fn centers(args: CentersArgs) -> Result<(), CliError> {
    let params = args.family.params()?;
    let list = if args.order == 2 {
        if args.m_min > args.m_max {
            return Err(CliError::Usage(format!("empty m range {}..={}", args.m_min, args.m_max)));
        }
        period2_centers(params, args.m_min..=args.m_max)
    } else {
        let window =
            Window::square(args.center, args.width, args.seeds).map_err(|e| CliError::Usage(e.to_string()))?;
        let threads = args.threads.count()?;
        with_threads(threads, || search_centers(params, args.order, &window))
            .map_err(|e| render_err("thread pool", e))?
            .map_err(|e| match e {
                CenterError::InvalidOrder(_) => CliError::Usage(e.to_string()),
                other => CliError::Inconclusive(other.to_string()),
            })?
    };
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(io_err(format!("creating {}", path.display())))?;
            write_centers_csv(&list, file).map_err(io_err(format!("writing {}", path.display())))?;
            eprintln!("centers: wrote {} rows to {}", list.len(), path.display());
        }
        None => write_centers_csv(&list, std::io::stdout().lock()).map_err(io_err("writing standard output"))?,
    }
    Ok(())
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// JSON orbit report for `v_λ`.
pub fn probe_report(params: FamilyParams, lambda: Complex64, budget: &OrbitBudget) -> serde_json::Value {
    let v = tanpq::family::free_asymptotic_value(params, lambda);
    let head = json!({
        "p": params.p(),
        "q": params.q(),
        "lambda": pair(lambda),
        "asymptotic_value": pair(v),
    });
    let tail = match iterate_orbit(params, lambda, v, budget) {
        OrbitOutcome::Attracted(cycle) => {
            let class = tanpq::orbit::class_of_outcome(params, OrbitOutcome::Attracted(cycle.clone()));
            let summary = class.summary();
            json!({
                "outcome": "attracted",
                "period": cycle.period,
                "s_index": summary.period,
                "mode": summary.mode,
                "points": cycle.points.iter().map(|&z| pair(z)).collect::<Vec<_>>(),
                "multiplier": pair(cycle.multiplier),
                "residual": cycle.residual,
                "prepole_order": null,
            })
        }
        OrbitOutcome::CapturedByZero => json!({"outcome": "captured", "prepole_order": null}),
        OrbitOutcome::PrepoleHit { order } => json!({"outcome": "prepole", "prepole_order": order}),
        OrbitOutcome::Undecided => json!({"outcome": "undecided", "prepole_order": null}),
    };
    let mut report = head;
    if let (Some(obj), serde_json::Value::Object(extra)) = (report.as_object_mut(), tail) {
        obj.extend(extra);
    }
    report
}

fn probe(args: ProbeArgs) -> Result<(), CliError> {
    let params = args.family.params()?;
    let budget = args.budget.budget()?;
    if args.lambda == Complex64::new(0.0, 0.0) {
        return Err(CliError::Usage(KernelError::Degenerate.to_string()));
    }
    let report = probe_report(params, args.lambda, &budget);
    println!("{}", serde_json::to_string_pretty(&report).expect("report is plain JSON"));
    Ok(())
}

fn suite_names(selection: &str) -> Result<Vec<&str>, CliError> {
    if selection == "all" {
        return Ok(SUITES.to_vec());
    }
    let names: Vec<&str> = selection.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(CliError::Usage("empty suite selection".into()));
    }
    Ok(names)
}

fn lab_err(e: LabError) -> CliError {
    match e {
        LabError::Io(source) => CliError::Io {
            context: "writing certificates".into(),
            source,
        },
        LabError::Render(RenderError::Io(source)) => CliError::Io {
            context: "writing certificates".into(),
            source,
        },
        LabError::Inconclusive(msg) => CliError::Inconclusive(msg),
        other => CliError::Usage(other.to_string()),
    }
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let params = args.family.params()?;
    let names = suite_names(&args.suite)?;
    let cfg = SuiteConfig {
        budget: args.budget.budget()?,
        seed: args.seed,
        s2_resolution: args.s2_res,
        out_dir: Some(args.out_dir.clone()),
        ..SuiteConfig::default()
    };
    let threads = args.threads.count()?;
    let start = Instant::now();
    let mut report = with_threads(threads, || run_suite(params, &names, &cfg))
        .map_err(|e| render_err("thread pool", e))?
        .map_err(lab_err)?;
    for cert in &report.certificates {
        let failures = cert.failures().count();
        println!(
            "{:<16} {}  ({} measurements, {} failed)",
            cert.name,
            if cert.passed { "PASS" } else { "FAIL" },
            cert.measurements.len(),
            failures
        );
        for m in cert.failures() {
            println!("    {}: {} (expected {} ± {})", m.label, m.value, m.expected, m.tol);
        }
    }
    for (name, e) in &report.errors {
        println!("{name:<16} ERROR {e}");
    }
    eprintln!(
        "verify: p={} q={}, certificates in {} ({:.2?})",
        params.p(),
        params.q(),
        args.out_dir.display(),
        start.elapsed()
    );
    if let Some(pos) = report.errors.iter().position(|(_, e)| matches!(e, LabError::Io(_))) {
        if let (name, LabError::Io(source)) = report.errors.swap_remove(pos) {
            return Err(CliError::Io {
                context: format!("suite {name}"),
                source,
            });
        }
    }
    if report.passed() {
        Ok(())
    } else if report.inconclusive() && report.certificates.iter().all(|c| c.passed) {
        Err(CliError::Inconclusive(
            report
                .errors
                .iter()
                .map(|(n, e)| format!("{n}: {e}"))
                .collect::<Vec<_>>()
                .join("; "),
        ))
    } else {
        Err(CliError::Failed)
    }
}
