//! `fraclat`: kernels, operator application, ground-state solves and the
//! validation suite from the command line.
//!
//! Exit status: 0 on success, 1 on numerical failure, 2 on bad usage.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fraclat::io::{self, FieldMeta};
use fraclat::nehari::{self, SolveError};
use fraclat::semigroup::{self, HeatConfig};
use fraclat::spectral::{self, Kernel};
use fraclat::validate::{self, ValidateOptions};
use fraclat::{
    Boundary, Field64, FractionalOrder, LatticeGeometry, Model64, ModelConfig, SolverConfig,
    SpectralConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "fraclat",
    version,
    about = "Fractional Schrödinger problems on the integer lattice"
)]
struct Cli {
    /// Increase log detail (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the kernel of (-Δ)^α and write it as CSV with a JSON sidecar.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        points: usize,
        #[arg(long, default_value = "kernel.csv")]
        out: PathBuf,
        /// Skip the M versus 2M comparison.
        #[arg(long)]
        no_doubling: bool,
    },
    /// Apply (-Δ)^α to a field file.
    Apply {
        /// Field CSV; its geometry comes from the JSON sidecar.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = Method::Kernel)]
        method: Method,
        /// Quadrature points for the kernel path on a zero-extended box.
        #[arg(long)]
        points: Option<usize>,
        /// Kernel radius for the kernel path on a zero-extended box.
        #[arg(long)]
        radius: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compare the heat-semigroup formula with the kernel convolution.
    HeatCompare {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        radius: usize,
        /// Random test fields in addition to the delta.
        #[arg(long, default_value_t = 10)]
        fields: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        nodes_per_decade: Option<usize>,
    },
    /// Minimize the energy on the Nehari manifold from one initial field.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Initial field CSV; a centered Gaussian bump when omitted.
        #[arg(long)]
        w0: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Solve from many seeded initial fields and keep distinct orbits.
    Multistart {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        starts: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        dedupe_tol: Option<f64>,
    },
    /// Run the invariant suite and report every check.
    Validate {
        /// Restrict to one module: lattice, spectral, semigroup, model, nehari, cli.
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Kernel CSV (with sidecar) to examine in place of the built-in table.
        #[arg(long)]
        kernel: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print the JSON report instead of the table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Method {
    Kernel,
    Fft,
}

#[derive(clap::Args, Debug)]
struct SolverArgs {
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    tol_grad: Option<f64>,
    #[arg(long)]
    tol_nehari: Option<f64>,
    #[arg(long)]
    step0: Option<f64>,
}

impl SolverArgs {
    fn apply(&self, mut cfg: SolverConfig) -> SolverConfig {
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.tol_grad {
            cfg.tol_grad = v;
        }
        if let Some(v) = self.tol_nehari {
            cfg.tol_nehari = v;
        }
        if let Some(v) = self.step0 {
            cfg.step0 = v;
        }
        cfg
    }
}

/// Splits failures into bad input (exit 2) and failed computations (exit 1).
#[derive(Debug)]
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

type Outcome = Result<(), Failure>;

trait Classify<T> {
    fn usage(self) -> Result<T, Failure>;
    fn numerical(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }
    fn numerical(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Numerical(e.into()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let outcome = configure_threads().and_then(|_| run(cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var("FRACLAT_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::Usage(anyhow!(
            "FRACLAT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .numerical()
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Kernel {
            alpha,
            dim,
            radius,
            points,
            out,
            no_doubling,
        } => cmd_kernel(alpha, dim, radius, points, &out, !no_doubling),
        Command::Apply {
            input,
            alpha,
            method,
            points,
            radius,
            out,
        } => cmd_apply(&input, alpha, method, points, radius, &out),
        Command::HeatCompare {
            alpha,
            dim,
            radius,
            fields,
            seed,
            nodes_per_decade,
        } => cmd_heat_compare(alpha, dim, radius, fields, seed, nodes_per_decade),
        Command::Solve {
            config,
            w0,
            out,
            solver,
        } => cmd_solve(&config, w0.as_deref(), &out, &solver),
        Command::Multistart {
            config,
            starts,
            seed,
            out,
            solver,
            dedupe_tol,
        } => cmd_multistart(&config, starts, seed, &out, &solver, dedupe_tol),
        Command::Validate {
            only,
            seed,
            kernel,
            report,
            json,
        } => cmd_validate(only, seed, kernel.as_deref(), report.as_deref(), json),
    }
}

fn print_json<S: Serialize>(value: &S) -> Outcome {
    println!("{}", serde_json::to_string_pretty(value).numerical()?);
    Ok(())
}

fn cmd_kernel(
    alpha: f64,
    dim: usize,
    radius: usize,
    points: usize,
    out: &Path,
    doubling: bool,
) -> Outcome {
    let order = FractionalOrder::new(alpha).usage()?;
    let mut cfg = SpectralConfig::new(points, radius).usage()?;
    cfg.doubling_check = doubling;
    if dim == 0 {
        return Err(Failure::Usage(anyhow!("dimension must be at least 1")));
    }
    let kernel = spectral::kernel_table(order, dim, &cfg).numerical()?;
    io::write_kernel(out, &kernel).numerical()?;
    log::info!("kernel written to {}", out.display());
    print_json(&io::kernel_meta(&kernel))
}

fn read_input_field(path: &Path) -> Result<Field64, Failure> {
    io::read_field(path)
        .with_context(|| format!("reading {}", path.display()))
        .usage()
}

fn cmd_apply(
    input: &Path,
    alpha: f64,
    method: Method,
    points: Option<usize>,
    radius: Option<usize>,
    out: &Path,
) -> Outcome {
    let order = FractionalOrder::new(alpha).usage()?;
    let u = read_input_field(input)?;
    let geom = u.geom().clone();
    let v = match method {
        Method::Fft => spectral::apply_multiplier_fft(&u, order).numerical()?,
        Method::Kernel => {
            let kernel = match geom.boundary() {
                Boundary::PeriodicWrap => Kernel::periodized(order, &geom),
                Boundary::ZeroExtended => {
                    let defaults = SpectralConfig::default_for(geom.dim(), geom.radius());
                    let mut cfg = SpectralConfig::new(
                        points.unwrap_or(defaults.points),
                        radius.unwrap_or(2 * geom.radius()),
                    )
                    .usage()?;
                    cfg.doubling_check = false;
                    spectral::kernel_table(order, geom.dim(), &cfg).numerical()?
                }
            };
            spectral::apply_kernel(&u, &kernel).numerical()?
        }
    };
    io::write_field(out, &v).numerical()
}

#[derive(Serialize)]
struct HeatReport {
    max_rel_err: f64,
    scalar_identity_err: f64,
    nodes: usize,
}

fn cmd_heat_compare(
    alpha: f64,
    dim: usize,
    radius: usize,
    fields: usize,
    seed: u64,
    nodes_per_decade: Option<usize>,
) -> Outcome {
    let order = FractionalOrder::new(alpha).usage()?;
    if !(alpha < 1.0) {
        return Err(Failure::Usage(anyhow!(
            "heat-compare needs alpha in (0, 1)"
        )));
    }
    let geom = LatticeGeometry::new(dim, radius, Boundary::ZeroExtended).usage()?;
    let mut heat = HeatConfig::default();
    if let Some(n) = nodes_per_decade {
        heat.nodes_per_decade = n;
    }
    heat.validate().usage()?;
    let defaults = SpectralConfig::default_for(dim, radius);
    let mut spectral_cfg =
        SpectralConfig::new(defaults.points, (2 * radius).min(defaults.points / 2 - 1)).usage()?;
    spectral_cfg.doubling_check = false;
    let kernel = spectral::kernel_table(order, dim, &spectral_cfg).numerical()?;

    let mut inputs = vec![Field64::delta(&geom, &vec![0; dim]).numerical()?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..fields {
        inputs.push(Field64::from_fn(&geom, |_| rng.gen_range(-1.0..1.0)));
    }
    let mut max_rel_err = 0.0f64;
    for u in &inputs {
        let a = spectral::apply_kernel(u, &kernel).numerical()?;
        let b = semigroup::fraclap_semigroup(u, alpha, &heat).numerical()?;
        let diff = (&a - &b).norm_sup();
        max_rel_err = max_rel_err.max(diff / u.norm_sup());
    }
    let lambdas = semigroup::default_lambdas::<f64>(dim);
    let report = HeatReport {
        max_rel_err,
        scalar_identity_err: semigroup::scalar_identity_error(alpha, dim, &lambdas, &heat)
            .numerical()?,
        nodes: semigroup::time_nodes(alpha, dim, &heat).0.len(),
    };
    print_json(&report)
}

fn load_model(path: &Path) -> Result<(ModelConfig, Model64), Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .usage()?;
    let cfg = ModelConfig::from_json(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .usage()?;
    let model = cfg.build::<f64>().usage()?;
    Ok((cfg, model))
}

/// Companion file `<stem>.<suffix>.csv` next to `out`.
fn companion(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.{suffix}.csv"))
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

#[derive(Serialize)]
struct SolveReport {
    status: &'static str,
    energy: f64,
    grad_residual: f64,
    nehari_residual: f64,
    iterations: usize,
    boundary_mass: f64,
    truncation_suspect: bool,
    field: String,
}

fn cmd_solve(config: &Path, w0: Option<&Path>, out: &Path, args: &SolverArgs) -> Outcome {
    let (_, model) = load_model(config)?;
    let geom = model.geom().clone();
    let w0 = match w0 {
        Some(path) => {
            let w = read_input_field(path)?;
            if w.geom() != &geom {
                return Err(Failure::Usage(anyhow!(
                    "initial field geometry {:?} does not match the model {:?}",
                    FieldMeta::of(w.geom()),
                    FieldMeta::of(&geom)
                )));
            }
            w
        }
        None => nehari::gaussian_bump(&geom, &vec![0.0; geom.dim()], 2.0),
    };
    let cfg = args.apply(SolverConfig::default());
    cfg.validate().usage()?;
    let (result, failure) = match nehari::minimize(&model, &w0, &cfg) {
        Ok(r) => (r, None),
        Err(SolveError::Model(e)) => return Err(Failure::Numerical(e.into())),
        Err(e) => {
            let best = e.best().expect("carries the best iterate").clone();
            (best, Some(e.to_string()))
        }
    };
    let field_path = companion(out, "field");
    io::write_field(&field_path, &result.u).numerical()?;
    let report = SolveReport {
        status: if failure.is_some() {
            "not_converged"
        } else {
            "converged"
        },
        energy: result.energy,
        grad_residual: result.grad_residual,
        nehari_residual: result.nehari_residual,
        iterations: result.iterations,
        boundary_mass: result.boundary_mass,
        truncation_suspect: result.truncation_suspect,
        field: file_name(&field_path),
    };
    io::write_json(out, &report).numerical()?;
    match failure {
        None => Ok(()),
        Some(msg) => Err(Failure::Numerical(anyhow!(msg))),
    }
}

#[derive(Serialize)]
struct OrbitEntry {
    energy: f64,
    orbit_representative: String,
    multiplicity: usize,
}

fn cmd_multistart(
    config: &Path,
    starts: usize,
    seed: u64,
    out: &Path,
    args: &SolverArgs,
    dedupe_tol: Option<f64>,
) -> Outcome {
    if starts == 0 {
        return Err(Failure::Usage(anyhow!("--starts must be at least 1")));
    }
    let (_, model) = load_model(config)?;
    let mut cfg = args.apply(SolverConfig {
        seed,
        ..SolverConfig::default()
    });
    if let Some(t) = dedupe_tol {
        cfg.dedupe_tol = t;
    }
    cfg.validate().usage()?;
    let set = nehari::multistart(&model, starts, &cfg).numerical()?;
    for skipped in &set.skipped {
        log::warn!("start {} skipped: {}", skipped.start, skipped.reason);
    }
    if set.members.is_empty() {
        return Err(Failure::Numerical(anyhow!("no start converged")));
    }
    let mut entries = Vec::with_capacity(set.members.len());
    for (k, member) in set.members.iter().enumerate() {
        let path = companion(out, &format!("orbit{k}"));
        io::write_field(&path, &member.representative).numerical()?;
        entries.push(OrbitEntry {
            energy: member.energy,
            orbit_representative: file_name(&path),
            multiplicity: member.multiplicity,
        });
    }
    io::write_json(out, &entries).numerical()?;
    log::info!(
        "{} distinct orbits from {} starts ({} skipped)",
        entries.len(),
        starts,
        set.skipped.len()
    );
    Ok(())
}

fn load_kernel(path: &Path) -> Result<Kernel<f64>, Failure> {
    let meta: io::KernelMeta = fs::read_to_string(io::sidecar_path(path))
        .map_err(anyhow::Error::from)
        .and_then(|t| serde_json::from_str(&t).map_err(anyhow::Error::from))
        .with_context(|| format!("reading the sidecar of {}", path.display()))
        .usage()?;
    let order = FractionalOrder::new(meta.alpha).usage()?;
    let mut cfg = SpectralConfig::new(meta.m, meta.r).usage()?;
    cfg.doubling_check = false;
    let template = spectral::kernel_table(order, meta.d, &cfg).numerical()?;
    let rows = io::read_kernel_rows(path).usage()?;
    let mut values = vec![f64::NAN; template.values().len()];
    for (x, v) in rows {
        let i = template
            .offsets()
            .index(&x)
            .ok_or_else(|| Failure::Usage(anyhow!("offset {x:?} outside radius {}", meta.r)))?;
        values[i] = v;
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Failure::Usage(anyhow!(
            "kernel file does not cover every offset"
        )));
    }
    template.with_values(values).usage()
}

fn cmd_validate(
    only: Option<String>,
    seed: u64,
    kernel: Option<&Path>,
    report_path: Option<&Path>,
    json: bool,
) -> Outcome {
    let kernel = kernel.map(load_kernel).transpose()?;
    let opts = ValidateOptions { only, seed, kernel };
    let report = validate::run(&opts).usage()?;
    if let Some(path) = report_path {
        io::write_json(path, &report).numerical()?;
    }
    if json {
        print_json(&report)?;
    } else {
        println!(
            "{:<10} {:<36} {:>13} {:>11}  result",
            "module", "check", "measured", "tolerance"
        );
        for c in &report.checks {
            println!(
                "{:<10} {:<36} {:>13.4e} {:>11.1e}  {}",
                c.module,
                c.name,
                c.measured,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        println!(
            "{} passed, {} failed in {:.1}s",
            report.passed, report.failed, report.seconds
        );
    }
    if report.all_pass() {
        Ok(())
    } else {
        let names: Vec<&str> = report.failures().map(|c| c.name).collect();
        Err(Failure::Numerical(anyhow!(
            "failed checks: {}",
            names.join(", ")
        )))
    }
}
