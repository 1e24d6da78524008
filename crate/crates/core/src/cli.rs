//! Command-line front end: `solve`, `scan`, `wavefunction`, `verify`.
//!
//! Values come from flags, then from a flat `key = value` config file
//! (`--config`, or the `HEUNQES_CONFIG` environment variable), then from
//! built-in defaults. Data streams are deterministic; run metadata goes into
//! `#`-prefixed header lines.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration or
//! validation error, 3 no frequency root found.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error as ThisError;

use crate::error::Error;
use crate::model::{validate, PhysicalParams};
use crate::oracle::{self, VerifyOptions};
use crate::quantize::{self, ReducedProblem, SpectralSolution};
use crate::wavefunction;

pub const CONFIG_ENV: &str = "HEUNQES_CONFIG";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NO_ROOT: i32 = 3;

pub const SCAN_HEADER: &str = "n,l,root_index,omega,energy,zeta_sq,node_count,residual,status";

#[derive(Debug, Parser)]
#[command(name = "heunqes", version, about = "Quantized frequencies, energies and wavefunctions of a moving magnetic quadrupole")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one (n, l) cell and print every positive frequency root.
    Solve(RunArgs),
    /// Solve every (n, l) cell with n ≤ n-max and l in l-list; CSV output.
    Scan(RunArgs),
    /// Sample the normalized radial wavefunction of one solved state.
    Wavefunction(RunArgs),
    /// Check solved states against the finite-difference eigensolver.
    Verify(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Table,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<i32>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    #[arg(long = "l-list", value_delimiter = ',', allow_negative_numbers = true)]
    pub l_list: Option<Vec<i32>>,
    #[arg(long)]
    pub mass: Option<f64>,
    /// Quadrupole magnitude M.
    #[arg(long, allow_negative_numbers = true)]
    pub quad: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub kz: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "rho-max")]
    pub rho_max: Option<f64>,
    /// Oracle grid size; give twice for an explicit convergence pair.
    #[arg(long)]
    pub grid: Vec<usize>,
    /// Which frequency root (ascending) to use for `wavefunction`.
    #[arg(long = "root-index")]
    pub root_index: Option<usize>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long = "perturb-omega")]
    pub perturb_omega: Option<f64>,
}

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(Error::NoRootInRange { .. } | Error::NoPositiveRoot) => EXIT_NO_ROOT,
            _ => EXIT_CONFIG,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub physical: PhysicalParams<f64>,
    pub n: usize,
    pub n_max: usize,
    pub l_list: Vec<i32>,
    pub samples: usize,
    pub rho_max: Option<f64>,
    pub grid: Vec<usize>,
    pub root_index: usize,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: usize,
    pub perturb_omega: Option<f64>,
}

/// Parses `key = value` lines; `#` starts a comment. Keys accept `-` or `_`.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("cannot parse `{key} = {value}`")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse_value(key, s))
        .collect()
}

fn load_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

const KNOWN_KEYS: &[&str] = &[
    "n", "l", "n-max", "l-list", "mass", "quad", "lambda", "eta", "kz", "samples", "rho-max", "grid",
    "root-index", "output", "format", "jobs", "perturb-omega",
];

/// Merges flags over file values over defaults.
pub fn resolve(args: &RunArgs, file: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    if let Some(key) = file.keys().find(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        return Err(CliError::Config(format!("unknown config key `{key}`")));
    }
    fn pick<T: std::str::FromStr + Clone>(
        flag: &Option<T>,
        file: &BTreeMap<String, String>,
        key: &str,
        default: T,
    ) -> Result<T, CliError> {
        match (flag, file.get(key)) {
            (Some(v), _) => Ok(v.clone()),
            (None, Some(s)) => parse_value(key, s),
            (None, None) => Ok(default),
        }
    }
    fn pick_opt<T: std::str::FromStr + Clone>(
        flag: &Option<T>,
        file: &BTreeMap<String, String>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match (flag, file.get(key)) {
            (Some(v), _) => Ok(Some(v.clone())),
            (None, Some(s)) => parse_value(key, s).map(Some),
            (None, None) => Ok(None),
        }
    }

    let physical = PhysicalParams::new(
        pick(&args.mass, file, "mass", 1.0)?,
        pick(&args.quad, file, "quad", 1.0)?,
        pick(&args.lambda, file, "lambda", 1.0)?,
        pick(&args.eta, file, "eta", 1.0)?,
        pick(&args.kz, file, "kz", 0.0)?,
        pick(&args.l, file, "l", 1)?,
    );
    let n = pick(&args.n, file, "n", 1)?;
    let l_list = match (&args.l_list, file.get("l-list")) {
        (Some(v), _) => v.clone(),
        (None, Some(s)) => parse_list("l-list", s)?,
        (None, None) => vec![physical.l],
    };
    let grid = match (args.grid.is_empty(), file.get("grid")) {
        (false, _) => args.grid.clone(),
        (true, Some(s)) => parse_list("grid", s)?,
        (true, None) => Vec::new(),
    };
    let format = match (args.format, file.get("format")) {
        (Some(f), _) => Some(f),
        (None, Some(s)) => Some(
            Format::from_str(s, true).map_err(|_| CliError::Config(format!("unknown format `{s}`")))?,
        ),
        (None, None) => None,
    };
    let default_jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    let config = RunConfig {
        physical,
        n,
        n_max: pick(&args.n_max, file, "n-max", n)?,
        l_list,
        samples: pick(&args.samples, file, "samples", 201)?,
        rho_max: pick_opt(&args.rho_max, file, "rho-max")?,
        grid,
        root_index: pick(&args.root_index, file, "root-index", 0)?,
        output: pick_opt(&args.output, file, "output")?,
        format,
        jobs: pick(&args.jobs, file, "jobs", default_jobs)?.max(1),
        perturb_omega: pick_opt(&args.perturb_omega, file, "perturb-omega")?,
    };
    check_finite(&config)?;
    Ok(config)
}

fn check_finite(config: &RunConfig) -> Result<(), CliError> {
    let p = &config.physical;
    let mut fields = vec![
        ("mass", p.mass),
        ("quad", p.quadrupole),
        ("lambda", p.lambda),
        ("eta", p.eta),
        ("kz", p.kz),
    ];
    if let Some(r) = config.rho_max {
        fields.push(("rho-max", r));
    }
    if let Some(f) = config.perturb_omega {
        fields.push(("perturb-omega", f));
    }
    for (name, v) in fields {
        if !v.is_finite() {
            return Err(CliError::Config(format!("`{name}` must be finite")));
        }
    }
    Ok(())
}

/// Rounds to 12 significant digits and prints the shortest string that
/// reproduces the rounded value; scientific outside `[1e-4, 1e6]`.
pub fn format_number(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if rounded == 0.0 {
        return "0".to_string();
    }
    let mag = rounded.abs();
    if !(1e-4..=1e6).contains(&mag) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

fn header(command: &str, config: &RunConfig) -> String {
    let p = &config.physical;
    let mut h = String::new();
    let _ = writeln!(h, "# heunqes {command}");
    for (key, value) in [
        ("mass", p.mass),
        ("quad", p.quadrupole),
        ("lambda", p.lambda),
        ("eta", p.eta),
        ("kz", p.kz),
    ] {
        let _ = writeln!(h, "# {key} = {value}");
    }
    let _ = writeln!(h, "# l = {}", p.l);
    h
}

struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn render(&self, format: Format) -> String {
        let mut out = String::new();
        match format {
            Format::Csv => {
                out.push_str(&self.columns.join(","));
                out.push('\n');
                for row in &self.rows {
                    out.push_str(&row.join(","));
                    out.push('\n');
                }
            }
            Format::Table => {
                let widths: Vec<usize> = (0..self.columns.len())
                    .map(|i| {
                        self.rows
                            .iter()
                            .map(|r| r[i].len())
                            .chain([self.columns[i].len()])
                            .max()
                            .unwrap_or(0)
                    })
                    .collect();
                let line = |cells: Vec<&str>| {
                    let padded: Vec<String> = cells
                        .iter()
                        .zip(&widths)
                        .map(|(c, w)| format!("{c:>w$}"))
                        .collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                out.push_str(&line(self.columns.clone()));
                for row in &self.rows {
                    out.push_str(&line(row.iter().map(String::as_str).collect()));
                }
            }
        }
        out
    }
}

/// Result of a command: exit status plus the text destined for the output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub output: String,
}

fn problem(config: &RunConfig, n: usize, l: i32) -> Result<ReducedProblem<f64>, Error> {
    let mut physical = config.physical;
    physical.l = l;
    ReducedProblem::new(physical, n)
}

fn status_slug(err: &Error) -> &'static str {
    match err {
        Error::NoRootInRange { .. } | Error::NoPositiveRoot => "no_root",
        Error::OverflowGuard { .. } => "overflow",
        Error::QuadratureFailure { .. } => "quadrature_failure",
        Error::ConvergenceFailure(_) => "convergence_failure",
        _ => "invalid",
    }
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool, CliError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))
}

pub fn cmd_solve(config: &RunConfig) -> Result<Outcome, CliError> {
    let pr = problem(config, config.n, config.physical.l)?;
    let solutions = quantize::solve(&pr)?;
    let rows = solutions
        .iter()
        .map(|s| {
            vec![
                s.n.to_string(),
                s.l.to_string(),
                format_number(s.omega),
                format_number(s.energy),
                format_number(s.zeta_sq),
                s.node_count.to_string(),
                format_number(s.residuals.truncation),
            ]
        })
        .collect();
    let table = Table {
        columns: vec!["n", "l", "omega", "energy", "zeta_sq", "node_count", "residual"],
        rows,
    };
    let mut output = header("solve", config);
    let _ = writeln!(output, "# n = {}", config.n);
    output.push_str(&table.render(config.format.unwrap_or(Format::Table)));
    Ok(Outcome {
        exit_code: EXIT_OK,
        output,
    })
}

fn scan_cells(config: &RunConfig) -> Result<Vec<(usize, i32)>, CliError> {
    if config.n_max < 1 {
        return Err(CliError::Config("n-max must be at least 1".into()));
    }
    if config.l_list.is_empty() {
        return Err(CliError::Config("l-list must not be empty".into()));
    }
    if config.l_list.contains(&0) {
        return Err(Error::ZeroAngularMomentum.into());
    }
    validate(config.physical, true)?;
    let mut ls = config.l_list.clone();
    ls.sort_unstable();
    ls.dedup();
    Ok((1..=config.n_max)
        .flat_map(|n| ls.iter().map(move |&l| (n, l)))
        .collect())
}

struct ScanRow {
    n: usize,
    l: i32,
    omega: f64,
    line: String,
}

pub fn cmd_scan(config: &RunConfig) -> Result<Outcome, CliError> {
    let cells = scan_cells(config)?;
    let pool = thread_pool(config.jobs)?;
    let per_cell: Vec<Vec<ScanRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(n, l)| match problem(config, n, l).and_then(|pr| quantize::solve(&pr)) {
                Ok(solutions) => solutions
                    .iter()
                    .enumerate()
                    .map(|(i, s)| ScanRow {
                        n,
                        l,
                        omega: s.omega,
                        line: format!(
                            "{n},{l},{i},{},{},{},{},{},ok",
                            format_number(s.omega),
                            format_number(s.energy),
                            format_number(s.zeta_sq),
                            s.node_count,
                            format_number(s.residuals.truncation)
                        ),
                    })
                    .collect(),
                Err(e) => vec![ScanRow {
                    n,
                    l,
                    omega: f64::INFINITY,
                    line: format!("{n},{l},,,,,,,{}", status_slug(&e)),
                }],
            })
            .collect()
    });
    let mut rows: Vec<ScanRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|a, b| (a.n, a.l).cmp(&(b.n, b.l)).then(a.omega.total_cmp(&b.omega)));

    let mut output = header("scan", config);
    let ls: Vec<String> = config.l_list.iter().map(i32::to_string).collect();
    let _ = writeln!(output, "# n-max = {}", config.n_max);
    let _ = writeln!(output, "# l-list = {}", ls.join(","));
    output.push_str(SCAN_HEADER);
    output.push('\n');
    for row in rows {
        output.push_str(&row.line);
        output.push('\n');
    }
    Ok(Outcome {
        exit_code: EXIT_OK,
        output,
    })
}

fn pick_root(config: &RunConfig) -> Result<SpectralSolution<f64>, CliError> {
    let pr = problem(config, config.n, config.physical.l)?;
    let mut solutions = quantize::solve(&pr)?;
    if config.root_index >= solutions.len() {
        return Err(CliError::Config(format!(
            "root-index {} out of range: {} root(s) found",
            config.root_index,
            solutions.len()
        )));
    }
    Ok(solutions.swap_remove(config.root_index))
}

pub fn cmd_wavefunction(config: &RunConfig) -> Result<Outcome, CliError> {
    if config.samples < 2 {
        return Err(CliError::Config("samples must be at least 2".into()));
    }
    let solution = pick_root(config)?;
    let wf = wavefunction::normalize(&solution)?;
    let rho_max = config.rho_max.unwrap_or(wf.rho_max);
    if !(rho_max > 0.0) {
        return Err(CliError::Config("rho-max must be positive".into()));
    }
    let mut output = header("wavefunction", config);
    let _ = writeln!(output, "# n = {}", config.n);
    let _ = writeln!(output, "# root-index = {}", config.root_index);
    let _ = writeln!(output, "# omega = {}", format_number(solution.omega));
    let _ = writeln!(output, "# node_count = {}", solution.node_count);
    let _ = writeln!(output, "# samples = {}", config.samples);
    let _ = writeln!(output, "# rho-max = {rho_max}");
    output.push_str("rho,R\n");
    for (rho, r) in wf.sample(config.samples, rho_max) {
        let _ = writeln!(output, "{},{}", format_number(rho), format_number(r));
    }
    Ok(Outcome {
        exit_code: EXIT_OK,
        output,
    })
}

fn verify_options(config: &RunConfig) -> Result<VerifyOptions<f64>, CliError> {
    let mut opts = VerifyOptions {
        perturb_omega: config.perturb_omega,
        rho_max: config.rho_max,
        ..VerifyOptions::default()
    };
    match config.grid.as_slice() {
        [] => {}
        [n] => opts.points = *n,
        [a, b] => {
            opts.points = *a;
            opts.refined_points = Some(*b);
        }
        _ => return Err(CliError::Config("--grid accepts at most two values".into())),
    }
    if let Some(f) = opts.perturb_omega {
        if !(f > 0.0) {
            return Err(CliError::Config("perturb-omega must be positive".into()));
        }
    }
    Ok(opts)
}

pub fn cmd_verify(config: &RunConfig) -> Result<Outcome, CliError> {
    let opts = verify_options(config)?;
    let cells: Vec<(usize, i32)> = if config.n_max > config.n || config.l_list.len() > 1 {
        scan_cells(config)?
            .into_iter()
            .filter(|(n, _)| *n >= config.n.min(config.n_max))
            .collect()
    } else {
        vec![(config.n, config.physical.l)]
    };
    // Validate every cell before doing any oracle work.
    let problems = cells
        .iter()
        .map(|&(n, l)| problem(config, n, l))
        .collect::<Result<Vec<_>, _>>()?;
    let pool = thread_pool(config.jobs)?;
    let solved = problems
        .iter()
        .map(quantize::solve)
        .collect::<Result<Vec<_>, _>>()?;
    let jobs: Vec<(usize, SpectralSolution<f64>)> = solved
        .into_iter()
        .flat_map(|sols| sols.into_iter().enumerate())
        .collect();
    let reports = pool.install(|| {
        jobs.par_iter()
            .map(|(i, s)| oracle::verify_solution(s, &opts).map(|r| (*i, s.clone(), r)))
            .collect::<Result<Vec<_>, _>>()
    })?;

    let mut all_pass = true;
    let rows = reports
        .iter()
        .map(|(i, s, r)| {
            all_pass &= r.pass;
            vec![
                s.n.to_string(),
                s.l.to_string(),
                i.to_string(),
                format_number(r.omega),
                r.node_index.to_string(),
                format_number(r.analytic_zeta_sq),
                format_number(r.numeric_zeta_sq),
                format_number(r.deviation),
                format_number(r.refined_deviation),
                format_number(r.convergence_ratio()),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
            ]
        })
        .collect();
    let table = Table {
        columns: vec![
            "n",
            "l",
            "root_index",
            "omega",
            "node_count",
            "zeta_sq",
            "oracle_zeta_sq",
            "deviation",
            "refined_deviation",
            "ratio",
            "status",
        ],
        rows,
    };
    let mut output = header("verify", config);
    let (coarse, fine) = reports
        .first()
        .map_or((opts.points, opts.refined_points.unwrap_or(2 * opts.points)), |(_, _, r)| {
            (r.points, r.refined_points)
        });
    let _ = writeln!(output, "# grid = {coarse},{fine}");
    let _ = writeln!(output, "# tolerance = {}", opts.tolerance);
    if let Some(f) = opts.perturb_omega {
        let _ = writeln!(output, "# perturb-omega = {f}");
    }
    output.push_str(&table.render(config.format.unwrap_or(Format::Table)));
    Ok(Outcome {
        exit_code: if all_pass { EXIT_OK } else { EXIT_FAIL },
        output,
    })
}

/// Resolves configuration for `args` and runs `command`.
pub fn execute(command: &Command) -> Result<Outcome, CliError> {
    let args = match command {
        Command::Solve(a) | Command::Scan(a) | Command::Wavefunction(a) | Command::Verify(a) => a,
    };
    let config_path = args
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    let file = match config_path {
        Some(p) => load_config_file(&p)?,
        None => BTreeMap::new(),
    };
    let config = resolve(args, &file)?;
    let outcome = match command {
        Command::Solve(_) => cmd_solve(&config)?,
        Command::Scan(_) => cmd_scan(&config)?,
        Command::Wavefunction(_) => cmd_wavefunction(&config)?,
        Command::Verify(_) => cmd_verify(&config)?,
    };
    if let Some(path) = &config.output {
        std::fs::write(path, &outcome.output)?;
        return Ok(Outcome {
            exit_code: outcome.exit_code,
            output: String::new(),
        });
    }
    Ok(outcome)
}

/// Entry point shared by the binary; returns the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
