//! Command-line front end for the `evt-renyi` binary.
//!
//! Settings are resolved as command-line flags, then config-file fields,
//! then defaults. Output is deterministic: the same resolved configuration
//! always produces byte-identical files.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::distributions::{DistributionModel, DomainTag};
use crate::entropy::{EntropyOptions, BETA_RANGE, DEFAULT_SUP_GRID_POINTS};
use crate::error::Error;
use crate::norming::{
    check_ratio_conditions, frechet_von_mises_ratio, gumbel_von_mises_ratio, standard_norming,
    RatioProbe, RemainderEnvelope,
};
use crate::numerics::QuadratureSpec;
use crate::rates::{
    geometric_grid, measure_rows, run_rate_experiment, truncation_point, verify_all_bounds_with,
    BoundCheck, BoundOptions, RateOptions, RateRow, MAX_N,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

/// Column order of the main results table.
pub const TABLE_COLUMNS: [&str; 9] = [
    "n",
    "a_n",
    "b_n",
    "h_env",
    "supnorm",
    "H_gn",
    "H_limit",
    "entropy_diff",
    "predicted_envelope",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "evt-renyi", version, about = "Rényi entropy and convergence rates of normalized maxima")]
pub struct Cli {
    /// JSON config file; its fields are overridden by flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output if absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Worker threads for sweeps over n.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Relative quadrature tolerance; the absolute tolerance is set to a tenth of it.
    #[arg(long, global = true)]
    pub quad_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rényi entropy of g_n against its limit.
    Entropy(ExperimentArgs),
    /// Rate sweep with slope fits and bound checks.
    Rate(RateArgs),
    /// Uniform bounds and rate hypotheses.
    Bounds(BoundsArgs),
    /// Norming constants and remainders.
    Norming(ExperimentArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct ExperimentArgs {
    /// Model spec, e.g. "pareto(alpha=1)".
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Single sample size (overrides the grid).
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub n_min: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub grid_factor: Option<f64>,
    #[arg(long)]
    pub sup_grid_points: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// Directory for two-column (log n, log value) series files.
    #[arg(long)]
    pub plot_dir: Option<PathBuf>,
    /// Skip the uniform-bound checks.
    #[arg(long)]
    pub no_bounds: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    #[arg(long)]
    pub rho: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
}

/// Config-file contents; every field optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub model_spec: Option<String>,
    pub beta: Option<f64>,
    pub n: Option<u64>,
    pub n_min: Option<u64>,
    pub n_max: Option<u64>,
    pub grid_factor: Option<f64>,
    pub quad_abs_tol: Option<f64>,
    pub quad_rel_tol: Option<f64>,
    pub sup_grid_points: Option<usize>,
    pub output_format: Option<OutputFormat>,
    pub output_path: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Fully resolved settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model_spec: String,
    pub beta: f64,
    pub n: Option<u64>,
    pub n_min: u64,
    pub n_max: u64,
    pub grid_factor: f64,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    pub sup_grid_points: usize,
    pub output_format: OutputFormat,
    pub output_path: Option<PathBuf>,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn spec(&self) -> QuadratureSpec {
        QuadratureSpec {
            abs_tol: self.quad_abs_tol,
            rel_tol: self.quad_rel_tol,
            ..QuadratureSpec::default()
        }
    }

    pub fn n_grid(&self) -> Result<Vec<u64>, CliError> {
        match self.n {
            Some(n) => Ok(vec![n]),
            None => geometric_grid(self.n_min, self.n_max, self.grid_factor).map_err(CliError::from),
        }
    }

    pub fn model(&self) -> Result<DistributionModel, CliError> {
        self.model_spec.parse().map_err(CliError::from)
    }

    fn validate(&self) -> Result<(), CliError> {
        let usage = |m: String| Err(CliError::Usage(m));
        if !(self.beta >= BETA_RANGE.0 && self.beta <= BETA_RANGE.1) {
            return usage(format!("beta must lie in [{}, {}], got {}", BETA_RANGE.0, BETA_RANGE.1, self.beta));
        }
        if let Some(n) = self.n {
            if !(2..=MAX_N).contains(&n) {
                return usage(format!("n must lie in [2, {MAX_N}], got {n}"));
            }
        } else if !(2 <= self.n_min && self.n_min < self.n_max && self.n_max <= MAX_N) {
            return usage(format!(
                "need 2 ≤ n_min < n_max ≤ {MAX_N}, got {} and {}",
                self.n_min, self.n_max
            ));
        }
        if !(self.grid_factor > 1.0) {
            return usage(format!("grid_factor must exceed 1, got {}", self.grid_factor));
        }
        if self.workers == 0 {
            return usage("workers must be at least 1".into());
        }
        self.spec().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.sup_grid_points < crate::numerics::supnorm::MIN_GRID_POINTS {
            return usage(format!("sup_grid_points must be at least {}", crate::numerics::supnorm::MIN_GRID_POINTS));
        }
        Ok(())
    }
}

/// Failure with its process exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Domain(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Domain(_) => EXIT_DOMAIN,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numerical(m) | CliError::Domain(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let m = e.to_string();
        match e {
            Error::NonConvergence { .. }
            | Error::NonFinite { .. }
            | Error::Bracket { .. }
            | Error::TailUnderflow { .. }
            | Error::DivergentIntegral(_)
            | Error::Domain(_) => CliError::Numerical(m),
            Error::DomainMismatch { .. } | Error::NoDomain(_) => CliError::Domain(m),
            Error::Param(_) | Error::ModelSpec(_) => CliError::Usage(m),
        }
    }
}

pub fn load_config_file(path: &Path) -> Result<ConfigFile, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

/// Merges flags over the config file over defaults.
pub fn resolve(cli: &Cli, args: &ExperimentArgs) -> Result<ExperimentConfig, CliError> {
    let file = match &cli.config {
        Some(p) => load_config_file(p)?,
        None => ConfigFile::default(),
    };
    let defaults = QuadratureSpec::default();
    let (abs_tol, rel_tol) = match cli.quad_tol {
        Some(r) => (r / 10.0, r),
        None => (
            file.quad_abs_tol.unwrap_or(defaults.abs_tol),
            file.quad_rel_tol.unwrap_or(defaults.rel_tol),
        ),
    };
    let model_spec = args
        .model
        .clone()
        .or(file.model_spec)
        .ok_or_else(|| CliError::Usage("no model given (--model or model_spec)".into()))?;
    let config = ExperimentConfig {
        model_spec,
        beta: args.beta.or(file.beta).unwrap_or(2.0),
        n: args.n.or(file.n),
        n_min: args.n_min.or(file.n_min).unwrap_or(16),
        n_max: args.n_max.or(file.n_max).unwrap_or(16_384),
        grid_factor: args.grid_factor.or(file.grid_factor).unwrap_or(2.0),
        quad_abs_tol: abs_tol,
        quad_rel_tol: rel_tol,
        sup_grid_points: args
            .sup_grid_points
            .or(file.sup_grid_points)
            .unwrap_or(DEFAULT_SUP_GRID_POINTS),
        output_format: cli.format.or(file.output_format).unwrap_or(OutputFormat::Csv),
        output_path: cli.output.clone().or(file.output_path),
        workers: cli.workers.or(file.workers).unwrap_or(1),
    };
    config.validate()?;
    Ok(config)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn config_json(config: &ExperimentConfig, command: &str) -> serde_json::Value {
    let mut v = serde_json::to_value(config).expect("config serializes");
    v["command"] = json!(command);
    v
}

fn csv_metadata(out: &mut String, config: &ExperimentConfig, command: &str) {
    let v = config_json(config, command);
    if let Some(map) = v.as_object() {
        for (k, val) in map {
            writeln!(out, "# {k} = {val}").unwrap();
        }
    }
}

fn table_row(r: &RateRow) -> [f64; 8] {
    [
        r.a_n,
        r.b_n,
        r.h_env,
        r.supnorm,
        r.h_gn,
        r.h_limit,
        r.entropy_diff,
        r.predicted_envelope,
    ]
}

fn rows_csv(out: &mut String, rows: &[RateRow]) {
    writeln!(out, "{}", TABLE_COLUMNS.join(",")).unwrap();
    for r in rows {
        let vals: Vec<String> = table_row(r).iter().map(|&x| num(x)).collect();
        writeln!(out, "{},{}", r.n, vals.join(",")).unwrap();
    }
}

fn rows_json(rows: &[RateRow]) -> serde_json::Value {
    let items: Vec<serde_json::Value> = rows
        .iter()
        .map(|r| {
            let mut m = serde_json::Map::new();
            m.insert("n".into(), json!(r.n));
            for (k, v) in TABLE_COLUMNS[1..].iter().zip(table_row(r)) {
                m.insert((*k).into(), json!(v));
            }
            serde_json::Value::Object(m)
        })
        .collect();
    json!(items)
}

fn checks_csv(out: &mut String, checks: &[BoundCheck]) {
    writeln!(out, "name,pass,margin").unwrap();
    for c in checks {
        writeln!(out, "{},{},{}", c.name, c.pass, num(c.margin)).unwrap();
    }
}

fn write_output(config: &ExperimentConfig, text: &str) -> Result<(), CliError> {
    match &config.output_path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn rate_options(config: &ExperimentConfig, verify_bounds: bool) -> RateOptions {
    RateOptions {
        entropy: EntropyOptions {
            spec: config.spec(),
            sup_grid_points: config.sup_grid_points,
        },
        workers: config.workers,
        verify_bounds,
        bounds: BoundOptions::default(),
    }
}

pub fn cmd_entropy(config: &ExperimentConfig) -> Result<String, CliError> {
    let model = config.model()?;
    let rows = measure_rows(&model, config.beta, &config.n_grid()?, &rate_options(config, false))?;
    Ok(match config.output_format {
        OutputFormat::Csv => {
            let mut out = String::new();
            csv_metadata(&mut out, config, "entropy");
            rows_csv(&mut out, &rows);
            out
        }
        OutputFormat::Json => pretty(&json!({
            "config": config_json(config, "entropy"),
            "rows": rows_json(&rows),
        })),
    })
}

/// Writes one `log n  log value` file per series; nonpositive values are skipped.
pub fn write_plot_files(dir: &Path, rows: &[RateRow]) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    type Series = (&'static str, fn(&RateRow) -> f64);
    let series: [Series; 4] = [
        ("supnorm", |r| r.supnorm),
        ("entropy_diff", |r| r.entropy_diff),
        ("h_env", |r| r.h_env),
        ("predicted_envelope", |r| r.predicted_envelope),
    ];
    for (name, get) in series {
        let mut text = String::new();
        for r in rows {
            let v = get(r);
            if v > 0.0 {
                writeln!(text, "{} {}", num((r.n as f64).ln()), num(v.ln())).unwrap();
            }
        }
        let path = dir.join(format!("{name}.dat"));
        fs::write(&path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn cmd_rate(config: &ExperimentConfig, plot_dir: Option<&Path>, verify_bounds: bool) -> Result<String, CliError> {
    let model = config.model()?;
    let report = run_rate_experiment(
        &model,
        config.beta,
        &config.n_grid()?,
        &rate_options(config, verify_bounds),
    )?;
    if let Some(dir) = plot_dir {
        write_plot_files(dir, &report.rows)?;
    }
    Ok(match config.output_format {
        OutputFormat::Csv => {
            let mut out = String::new();
            csv_metadata(&mut out, config, "rate");
            let fit = |f: Option<crate::numerics::FitResult>| match f {
                Some(f) => format!("{} (rms {})", num(f.slope), num(f.rms_residual)),
                None => "skipped".into(),
            };
            writeln!(out, "# fitted_supnorm_slope = {}", fit(report.fitted_supnorm)).unwrap();
            writeln!(out, "# fitted_entropy_slope = {}", fit(report.fitted_entropy)).unwrap();
            writeln!(out, "# predicted_slope = {}", num(report.predicted_slope)).unwrap();
            writeln!(out, "# h_slope = {}", num(report.h_slope)).unwrap();
            if let Some(flag) = &report.degenerate {
                writeln!(out, "# {flag}").unwrap();
            }
            for c in &report.bound_checks {
                writeln!(out, "# bound {} {} margin {}", c.name, if c.pass { "pass" } else { "FAIL" }, num(c.margin))
                    .unwrap();
            }
            rows_csv(&mut out, &report.rows);
            out
        }
        OutputFormat::Json => pretty(&json!({
            "config": config_json(config, "rate"),
            "rows": rows_json(&report.rows),
            "report": report,
        })),
    })
}

pub fn cmd_bounds(config: &ExperimentConfig, opts: &BoundOptions) -> Result<String, CliError> {
    let model = config.model()?;
    let grid = config.n_grid()?;
    let spec = config.spec();
    let mut checks = verify_all_bounds_with(&model, &grid, opts, &spec)?;

    let probe = RatioProbe {
        rho: opts.rho,
        delta: opts.delta,
        ..RatioProbe::default()
    };
    for &n in &grid {
        match check_ratio_conditions(&model, n, &probe, &spec) {
            Ok(report) => checks.extend(report.checks.into_iter().map(|c| BoundCheck {
                name: format!("hypothesis {} n={n}", c.name),
                pass: c.pass,
                margin: c.threshold - c.value,
            })),
            Err(Error::Param(_)) => {}
            Err(e) => return Err(e.into()),
        }
    }

    Ok(match config.output_format {
        OutputFormat::Csv => {
            let mut out = String::new();
            csv_metadata(&mut out, config, "bounds");
            writeln!(out, "# rho = {}", opts.rho).unwrap();
            writeln!(out, "# delta = {}", opts.delta).unwrap();
            checks_csv(&mut out, &checks);
            out
        }
        OutputFormat::Json => {
            let mut meta = config_json(config, "bounds");
            meta["rho"] = json!(opts.rho);
            meta["delta"] = json!(opts.delta);
            pretty(&json!({ "config": meta, "checks": checks }))
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
struct NormingRow {
    n: u64,
    a_n: f64,
    b_n: f64,
    h_raw: f64,
    h_env: f64,
    von_mises_ratio: f64,
    t_n: f64,
}

pub fn cmd_norming(config: &ExperimentConfig) -> Result<String, CliError> {
    let model = config.model()?;
    let spec = config.spec();
    let env = RemainderEnvelope::for_model(&model)?;
    let mut rows = Vec::new();
    for n in config.n_grid()? {
        let p = standard_norming(&model, n, &spec)?;
        let (t, ratio) = match model.domain_tag() {
            DomainTag::Frechet(_) => (p.a_n, frechet_von_mises_ratio(&model, p.a_n)?),
            _ => (p.b_n, gumbel_von_mises_ratio(&model, p.b_n, &spec)?),
        };
        let r = env.evaluate(t)?;
        rows.push(NormingRow {
            n,
            a_n: p.a_n,
            b_n: p.b_n,
            h_raw: r.h_raw,
            h_env: r.h_env,
            von_mises_ratio: ratio,
            t_n: (truncation_point(&model, n) - p.b_n) / p.a_n,
        });
    }
    Ok(match config.output_format {
        OutputFormat::Csv => {
            let mut out = String::new();
            csv_metadata(&mut out, config, "norming");
            writeln!(out, "n,a_n,b_n,h_raw,h_env,von_mises_ratio,t_n").unwrap();
            for r in &rows {
                let vals = [r.a_n, r.b_n, r.h_raw, r.h_env, r.von_mises_ratio, r.t_n].map(num);
                writeln!(out, "{},{}", r.n, vals.join(",")).unwrap();
            }
            out
        }
        OutputFormat::Json => pretty(&json!({
            "config": config_json(config, "norming"),
            "rows": rows,
        })),
    })
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (config, text) = match &cli.command {
        Command::Entropy(args) => {
            let c = resolve(cli, args)?;
            let t = cmd_entropy(&c)?;
            (c, t)
        }
        Command::Rate(args) => {
            let c = resolve(cli, &args.experiment)?;
            let t = cmd_rate(&c, args.plot_dir.as_deref(), !args.no_bounds)?;
            (c, t)
        }
        Command::Bounds(args) => {
            let c = resolve(cli, &args.experiment)?;
            let defaults = BoundOptions::default();
            let opts = BoundOptions {
                rho: args.rho.unwrap_or(defaults.rho),
                delta: args.delta.unwrap_or(defaults.delta),
            };
            if !(opts.rho > 0.0 && opts.delta > 0.0) {
                return Err(CliError::Usage("rho and delta must be positive".into()));
            }
            let t = cmd_bounds(&c, &opts)?;
            (c, t)
        }
        Command::Norming(args) => {
            let c = resolve(cli, args)?;
            let t = cmd_norming(&c)?;
            (c, t)
        }
    };
    write_output(&config, &text)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
