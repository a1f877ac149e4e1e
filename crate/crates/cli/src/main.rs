mod output;
mod suites;

use std::path::PathBuf;
#[cfg(test)]
use std::path::Path;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use hardcore::ensemble::{alpha_direct, alpha_series, alpha_via_t, truncation_for, zhat_series, DEFAULT_BUDGET};
use hardcore::montecarlo::stream_rng;
use hardcore::sampler::{greedy_maximal_code, sample_canonical_hard_core, sample_poisson_hard_core};
use hardcore::verify::VerificationReport;
use hardcore::{bounds, Exclusion, Fugacity, Point, Region};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use output::{finite, resolve_out, write_json, write_sidecar, write_table, Cell, Format, Table};
use suites::{Suite, SuiteParams};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hardcore::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0} is not finite and cannot be written as JSON")]
    NotFinite(String),
    #[error("{0} of {1} lemma reports recorded violations")]
    VerificationFailed(usize, usize),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(hardcore::Error::BudgetExceeded { .. }) => 3,
            CliError::Core(_) | CliError::Usage(_) => 2,
            CliError::VerificationFailed(..) => 4,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "hardcore", version, about = "Hard-core point processes, density estimators and kissing-number bounds")]
struct Cli {
    /// Worker threads for the Monte Carlo streams; results do not depend on it.
    #[arg(long, global = true)]
    streams: Option<usize>,
    /// Random seed; a fresh one is drawn and printed when omitted.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file. Relative paths resolve against $HARDCORE_OUT_DIR if set.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format; defaults to the extension of --out, else CSV.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Lower and upper bounds for kissing numbers, spherical codes and packings.
    Bounds(BoundsArgs),
    /// Exact samples of the hard-core model.
    Sample(SampleArgs),
    /// Expected density of the hard-core model by independent estimators.
    Alpha(AlphaArgs),
    /// Monte Carlo checks of the geometric and probabilistic inequalities.
    Verify(VerifyArgs),
    /// Random greedy spherical codes.
    Code(CodeArgs),
}

#[derive(Args, Clone, Debug, Serialize)]
struct Angle {
    /// Angle in radians.
    #[arg(long, conflicts_with = "theta_deg")]
    theta: Option<f64>,
    /// Angle in degrees (converted to radians at parse time).
    #[arg(long)]
    #[serde(skip)]
    theta_deg: Option<f64>,
}

impl Angle {
    /// Folds `--theta-deg` into `theta` so the echoed config holds radians.
    fn resolve(&mut self) -> Option<f64> {
        if let Some(deg) = self.theta_deg.take() {
            self.theta = Some(deg.to_radians());
        }
        self.theta
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
struct DimRange {
    start: usize,
    end: usize,
    step: usize,
}

impl DimRange {
    fn dims(self) -> impl Iterator<Item = usize> {
        (self.start..=self.end).step_by(self.step)
    }
}

fn parse_d_range(s: &str) -> Result<DimRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}"));
    let (start, end, step) = match parts.as_slice() {
        [a, b] => (num(a)?, num(b)?, 1),
        [a, b, c] => (num(a)?, num(b)?, num(c)?),
        _ => return Err("expected a:b or a:b:step".into()),
    };
    if start == 0 || start > end || step == 0 {
        return Err("need 1 ≤ a ≤ b and step ≥ 1".into());
    }
    Ok(DimRange { start, end, step })
}

#[derive(Args, Debug, Serialize)]
struct BoundsArgs {
    /// Dimensions as a:b:step (inclusive).
    #[arg(long, value_parser = parse_d_range, default_value = "4:48:4")]
    d_range: DimRange,
    /// Spherical-code angle; defaults to π/3.
    #[command(flatten)]
    #[serde(flatten)]
    angle: Angle,
}

#[derive(Args, Debug, Serialize)]
struct RegionArgs {
    /// box:2x3, ball:r=1.5[,d=3], sphere:d=4 or cap:d=4,theta=1.0472
    #[arg(long)]
    region: String,
    /// Dimension, for literals that leave it open.
    #[arg(long)]
    d: Option<usize>,
    /// Exclusion angle on the sphere; Euclidean regions use unit-volume balls.
    #[command(flatten)]
    #[serde(flatten)]
    angle: Angle,
    /// Rejection attempts per exact sample.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

impl RegionArgs {
    fn resolve(&mut self) -> CliResult<(Region, Exclusion)> {
        let region = hardcore::regions::parse_region(&self.region, self.d)?;
        let exclusion = Exclusion::default_for(&region, self.angle.resolve())?;
        self.d = Some(region.dim());
        Ok((region, exclusion))
    }
}

#[derive(Args, Debug, Serialize)]
#[command(group(ArgGroup::new("law").required(true).args(["lambda", "k"])))]
struct SampleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    region: RegionArgs,
    /// Fugacity of the grand canonical model.
    #[arg(long)]
    lambda: Option<f64>,
    /// Fixed number of points (canonical model).
    #[arg(long)]
    k: Option<usize>,
    /// Number of independent configurations.
    #[arg(long, default_value_t = 1)]
    n: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
enum Method {
    Direct,
    Series,
    ViaT,
    All,
}

#[derive(Args, Debug, Serialize)]
struct AlphaArgs {
    #[command(flatten)]
    #[serde(flatten)]
    region: RegionArgs,
    #[arg(long)]
    lambda: f64,
    /// Samples: configurations (direct), per coefficient (series) or outer pairs (via-t).
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Inner samples per coefficient of the nested series, scaled by k².
    #[arg(long, default_value_t = 256)]
    n_inner: u64,
    #[arg(long, value_enum, default_value_t = Method::All)]
    method: Method,
}

#[derive(Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Random box unions per dimension in the rearrangement sweep.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Monte Carlo samples per check.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Size constant of the p_k trend, k = ⌈c·d⌉.
    #[arg(long, default_value_t = 0.1)]
    c: f64,
}

#[derive(Args, Debug, Serialize)]
struct CodeArgs {
    #[arg(long)]
    d: usize,
    /// Minimum angle of the code.
    #[command(flatten)]
    #[serde(flatten)]
    angle: Angle,
    /// Number of independent codes.
    #[arg(long, default_value_t = 1)]
    runs: u64,
}

/// Everything needed to reproduce a run.
struct Run {
    seed: Option<u64>,
    streams: usize,
    out: PathBuf,
    format: Format,
}

impl Run {
    fn config(&self, subcommand: &str, args: &impl Serialize) -> CliResult<Value> {
        Ok(json!({
            "subcommand": subcommand,
            "args": serde_json::to_value(args)?,
            "seed": self.seed,
            "streams": self.streams,
            "out": self.out.display().to_string(),
            "format": self.format,
        }))
    }

    fn seed(&self) -> u64 {
        self.seed.expect("seeded subcommand")
    }

    fn finish(&self, config: &Value, table: &Table) -> CliResult<()> {
        write_table(&self.out, self.format, config, table)?;
        write_sidecar(&self.out, config)?;
        eprintln!("wrote {}", self.out.display());
        Ok(())
    }
}

fn check_n(n: u64) -> CliResult<()> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    Ok(())
}

fn point_columns(first: &[&str], d: usize) -> Vec<String> {
    first.iter().map(|s| s.to_string()).chain((0..d).map(|i| format!("x{i}"))).collect()
}

fn point_row(a: u64, b: usize, p: &Point) -> Vec<Cell> {
    let mut row = vec![Cell::from(a), Cell::from(b)];
    row.extend(p.iter().map(|&x| Cell::from(x)));
    row
}

fn run_bounds(run: &Run, mut args: BoundsArgs) -> CliResult<()> {
    let theta = args.angle.resolve().unwrap_or(std::f64::consts::FRAC_PI_3);
    args.angle.theta = Some(theta);
    let config = run.config("bounds", &args)?;
    let rows = bounds::bound_table(args.d_range.dims(), theta)?;
    let mut table = Table::new(["d", "bound_name", "log_value", "value"]);
    for r in rows {
        table.push(vec![r.d.into(), r.bound_name.into(), r.log_value.into(), r.value.into()]);
    }
    run.finish(&config, &table)
}

fn run_sample(run: &Run, mut args: SampleArgs) -> CliResult<()> {
    check_n(args.n)?;
    let (region, exclusion) = args.region.resolve()?;
    let lambda = args.lambda.map(Fugacity::new).transpose()?;
    let config = run.config("sample", &args)?;
    let budget = args.region.budget;
    let samples: Vec<Vec<Point>> = (0..args.n)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(run.seed(), i);
            match (lambda, args.k) {
                (Some(l), _) => sample_poisson_hard_core(&region, &exclusion, l, &mut rng, budget),
                (None, Some(k)) => sample_canonical_hard_core(&region, &exclusion, k, &mut rng, budget),
                (None, None) => unreachable!("clap requires --lambda or --k"),
            }
        })
        .collect::<hardcore::Result<_>>()?;
    let mut table = Table::new(point_columns(&["sample", "index"], region.dim()));
    for (i, x) in samples.iter().enumerate() {
        for (j, p) in x.iter().enumerate() {
            table.push(point_row(i as u64, j, p));
        }
    }
    let total: usize = samples.iter().map(Vec::len).sum();
    println!("{} configurations, {:.4} points on average", samples.len(), total as f64 / samples.len() as f64);
    run.finish(&config, &table)
}

fn run_alpha(run: &Run, mut args: AlphaArgs) -> CliResult<()> {
    check_n(args.n)?;
    let (region, exclusion) = args.region.resolve()?;
    let lambda = Fugacity::new(args.lambda)?;
    let config = run.config("alpha", &args)?;
    let budget = args.region.budget;
    let want = |m: Method| args.method == m || args.method == Method::All;
    let mut table = Table::new(["method", "value", "stderr", "n_samples"]);
    if want(Method::Series) {
        let k_max = truncation_for(lambda, region.measure());
        let series = zhat_series(&region, &exclusion, k_max, args.n, run.seed());
        let a = alpha_series(&series, lambda)?;
        table.push(vec!["series".into(), a.value.into(), a.stderr.into(), args.n.into()]);
    }
    if want(Method::Direct) {
        let a = alpha_direct(&region, &exclusion, lambda, args.n, run.seed(), budget)?;
        table.push(vec!["direct".into(), a.value.into(), a.stderr.into(), a.n_samples.into()]);
    }
    if want(Method::ViaT) {
        let t = alpha_via_t(&region, &exclusion, lambda, args.n, args.n_inner, run.seed(), budget)?;
        for (name, e) in [
            ("via_t", t.alpha_via_t),
            ("empty_window", t.alpha_empty_window),
            ("exp_lower_bound", t.exp_lower_bound),
        ] {
            table.push(vec![name.into(), e.value.into(), e.stderr.into(), e.n_samples.into()]);
        }
    }
    for row in &table.rows {
        if let (Cell::Str(m), Cell::Float(v), Cell::Float(s)) = (&row[0], &row[1], &row[2]) {
            println!("{m:>16}  {v:.6} ± {s:.2e}");
        }
    }
    run.finish(&config, &table)
}

fn report_json(r: &VerificationReport) -> CliResult<Value> {
    if let Some(m) = r.worst_margin {
        finite("worst_margin", m)?;
    }
    if let Some(p) = r.p_value {
        finite("p_value", p)?;
    }
    for (k, &v) in &r.statistics {
        finite(k, v)?;
    }
    Ok(serde_json::to_value(r)?)
}

fn run_verify(run: &Run, args: VerifyArgs) -> CliResult<()> {
    check_n(args.n)?;
    let config = run.config("verify", &args)?;
    let params = SuiteParams {
        trials: args.trials,
        n: args.n,
        c: args.c,
        seed: run.seed(),
    };
    let reports = suites::run(args.suite, params)?.0;
    let dir = run.out.parent().map(PathBuf::from).unwrap_or_default();
    let mut table = Table::new(["lemma_id", "trials", "violations", "worst_margin", "p_value"]);
    for r in &reports {
        let path = dir.join(format!("{}.json", r.lemma_id));
        write_json(&path, &json!({ "tool": output::TOOL, "version": output::VERSION, "config": config, "report": report_json(r)? }))?;
        table.push(vec![
            r.lemma_id.as_str().into(),
            r.trials.into(),
            r.violations.into(),
            r.worst_margin.into(),
            r.p_value.into(),
        ]);
        let status = if r.passed() { "pass" } else { "FAIL" };
        println!("{status}  {:<22} trials={} violations={}", r.lemma_id, r.trials, r.violations);
    }
    run.finish(&config, &table)?;
    let failed = reports.iter().filter(|r| !r.passed()).count();
    if failed > 0 {
        return Err(CliError::VerificationFailed(failed, reports.len()));
    }
    Ok(())
}

fn run_code(run: &Run, mut args: CodeArgs) -> CliResult<()> {
    let theta = args
        .angle
        .resolve()
        .ok_or_else(|| CliError::Usage("code needs --theta or --theta-deg".into()))?;
    let config = run.config("code", &args)?;
    let codes = (0..args.runs)
        .into_par_iter()
        .map(|i| greedy_maximal_code(args.d, theta, &mut stream_rng(run.seed(), i)))
        .collect::<hardcore::Result<Vec<_>>>()?;
    let mut table = Table::new(point_columns(&["code", "index"], args.d));
    for (i, c) in codes.iter().enumerate() {
        println!("code {i}: {} points, min angle {:.6}", c.len(), c.min_angle());
        for (j, p) in c.points.iter().enumerate() {
            table.push(point_row(i as u64, j, p));
        }
    }
    run.finish(&config, &table)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn dispatch(cli: Cli) -> CliResult<()> {
    if let Some(n) = cli.streams {
        if n == 0 {
            return Err(CliError::Usage("--streams must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    // The bound tables are deterministic and take no seed.
    let seed = match (&cli.command, cli.seed) {
        (Command::Bounds(_), s) => s,
        (_, Some(s)) => Some(s),
        (_, None) => {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            Some(s)
        }
    };
    let stem = match &cli.command {
        Command::Bounds(_) => "bounds",
        Command::Sample(_) => "sample",
        Command::Alpha(_) => "alpha",
        Command::Verify(_) => "verify_summary",
        Command::Code(_) => "code",
    };
    let format = Format::resolve(cli.format, cli.out.as_deref());
    let run = Run {
        seed,
        streams: rayon::current_num_threads(),
        out: resolve_out(cli.out, stem, format),
        format,
    };
    match cli.command {
        Command::Bounds(a) => run_bounds(&run, a),
        Command::Sample(a) => run_sample(&run, a),
        Command::Alpha(a) => run_alpha(&run, a),
        Command::Verify(a) => run_verify(&run, a),
        Command::Code(a) => run_code(&run, a),
    }
}
