use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use absorptive_decay::analysis::{time_grid, Spacing};
use absorptive_decay::expansion::{Expansion, Source, DEFAULT_PAIRS};
use absorptive_decay::io::{self as aio, Config, Document, SingularityReport};
use absorptive_decay::oracle::{survival_series_exact, OracleOptions};
use absorptive_decay::pole_solver::find_poles;
use absorptive_decay::resonant_basis::ResonantBasis;
use absorptive_decay::singularity::{track_pole, DEFAULT_STEPS};
use absorptive_decay::verify::{self, Status, VerifyConfig};
use absorptive_decay::{DeltaShellPotential, Error, SineInitialState};

#[derive(Parser)]
#[command(name = "absorptive-decay", version, about = "Resonance poles, resonant expansions and exact survival amplitudes for an absorptive delta-shell")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate proper and improper poles.
    Poles(PolesArgs),
    /// Survival amplitude and probability on a time grid.
    Survival(SurvivalArgs),
    /// Locate a spectral singularity by continuation in b.
    Scan(ScanArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum GridSpacing {
    Linear,
    Log,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeriesSource {
    Expansion,
    Oracle,
}

#[derive(Args)]
struct ShellArgs {
    /// Absorption intensity b.
    #[arg(long, default_value_t = 4.5 * PI, allow_hyphen_values = true)]
    b: f64,
    /// Shell radius a.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
}

#[derive(Args)]
struct StateArgs {
    /// Box mode: k_c = qπ/a.
    #[arg(long, conflicts_with = "kc")]
    q: Option<u32>,
    /// Initial wavenumber k_c.
    #[arg(long, allow_hyphen_values = true)]
    kc: Option<f64>,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PolesArgs {
    #[command(flatten)]
    shell: ShellArgs,
    /// Poles per family.
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Add normalization amplitudes A_p.
    #[arg(long)]
    states: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SurvivalArgs {
    #[command(flatten)]
    shell: ShellArgs,
    #[command(flatten)]
    state: StateArgs,
    /// Pole pairs kept in the expansion.
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    n: usize,
    /// Last time, absolute or with a `tau` suffix.
    #[arg(long, default_value = "40tau")]
    tmax: TimeSpec,
    /// First time; defaults to tmax/samples.
    #[arg(long)]
    tmin: Option<TimeSpec>,
    #[arg(long, default_value_t = 2000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = GridSpacing::Linear)]
    spacing: GridSpacing,
    /// Append the exact amplitude from the contour quadrature.
    #[arg(long)]
    oracle: bool,
    /// Which amplitude fills the standard columns.
    #[arg(long, value_enum, default_value_t = SeriesSource::Expansion)]
    source: SeriesSource,
    /// Reserved; the computation is deterministic.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    /// Shell radius a.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    a: f64,
    /// Pole family index (negative for improper poles).
    #[arg(long, allow_hyphen_values = true)]
    family: i32,
    /// Intensity bracket `lo:hi`.
    #[arg(long = "b-range", default_value = "13:15")]
    b_range: String,
    #[arg(long, default_value_t = DEFAULT_STEPS)]
    steps: usize,
    /// Also write the sampled trajectory as CSV.
    #[arg(long)]
    trajectory: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    shell: ShellArgs,
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    n: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// A time, either absolute or in lifetimes.
#[derive(Clone, Copy, Debug)]
enum TimeSpec {
    Absolute(f64),
    Lifetimes(f64),
}

impl TimeSpec {
    fn resolve(self, tau: f64) -> f64 {
        match self {
            TimeSpec::Absolute(t) => t,
            TimeSpec::Lifetimes(m) => m * tau,
        }
    }
}

impl FromStr for TimeSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num, tau) = match s.strip_suffix("tau") {
            Some(rest) => (rest.trim(), true),
            None => (s, false),
        };
        let v: f64 = num.parse().map_err(|_| format!("invalid time `{s}`"))?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(format!("time must be positive, got `{s}`"));
        }
        Ok(if tau { TimeSpec::Lifetimes(v) } else { TimeSpec::Absolute(v) })
    }
}

impl std::fmt::Display for TimeSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimeSpec::Absolute(t) => write!(f, "{t}"),
            TimeSpec::Lifetimes(m) => write!(f, "{m}tau"),
        }
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn kv(config: &mut Config, key: &str, value: impl ToString) {
    config.push((key.to_string(), value.to_string()));
}

fn shell(args: &ShellArgs) -> Result<DeltaShellPotential, Error> {
    DeltaShellPotential::new(args.b, args.a)
}

fn initial_state(args: &StateArgs, a: f64, config: &mut Config) -> Result<SineInitialState, Error> {
    match (args.q, args.kc) {
        (_, Some(kc)) => {
            kv(config, "kc", kc);
            SineInitialState::new(kc, a)
        }
        (q, None) => {
            let q = q.unwrap_or(1);
            kv(config, "q", q);
            SineInitialState::box_state(q, a)
        }
    }
}

fn cmd_poles(args: &PolesArgs) -> Result<(), Error> {
    let pot = shell(&args.shell)?;
    let set = find_poles(&pot, args.n, args.n)?;
    let mut config = Config::new();
    kv(&mut config, "command", "poles");
    kv(&mut config, "b", pot.intensity());
    kv(&mut config, "a", pot.radius());
    kv(&mut config, "n", args.n);
    let mut w = sink(&args.out.output)?;
    match (args.out.format, args.states) {
        (Format::Csv, false) => aio::write_poles_csv(&mut w, &config, &set)?,
        (Format::Csv, true) => aio::write_states_csv(&mut w, &config, &ResonantBasis::new(&set)?)?,
        (Format::Json, false) => aio::write_json(&mut w, &Document::new(&config, None, aio::pole_records(&set)))?,
        (Format::Json, true) => {
            let rows = aio::state_records(&ResonantBasis::new(&set)?);
            aio::write_json(&mut w, &Document::new(&config, None, rows))?
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_survival(args: &SurvivalArgs) -> Result<(), Error> {
    let pot = shell(&args.shell)?;
    let mut config = Config::new();
    kv(&mut config, "command", "survival");
    kv(&mut config, "b", pot.intensity());
    kv(&mut config, "a", pot.radius());
    let init = initial_state(&args.state, pot.radius(), &mut config)?;
    let expansion = Expansion::new(&pot, &init, args.n)?;
    let tau = expansion.lifetime()?;
    let tmax = args.tmax.resolve(tau);
    let tmin = args.tmin.map_or(tmax / args.samples.max(1) as f64, |t| t.resolve(tau));
    let spacing = match args.spacing {
        GridSpacing::Linear => Spacing::Linear,
        GridSpacing::Log => Spacing::Log,
    };
    let grid = time_grid(tmin, tmax, args.samples, spacing)?;
    for (k, v) in [
        ("n", args.n.to_string()),
        ("tau", tau.to_string()),
        ("tmin", tmin.to_string()),
        ("tmax", args.tmax.to_string()),
        ("samples", args.samples.to_string()),
        ("spacing", format!("{spacing:?}").to_lowercase()),
        ("seed", args.seed.to_string()),
    ] {
        kv(&mut config, k, v);
    }

    let opts = OracleOptions::default();
    let needs_oracle = args.oracle || matches!(args.source, SeriesSource::Oracle);
    let oracle = if needs_oracle {
        Some(survival_series_exact(&expansion, &grid, args.n, &opts)?)
    } else {
        None
    };
    let series = match args.source {
        SeriesSource::Expansion => expansion.survival_series(&grid)?,
        SeriesSource::Oracle => oracle.clone().expect("computed above"),
    };
    kv(&mut config, "source", format!("{:?}", series.source).to_lowercase());

    let mut w = sink(&args.out.output)?;
    let note = "S = |A|^2; S_exp_only and S_tail_only square the exponential and power-law parts";
    match (args.out.format, args.oracle && matches!(args.source, SeriesSource::Expansion)) {
        (Format::Csv, false) => aio::write_csv(&mut w, &config, &[note], &aio::survival_rows(&series))?,
        (Format::Csv, true) => {
            let rows = aio::compared_rows(&series, oracle.as_ref().expect("computed above"))?;
            aio::write_csv(&mut w, &config, &[note], &rows)?
        }
        (Format::Json, false) => {
            aio::write_json(&mut w, &Document::new(&config, Some(series.source), aio::survival_rows(&series)))?
        }
        (Format::Json, true) => {
            let rows = aio::compared_rows(&series, oracle.as_ref().expect("computed above"))?;
            aio::write_json(&mut w, &Document::new(&config, Some(Source::Expansion), rows))?
        }
    }
    w.flush()?;
    Ok(())
}

fn parse_range(s: &str) -> Result<(f64, f64), Error> {
    let bad = || Error::Domain(format!("b-range must be `lo:hi` with 0 < lo < hi, got `{s}`"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo > 0.0 && lo < hi && hi.is_finite()) {
        return Err(bad());
    }
    Ok((lo, hi))
}

fn cmd_scan(args: &ScanArgs) -> Result<(), Error> {
    let (lo, hi) = parse_range(&args.b_range)?;
    if args.family == 0 {
        return Err(Error::Domain("family index must be non-zero".into()));
    }
    let pot = DeltaShellPotential::new(lo, args.a)?;
    let n = args.family.unsigned_abs() as usize;
    let poles = find_poles(&pot, n, n)?;
    let pole = *poles.get(args.family).expect("requested family was solved");
    let traj = track_pole(&pot, pole, lo, hi, args.steps)?;
    let mut config = Config::new();
    kv(&mut config, "command", "scan");
    kv(&mut config, "a", args.a);
    kv(&mut config, "family", args.family);
    kv(&mut config, "b_range", format!("{lo}:{hi}"));
    kv(&mut config, "steps", args.steps);
    if let Some(path) = &args.trajectory {
        let mut w = sink(&Some(path.clone()))?;
        aio::write_csv(&mut w, &config, &[], &aio::trajectory_rows(&traj))?;
        w.flush()?;
    }
    let crossing = traj.crossing.ok_or(Error::NoSingularity {
        family: args.family,
        lo,
        hi,
    })?;
    let mut w = sink(&args.output)?;
    aio::write_json(&mut w, &Document::new(&config, None, SingularityReport::from(&crossing)))?;
    w.flush()?;
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, Error> {
    let pot = shell(&args.shell)?;
    let mut config = Config::new();
    kv(&mut config, "command", "verify");
    kv(&mut config, "b", pot.intensity());
    kv(&mut config, "a", pot.radius());
    kv(&mut config, "n", args.n);
    let init = initial_state(&args.state, pot.radius(), &mut config)?;
    let report = verify::run(&VerifyConfig {
        potential: pot,
        init,
        pairs: args.n,
    })?;
    for c in report.warnings() {
        eprintln!("warning: {} is trend-inconclusive ({})", c.name, c.detail);
    }
    for c in report.checks.iter().filter(|c| c.status == Status::Fail) {
        eprintln!("fail: {} = {:.3e} (threshold {:.1e}; {})", c.name, c.value, c.threshold, c.detail);
    }
    let mut w = sink(&args.output)?;
    aio::write_json(&mut w, &Document::new(&config, None, &report))?;
    w.flush()?;
    Ok(report.passed())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        Error::NoSingularity { .. } | Error::NoTransition { .. } => 3,
        _ => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Poles(a) => cmd_poles(a).map(|_| true),
        Command::Survival(a) => cmd_survival(a).map(|_| true),
        Command::Scan(a) => cmd_scan(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(4),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
