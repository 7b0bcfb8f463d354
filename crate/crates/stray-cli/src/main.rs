mod io;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use stray::synth::{null_experiment, scenario, timing_grid, NullMethod, Scenario};
use stray::threshold::standardized_spacings;
use stray::{detect, NormalizeMode, SearchMethod, StrayConfig};

use io::CliError;

/// Exit codes: 0 success, 1 anomalies found under `--fail-on-anomaly`,
/// 2 usage error, 3 data error.
#[derive(Parser)]
#[command(
    name = "stray",
    version,
    about = "Anomaly detection via k-nearest-neighbour max-gap scores and an extreme-value threshold"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Detect anomalies in a CSV matrix (file or standard input)
    Detect(DetectArgs),
    /// Sliding-window detection over rows arriving on standard input
    Stream(StreamArgs),
    /// Generate a synthetic scenario dataset, optionally with labels
    Scenario(ScenarioArgs),
    /// Mean false-positive rate over replicated anomaly-free datasets
    Fpr(FprArgs),
    /// Wall-clock timings over an n-by-d grid of methods
    Bench(BenchArgs),
    /// Top order statistics, spacings and standardized spacings of a sample
    Spacings(SpacingsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Kdtree,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args)]
struct DetectOpts {
    /// Neighbourhood size
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Tail probability of the anomalous threshold
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Nearest-neighbour search backend
    #[arg(long, value_enum, default_value_t = MethodArg::Brute)]
    method: MethodArg,
    /// Approximation slack for kd-tree search (0 = exact)
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    /// Use the data as given instead of min-max normalizing each column
    #[arg(long)]
    no_normalize: bool,
    /// Fraction of points assumed typical when the threshold scan starts
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Maximum number of upper-tail gaps in the exponential fit
    #[arg(long, default_value_t = 50)]
    tn: usize,
}

impl DetectOpts {
    fn to_config(&self) -> Result<StrayConfig<f64>, CliError> {
        let method = match self.method {
            MethodArg::Brute => SearchMethod::Brute,
            MethodArg::Kdtree => SearchMethod::KdTree { eps: self.eps },
        };
        let normalize = if self.no_normalize {
            NormalizeMode::None
        } else {
            NormalizeMode::Unitize
        };
        let config = StrayConfig::default()
            .with_k(self.k)
            .with_alpha(self.alpha)
            .with_search_method(method)
            .with_normalize(normalize)
            .with_start_proportion(self.p)
            .with_tail_count(self.tn);
        config.validate().map_err(CliError::usage)?;
        Ok(config)
    }

    fn method_name(&self) -> &'static str {
        match self.method {
            MethodArg::Brute => "brute",
            MethodArg::Kdtree => "kdtree",
        }
    }
}

#[derive(Args)]
struct DetectArgs {
    /// Input CSV path; standard input when omitted or `-`
    input: Option<PathBuf>,
    #[command(flatten)]
    opts: DetectOpts,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the report here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Exit with status 1 when any row is flagged
    #[arg(long)]
    fail_on_anomaly: bool,
}

#[derive(Args)]
struct StreamArgs {
    #[command(flatten)]
    opts: DetectOpts,
    /// Window width in observations
    #[arg(long)]
    window: usize,
    /// Observations the window advances by
    #[arg(long, default_value_t = 1)]
    step: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Exit with status 1 when any window flags a row
    #[arg(long)]
    fail_on_anomaly: bool,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario name: a, b, c, d, e, f, fig3_single or fig3_micro
    #[arg(long, value_parser = parse_scenario)]
    name: Scenario,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Write the dataset here instead of standard output
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a `row_id,is_planted` label file (CSV)
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Args)]
struct FprArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// stray_brute, stray_kdtree, hd_v1 or hd_v2
    #[arg(long, value_parser = parse_method)]
    method: NullMethod,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated list of row counts
    #[arg(long, value_delimiter = ',', required = true)]
    n_values: Vec<usize>,
    /// Comma-separated list of column counts
    #[arg(long, value_delimiter = ',', required = true)]
    d_values: Vec<usize>,
    /// Comma-separated list of methods
    #[arg(long, value_delimiter = ',', value_parser = parse_method, required = true)]
    methods: Vec<NullMethod>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SpacingsArgs {
    /// Single-column CSV sample; standard input when omitted or `-`
    input: Option<PathBuf>,
    /// Number of top spacings to report
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Ignore the input and draw this many standard normal values instead
    #[arg(long)]
    simulate: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_scenario(s: &str) -> Result<Scenario, String> {
    Scenario::from_str(s).map_err(|e| e.to_string())
}

fn parse_method(s: &str) -> Result<NullMethod, String> {
    NullMethod::from_str(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            if !e.message.is_empty() {
                eprintln!("stray: {}", e.message);
            }
            ExitCode::from(e.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Detect(args) => cmd_detect(args),
        Command::Stream(args) => cmd_stream(args),
        Command::Scenario(args) => cmd_scenario(args),
        Command::Fpr(args) => cmd_fpr(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Spacings(args) => cmd_spacings(args),
    }
}

fn cmd_detect(args: DetectArgs) -> Result<u8, CliError> {
    let config = args.opts.to_config()?;
    let data = io::read_matrix(args.input.as_deref())?;
    let report = detect(&data, &config).map_err(CliError::data)?;
    let mut out = io::writer(args.output.as_deref())?;
    output::write_detect_report(
        &mut out,
        &report,
        &config,
        args.opts.method_name(),
        args.format.into(),
    )?;
    Ok(exit_for_flags(args.fail_on_anomaly, report.n_anomalies() > 0))
}

fn cmd_stream(args: StreamArgs) -> Result<u8, CliError> {
    let config = args.opts.to_config()?;
    if args.window <= args.opts.k {
        return Err(CliError::usage_msg(format!(
            "--window {} must exceed --k {}",
            args.window, args.opts.k
        )));
    }
    if args.step == 0 || args.step > args.window {
        return Err(CliError::usage_msg(format!(
            "--step {} must lie in 1..={}",
            args.step, args.window
        )));
    }
    let any = io::stream_windows(&config, args.window, args.step, args.format.into())?;
    Ok(exit_for_flags(args.fail_on_anomaly, any))
}

fn cmd_scenario(args: ScenarioArgs) -> Result<u8, CliError> {
    let labeled = scenario::<f64>(args.name, args.seed);
    let mut out = io::writer(args.output.as_deref())?;
    output::write_scenario(&mut out, &labeled, args.format.into())?;
    if let Some(path) = args.labels {
        let mut labels_out = io::writer(Some(&path))?;
        output::write_labels(&mut labels_out, &labeled)?;
    }
    Ok(0)
}

fn cmd_fpr(args: FprArgs) -> Result<u8, CliError> {
    let result = null_experiment::<f64>(
        args.n,
        args.d,
        args.iters,
        args.alpha,
        args.k,
        args.method,
        args.seed,
    )
    .map_err(CliError::usage)?;
    let mut out = io::writer(args.output.as_deref())?;
    output::write_fpr(&mut out, &args, &result, args.format.into())?;
    Ok(0)
}

fn cmd_bench(args: BenchArgs) -> Result<u8, CliError> {
    let cells = timing_grid(
        &args.n_values,
        &args.d_values,
        &args.methods,
        args.k,
        args.alpha,
        args.seed,
    )
    .map_err(CliError::usage)?;
    let mut out = io::writer(args.output.as_deref())?;
    output::write_bench(&mut out, &cells, args.format.into())?;
    Ok(0)
}

fn cmd_spacings(args: SpacingsArgs) -> Result<u8, CliError> {
    let sample: Vec<f64> = match args.simulate {
        Some(n) => stray::synth::standard_normal_matrix::<f64>(n, 1, args.seed)
            .as_slice()
            .to_vec(),
        None => io::read_column(args.input.as_deref())?,
    };
    let diagnostics = standardized_spacings(&sample, args.kmax).map_err(CliError::data)?;
    let mut out = io::writer(args.output.as_deref())?;
    output::write_spacings(&mut out, &diagnostics, args.format.into())?;
    Ok(0)
}

fn exit_for_flags(fail_on_anomaly: bool, any_flagged: bool) -> u8 {
    if fail_on_anomaly && any_flagged {
        1
    } else {
        0
    }
}

impl From<FormatArg> for output::Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => output::Format::Csv,
            FormatArg::Json => output::Format::Json,
        }
    }
}
