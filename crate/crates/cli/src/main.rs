//! `nk`: docking, sweeps, single walks and the exhaustive oracle.
//!
//! Exit codes: 0 success (or docking within tolerance), 1 docking outside
//! tolerance, 2 usage or runtime error.

mod ranges;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nk_core::experiment;
use nk_core::landscape::{GenerateOptions, TableStorage};
use nk_core::report::ReportTable;
use nk_core::rng::{self, StreamTag};
use nk_core::search::{self, Evaluation, WalkResult};
use nk_core::{
    Algorithm, Configuration, DependencyScheme, GlobalOptimumReport, GridSpec, Landscape,
    NkError, RobustnessSpec, Summarize, SweepOrder,
};

#[derive(Debug, Parser)]
#[command(name = "nk", version, about = "Metered local search on NK fitness landscapes")]
struct Cli {
    /// Master seed; every random quantity derives from it.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Replications (distinct landscapes) per cell.
    #[arg(long, global = true, default_value_t = 10_000)]
    iterations: u64,

    /// Output file, or `-` for standard output.
    #[arg(long, global = true, default_value = "-")]
    out: String,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Worker threads; 0 picks one per CPU.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// SMMLS mean final fitness at N=16 against the published reference rows.
    Dock(DockArgs),
    /// Paired SMMLS/IMMLS comparison over a K x T grid.
    Sweep(SweepArgs),
    /// Paired comparison at K = N - 1 over a range of N.
    Robustness(RobustnessArgs),
    /// One landscape, one walk.
    Walk(WalkArgs),
    /// Exhaustive global optimum and local-optima count.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct DockArgs {
    /// Largest accepted |measured - published| deviation.
    #[arg(long, default_value_t = 0.01)]
    tolerance: f64,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    /// K values, e.g. `0..15` or `0,2,4`; defaults to `0..n-1`.
    #[arg(long)]
    k_list: Option<String>,
    #[arg(long, default_value = "10,50,100,200")]
    t_list: String,
    #[arg(long, default_value = "fixed")]
    order_mode: SweepOrder,
    #[arg(long, default_value = "random")]
    scheme: DependencyScheme,
}

#[derive(Debug, Args)]
struct RobustnessArgs {
    #[arg(long, default_value = "16..20")]
    n_list: String,
    #[arg(long, default_value = "10,50,100,200")]
    t_list: String,
    #[arg(long, default_value = "fixed")]
    order_mode: SweepOrder,
    #[arg(long, default_value = "random")]
    scheme: DependencyScheme,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[arg(long, default_value = "immls")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Meter budget.
    #[arg(long, default_value_t = 100)]
    t: u64,
    /// Emit every charged evaluation.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value = "fixed")]
    order_mode: SweepOrder,
    #[arg(long, default_value = "random")]
    scheme: DependencyScheme,
    /// Walk on a landscape loaded from JSON instead of generating one.
    #[arg(long)]
    landscape: Option<PathBuf>,
    /// Starting bit string (node 0 first); drawn from the seed if omitted.
    #[arg(long)]
    start: Option<String>,
    /// Also write the landscape walked on as JSON.
    #[arg(long)]
    save_landscape: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value = "random")]
    scheme: DependencyScheme,
    /// Analyse a landscape loaded from JSON instead of generating one.
    #[arg(long)]
    landscape: Option<PathBuf>,
}

type CliResult<T> = Result<T, NkError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> CliResult<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| NkError::Domain(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Dock(args) => cmd_dock(cli, args),
        Command::Sweep(args) => cmd_sweep(cli, args),
        Command::Robustness(args) => cmd_robustness(cli, args),
        Command::Walk(args) => cmd_walk(cli, args),
        Command::Oracle(args) => cmd_oracle(cli, args),
    })
}

/// Canonical command line with every default filled in.
fn resolved_command(cli: &Cli, tail: &str) -> String {
    let line = format!(
        "nk --seed {} --iterations {} --format {} --out {} --threads {} {tail}",
        cli.seed,
        cli.iterations,
        cli.format.as_str(),
        cli.out,
        cli.threads
    );
    eprintln!("# resolved: {line}");
    line
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    if cli.out == "-" {
        let mut stdout = std::io::stdout().lock();
        stdout
            .write_all(text.as_bytes())
            .and_then(|()| stdout.flush())
            .map_err(|e| NkError::Io { path: "<stdout>".into(), source: e })
    } else {
        std::fs::write(&cli.out, text).map_err(|e| NkError::Io { path: cli.out.clone().into(), source: e })
    }
}

fn emit_table<T: ReportTable>(cli: &Cli, table: &T) -> CliResult<()> {
    let text = match cli.format {
        Format::Csv => table.to_csv_string()?,
        Format::Json => table.to_json_string()?,
    };
    emit(cli, &text)
}

fn list(flag: &str, text: &str) -> CliResult<Vec<u64>> {
    ranges::parse_list(text).map_err(|e| NkError::Domain(format!("--{flag}: {e}")))
}

fn usize_list(flag: &str, text: &str) -> CliResult<Vec<usize>> {
    list(flag, text)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| NkError::Domain(format!("--{flag}: {v} too large"))))
        .collect()
}

fn cmd_dock(cli: &Cli, args: &DockArgs) -> CliResult<ExitCode> {
    if !(args.tolerance.is_finite() && args.tolerance >= 0.0) {
        return Err(NkError::Domain("--tolerance must be a non-negative number".into()));
    }
    let command = resolved_command(cli, &format!("dock --tolerance {}", args.tolerance));
    let mut table = experiment::dock(cli.iterations, cli.seed)?;
    table.metadata.tolerance = args.tolerance;
    table.metadata.command = Some(command);
    emit_table(cli, &table)?;
    eprint!("{}", table.summarize());
    Ok(if table.passes() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_sweep(cli: &Cli, args: &SweepArgs) -> CliResult<ExitCode> {
    let k_values = match &args.k_list {
        Some(text) => usize_list("k-list", text)?,
        None => (0..args.n).collect(),
    };
    let t_values = list("t-list", &args.t_list)?;
    let command = resolved_command(
        cli,
        &format!(
            "sweep --n {} --k-list {} --t-list {} --order-mode {} --scheme {}",
            args.n,
            ranges::join(&k_values),
            ranges::join(&t_values),
            args.order_mode,
            args.scheme
        ),
    );
    let grid = GridSpec {
        n: args.n,
        k_values,
        t_values,
        iterations: cli.iterations,
        master_seed: cli.seed,
        scheme: args.scheme,
        order_mode: args.order_mode,
    };
    let mut table = experiment::compare_grid(&grid)?;
    table.metadata.command = Some(command);
    emit_table(cli, &table)?;
    eprint!("{}", table.summarize());
    Ok(ExitCode::SUCCESS)
}

fn cmd_robustness(cli: &Cli, args: &RobustnessArgs) -> CliResult<ExitCode> {
    let n_values = usize_list("n-list", &args.n_list)?;
    let t_values = list("t-list", &args.t_list)?;
    let command = resolved_command(
        cli,
        &format!(
            "robustness --n-list {} --t-list {} --order-mode {} --scheme {}",
            ranges::join(&n_values),
            ranges::join(&t_values),
            args.order_mode,
            args.scheme
        ),
    );
    let spec = RobustnessSpec {
        n_values,
        t_values,
        iterations: cli.iterations,
        master_seed: cli.seed,
        scheme: args.scheme,
        order_mode: args.order_mode,
    };
    let mut table = experiment::robustness_sweep(&spec)?;
    table.metadata.command = Some(command);
    emit_table(cli, &table)?;
    eprint!("{}", table.summarize());
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct WalkReport<'a> {
    command: &'a str,
    algorithm: Algorithm,
    order_mode: SweepOrder,
    budget: u64,
    landscape_n: usize,
    landscape_k: usize,
    #[serde(serialize_with = "as_string")]
    landscape_seed: u64,
    result: &'a WalkResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<&'a [Evaluation]>,
}

fn as_string<S: serde::Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn cmd_walk(cli: &Cli, args: &WalkArgs) -> CliResult<ExitCode> {
    let mut tail = format!(
        "walk --algorithm {} --t {} --order-mode {}",
        args.algorithm, args.t, args.order_mode
    );
    match &args.landscape {
        Some(path) => {
            let _ = write!(tail, " --landscape {}", path.display());
        }
        None => {
            let _ = write!(tail, " --n {} --k {} --scheme {}", args.n, args.k, args.scheme);
        }
    }
    if let Some(start) = &args.start {
        let _ = write!(tail, " --start {start}");
    }
    if args.trace {
        tail.push_str(" --trace");
    }
    if let Some(path) = &args.save_landscape {
        let _ = write!(tail, " --save-landscape {}", path.display());
    }
    let command = resolved_command(cli, &tail);

    let landscape = match &args.landscape {
        Some(path) => Landscape::load(path)?,
        None => {
            let options = GenerateOptions { storage: TableStorage::Auto, ..Default::default() };
            Landscape::generate_with(args.n, args.k, args.scheme, cli.seed, options)?
        }
    };
    if let Some(path) = &args.save_landscape {
        landscape.save(path)?;
    }
    let start = match &args.start {
        Some(bits) => bits.parse::<Configuration>()?,
        None => Configuration::random(
            landscape.n(),
            &mut rng::derived_stream(cli.seed, StreamTag::Start, 0),
        )?,
    };
    let mut stream = rng::derived_stream(cli.seed, StreamTag::Walk, 0);
    let mut trace: Vec<Evaluation> = Vec::new();
    let result = search::run_walk(
        args.algorithm,
        &landscape,
        &start,
        args.t,
        args.order_mode,
        &mut stream,
        &mut trace,
    )?;

    let text = match cli.format {
        Format::Json => {
            let report = WalkReport {
                command: &command,
                algorithm: args.algorithm,
                order_mode: args.order_mode,
                budget: args.t,
                landscape_n: landscape.n(),
                landscape_k: landscape.k(),
                landscape_seed: landscape.seed(),
                result: &result,
                trace: args.trace.then_some(trace.as_slice()),
            };
            serde_json::to_string_pretty(&report)? + "\n"
        }
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# command: {command}");
            let _ = writeln!(out, "# algorithm: {}", args.algorithm);
            let _ = writeln!(out, "# budget: {}", args.t);
            let _ = writeln!(out, "# landscape: n={} k={} seed={}", landscape.n(), landscape.k(), landscape.seed());
            let _ = writeln!(out, "# initial_config: {}", result.initial_config);
            let _ = writeln!(out, "# initial_fitness: {:.6}", result.initial_fitness);
            let _ = writeln!(out, "# final_config: {}", result.final_config);
            let _ = writeln!(out, "# final_fitness: {:.6}", result.final_fitness);
            let _ = writeln!(out, "# evaluations_used: {}", result.evaluations_used);
            let _ = writeln!(out, "# successful_moves: {}", result.successful_moves);
            let _ = writeln!(out, "# time_steps_executed: {}", result.time_steps_executed);
            let _ = writeln!(out, "# termination: {}", result.termination);
            out.push_str("time_step,node,candidate_fitness,accepted,meter\n");
            if args.trace {
                for e in &trace {
                    let _ = writeln!(
                        out,
                        "{},{},{:.6},{},{}",
                        e.time_step,
                        e.node,
                        e.candidate_fitness,
                        if e.accepted { "accept" } else { "reject" },
                        e.consumed
                    );
                }
            }
            out
        }
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OracleReport<'a> {
    command: &'a str,
    n: usize,
    k: usize,
    #[serde(serialize_with = "as_string")]
    seed: u64,
    optimum_config: String,
    optimum_fitness: f64,
    local_optima_count: u64,
}

fn cmd_oracle(cli: &Cli, args: &OracleArgs) -> CliResult<ExitCode> {
    let tail = match &args.landscape {
        Some(path) => format!("oracle --landscape {}", path.display()),
        None => format!("oracle --n {} --k {} --scheme {}", args.n, args.k, args.scheme),
    };
    let command = resolved_command(cli, &tail);
    let landscape = match &args.landscape {
        Some(path) => Landscape::load(path)?,
        None => {
            if args.n > nk_core::landscape::ENUMERATION_CAP {
                return Err(NkError::EnumerationCap { n: args.n, cap: nk_core::landscape::ENUMERATION_CAP });
            }
            Landscape::generate(args.n, args.k, args.scheme, cli.seed)?
        }
    };
    let GlobalOptimumReport { optimum_config, optimum_fitness, local_optima_count } =
        landscape.enumerate_global_optimum()?;
    let report = OracleReport {
        command: &command,
        n: landscape.n(),
        k: landscape.k(),
        seed: landscape.seed(),
        optimum_config: optimum_config.to_string(),
        optimum_fitness,
        local_optima_count,
    };
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# command: {command}");
            let _ = writeln!(out, "# landscape: n={} k={} seed={}", report.n, report.k, report.seed);
            out.push_str("optimum_config,optimum_fitness,local_optima_count\n");
            let _ = writeln!(out, "{},{:.6},{}", report.optimum_config, optimum_fitness, local_optima_count);
            out
        }
    };
    emit(cli, &text)?;
    Ok(ExitCode::SUCCESS)
}
