use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ecs_epp::quadrature::QuadratureSpec;
use ecs_epp::teleport::oracle::CorrectionWiring;
use ecs_epp_cli::commands;
use ecs_epp_cli::config::ConfigFile;
use ecs_epp_cli::grid::{self, Axis, SweepGrid};
use ecs_epp_cli::table::emit;
use ecs_epp_cli::validate::{self, Level, ValidationOptions};
use ecs_epp_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(
    name = "ecs-epp",
    version,
    about = "Lossy ECS and photon-pair teleportation sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Negativity of both channels against r.
    Entanglement(SweepArgs),
    /// Average teleportation fidelity against r and η.
    Fidelity(SweepArgs),
    /// Success probability against r and η.
    Success(SweepArgs),
    /// Classical-limit and crossover thresholds in r.
    Thresholds(ThresholdArgs),
    /// Run the oracle-equivalence and invariant checks.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct Common {
    /// Output path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Quadrature nodes as N_polar,N_azimuth.
    #[arg(long)]
    quad: Option<String>,
    /// key=value file supplying any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SweepArgs {
    /// Amplitudes, as start:stop:count or a comma list.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Normalized decoherence times in [0, 1].
    #[arg(long, allow_hyphen_values = true)]
    r: Option<String>,
    /// Detection efficiencies in (0, 1].
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ThresholdArgs {
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// A single detection efficiency.
    #[arg(long, allow_hyphen_values = true)]
    eta: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Fast,
    Full,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    level: Option<LevelArg>,
    #[arg(long, hide = true)]
    swap_corrections: bool,
    #[command(flatten)]
    common: Common,
}

struct Resolved {
    config: ConfigFile,
    out: Option<PathBuf>,
    quad: QuadratureSpec,
    threads: Option<usize>,
}

fn resolve(common: &Common) -> CliResult<Resolved> {
    let config = match &common.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let quad = match common.quad.as_deref().or_else(|| config.get("quad")) {
        Some(text) => grid::parse_quad(text)?,
        None => QuadratureSpec::default(),
    };
    let threads = match common.threads {
        Some(n) => Some(n),
        None => config
            .get("threads")
            .map(|t| {
                t.parse()
                    .map_err(|_| CliError::usage(format!("threads {t:?}: not a count")))
            })
            .transpose()?,
    };
    if threads == Some(0) {
        return Err(CliError::usage("threads must be at least 1"));
    }
    let out = common
        .out
        .clone()
        .or_else(|| config.get("out").map(PathBuf::from));
    Ok(Resolved {
        config,
        out,
        quad,
        threads,
    })
}

fn in_pool<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> CliResult<R> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::usage(format!("cannot start {threads:?} threads: {e}")))?;
    Ok(pool.install(job))
}

fn sweep(args: &SweepArgs) -> CliResult<(SweepGrid, Resolved)> {
    let res = resolve(&args.common)?;
    let c = &res.config;
    let grid = SweepGrid {
        alphas: Axis::alphas(c.pick(args.alpha.as_deref(), "alpha", grid::DEFAULT_ALPHAS))?,
        rs: Axis::rs(c.pick(args.r.as_deref(), "r", grid::DEFAULT_RS))?,
        etas: Axis::etas(c.pick(args.eta.as_deref(), "eta", grid::DEFAULT_ETAS))?,
        quad: res.quad,
    };
    Ok((grid, res))
}

fn write(text: &str, out: Option<&Path>) -> CliResult<()> {
    emit(text, out)
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Entanglement(args) => {
            let (grid, res) = sweep(&args)?;
            let table = in_pool(res.threads, || commands::entanglement(&grid))?;
            write(&table.render(), res.out.as_deref())
        }
        Command::Fidelity(args) => {
            let (grid, res) = sweep(&args)?;
            let table = in_pool(res.threads, || commands::fidelity(&grid))?;
            write(&table.render(), res.out.as_deref())
        }
        Command::Success(args) => {
            let (grid, res) = sweep(&args)?;
            let table = in_pool(res.threads, || commands::success(&grid))?;
            write(&table.render(), res.out.as_deref())
        }
        Command::Thresholds(args) => {
            let res = resolve(&args.common)?;
            let c = &res.config;
            let alphas = Axis::alphas(c.pick(
                args.alpha.as_deref(),
                "alpha",
                grid::DEFAULT_THRESHOLD_ALPHAS,
            ))?;
            let etas = Axis::etas(c.pick(args.eta.as_deref(), "eta", "1"))?;
            let [eta] = etas.values[..] else {
                return Err(CliError::usage("thresholds take a single --eta"));
            };
            let report = in_pool(res.threads, || commands::thresholds(&alphas, eta, res.quad))??;
            write(&report.table.render(), res.out.as_deref())?;
            for f in &report.failures {
                eprintln!("ecs-epp: {f}");
            }
            if report.failures.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(report.failures.len()))
            }
        }
        Command::Validate(args) => {
            let res = resolve(&args.common)?;
            let level = match args.level {
                Some(LevelArg::Fast) => Level::Fast,
                Some(LevelArg::Full) => Level::Full,
                None => match res.config.get("level") {
                    None | Some("fast") => Level::Fast,
                    Some("full") => Level::Full,
                    Some(other) => {
                        return Err(CliError::usage(format!(
                            "level {other:?}: expected fast or full"
                        )))
                    }
                },
            };
            let swap = args.swap_corrections
                || match res.config.get("swap_corrections") {
                    None | Some("false") => false,
                    Some("true") => true,
                    Some(other) => {
                        return Err(CliError::usage(format!(
                            "swap_corrections {other:?}: expected true or false"
                        )))
                    }
                };
            let mut opts = ValidationOptions::new(level);
            opts.quad = res.quad;
            if swap {
                opts.wiring = CorrectionWiring::Swapped;
            }
            let report = in_pool(res.threads, || validate::run(&opts))?;
            write(&report.render(), res.out.as_deref())?;
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Validation(report.failures()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ecs-epp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
