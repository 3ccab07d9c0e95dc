use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use l1sudoku::bench::{emit_report, load_dataset, run_batch, BatchOptions, ReportFormat};
use l1sudoku::strategy::{solve_pipeline_with, StrategyOptions};
use l1sudoku::{parse_grid, Error, Formulation, Grid, ModelConfig};

/// Environment variable naming the dataset `bench` reads when none is given.
const DATASET_ENV: &str = "L1SUDOKU_DATASET";

#[derive(Parser)]
#[command(name = "l1sudoku", version, about = "Sudoku by ℓ1 and reweighted-ℓ1 minimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single puzzle given inline or as the first puzzle in a file.
    Solve {
        /// 81 characters (`0` or `.` for blanks) or a path.
        puzzle: String,
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = StrategyArg::Full)]
        strategy: StrategyArg,
        /// Start recovery solves from the first solve's basis.
        #[arg(long)]
        warm_restarts: bool,
    },
    /// Run the pipeline over a dataset and report stage tallies.
    Bench {
        #[arg(env = DATASET_ENV)]
        dataset: PathBuf,
        #[command(flatten)]
        model: ModelArgs,
        /// Uniform random sample size; the whole file when omitted.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value_t = StrategyArg::Full)]
        strategy: StrategyArg,
        /// Start recovery solves from the first solve's basis.
        #[arg(long)]
        warm_restarts: bool,
        #[arg(long, value_enum, default_value_t = ReportArg::Table)]
        report: ReportArg,
        /// Write the report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value_t = ModelArg::P1)]
    model: ModelArg,
    #[arg(long, value_enum, default_value_t = MethodArg::Lp1)]
    method: MethodArg,
    /// Cap every LP variable at 1.
    #[arg(long)]
    bounded: bool,
    /// Reweighting offset, used with `--model wp1`.
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    P1,
    Wp1,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lp1,
    Lp2,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StrategyArg {
    None,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportArg {
    Table,
    Json,
    Csv,
}

impl ModelArgs {
    fn config(&self) -> ModelConfig {
        let f = match self.method {
            MethodArg::Lp1 => Formulation::Lp1,
            MethodArg::Lp2 => Formulation::Lp2,
        };
        match self.model {
            ModelArg::P1 => ModelConfig::p1(f, self.bounded),
            ModelArg::Wp1 => ModelConfig::wp1(f, self.bounded, self.epsilon),
        }
    }
}

impl StrategyArg {
    fn options(self, warm_restarts: bool) -> StrategyOptions {
        let base = match self {
            StrategyArg::None => StrategyOptions::first_solve_only(),
            StrategyArg::Full => StrategyOptions::full(),
        };
        StrategyOptions { warm_restarts, ..base }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::FileNotFound(_) | Error::MalformedLine { .. } | Error::Io(_) => 2,
        _ => 1,
    }
}

fn read_puzzle(arg: &str) -> Result<(Grid, Option<Grid>), Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let entries = load_dataset(path)?;
        let first = entries
            .into_iter()
            .next()
            .ok_or_else(|| Error::MalformedInput(format!("{arg} holds no puzzle")))?;
        return Ok((first.puzzle, first.reference));
    }
    if arg.trim().chars().count() != 81 {
        return Err(Error::MalformedInput(format!(
            "{arg:?} is neither a file nor an 81-character puzzle"
        )));
    }
    Ok((parse_grid(arg)?, None))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Solve {
            puzzle,
            model,
            strategy,
            warm_restarts,
        } => {
            let cfg = model.config();
            cfg.validate()?;
            let (grid, reference) = read_puzzle(&puzzle)?;
            let out = solve_pipeline_with(&grid, &cfg, reference.as_ref(), &strategy.options(warm_restarts))?;
            println!("{}", out.final_grid);
            println!();
            print!("{}", out.final_grid.pretty());
            println!();
            println!("solved:     {}", out.success);
            println!("stage:      {}", out.stage);
            println!("difficulty: {}", out.difficulty);
            if out.step3_attempts > 0 {
                println!("attempts:   {}", out.step3_attempts);
            }
            println!("time:       {:.3}s", out.elapsed.as_secs_f64());
            Ok(())
        }
        Command::Bench {
            dataset,
            model,
            sample,
            seed,
            workers,
            strategy,
            warm_restarts,
            report,
            out,
        } => {
            let cfg = model.config();
            let entries = load_dataset(&dataset)?;
            log::info!("{} puzzles in {}", entries.len(), dataset.display());
            let opts = BatchOptions {
                sample_size: sample,
                seed,
                workers,
                strategy: strategy.options(warm_restarts),
            };
            let r = run_batch(&entries, &cfg, &opts)?;
            if r.unverified() > 0 {
                log::error!("{} reported solutions disagree with the oracle", r.unverified());
            }
            let format = match report {
                ReportArg::Table => ReportFormat::Table,
                ReportArg::Json => ReportFormat::Json,
                ReportArg::Csv => ReportFormat::Csv,
            };
            emit_report(&r, format, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
