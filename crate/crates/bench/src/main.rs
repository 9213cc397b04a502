use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use boolprop_bench::config::{parse_far, parse_grid};
use boolprop_bench::instance::{generate_instance, InstanceKind, InstanceSpec};
use boolprop_bench::{run_experiment, BenchError, Settings};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boolprop", version, about = "Seeded experiments with Boolean function property testers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tester on generated or given instances at one or more ε.
    Test(TestArgs),
    /// Run a tester over a parameter grid, e.g. `--grid eps=0.1,0.05`.
    Sweep {
        #[command(flatten)]
        args: TestArgs,
        #[arg(long, value_name = "eps=LIST")]
        grid: String,
    },
    /// Write one generated instance in the text function format.
    Gen(GenArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// junta, fourier-degree, sparse-poly-deg, sparse-poly or parity.
    class: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    s: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Far instances, ε-far when no margin is given.
    #[arg(long, num_args = 0..=1, default_missing_value = "", value_name = "GAMMA")]
    far: Option<String>,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated ε values.
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    /// k-junta route: result3 or result1.
    #[arg(long)]
    route: Option<String>,
    /// Test this function (text format) in every trial.
    #[arg(long)]
    input: Option<PathBuf>,
    /// CSV report; the JSON summary is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for per-trial JSON-lines query transcripts.
    #[arg(long)]
    transcripts: Option<PathBuf>,
    /// Flat key=value file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    common: Common,
    /// Distance target for far instances without a margin.
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl TestArgs {
    fn settings(&self) -> Result<Settings, BenchError> {
        let c = &self.common;
        let flags = Settings {
            class: c.class.clone(),
            n: c.n,
            k: c.k,
            s: c.s,
            d: c.d,
            eps: self.eps.as_deref().map(parse_grid).transpose()?,
            trials: self.trials,
            seed: c.seed,
            far: c.far.as_deref().map(parse_far).transpose()?.flatten(),
            eta: self.eta,
            route: self.route.clone(),
            input: self.input.clone(),
            out: self.out.clone(),
            transcripts: self.transcripts.clone(),
        };
        let base = match &self.config {
            Some(p) => Settings::load(p)?,
            None => Settings::default(),
        };
        Ok(base.merge(flags))
    }
}

fn run_test(settings: Settings) -> Result<(), BenchError> {
    let cfg = settings.into_config()?;
    let report = run_experiment(&cfg)?;
    match &cfg.out {
        Some(path) => {
            let json = report.write_files(path)?;
            eprintln!("wrote {} and {}", path.display(), json.display());
        }
        None => report.write_csv(io::stdout().lock())?,
    }
    eprintln!("{} trials in {:.2}s", report.outcomes.len(), report.wall_seconds);
    Ok(())
}

fn run_gen(args: GenArgs) -> Result<(), BenchError> {
    let c = &args.common;
    let settings = Settings { class: c.class.clone(), k: c.k, s: c.s, d: c.d, ..Default::default() };
    let class = settings.class_spec()?;
    let n = c.n.ok_or_else(|| BenchError::Config("gen needs --n".into()))?;
    let kind = match c.far.as_deref().map(parse_far).transpose()?.flatten() {
        Some(gamma) => InstanceKind::Far { gamma: gamma.unwrap_or(args.eps) },
        None => InstanceKind::InClass,
    };
    let inst = generate_instance(&InstanceSpec { class, n, kind }, c.seed.unwrap_or(0))?;
    let text = inst.function.to_string();
    match &args.out {
        Some(p) => fs::write(p, &text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    match inst.distance {
        Some(d) => eprintln!("distance={d} ({})", inst.note),
        None => eprintln!("{}", inst.note),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Test(args) => args.settings().and_then(run_test),
        Command::Sweep { args, grid } => args.settings().and_then(|s| {
            let list = grid
                .strip_prefix("eps=")
                .ok_or_else(|| BenchError::Config(format!("unsupported grid {grid:?}; expected eps=<list>")))?;
            run_test(Settings { eps: Some(parse_grid(list)?), ..s })
        }),
        Command::Gen(args) => run_gen(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_capability() { 2 } else { 1 })
        }
    }
}
