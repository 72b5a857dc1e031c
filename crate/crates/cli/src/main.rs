use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qwave_cli::error::config_error;
use qwave_cli::output::to_json;
use qwave_cli::runner::{batch_exit_code, batch_summary, run, run_batch};
use qwave_cli::{catalog, CliError, Format, RunConfig};

#[derive(Parser)]
#[command(name = "qwave", version, about = "Run single-particle nonlocality experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its report.
    Run(RunArgs),
    /// Print the experiment catalog as JSON.
    List,
    /// Run a JSON array of run configs.
    Batch {
        file: String,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    experiment: String,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<f64>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha_phase: Option<f64>,
    #[arg(long)]
    cutoff: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    kick: Option<f64>,
    #[arg(long)]
    statistics: Option<String>,
    #[arg(long)]
    points: Option<u64>,
    #[arg(long, default_value_t = 0)]
    shots: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl RunArgs {
    fn into_config(self) -> RunConfig {
        let mut params = BTreeMap::new();
        let mut put = |name: &str, v: Option<Value>| {
            if let Some(v) = v {
                params.insert(name.to_string(), v);
            }
        };
        put("phi", self.phi.map(|v| json!(v)));
        put("n", self.n.map(|v| json!(v)));
        put("alpha", self.alpha.map(|v| json!(v)));
        put("alpha_phase", self.alpha_phase.map(|v| json!(v)));
        put("cutoff", self.cutoff.map(|v| json!(v)));
        put("kick", self.kick.map(|v| json!(v)));
        put("statistics", self.statistics.map(|v| json!(v)));
        put("points", self.points.map(|v| json!(v)));
        RunConfig {
            experiment: self.experiment,
            params,
            shots: self.shots,
            seed: self.seed,
            output_path: self.out,
            format: self.format,
        }
    }
}

fn print_stdout(text: &str) -> Result<(), CliError> {
    std::io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
        path: "<stdout>".into(),
        source,
    })
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::List => print_stdout(&to_json(&catalog())).map(|_| 0),
        Command::Run(args) => {
            if let Some(text) = run(&args.into_config())? {
                print_stdout(&text)?;
            }
            Ok(0)
        }
        Command::Batch { file, jobs } => {
            let text = fs::read_to_string(&file).map_err(|source| CliError::Io {
                path: file.clone(),
                source,
            })?;
            let configs: Vec<RunConfig> =
                serde_json::from_str(&text).map_err(|e| config_error(format!("{file}: {e}")))?;
            let entries = run_batch(&configs, jobs.max(1));
            print_stdout(&batch_summary(&entries))?;
            Ok(batch_exit_code(&entries))
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QWAVE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let err = config_error(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json());
            return ExitCode::from(err.exit_code() as u8);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
