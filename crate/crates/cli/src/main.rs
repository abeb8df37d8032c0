use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use micromaser_cli::{cmd_optimize, cmd_run, presets, CliError, ConfigError, ConfigFile};

/// Driven two-photon micromaser simulator.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Send a stream of atoms through the cavity and write the observables.
    Run(Input),
    /// Scan the interaction time for the purest field.
    Optimize(Input),
    /// Print the built-in configurations (all of them, or one by name).
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Input {
    /// Config file (`key = value` lines).
    #[arg(required_unless_present = "preset", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Use a built-in configuration instead of a file.
    #[arg(long)]
    preset: Option<String>,
    /// Output directory, created if missing.
    #[arg(short, long, default_value = ".")]
    out: PathBuf,
}

impl Input {
    fn load(&self) -> Result<ConfigFile, CliError> {
        match (&self.config, &self.preset) {
            (Some(path), _) => Ok(ConfigFile::load(path)?),
            (None, Some(name)) => presets::preset(name).ok_or_else(|| {
                ConfigError::Invalid(format!(
                    "unknown preset `{name}` (available: {})",
                    presets::NAMES.join(", ")
                ))
                .into()
            }),
            (None, None) => unreachable!("clap requires one input"),
        }
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(input) => match input.load().and_then(|cfg| cmd_run(&cfg, &input.out)) {
            Ok(summary) => {
                for f in &summary.files {
                    println!("{}", f.display());
                }
                if !summary.audit_pass {
                    eprintln!("convergence audit failed; see audit.txt");
                }
                ExitCode::from(summary.exit_code() as u8)
            }
            Err(e) => fail(e),
        },
        Command::Optimize(input) => {
            match input.load().and_then(|cfg| cmd_optimize(&cfg, &input.out)) {
                Ok(files) => {
                    for f in &files {
                        println!("{}", f.display());
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(e),
            }
        }
        Command::Presets { name: Some(name) } => match presets::render(&name) {
            Some(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            None => {
                eprintln!(
                    "error: unknown preset `{name}` (available: {})",
                    presets::NAMES.join(", ")
                );
                ExitCode::from(1)
            }
        },
        Command::Presets { name: None } => {
            let all: Vec<String> = presets::NAMES
                .iter()
                .filter_map(|n| presets::render(n))
                .collect();
            print!("{}", all.join("\n"));
            ExitCode::SUCCESS
        }
    }
}
