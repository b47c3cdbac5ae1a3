mod args;
mod commands;
mod config;
mod manifest;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, FromArgMatches};
use serde_json::json;

use args::{BaselineCommand, Cli, Command, EvalCommand};
use manifest::Manifest;

/// Bad invocation: unknown flag, missing input, contradictory options.
#[derive(Debug)]
pub struct UsageError(pub String);

pub enum Failure {
    Usage(String),
    Runtime(String),
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Runtime(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    fn report(&self) {
        let (kind, message) = match self {
            Failure::Usage(m) => ("usage", m),
            Failure::Runtime(m) => ("runtime", m),
        };
        eprintln!("{}", json!({"error": {"kind": kind, "message": message}}));
    }
}

impl From<wikivec::Error> for Failure {
    fn from(e: wikivec::Error) -> Self {
        match e {
            wikivec::Error::InvalidConfig(m) => Failure::Usage(m),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

fn with_overrides(cmd: clap::Command) -> clap::Command {
    let names: Vec<String> = cmd
        .get_subcommands()
        .map(|s| s.get_name().to_string())
        .collect();
    let mut cmd = cmd.args_override_self(true);
    for name in names {
        cmd = cmd.mut_subcommand(name, with_overrides);
    }
    cmd
}

fn parse(argv: Vec<OsString>) -> Result<Cli, Failure> {
    let argv = match config::config_path(&argv) {
        Some(path) => {
            let values = config::load(Path::new(&path))?;
            config::splice(argv, &values)?
        }
        None => argv,
    };
    let matches = with_overrides(Cli::command()).try_get_matches_from(argv);
    let matches = match matches {
        Ok(m) => m,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            std::process::exit(0);
        }
        Err(e) => {
            return Err(Failure::Usage(
                e.render().to_string().trim_end().to_string(),
            ))
        }
    };
    Cli::from_arg_matches(&matches).map_err(|e| Failure::Usage(e.to_string()))
}

fn primary_output(command: &Command) -> Option<&PathBuf> {
    match command {
        Command::Ingest(a) => Some(&a.out),
        Command::Train(a) => Some(&a.out),
        Command::Eval(EvalCommand::Analogy(a)) => a.out.as_ref(),
        Command::Eval(EvalCommand::Similarity(a)) => a.out.as_ref(),
        Command::Baseline(BaselineCommand::Build(a)) => Some(&a.out),
        _ => None,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let start = Instant::now();
    let artifacts = match &cli.command {
        Command::Ingest(a) => commands::ingest(a)?,
        Command::Train(a) => commands::train_vectors(a)?,
        Command::Similar(a) => commands::similar(a)?,
        Command::Analogy(a) => commands::analogy(a)?,
        Command::Eval(EvalCommand::Analogy(a)) => commands::eval_analogy_cmd(a)?,
        Command::Eval(EvalCommand::Similarity(a)) => commands::eval_similarity_cmd(a)?,
        Command::Baseline(BaselineCommand::Build(a)) => commands::baseline_build(a)?,
        Command::Baseline(BaselineCommand::Sim(a)) => commands::baseline_sim(a)?,
        Command::Stats(a) => commands::stats(a)?,
    };
    let wall_time = start.elapsed().as_secs_f64();

    let path = cli
        .manifest
        .clone()
        .or_else(|| primary_output(&cli.command).map(|p| manifest::default_path(p)));
    let Some(path) = path else {
        return Ok(());
    };
    let digest_err = |e: std::io::Error| Failure::Runtime(format!("digest: {e}"));
    let manifest = Manifest {
        command: cli.command.name().to_string(),
        config: cli.command.config(),
        inputs: manifest::digests(&artifacts.inputs).map_err(digest_err)?,
        outputs: manifest::digests(&artifacts.outputs).map_err(digest_err)?,
        wall_time,
    };
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|e| Failure::io(&path, e))
}

fn main() -> ExitCode {
    let outcome = parse(std::env::args_os().collect()).and_then(run);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            failure.report();
            ExitCode::from(failure.exit_code())
        }
    }
}
