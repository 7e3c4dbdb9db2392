use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thirring_core::io::{
    resolve_config_path, run, sha256_hex, write_failure_manifest, Command, EdTask, ScenarioConfig,
};
use thirring_core::Error;

#[derive(Parser)]
#[command(name = "thirring", version, about = "Stationary-light polariton simulator for the Thirring model")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derived field-theory parameters, ratios, regime and losses.
    Params(Common),
    /// Regime sweeps over detunings or the cutoff curve.
    Sweep(Common),
    /// Two-point correlation series and n-point values.
    Correlate(Common),
    /// Mean-field evolution of the coupled polariton equations.
    Evolve(Common),
    /// Exact diagonalization on a small lattice.
    Ed {
        #[command(subcommand)]
        task: EdCmd,
    },
}

#[derive(Subcommand)]
enum EdCmd {
    /// Ground-state energy and residual
    Ground(Common),
    /// Density and spin correlation tables in the ground state
    Correlate(Common),
    /// Spin-flip detection identity on random and ground states
    CheckIdentity(Common),
    /// Hardcore and soft-core densities against free fermions
    CheckFermionization(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file; relative paths fall back to $THIRRING_CONFIG_DIR.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override a config value by dotted path, e.g. `optical.n_z=2e10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn split(cmd: Cmd) -> (Command, Common) {
    match cmd {
        Cmd::Params(c) => (Command::Params, c),
        Cmd::Sweep(c) => (Command::Sweep, c),
        Cmd::Correlate(c) => (Command::Correlate, c),
        Cmd::Evolve(c) => (Command::Evolve, c),
        Cmd::Ed { task } => match task {
            EdCmd::Ground(c) => (Command::Ed(EdTask::Ground), c),
            EdCmd::Correlate(c) => (Command::Ed(EdTask::Correlate), c),
            EdCmd::CheckIdentity(c) => (Command::Ed(EdTask::CheckIdentity), c),
            EdCmd::CheckFermionization(c) => (Command::Ed(EdTask::CheckFermionization), c),
        },
    }
}

fn load(path: &Path, overrides: &[String]) -> (String, Result<ScenarioConfig, Error>) {
    let resolved = resolve_config_path(path);
    match std::fs::read(&resolved) {
        Err(source) => (String::new(), Err(Error::Io { path: resolved.display().to_string(), source })),
        Ok(bytes) => {
            let digest = sha256_hex(&bytes);
            let cfg = match String::from_utf8(bytes) {
                Ok(text) => ScenarioConfig::from_json_str(&text, overrides),
                Err(_) => Err(Error::Config(format!("{} is not UTF-8", resolved.display()))),
            };
            (digest, cfg)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (cmd, common) = split(cli.command);

    let result = match load(&common.config, &common.overrides) {
        (digest, Err(e)) => {
            if let Err(w) = write_failure_manifest(cmd, &common.out, &digest, &e) {
                eprintln!("warning: could not write manifest: {w}");
            }
            Err(e)
        }
        (_, Ok(cfg)) => run(cmd, &cfg, &common.out).map(|o| o.summary),
    };
    match result {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
