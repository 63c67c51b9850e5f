use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{cmd_cutoff, cmd_oracle, cmd_profile, cmd_sweep, cmd_verify, VerifyConfig};
use crate::config::{load_config_file, RawConfig, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "freewalk", version, about = "Cut-off profiles for random walks on free quantum groups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One row of bounds per k, with the exact distance.
    Profile(RunArgs),
    /// Thresholds, admissibility and window bounds at a given c.
    Cutoff(RunArgs),
    /// Exact total variation distance.
    Oracle(OracleArgs),
    /// Grid checks of the inequalities used by the bounds.
    Verify(VerifyArgs),
    /// Profiles over comma-separated group, N, state, theta and tau values.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// oplus, splus or aut.
    #[arg(long)]
    pub group: Option<String>,
    #[arg(long = "N", value_name = "N")]
    pub size: Option<String>,
    /// pure:T, rotation:THETA, mixture:FILE, randtrans, haar or counit.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub tau: Option<String>,
    /// Rotation angle: pi, pi/2, 2pi/3 or radians.
    #[arg(long)]
    pub theta: Option<String>,
    /// Step counts, `a..b` inclusive or a single value.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    #[arg(long)]
    pub c0: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Relative tolerance for series truncation.
    #[arg(long)]
    pub tol: Option<String>,
    #[arg(long = "max-terms")]
    pub max_terms: Option<String>,
    #[arg(long = "quad-order")]
    pub quad_order: Option<String>,
    /// Skip the exact distance column.
    #[arg(long = "no-exact")]
    pub no_exact: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated check names.
    #[arg(long)]
    pub only: Option<String>,
    /// Grid points per axis.
    #[arg(long)]
    pub points: Option<String>,
    /// text or json.
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn base(config: &Option<PathBuf>) -> CliResult<RawConfig> {
    config.as_deref().map(load_config_file).transpose().map(Option::unwrap_or_default)
}

fn put(raw: &mut RawConfig, key: &str, value: Option<String>) {
    if let Some(v) = value {
        raw.insert(key.to_string(), v);
    }
}

impl RunArgs {
    /// Config file values overridden by the flags given on the command line.
    pub fn merged(&self) -> CliResult<RawConfig> {
        let mut raw = base(&self.config)?;
        let a = self.clone();
        put(&mut raw, "group", a.group);
        put(&mut raw, "N", a.size);
        put(&mut raw, "state", a.state);
        put(&mut raw, "tau", a.tau);
        put(&mut raw, "theta", a.theta);
        put(&mut raw, "k", a.k);
        put(&mut raw, "c", a.c);
        put(&mut raw, "c0", a.c0);
        put(&mut raw, "format", a.format);
        put(&mut raw, "out", a.out.map(|p| p.display().to_string()));
        put(&mut raw, "tol", a.tol);
        put(&mut raw, "max-terms", a.max_terms);
        put(&mut raw, "quad-order", a.quad_order);
        if a.no_exact {
            raw.insert("no-exact".into(), "true".into());
        }
        Ok(raw)
    }
}

impl VerifyArgs {
    pub fn merged(&self) -> CliResult<RawConfig> {
        let mut raw = base(&self.config)?;
        let a = self.clone();
        put(&mut raw, "only", a.only);
        put(&mut raw, "points", a.points);
        put(&mut raw, "format", a.format);
        put(&mut raw, "out", a.out.map(|p| p.display().to_string()));
        Ok(raw)
    }
}

fn dispatch(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Profile(args) => cmd_profile(&RunConfig::from_raw(&args.merged()?)?),
        Command::Cutoff(args) => cmd_cutoff(&RunConfig::from_raw(&args.merged()?)?),
        Command::Oracle(args) => cmd_oracle(&RunConfig::from_raw(&args.run.merged()?)?, args.json),
        Command::Verify(args) => cmd_verify(&VerifyConfig::from_raw(&args.merged()?)?),
        Command::Sweep(args) => cmd_sweep(&args.merged()?),
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
