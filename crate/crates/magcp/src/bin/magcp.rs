//! Thin command-line front end over `magcp::job`.
//!
//! Exit codes: 0 success, 2 configuration error, 3 no result, 4 integrals or
//! checks that did not converge (the partial table is still written).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use magcp::job::{self, ConfigError, Format, GridSpec, JobConfig, Outcome};
use magcp::mechanics::Mode;
use magcp::quadrature::QuadratureConfig;

#[derive(Parser)]
#[command(name = "magcp", version, about = "Casimir-Polder shifts, forces and thresholds for a spin-carrying dipole")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON job configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true)]
    format: Option<FormatArg>,
    /// "log:start:stop:n" in z̃, replaces the config grid.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    mode: Option<ModeArg>,
    /// Include the magnetostatic image term.
    #[arg(long = "static", global = true)]
    static_term: Option<Switch>,
    #[arg(long, global = true)]
    gravity: Option<Switch>,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Energy shift components over the grid.
    Potential,
    /// Force components over the grid.
    Force,
    /// Levitation point inside the bracket.
    Equilibrium,
    /// Smallest repulsive spin at each grid point.
    Threshold,
    /// Self-checks against closed forms; exit 4 on any miss.
    Validate,
}

#[derive(ValueEnum, Clone, Copy)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy)]
enum ModeArg {
    Ground,
    Excited0,
}

#[derive(ValueEnum, Clone, Copy)]
enum Switch {
    On,
    Off,
}

impl Switch {
    fn on(self) -> bool {
        matches!(self, Switch::On)
    }
}

fn config(cli: &Cli) -> Result<JobConfig, ConfigError> {
    let path = cli.config.as_ref().ok_or_else(|| ConfigError::Invalid("--config is required".into()))?;
    let mut c = JobConfig::load(path)?;
    if let Some(g) = &cli.grid {
        c.grid = Some(g.parse::<GridSpec>()?);
    }
    if let Some(m) = cli.mode {
        c.mode = match m {
            ModeArg::Ground => Mode::Ground,
            ModeArg::Excited0 => Mode::Excited0,
        };
    }
    if let Some(s) = cli.static_term {
        c.include_static = s.on();
    }
    if let Some(g) = cli.gravity {
        c.gravity = g.on();
    }
    if let Some(f) = cli.format {
        c.output.format = match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        };
    }
    if let Some(o) = &cli.output {
        c.output.path = Some(o.clone());
    }
    Ok(c)
}

fn run(cli: &Cli) -> Result<(Outcome, Option<JobConfig>, job::OutputSpec), ConfigError> {
    if let Command::Validate = cli.command {
        // a config is optional here and only supplies quadrature and output
        let (quad, output, cfg) = match &cli.config {
            Some(_) => {
                let c = config(cli)?;
                let j = c.resolve()?;
                (j.quad, c.output.clone(), Some(c))
            }
            None => {
                let mut o = job::OutputSpec::default();
                if let Some(FormatArg::Json) = cli.format {
                    o.format = Format::Json;
                }
                o.path = cli.output.clone();
                (QuadratureConfig::from_env().map_err(|e| ConfigError::Invalid(e.to_string()))?, o, None)
            }
        };
        return Ok((job::cmd_validate(&quad)?, cfg, output));
    }
    let c = config(cli)?;
    let j = c.resolve()?;
    let outcome = match cli.command {
        Command::Potential => job::cmd_potential(&j)?,
        Command::Force => job::cmd_force(&j)?,
        Command::Equilibrium => job::cmd_equilibrium(&j)?,
        Command::Threshold => job::cmd_threshold(&j)?,
        Command::Validate => unreachable!(),
    };
    let output = c.output.clone();
    Ok((outcome, Some(c), output))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (outcome, cfg, output) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let text = job::render(&outcome, cfg.as_ref(), &output);
    match &output.path {
        Some(p) => {
            if let Err(e) = std::fs::write(p, text) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if let job::Status::NoResult(m) = &outcome.status {
        eprintln!("no result: {m}");
    }
    ExitCode::from(outcome.status.exit_code() as u8)
}
