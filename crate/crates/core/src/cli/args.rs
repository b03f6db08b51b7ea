use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::figures::FigureId;
use crate::emission::{PartialWaveForm, PatternVariant};
use crate::quadrature::{AngularWeight, DEFAULT_NODES};
use crate::trap::{FermiSea, Shape, TrapGeometry};

pub const DEFAULT_THETA_SAMPLES: usize = 721;
pub const DEFAULT_SWEEP_SAMPLES: usize = 1001;
pub const DEFAULT_DEGENERACY_SHELLS: u64 = 40;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UsageError {
    /// Not an error: help or version text to print.
    #[error("{0}")]
    Help(String),
    #[error("unknown flag `{0}`")]
    UnknownFlag(String),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
    #[error("missing required parameter `{0}`")]
    MissingParameter(String),
    #[error("aspect ratio must be a positive integer, got `{0}`")]
    NonIntegerLambda(String),
    #[error("squared Lamb-Dicke parameter must be >= 0, got `{0}`")]
    NegativeEta2(String),
    #[error("invalid value `{value}` for `{flag}`: {reason}")]
    InvalidValue { flag: String, value: String, reason: String },
    #[error("unknown figure `{0}` (expected 1, 2, 3, 3a, 3b, 4, 5, 5a, 5b or 6)")]
    UnknownFigure(String),
    #[error("{format} output is not available for `{command}`")]
    UnsupportedFormat { format: String, command: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    Svg,
}

/// A fully validated invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    Pattern {
        shape: Shape,
        lambda: u32,
        eta2: f64,
        n_f: i64,
        theta_samples: usize,
        variant: PatternVariant,
    },
    Shells {
        shape: Shape,
        lambda: u32,
        eta2: f64,
        /// Fixed photon direction in degrees; angle-averaged when absent.
        theta_deg: Option<f64>,
        phi_deg: Option<f64>,
        n_max: Option<u64>,
        weight: AngularWeight,
        nodes: usize,
    },
    Degeneracy {
        shape: Shape,
        lambda: u32,
        n_max: u64,
    },
    Count {
        shape: Shape,
        lambda: u32,
        n_f: i64,
    },
    TightSweep {
        shape: Shape,
        eta2: f64,
        n_f: i64,
        lambda_min: f64,
        lambda_max: f64,
        samples: usize,
    },
    FermiShell {
        shape: Shape,
        lambda: u32,
        atoms: u64,
    },
    Figure {
        id: FigureId,
        theta_samples: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Pattern { .. } => "pattern",
            Command::Shells { .. } => "shells",
            Command::Degeneracy { .. } => "degeneracy",
            Command::Count { .. } => "count",
            Command::TightSweep { .. } => "tight-sweep",
            Command::FermiShell { .. } => "fermi-shell",
            Command::Figure { .. } => "figure",
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "fermisea",
    version,
    about = "Spontaneous-emission patterns above a zero-temperature Fermi sea in anisotropic harmonic traps"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,

    /// Output file; CSV and JSON default to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct TrapArgs {
    /// Trap shape: pancake or cigar.
    #[arg(long)]
    shape: Option<String>,
    /// Integer aspect ratio λ >= 1.
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Angular modification factor M_f(θ) over [0°, 180°].
    Pattern {
        #[command(flatten)]
        trap: TrapArgs,
        /// Squared Lamb-Dicke parameter.
        #[arg(long, allow_negative_numbers = true)]
        eta2: Option<String>,
        /// Fermi shell (-1 for an empty trap).
        #[arg(long, allow_negative_numbers = true)]
        nf: Option<String>,
        /// Number of θ samples (default 721).
        #[arg(long, allow_negative_numbers = true)]
        theta_samples: Option<String>,
        /// Evaluate the λ → ∞ limit instead.
        #[arg(long, conflicts_with_all = ["nz", "nz_from"])]
        limit: bool,
        /// Single partial wave with this many tight-axis quanta.
        #[arg(long, allow_negative_numbers = true, conflicts_with = "nz_from")]
        nz: Option<String>,
        /// Sum of partial waves with at least this many tight-axis quanta.
        #[arg(long, allow_negative_numbers = true)]
        nz_from: Option<String>,
        /// Use the (η²/λ)^n_z power term in partial waves.
        #[arg(long)]
        literal: bool,
    },
    /// Emission probability into each shell.
    Shells {
        #[command(flatten)]
        trap: TrapArgs,
        /// Squared Lamb-Dicke parameter.
        #[arg(long, allow_negative_numbers = true)]
        eta2: Option<String>,
        /// Polar angle of the photon in degrees; averages over directions if absent.
        #[arg(long, allow_negative_numbers = true)]
        theta: Option<String>,
        /// Azimuth in degrees (with --theta).
        #[arg(long, allow_negative_numbers = true, requires = "theta")]
        phi: Option<String>,
        /// Highest shell to report.
        #[arg(long, allow_negative_numbers = true)]
        n_max: Option<String>,
        /// Angular measure for the average.
        #[arg(long, value_enum)]
        weight: Option<WeightArg>,
        /// Gauss-Legendre nodes for the average.
        #[arg(long, allow_negative_numbers = true)]
        nodes: Option<String>,
    },
    /// Shell degeneracies and cumulative state counts.
    Degeneracy {
        #[command(flatten)]
        trap: TrapArgs,
        /// Highest shell to report.
        #[arg(long, allow_negative_numbers = true)]
        n_max: Option<String>,
    },
    /// Number of states up to and including the Fermi shell.
    Count {
        #[command(flatten)]
        trap: TrapArgs,
        /// Fermi shell (-1 for an empty trap).
        #[arg(long, allow_negative_numbers = true)]
        nf: Option<String>,
    },
    /// Tight-axis factor as a function of a real aspect ratio.
    TightSweep {
        /// Trap shape (default pancake).
        #[arg(long)]
        shape: Option<String>,
        /// Squared Lamb-Dicke parameter.
        #[arg(long, allow_negative_numbers = true)]
        eta2: Option<String>,
        /// Fermi shell (-1 for an empty trap).
        #[arg(long, allow_negative_numbers = true)]
        nf: Option<String>,
        /// Smallest aspect ratio.
        #[arg(long, allow_negative_numbers = true)]
        lambda_min: Option<String>,
        /// Largest aspect ratio.
        #[arg(long, allow_negative_numbers = true)]
        lambda_max: Option<String>,
        /// Number of λ samples (default 1001).
        #[arg(long, allow_negative_numbers = true)]
        samples: Option<String>,
    },
    /// Fermi shell reached by a given number of atoms.
    FermiShell {
        #[command(flatten)]
        trap: TrapArgs,
        /// Number of atoms.
        #[arg(long, allow_negative_numbers = true)]
        atoms: Option<String>,
    },
    /// Regenerate the data behind a figure preset.
    Figure {
        /// 1, 2, 3, 3a, 3b, 4, 5, 5a, 5b or 6.
        id: String,
        /// Number of θ samples (default 721).
        #[arg(long, allow_negative_numbers = true)]
        theta_samples: Option<String>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WeightArg {
    Uniform,
    DipoleZ,
}

/// Parses `argv` (program name first) into a validated [`RunConfig`].
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, UsageError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(from_clap)?;
    let command = match cli.command {
        Sub::Pattern {
            trap,
            eta2,
            nf,
            theta_samples,
            limit,
            nz,
            nz_from,
            literal,
        } => {
            let (shape, lambda) = trap.parse()?;
            let form = if literal {
                PartialWaveForm::Literal
            } else {
                PartialWaveForm::Decomposition
            };
            let variant = if limit {
                PatternVariant::Limit
            } else if let Some(j) = nz {
                PatternVariant::PartialWave {
                    tight_quanta: parse_count("--nz", &j)?,
                    form,
                }
            } else if let Some(j) = nz_from {
                PatternVariant::PartialWaveTail {
                    from: parse_count("--nz-from", &j)?,
                    form,
                }
            } else {
                PatternVariant::Full
            };
            Command::Pattern {
                shape,
                lambda,
                eta2: parse_eta2(eta2)?,
                n_f: parse_fermi_shell(nf)?,
                theta_samples: parse_samples("--theta-samples", theta_samples, DEFAULT_THETA_SAMPLES)?,
                variant,
            }
        }
        Sub::Shells {
            trap,
            eta2,
            theta,
            phi,
            n_max,
            weight,
            nodes,
        } => {
            let (shape, lambda) = trap.parse()?;
            let theta_deg = theta.map(|t| parse_angle("--theta", &t, 0.0, 180.0)).transpose()?;
            let phi_deg = phi.map(|p| parse_angle("--phi", &p, 0.0, 360.0)).transpose()?;
            if phi_deg == Some(360.0) {
                return Err(invalid("--phi", "360", "azimuth must be below 360 degrees"));
            }
            let nodes = match nodes {
                Some(v) => {
                    let n = parse_count("--nodes", &v)?;
                    if n == 0 {
                        return Err(invalid("--nodes", &v, "need at least one node"));
                    }
                    n as usize
                }
                None => DEFAULT_NODES,
            };
            Command::Shells {
                shape,
                lambda,
                eta2: parse_eta2(eta2)?,
                theta_deg,
                phi_deg,
                n_max: n_max.map(|v| parse_count("--n-max", &v)).transpose()?,
                weight: match weight {
                    None | Some(WeightArg::Uniform) => AngularWeight::Uniform,
                    Some(WeightArg::DipoleZ) => AngularWeight::DipoleZ,
                },
                nodes,
            }
        }
        Sub::Degeneracy { trap, n_max } => {
            let (shape, lambda) = trap.parse()?;
            Command::Degeneracy {
                shape,
                lambda,
                n_max: match n_max {
                    Some(v) => parse_count("--n-max", &v)?,
                    None => DEFAULT_DEGENERACY_SHELLS,
                },
            }
        }
        Sub::Count { trap, nf } => {
            let (shape, lambda) = trap.parse()?;
            Command::Count {
                shape,
                lambda,
                n_f: parse_fermi_shell(nf)?,
            }
        }
        Sub::TightSweep {
            shape,
            eta2,
            nf,
            lambda_min,
            lambda_max,
            samples,
        } => {
            let shape = match shape {
                Some(s) => parse_shape(&s)?,
                None => Shape::Pancake,
            };
            let lambda_min = parse_real_lambda("--lambda-min", lambda_min)?;
            let lambda_max = parse_real_lambda("--lambda-max", lambda_max)?;
            if lambda_max < lambda_min {
                return Err(invalid(
                    "--lambda-max",
                    &lambda_max.to_string(),
                    "must not be below --lambda-min",
                ));
            }
            Command::TightSweep {
                shape,
                eta2: parse_eta2(eta2)?,
                n_f: parse_fermi_shell(nf)?,
                lambda_min,
                lambda_max,
                samples: parse_samples("--samples", samples, DEFAULT_SWEEP_SAMPLES)?,
            }
        }
        Sub::FermiShell { trap, atoms } => {
            let (shape, lambda) = trap.parse()?;
            let atoms = atoms.ok_or_else(|| missing("--atoms"))?;
            Command::FermiShell {
                shape,
                lambda,
                atoms: parse_count("--atoms", &atoms)?,
            }
        }
        Sub::Figure { id, theta_samples } => Command::Figure {
            id: id.parse().map_err(|_| UsageError::UnknownFigure(id.clone()))?,
            theta_samples: parse_samples("--theta-samples", theta_samples, DEFAULT_THETA_SAMPLES)?,
        },
    };

    if cli.format == OutputFormat::Svg {
        if matches!(command, Command::Count { .. } | Command::FermiShell { .. }) {
            return Err(UsageError::UnsupportedFormat {
                format: "svg".into(),
                command: command.name().into(),
            });
        }
        if cli.out.is_none() {
            return Err(missing("--out"));
        }
    }

    Ok(RunConfig {
        command,
        format: cli.format,
        out: cli.out,
    })
}

fn from_clap(err: clap::Error) -> UsageError {
    let context = |kind| match err.get(kind) {
        Some(ContextValue::String(s)) => s.clone(),
        Some(ContextValue::Strings(v)) => v.join(", "),
        Some(other) => other.to_string(),
        None => String::new(),
    };
    match err.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => UsageError::Help(err.render().to_string()),
        ErrorKind::UnknownArgument => UsageError::UnknownFlag(context(ContextKind::InvalidArg)),
        ErrorKind::InvalidSubcommand => UsageError::UnknownCommand(context(ContextKind::InvalidSubcommand)),
        ErrorKind::MissingSubcommand | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            UsageError::MissingParameter("<command>".into())
        }
        ErrorKind::MissingRequiredArgument => UsageError::MissingParameter(context(ContextKind::InvalidArg)),
        _ => UsageError::InvalidValue {
            flag: context(ContextKind::InvalidArg),
            value: context(ContextKind::InvalidValue),
            reason: err.kind().to_string(),
        },
    }
}

impl TrapArgs {
    fn parse(self) -> Result<(Shape, u32), UsageError> {
        let shape = parse_shape(&self.shape.ok_or_else(|| missing("--shape"))?)?;
        let raw = self.lambda.ok_or_else(|| missing("--lambda"))?;
        let value: f64 = raw
            .parse()
            .map_err(|_| invalid("--lambda", &raw, "not a number"))?;
        let geom = TrapGeometry::from_real(shape, value).map_err(|_| UsageError::NonIntegerLambda(raw))?;
        Ok((shape, geom.lambda()))
    }
}

fn missing(flag: &str) -> UsageError {
    UsageError::MissingParameter(flag.into())
}

fn invalid(flag: &str, value: &str, reason: &str) -> UsageError {
    UsageError::InvalidValue {
        flag: flag.into(),
        value: value.into(),
        reason: reason.into(),
    }
}

fn parse_shape(raw: &str) -> Result<Shape, UsageError> {
    raw.parse()
        .map_err(|_| invalid("--shape", raw, "expected `pancake` or `cigar`"))
}

fn parse_eta2(raw: Option<String>) -> Result<f64, UsageError> {
    let raw = raw.ok_or_else(|| missing("--eta2"))?;
    let v: f64 = raw.parse().map_err(|_| invalid("--eta2", &raw, "not a number"))?;
    if v.is_nan() || v < 0.0 {
        return Err(UsageError::NegativeEta2(raw));
    }
    if !v.is_finite() {
        return Err(invalid("--eta2", &raw, "must be finite"));
    }
    Ok(v)
}

fn parse_fermi_shell(raw: Option<String>) -> Result<i64, UsageError> {
    let raw = raw.ok_or_else(|| missing("--nf"))?;
    let v: i64 = raw
        .parse()
        .map_err(|_| invalid("--nf", &raw, "expected an integer >= -1"))?;
    FermiSea::new(v).map_err(|_| invalid("--nf", &raw, "expected an integer >= -1"))?;
    Ok(v)
}

fn parse_count(flag: &str, raw: &str) -> Result<u64, UsageError> {
    raw.parse()
        .map_err(|_| invalid(flag, raw, "expected a nonnegative integer"))
}

fn parse_samples(flag: &str, raw: Option<String>, default: usize) -> Result<usize, UsageError> {
    let Some(raw) = raw else {
        return Ok(default);
    };
    let n = parse_count(flag, &raw)?;
    if n < 2 {
        return Err(invalid(flag, &raw, "need at least 2 samples"));
    }
    Ok(n as usize)
}

fn parse_angle(flag: &str, raw: &str, lo: f64, hi: f64) -> Result<f64, UsageError> {
    let v: f64 = raw.parse().map_err(|_| invalid(flag, raw, "not a number"))?;
    if !(lo..=hi).contains(&v) {
        return Err(invalid(flag, raw, &format!("angle must lie in [{lo}, {hi}] degrees")));
    }
    Ok(v)
}

fn parse_real_lambda(flag: &str, raw: Option<String>) -> Result<f64, UsageError> {
    let raw = raw.ok_or_else(|| missing(flag))?;
    let v: f64 = raw.parse().map_err(|_| invalid(flag, &raw, "not a number"))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(flag, &raw, "aspect ratio must be > 0"));
    }
    Ok(v)
}
