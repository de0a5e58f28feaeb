use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("trap too shallow for {atom_count} atoms: no bracket below mu_max = {mu_max:e} J")]
    TrapTooShallow { atom_count: u64, mu_max: f64 },

    #[error("integrator step size underflow at t = {time:e} s (stiff or singular system)")]
    StepUnderflow { time: f64 },

    #[error("norm drift {drift:e} exceeds {limit:e} at t = {time:e} s")]
    NormDrift { time: f64, drift: f64, limit: f64 },

    #[error("incomplete transfer: residual ground population {ground_population:e}")]
    IncompleteTransfer { ground_population: f64 },

    #[error("grid clips {fraction:e} of the condensate norm (limit {limit:e})")]
    GridClipped { fraction: f64, limit: f64 },

    #[error("superposition charge {superposition} does not match profile charge {profile}")]
    ChargeMismatch { superposition: u32, profile: i32 },

    #[error("expected {mean:e} photons per image exceeds the {limit:e} guard")]
    ImageTooBright { mean: f64, limit: f64 },

    #[error("image carries no signal (zero total counts)")]
    NoSignal,

    #[error(
        "phase aliasing between frames {first} and {second}: wrapped increment {increment:.4} rad \
         is within {margin} rad of pi"
    )]
    Aliasing {
        first: usize,
        second: usize,
        increment: f64,
        margin: f64,
    },

    #[error("config line {line}: {reason}")]
    ConfigSyntax { line: usize, reason: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for validation problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::ConfigSyntax { .. }
            | Error::UnknownKey(_)
            | Error::ChargeMismatch { .. }
            | Error::ImageTooBright { .. }
            | Error::Io { .. } => 1,
            Error::TrapTooShallow { .. }
            | Error::StepUnderflow { .. }
            | Error::NormDrift { .. }
            | Error::IncompleteTransfer { .. }
            | Error::GridClipped { .. }
            | Error::NoSignal
            | Error::Aliasing { .. } => 2,
        }
    }
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

pub(crate) fn ensure_non_negative(name: &str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and >= 0, got {value}")))
    }
}
