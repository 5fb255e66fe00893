use core::fmt;

/// Errors produced by model validation and numerical operations.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter violates its constraint (sign, ordering, ...).
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },
    /// A wavenumber or frequency lies outside the configured model range,
    /// e.g. beyond the linear-dispersion cutoff.
    OutOfModelRange {
        what: &'static str,
        value: f64,
        limit: f64,
    },
    /// Bose–Einstein occupation diverges (Ω → 0 at T > 0); the offending
    /// mode must be excluded from thermal sums.
    DivergentOccupation { omega: f64, temperature: f64 },
    /// The dominant-channel closed form was requested for a configuration
    /// that does not satisfy the resonance condition.
    OffResonance { mismatch: f64, tolerance: f64 },
    /// Time-domain integration grew beyond the gain-free bound in a
    /// configuration with no gain channel.
    Instability { time: f64, magnitude: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                constraint,
            } => write!(f, "invalid parameter {name} = {value:e}: must satisfy {constraint}"),
            Error::OutOfModelRange { what, value, limit } => {
                write!(f, "{what} = {value:e} outside model range (limit {limit:e})")
            }
            Error::DivergentOccupation { omega, temperature } => write!(
                f,
                "Bose-Einstein occupation diverges for Omega = {omega:e} rad/s at T = {temperature} K"
            ),
            Error::OffResonance { mismatch, tolerance } => write!(
                f,
                "resonance condition not met: |v_g q - Omega| = {mismatch:e} rad/s exceeds tolerance {tolerance:e}"
            ),
            Error::Instability { time, magnitude } => write!(
                f,
                "integration unstable: |G| = {magnitude:e} at t = {time:e} s in a gain-free configuration"
            ),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
