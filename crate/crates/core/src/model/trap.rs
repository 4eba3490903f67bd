use std::fmt;

use crate::error::{Error, Result};

/// Trap geometry. All energies and temperatures are measured in the trap's
/// natural unit:
///
/// * `Ring1d`: `2π²ħ²/(mL²)` for energy and `k_B T`, `2π²ħ²/(mL)` for `g`;
/// * `Harmonic1d`: `ħω` for energy, `√(ħ³ω/m)` for `g`;
/// * `Harmonic3d`: `ħω_z` for energy, `(mω_z)^{3/2} ω_⊥/√ħ` for `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TrapSpec {
    /// Periodic box. `length` is measured in units of the box itself, so the
    /// default of 1 makes every overlap integral equal to one.
    Ring1d { length: f64 },
    Harmonic1d { omega: f64 },
    /// `aspect_ratio` is `λ = ω_⊥/ω_z`; `ω_z` sets the units.
    Harmonic3d { aspect_ratio: f64 },
}

impl TrapSpec {
    pub fn ring() -> Self {
        TrapSpec::Ring1d { length: 1.0 }
    }

    pub fn harmonic1d() -> Self {
        TrapSpec::Harmonic1d { omega: 1.0 }
    }

    pub fn harmonic3d(aspect_ratio: f64) -> Self {
        TrapSpec::Harmonic3d { aspect_ratio }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            TrapSpec::Ring1d { .. } => "ring1d",
            TrapSpec::Harmonic1d { .. } => "harmonic1d",
            TrapSpec::Harmonic3d { .. } => "harmonic3d",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TrapSpec::Ring1d { length } if !(length.is_finite() && length > 0.0) => Err(
                Error::InvalidParameter(format!("ring length must be positive, got {length}")),
            ),
            TrapSpec::Harmonic1d { omega } if !(omega.is_finite() && omega > 0.0) => Err(
                Error::InvalidParameter(format!("trap frequency must be positive, got {omega}")),
            ),
            TrapSpec::Harmonic3d { aspect_ratio } if !(aspect_ratio.is_finite() && aspect_ratio >= 1.0) => {
                Err(Error::InvalidParameter(format!(
                    "aspect ratio must satisfy λ >= 1, got {aspect_ratio}"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Integer aspect ratio, if the trap is 3D and `λ` is a whole number.
    pub fn integer_aspect(&self) -> Option<u64> {
        match *self {
            TrapSpec::Harmonic3d { aspect_ratio } if aspect_ratio.fract() == 0.0 && aspect_ratio >= 1.0 => {
                Some(aspect_ratio as u64)
            }
            _ => None,
        }
    }

    /// Whether every single-particle energy is an integer number of quanta.
    pub fn is_integer_grid(&self) -> bool {
        match self {
            TrapSpec::Ring1d { .. } | TrapSpec::Harmonic1d { .. } => true,
            TrapSpec::Harmonic3d { .. } => self.integer_aspect().is_some(),
        }
    }

    pub fn require_integer_grid(&self) -> Result<()> {
        if self.is_integer_grid() {
            Ok(())
        } else {
            Err(Error::NonIntegerGrid(format!(
                "{self} has incommensurate level spacings; exact microcanonical counting needs an integer aspect ratio"
            )))
        }
    }
}

impl fmt::Display for TrapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrapSpec::Ring1d { length } => write!(f, "ring1d(L={length})"),
            TrapSpec::Harmonic1d { omega } => write!(f, "harmonic1d(omega={omega})"),
            TrapSpec::Harmonic3d { aspect_ratio } => write!(f, "harmonic3d(lambda={aspect_ratio})"),
        }
    }
}
