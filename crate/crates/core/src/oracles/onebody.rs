//! Single-particle partition functions `Z1(β) = Σ_modes e^{-βε}`.

use crate::model::{Spectrum, TrapSpec};
use crate::error::{Error, Result};
use crate::num::{log_sum_exp, Real};

/// Source of single-particle thermodynamics for the canonical recurrences.
pub trait OneBody<T: Real> {
    /// `ln Z1(β)`.
    fn log_z1(&self, beta: T) -> T;
    /// `ln (Z1(β) − 1)`: the same sum with the ground mode left out.
    fn log_z1_excited(&self, beta: T) -> T;
    /// Mean single-particle energy `Σ ε e^{-βε} / Z1(β)`.
    fn mean_energy(&self, beta: T) -> T;
}

impl<T: Real> OneBody<T> for Spectrum<T> {
    fn log_z1(&self, beta: T) -> T {
        let terms: Vec<T> = self.levels().iter().map(|&(e, d)| T::of(d as f64).ln() - beta * e).collect();
        log_sum_exp(&terms)
    }

    fn log_z1_excited(&self, beta: T) -> T {
        let terms: Vec<T> = self.excited().iter().map(|&(e, d)| T::of(d as f64).ln() - beta * e).collect();
        log_sum_exp(&terms)
    }

    fn mean_energy(&self, beta: T) -> T {
        let lz = self.log_z1(beta);
        self.levels()
            .iter()
            .map(|&(e, d)| e * (T::of(d as f64).ln() - beta * e - lz).exp())
            .sum()
    }
}

/// Untruncated separable oscillator with energies `Σ_a s_a n_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct Oscillator<T> {
    strides: Vec<T>,
}

impl<T: Real> Oscillator<T> {
    pub fn new(strides: Vec<T>) -> Result<Self> {
        if strides.is_empty() || strides.iter().any(|s| !(*s > T::zero())) {
            return Err(Error::InvalidParameter("oscillator quanta must be positive".into()));
        }
        Ok(Oscillator { strides })
    }

    /// The harmonic traps; `None` for the ring.
    pub fn for_trap(trap: &TrapSpec) -> Option<Self> {
        match *trap {
            TrapSpec::Ring1d { .. } => None,
            TrapSpec::Harmonic1d { .. } => Some(Oscillator { strides: vec![T::one()] }),
            TrapSpec::Harmonic3d { aspect_ratio } => {
                let l = T::of(aspect_ratio);
                Some(Oscillator { strides: vec![l, l, T::one()] })
            }
        }
    }

    pub fn strides(&self) -> &[T] {
        &self.strides
    }
}

impl<T: Real> OneBody<T> for Oscillator<T> {
    fn log_z1(&self, beta: T) -> T {
        -self.strides.iter().map(|&s| (-(-beta * s).exp_m1()).ln()).sum::<T>()
    }

    fn log_z1_excited(&self, beta: T) -> T {
        self.log_z1(beta).exp_m1().ln()
    }

    fn mean_energy(&self, beta: T) -> T {
        self.strides.iter().map(|&s| s / (beta * s).exp_m1()).sum()
    }
}

/// The natural one-body description of a trap: the untruncated oscillator
/// for harmonic traps, and a spectrum cut at `cutoff` for the ring.
pub enum TrapOneBody<T> {
    Oscillator(Oscillator<T>),
    Levels(Spectrum<T>),
}

impl<T: Real> TrapOneBody<T> {
    pub fn for_trap(trap: &TrapSpec, cutoff: u64) -> Result<Self> {
        trap.validate()?;
        Ok(match Oscillator::for_trap(trap) {
            Some(o) => TrapOneBody::Oscillator(o),
            None => TrapOneBody::Levels(Spectrum::for_trap(trap, cutoff)?),
        })
    }
}

impl<T: Real> OneBody<T> for TrapOneBody<T> {
    fn log_z1(&self, beta: T) -> T {
        match self {
            TrapOneBody::Oscillator(o) => o.log_z1(beta),
            TrapOneBody::Levels(s) => s.log_z1(beta),
        }
    }

    fn log_z1_excited(&self, beta: T) -> T {
        match self {
            TrapOneBody::Oscillator(o) => o.log_z1_excited(beta),
            TrapOneBody::Levels(s) => s.log_z1_excited(beta),
        }
    }

    fn mean_energy(&self, beta: T) -> T {
        match self {
            TrapOneBody::Oscillator(o) => o.mean_energy(beta),
            TrapOneBody::Levels(s) => s.mean_energy(beta),
        }
    }
}
