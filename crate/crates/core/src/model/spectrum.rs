//! Level-resolved spectra for the exact oracles.
//!
//! The oracles need energies and degeneracies far above any cutoff a sampler
//! would enumerate mode by mode, so the degeneracies here are computed
//! directly from the trap geometry.

use super::basis::ModeBasis;
use super::trap::TrapSpec;
use crate::error::{Error, Result};
use crate::num::Real;

/// Real energy levels with integer degeneracies, ascending, ground level first.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum<T> {
    levels: Vec<(T, u64)>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(mut levels: Vec<(T, u64)>) -> Result<Self> {
        levels.retain(|&(_, d)| d > 0);
        levels.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite energies"));
        match levels.first() {
            Some(&(e, 1)) if e == T::zero() => Ok(Spectrum { levels }),
            _ => Err(Error::InvalidParameter(
                "spectrum must start with a single ground mode at energy 0".into(),
            )),
        }
    }

    /// Groups the modes of an enumerated basis by energy.
    pub fn from_basis(basis: &ModeBasis<T>) -> Self {
        let mut levels: Vec<(T, u64)> = Vec::new();
        for m in basis.modes() {
            match levels.last_mut() {
                Some((e, d)) if *e == m.energy => *d += 1,
                _ => levels.push((m.energy, 1)),
            }
        }
        Spectrum { levels }
    }

    /// All levels with energy at or below `cutoff`, from the trap geometry alone.
    pub fn for_trap(trap: &TrapSpec, cutoff: u64) -> Result<Self> {
        trap.validate()?;
        if let Ok(levels) = LevelSpectrum::for_trap(trap, cutoff) {
            return Ok(levels.to_real());
        }
        let TrapSpec::Harmonic3d { aspect_ratio } = *trap else { unreachable!() };
        let c = cutoff as f64;
        let mut raw: Vec<(f64, u64)> = Vec::new();
        let s_max = (c / aspect_ratio + 1e-9).floor() as u64;
        for s in 0..=s_max {
            let radial = aspect_ratio * s as f64;
            let nz_max = (c - radial + 1e-9).floor() as u64;
            for nz in 0..=nz_max {
                raw.push((radial + nz as f64, s + 1));
            }
        }
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<(T, u64)> = Vec::new();
        let mut last = f64::NAN;
        for (e, d) in raw {
            if e == last {
                levels.last_mut().expect("previous level").1 += d;
            } else {
                levels.push((T::of(e), d));
                last = e;
            }
        }
        Spectrum::new(levels)
    }

    pub fn levels(&self) -> &[(T, u64)] {
        &self.levels
    }

    /// The same spectrum with the ground mode removed.
    pub fn excited(&self) -> &[(T, u64)] {
        &self.levels[1..]
    }

    pub fn mode_count(&self) -> u64 {
        self.levels.iter().map(|l| l.1).sum()
    }
}

/// Integer-grid spectrum: `degeneracy[ε]` orbitals at energy `ε` quanta.
///
/// Separable traps also carry their axis strides, the per-axis energy quanta
/// of the independent oscillators; `[1]` for the 1D oscillator and
/// `[λ, λ, 1]` for the 3D one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelSpectrum {
    degeneracy: Vec<u64>,
    strides: Option<Vec<u64>>,
}

impl LevelSpectrum {
    pub fn for_trap(trap: &TrapSpec, cutoff: u64) -> Result<Self> {
        trap.validate()?;
        trap.require_integer_grid()?;
        let len = cutoff as usize + 1;
        let mut degeneracy = vec![0u64; len];
        let strides = match *trap {
            TrapSpec::Ring1d { .. } => {
                degeneracy[0] = 1;
                let mut n = 1usize;
                while n * n < len {
                    degeneracy[n * n] = 2;
                    n += 1;
                }
                None
            }
            TrapSpec::Harmonic1d { .. } => {
                degeneracy.fill(1);
                Some(vec![1])
            }
            TrapSpec::Harmonic3d { .. } => {
                let lambda = trap.integer_aspect().expect("integer grid checked") as usize;
                let mut s = 0usize;
                while lambda * s < len {
                    for d in &mut degeneracy[lambda * s..] {
                        *d += (s + 1) as u64;
                    }
                    s += 1;
                }
                Some(vec![lambda as u64, lambda as u64, 1])
            }
        };
        Ok(LevelSpectrum { degeneracy, strides })
    }

    /// Counts the modes of an enumerated integer-grid basis.
    pub fn from_basis<T: Real>(basis: &ModeBasis<T>) -> Result<Self> {
        let levels = basis.levels().ok_or_else(|| {
            Error::NonIntegerGrid(format!("{} has incommensurate level spacings", basis.trap()))
        })?;
        let mut degeneracy = vec![0u64; basis.cutoff() as usize + 1];
        for &e in levels {
            degeneracy[e as usize] += 1;
        }
        Ok(LevelSpectrum { degeneracy, strides: None })
    }

    /// Explicit degeneracies, for tests and toy spectra. `degeneracy[0]` must be 1.
    pub fn from_degeneracies(degeneracy: Vec<u64>) -> Result<Self> {
        if degeneracy.first() != Some(&1) {
            return Err(Error::InvalidParameter("the ground level must be a single mode".into()));
        }
        Ok(LevelSpectrum { degeneracy, strides: None })
    }

    /// Highest energy represented.
    pub fn cutoff(&self) -> u64 {
        self.degeneracy.len() as u64 - 1
    }

    #[inline]
    pub fn degeneracy(&self, energy: u64) -> u64 {
        self.degeneracy.get(energy as usize).copied().unwrap_or(0)
    }

    pub fn degeneracies(&self) -> &[u64] {
        &self.degeneracy
    }

    pub fn strides(&self) -> Option<&[u64]> {
        self.strides.as_deref()
    }

    pub fn to_real<T: Real>(&self) -> Spectrum<T> {
        let levels = self
            .degeneracy
            .iter()
            .enumerate()
            .filter(|(_, &d)| d > 0)
            .map(|(e, &d)| (T::of(e as f64), d))
            .collect();
        Spectrum { levels }
    }
}
