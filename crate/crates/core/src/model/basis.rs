use std::cmp::Ordering;
use std::sync::OnceLock;

use super::overlap::{convert_table, hermite_overlap_table, Overlap};
use super::trap::TrapSpec;
use crate::error::{Error, Result};
use crate::num::Real;

/// Default ceiling on the number of enumerated modes.
pub const DEFAULT_MAX_MODES: usize = 20_000_000;

/// Quantum numbers labelling a single-particle orbital.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum QuantumNumbers {
    Ring(i64),
    Harmonic1d(u32),
    Harmonic3d([u32; 3]),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mode<T> {
    pub quantum: QuantumNumbers,
    /// Energy above the single-particle ground state, in trap units.
    pub energy: T,
}

/// Truncated single-particle basis: every orbital with energy at or below
/// `cutoff` quanta, sorted by energy and then by quantum numbers.
///
/// Immutable after construction; the overlap table is computed on first use.
#[derive(Debug)]
pub struct ModeBasis<T> {
    trap: TrapSpec,
    cutoff: u64,
    modes: Vec<Mode<T>>,
    levels: Option<Vec<u64>>,
    overlap: OnceLock<Overlap<T>>,
}

/// Builds the basis with the default mode-count ceiling.
pub fn build_basis<T: Real>(trap: TrapSpec, cutoff: u64) -> Result<ModeBasis<T>> {
    ModeBasis::with_limit(trap, cutoff, DEFAULT_MAX_MODES)
}

impl<T: Real> ModeBasis<T> {
    pub fn with_limit(trap: TrapSpec, cutoff: u64, max_modes: usize) -> Result<Self> {
        trap.validate()?;
        if cutoff < 1 {
            return Err(Error::InvalidParameter("cutoff energy must be at least 1".into()));
        }
        let count = mode_count(&trap, cutoff);
        if count > max_modes as u128 {
            return Err(Error::Resource {
                what: format!("{trap} with cutoff {cutoff} has {count} modes"),
                count,
                limit: max_modes as u128,
            });
        }

        let mut raw: Vec<(f64, QuantumNumbers)> = Vec::with_capacity(count as usize);
        match trap {
            TrapSpec::Ring1d { .. } => {
                let n_max = (cutoff as f64).sqrt().floor() as i64;
                for n in -n_max..=n_max {
                    raw.push(((n * n) as f64, QuantumNumbers::Ring(n)));
                }
            }
            TrapSpec::Harmonic1d { .. } => {
                for n in 0..=cutoff {
                    raw.push((n as f64, QuantumNumbers::Harmonic1d(n as u32)));
                }
            }
            TrapSpec::Harmonic3d { aspect_ratio } => {
                let c = cutoff as f64;
                let s_max = (c / aspect_ratio + 1e-9).floor() as u32;
                for nx in 0..=s_max {
                    for ny in 0..=(s_max - nx) {
                        let radial = aspect_ratio * f64::from(nx + ny);
                        let nz_max = (c - radial + 1e-9).floor() as u32;
                        for nz in 0..=nz_max {
                            raw.push((radial + f64::from(nz), QuantumNumbers::Harmonic3d([nx, ny, nz])));
                        }
                    }
                }
            }
        }
        raw.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));

        let levels = trap
            .is_integer_grid()
            .then(|| raw.iter().map(|(e, _)| e.round() as u64).collect());
        let modes = raw
            .into_iter()
            .map(|(energy, quantum)| Mode { quantum, energy: T::of(energy) })
            .collect();
        Ok(ModeBasis { trap, cutoff, modes, levels, overlap: OnceLock::new() })
    }

    pub fn trap(&self) -> &TrapSpec {
        &self.trap
    }

    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    #[inline]
    pub fn energy(&self, mode: usize) -> T {
        self.modes[mode].energy
    }

    /// Integer energy of `mode` in quanta, when the trap is on an integer grid.
    pub fn level(&self, mode: usize) -> Option<u64> {
        self.levels.as_ref().map(|l| l[mode])
    }

    pub fn levels(&self) -> Option<&[u64]> {
        self.levels.as_deref()
    }

    pub fn overlap_table(&self) -> &Overlap<T> {
        self.overlap.get_or_init(|| match self.trap {
            TrapSpec::Ring1d { length } => Overlap::Uniform(T::one() / T::of(length)),
            TrapSpec::Harmonic1d { .. } | TrapSpec::Harmonic3d { .. } => {
                let n_max = self.max_axis_quantum();
                Overlap::Hermite {
                    table: convert_table(hermite_overlap_table(n_max as usize)),
                    size: n_max as usize + 1,
                }
            }
        })
    }

    /// `I(i, j) = ∫ |φ_i|² |φ_j|²` in trap units.
    #[inline]
    pub fn overlap(&self, i: usize, j: usize) -> T {
        let table = self.overlap_table();
        match (self.modes[i].quantum, self.modes[j].quantum) {
            (QuantumNumbers::Harmonic1d(a), QuantumNumbers::Harmonic1d(b)) => table.axis(a, b),
            (QuantumNumbers::Harmonic3d(a), QuantumNumbers::Harmonic3d(b)) => {
                table.axis(a[0], b[0]) * table.axis(a[1], b[1]) * table.axis(a[2], b[2])
            }
            _ => table.axis(0, 0),
        }
    }

    fn max_axis_quantum(&self) -> u32 {
        self.modes
            .iter()
            .map(|m| match m.quantum {
                QuantumNumbers::Ring(_) => 0,
                QuantumNumbers::Harmonic1d(n) => n,
                QuantumNumbers::Harmonic3d(q) => q[0].max(q[1]).max(q[2]),
            })
            .max()
            .unwrap_or(0)
    }
}

/// Number of modes with energy at or below `cutoff`, without enumerating them.
pub fn mode_count(trap: &TrapSpec, cutoff: u64) -> u128 {
    match *trap {
        TrapSpec::Ring1d { .. } => 2 * ((cutoff as f64).sqrt().floor() as u128) + 1,
        TrapSpec::Harmonic1d { .. } => cutoff as u128 + 1,
        TrapSpec::Harmonic3d { aspect_ratio } => {
            let c = cutoff as f64;
            let s_max = (c / aspect_ratio + 1e-9).floor() as u128;
            (0..=s_max)
                .map(|s| (s + 1) * ((c - aspect_ratio * s as f64 + 1e-9).floor() as u128 + 1))
                .sum()
        }
    }
}

/// Default cutoff: twelve thermal energies, rounded up.
pub fn default_cutoff(temperature: f64) -> u64 {
    ((12.0 * temperature).ceil() as u64).max(1)
}
