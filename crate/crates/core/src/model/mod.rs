//! Trap geometries, truncated mode bases and Fock-state energies.

mod basis;
mod fock;
mod overlap;
mod spectrum;
mod trap;

use std::sync::Arc;

pub use basis::{build_basis, default_cutoff, mode_count, Mode, ModeBasis, QuantumNumbers, DEFAULT_MAX_MODES};
pub use fock::{energy_delta, interaction_energy, state_energy, EnergyDelta, FockState, Move};
pub(crate) use fock::energy_delta_unchecked;
pub use overlap::{hermite_overlap_table, Overlap};
pub use spectrum::{LevelSpectrum, Spectrum};
pub use trap::TrapSpec;

use crate::error::{Error, Result};
use crate::num::Real;

/// A gas of `atoms` bosons in a truncated basis with contact coupling `g`.
#[derive(Clone, Debug)]
pub struct Model<T> {
    basis: Arc<ModeBasis<T>>,
    atoms: usize,
    coupling: T,
}

/// Plain description of a model, used to tag sample sets and output files.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelDescriptor {
    pub trap: TrapSpec,
    pub atoms: usize,
    pub coupling: f64,
    pub cutoff: u64,
}

impl<T: Real> Model<T> {
    pub fn new(basis: Arc<ModeBasis<T>>, atoms: usize, coupling: T) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::InvalidParameter("atom number must be at least 1".into()));
        }
        if atoms >= u32::MAX as usize {
            return Err(Error::InvalidParameter(format!("atom number {atoms} is too large")));
        }
        if !(coupling >= T::zero()) || !coupling.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling g = {coupling}: attractive interactions unsupported"
            )));
        }
        Ok(Model { basis, atoms, coupling })
    }

    /// Convenience constructor that builds the basis too.
    pub fn build(trap: TrapSpec, cutoff: u64, atoms: usize, coupling: T) -> Result<Self> {
        Self::new(Arc::new(build_basis(trap, cutoff)?), atoms, coupling)
    }

    pub fn basis(&self) -> &ModeBasis<T> {
        &self.basis
    }

    pub fn shared_basis(&self) -> Arc<ModeBasis<T>> {
        Arc::clone(&self.basis)
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn coupling(&self) -> T {
        self.coupling
    }

    pub fn descriptor(&self) -> ModelDescriptor {
        ModelDescriptor {
            trap: *self.basis.trap(),
            atoms: self.atoms,
            coupling: self.coupling.as_f64(),
            cutoff: self.basis.cutoff(),
        }
    }

    /// All atoms in the ground mode.
    pub fn ground_state(&self) -> FockState<T> {
        let mut s = FockState::ground(&self.basis, self.atoms).expect("validated atom number");
        s.refresh(&self.basis, self.coupling);
        s
    }

    pub fn state(&self, occupations: &[(usize, u32)]) -> Result<FockState<T>> {
        let s = FockState::from_occupations(&self.basis, occupations, self.coupling)?;
        if s.n_atoms() != self.atoms {
            return Err(Error::InvalidParameter(format!(
                "state holds {} atoms, model has {}",
                s.n_atoms(),
                self.atoms
            )));
        }
        Ok(s)
    }

    pub fn interaction_energy(&self, state: &FockState<T>) -> T {
        interaction_energy(state, &self.basis, self.coupling)
    }

    pub fn state_energy(&self, state: &FockState<T>) -> T {
        state_energy(state, &self.basis, self.coupling)
    }

    pub fn energy_delta(&self, state: &FockState<T>, mv: Move) -> Result<EnergyDelta<T>> {
        energy_delta(state, mv, &self.basis, self.coupling)
    }

    /// Moves one atom and keeps the cached energies in step.
    pub fn apply(&self, state: &mut FockState<T>, mv: Move) -> Result<()> {
        let d = self.energy_delta(state, mv)?;
        state.apply_move(mv, d)
    }
}
