use super::basis::ModeBasis;
use super::trap::TrapSpec;
use crate::error::{Error, Result};
use crate::num::Real;

const EMPTY: u32 = u32::MAX;

/// Single-atom move from mode `source` to mode `dest`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Move {
    pub source: usize,
    pub dest: usize,
}

/// Energy change of a move, split into its single-particle and interaction parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyDelta<T> {
    pub single: T,
    pub interaction: T,
}

impl<T: Real> EnergyDelta<T> {
    #[inline]
    pub fn total(&self) -> T {
        self.single + self.interaction
    }
}

/// Occupation vector over a [`ModeBasis`].
///
/// Counts are dense, and the occupied modes are tracked separately so that
/// sums over the state cost the number of occupied modes rather than the basis
/// size. Every atom also records its mode, which lets a sampler pick a source
/// mode with probability proportional to its occupation in O(1).
#[derive(Clone, Debug)]
pub struct FockState<T> {
    counts: Vec<u32>,
    occupied: Vec<u32>,
    slot: Vec<u32>,
    atoms: Vec<u32>,
    e_sp: T,
    e_int: T,
}

impl<T: Real> FockState<T> {
    /// All `n_atoms` atoms in mode 0.
    pub fn ground(basis: &ModeBasis<T>, n_atoms: usize) -> Result<Self> {
        let mut counts = vec![0u32; basis.len()];
        counts[0] = n_atoms as u32;
        Self::from_counts(basis, counts, T::zero())
    }

    /// Builds a state from dense occupation numbers; cached energies are
    /// computed from scratch with coupling `g`.
    pub fn from_counts(basis: &ModeBasis<T>, counts: Vec<u32>, g: T) -> Result<Self> {
        if counts.len() != basis.len() {
            return Err(Error::InvalidParameter(format!(
                "occupation vector has {} entries for a basis of {} modes",
                counts.len(),
                basis.len()
            )));
        }
        let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
        if total == 0 {
            return Err(Error::InvalidParameter("a state needs at least one atom".into()));
        }
        if total > u64::from(u32::MAX - 1) {
            return Err(Error::InvalidParameter(format!("{total} atoms is too many")));
        }
        let mut occupied = Vec::new();
        let mut slot = vec![EMPTY; counts.len()];
        let mut atoms = Vec::with_capacity(total as usize);
        for (mode, &c) in counts.iter().enumerate() {
            if c > 0 {
                slot[mode] = occupied.len() as u32;
                occupied.push(mode as u32);
                atoms.extend(std::iter::repeat_n(mode as u32, c as usize));
            }
        }
        let mut state = FockState { counts, occupied, slot, atoms, e_sp: T::zero(), e_int: T::zero() };
        state.refresh(basis, g);
        Ok(state)
    }

    /// Builds a state from `(mode, count)` pairs.
    pub fn from_occupations(basis: &ModeBasis<T>, occupations: &[(usize, u32)], g: T) -> Result<Self> {
        let mut counts = vec![0u32; basis.len()];
        for &(mode, c) in occupations {
            let entry = counts.get_mut(mode).ok_or_else(|| {
                Error::InvalidParameter(format!("mode {mode} is outside a basis of {} modes", basis.len()))
            })?;
            *entry += c;
        }
        Self::from_counts(basis, counts, g)
    }

    /// Recomputes both cached energies from scratch.
    pub fn refresh(&mut self, basis: &ModeBasis<T>, g: T) {
        self.e_sp = self.single_particle_energy(basis);
        self.e_int = interaction_energy(self, basis, g);
    }

    pub fn single_particle_energy(&self, basis: &ModeBasis<T>) -> T {
        self.occupied
            .iter()
            .map(|&m| T::of(f64::from(self.counts[m as usize])) * basis.energy(m as usize))
            .sum()
    }

    #[inline]
    pub fn n_atoms(&self) -> usize {
        self.atoms.len()
    }

    #[inline]
    pub fn n0(&self) -> u32 {
        self.counts[0]
    }

    #[inline]
    pub fn count(&self, mode: usize) -> u32 {
        self.counts[mode]
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    /// Occupied modes, in no particular order.
    pub fn occupied(&self) -> impl ExactSizeIterator<Item = usize> + '_ {
        self.occupied.iter().map(|&m| m as usize)
    }

    /// Mode of atom `atom`.
    #[inline]
    pub fn atom_mode(&self, atom: usize) -> usize {
        self.atoms[atom] as usize
    }

    #[inline]
    pub fn single_particle(&self) -> T {
        self.e_sp
    }

    #[inline]
    pub fn interaction(&self) -> T {
        self.e_int
    }

    #[inline]
    pub fn energy(&self) -> T {
        self.e_sp + self.e_int
    }

    /// Moves atom `atom` to `dest` and updates the cached energies by `delta`.
    pub fn move_atom(&mut self, atom: usize, dest: usize, delta: EnergyDelta<T>) {
        let source = self.atoms[atom] as usize;
        if source == dest {
            return;
        }
        self.atoms[atom] = dest as u32;
        self.counts[source] -= 1;
        if self.counts[source] == 0 {
            let s = self.slot[source] as usize;
            let last = *self.occupied.last().expect("source was occupied");
            self.occupied.swap_remove(s);
            if last as usize != source {
                self.slot[last as usize] = s as u32;
            }
            self.slot[source] = EMPTY;
        }
        if self.counts[dest] == 0 {
            self.slot[dest] = self.occupied.len() as u32;
            self.occupied.push(dest as u32);
        }
        self.counts[dest] += 1;
        self.e_sp += delta.single;
        self.e_int += delta.interaction;
    }

    /// Applies `mv` to some atom in the source mode. Searches the atom list, so
    /// it costs O(N); samplers use [`FockState::move_atom`] instead.
    pub fn apply_move(&mut self, mv: Move, delta: EnergyDelta<T>) -> Result<()> {
        let atom = self
            .atoms
            .iter()
            .position(|&m| m as usize == mv.source)
            .ok_or_else(|| Error::Precondition(format!("source mode {} is unoccupied", mv.source)))?;
        self.move_atom(atom, mv.dest, delta);
        Ok(())
    }

    /// Re-derives the occupied list and counts from the atom list; test helper
    /// for the bookkeeping invariants.
    pub fn is_consistent(&self) -> bool {
        let mut counts = vec![0u32; self.counts.len()];
        for &a in &self.atoms {
            counts[a as usize] += 1;
        }
        if counts != self.counts {
            return false;
        }
        let occupied = counts.iter().filter(|&&c| c > 0).count();
        occupied == self.occupied.len()
            && self
                .occupied
                .iter()
                .enumerate()
                .all(|(s, &m)| self.counts[m as usize] > 0 && self.slot[m as usize] as usize == s)
    }
}

/// Contact-interaction energy of a Fock state,
/// `(g/2) [Σ_i I_ii N_i(N_i−1) + 4 Σ_{i<j} I_ij N_i N_j]`.
///
/// The off-diagonal factor counts direct and exchange terms. On a ring every
/// overlap is `1/L` and the sum collapses to `(g/2L)(2N² − N − Σ N_j²)`.
pub fn interaction_energy<T: Real>(state: &FockState<T>, basis: &ModeBasis<T>, g: T) -> T {
    if g == T::zero() {
        return T::zero();
    }
    let two = T::of(2.0);
    if let TrapSpec::Ring1d { length } = basis.trap() {
        let n = T::of_usize(state.n_atoms());
        let sq: T = state.occupied().map(|m| T::of(f64::from(state.count(m))).powi(2)).sum();
        return g / (two * T::of(*length)) * (two * n * n - n - sq);
    }
    let occ: Vec<usize> = state.occupied().collect();
    let mut acc = T::zero();
    for (a, &i) in occ.iter().enumerate() {
        let ni = T::of(f64::from(state.count(i)));
        acc += basis.overlap(i, i) * ni * (ni - T::one());
        for &j in &occ[a + 1..] {
            let nj = T::of(f64::from(state.count(j)));
            acc += T::of(4.0) * basis.overlap(i, j) * ni * nj;
        }
    }
    g / two * acc
}

/// Total energy `Σ_j N_j ε_j + E_int`, computed from scratch.
pub fn state_energy<T: Real>(state: &FockState<T>, basis: &ModeBasis<T>, g: T) -> T {
    state.single_particle_energy(basis) + interaction_energy(state, basis, g)
}

/// Energy change of moving one atom from `mv.source` to `mv.dest`, without
/// building the moved state. Touches only terms that involve the two modes:
/// O(1) on a ring or without interactions, O(occupied modes) otherwise.
pub fn energy_delta<T: Real>(state: &FockState<T>, mv: Move, basis: &ModeBasis<T>, g: T) -> Result<EnergyDelta<T>> {
    if state.counts.get(mv.source).copied().unwrap_or(0) == 0 {
        return Err(Error::Precondition(format!("source mode {} is unoccupied", mv.source)));
    }
    if mv.dest >= basis.len() {
        return Err(Error::Precondition(format!("destination mode {} is outside the basis", mv.dest)));
    }
    Ok(energy_delta_unchecked(state, mv, basis, g))
}

#[inline]
pub(crate) fn energy_delta_unchecked<T: Real>(state: &FockState<T>, mv: Move, basis: &ModeBasis<T>, g: T) -> EnergyDelta<T> {
    let (i, k) = (mv.source, mv.dest);
    if i == k {
        return EnergyDelta { single: T::zero(), interaction: T::zero() };
    }
    let single = basis.energy(k) - basis.energy(i);
    if g == T::zero() {
        return EnergyDelta { single, interaction: T::zero() };
    }
    let ni = T::of(f64::from(state.counts[i]));
    let nk = T::of(f64::from(state.counts[k]));
    let interaction = match basis.trap() {
        TrapSpec::Ring1d { length } => g / T::of(*length) * (ni - nk - T::one()),
        _ => {
            // With h_a = 2 Σ_b I_ab N_b − I_aa N_a, the bracket changes by
            // 2(h_k − h_i) + 2 I_ii − 4 I_ik.
            let (mut si, mut sk) = (T::zero(), T::zero());
            for b in state.occupied() {
                let nb = T::of(f64::from(state.counts[b]));
                si += basis.overlap(i, b) * nb;
                sk += basis.overlap(k, b) * nb;
            }
            let two = T::of(2.0);
            let (iii, ikk, iik) = (basis.overlap(i, i), basis.overlap(k, k), basis.overlap(i, k));
            let hi = two * si - iii * ni;
            let hk = two * sk - ikk * nk;
            let bracket = two * (hk - hi) + two * iii - T::of(4.0) * iik;
            g / two * bracket
        }
    };
    EnergyDelta { single, interaction }
}
