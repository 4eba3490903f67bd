use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_pcg::Pcg64;

use super::params::SamplerParams;
use super::set::{ChainDiagnostics, SampleRecord, SampleSet};
use crate::error::Result;
use crate::model::{energy_delta_unchecked, FockState, Model, Move};
use crate::num::Real;

/// Steps between from-scratch recomputations of the running sums.
const REFRESH_INTERVAL: u64 = 1 << 16;

/// One Metropolis–Hastings walker.
///
/// The source mode is drawn by picking a uniformly random atom and keeping it
/// with probability `e^{-γε}`. The destination distribution splits into an
/// occupation part, drawn the same way from the remaining atoms, and a static
/// part `∝ e^{-γε_k}` over every mode. Both steps are O(1) on average and
/// independent of the basis size.
pub struct Chain<'m, T> {
    model: &'m Model<T>,
    state: FockState<T>,
    rng: Pcg64,
    beta: T,
    gamma: f64,
    tilt: Vec<f64>,
    static_part: Option<WeightedIndex<f64>>,
    /// `A = Σ_atoms e^{-γε}`.
    a_sum: f64,
    /// `C = Σ_modes e^{-γε}`.
    c_sum: f64,
    steps: u64,
    accepted: u64,
}

impl<'m, T: Real> Chain<'m, T> {
    /// Walker starting from the all-in-ground-mode state, seeded with
    /// `seed ^ chain_id`.
    pub fn new(model: &'m Model<T>, params: &SamplerParams, chain_id: u32) -> Result<Self> {
        Self::from_state(model, params, chain_id, model.ground_state())
    }

    pub fn from_state(model: &'m Model<T>, params: &SamplerParams, chain_id: u32, mut state: FockState<T>) -> Result<Self> {
        params.validate()?;
        let basis = model.basis();
        state.refresh(basis, model.coupling());
        let gamma = params.gamma;
        let tilt: Vec<f64> = basis.modes().iter().map(|m| (-gamma * m.energy.as_f64()).exp()).collect();
        let c_sum = crate::num::pairwise_sum(&tilt);
        let static_part = if gamma == 0.0 {
            None
        } else {
            Some(WeightedIndex::new(&tilt).expect("positive finite weights"))
        };
        let mut chain = Chain {
            model,
            state,
            rng: Pcg64::seed_from_u64(params.seed ^ u64::from(chain_id)),
            beta: T::of(params.beta),
            gamma,
            tilt,
            static_part,
            a_sum: 0.0,
            c_sum,
            steps: 0,
            accepted: 0,
        };
        chain.a_sum = chain.occupied_tilt_sum();
        Ok(chain)
    }

    fn occupied_tilt_sum(&self) -> f64 {
        self.state.occupied().map(|m| self.tilt[m] * f64::from(self.state.count(m))).sum()
    }

    pub fn state(&self) -> &FockState<T> {
        &self.state
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.steps == 0 {
            0.0
        } else {
            self.accepted as f64 / self.steps as f64
        }
    }

    /// Picks an atom with probability `∝ e^{-γε}` of its mode, skipping `skip`.
    #[inline]
    fn pick_atom(&mut self, skip: Option<usize>) -> usize {
        let n = self.state.n_atoms();
        let range = if skip.is_some() { n - 1 } else { n };
        loop {
            let mut atom = self.rng.random_range(0..range);
            if let Some(s) = skip {
                if atom >= s {
                    atom += 1;
                }
            }
            if self.gamma == 0.0 {
                return atom;
            }
            let t = self.tilt[self.state.atom_mode(atom)];
            if t >= 1.0 || self.rng.random::<f64>() < t {
                return atom;
            }
        }
    }

    /// One attempted move. Returns whether the state changed.
    pub fn step(&mut self) -> bool {
        self.steps += 1;
        if self.steps.is_multiple_of(REFRESH_INTERVAL) {
            self.a_sum = self.occupied_tilt_sum();
            self.state.refresh(self.model.basis(), self.model.coupling());
        }

        let atom = self.pick_atom(None);
        let source = self.state.atom_mode(atom);
        let t_source = self.tilt[source];
        let a_minus = self.a_sum - t_source;
        let u = self.rng.random::<f64>() * (a_minus + self.c_sum);
        let dest = if u < a_minus && self.state.n_atoms() > 1 {
            let other = self.pick_atom(Some(atom));
            self.state.atom_mode(other)
        } else {
            match &self.static_part {
                Some(w) => w.sample(&mut self.rng),
                None => self.rng.random_range(0..self.tilt.len()),
            }
        };
        if dest == source {
            self.accepted += 1;
            return false;
        }

        let mv = Move { source, dest };
        let delta = energy_delta_unchecked(&self.state, mv, self.model.basis(), self.model.coupling());
        let a_after = a_minus + self.tilt[dest];
        let log_acc = (-(self.beta * delta.total()).as_f64() + (self.a_sum / a_after).ln()).min(0.0);
        if log_acc < 0.0 && self.rng.random::<f64>() >= log_acc.exp() {
            return false;
        }
        self.state.move_atom(atom, dest, delta);
        self.a_sum = a_after;
        self.accepted += 1;
        true
    }

    pub fn advance(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }
}

/// Runs one chain: burn-in, then `samples_target` records spaced by
/// `thinning` attempted steps.
pub fn run_chain<T: Real>(model: &Model<T>, params: &SamplerParams, chain_id: u32) -> Result<SampleSet<T>> {
    let mut chain = Chain::new(model, params, chain_id)?;
    chain.advance(params.burn_in_steps);
    let burn_in_rate = chain.acceptance_rate();
    let mut records = Vec::with_capacity(params.samples_target);
    for _ in 0..params.samples_target {
        chain.advance(params.thinning);
        records.push(SampleRecord {
            n0: chain.state().n0(),
            energy: chain.state().energy(),
            chain_id,
            step: chain.steps(),
        });
    }
    let diagnostics = ChainDiagnostics::from_records(chain_id, &records, chain.acceptance_rate(), burn_in_rate);
    Ok(SampleSet::new(model.descriptor(), params.clone(), records, vec![diagnostics]))
}

/// Runs `params.chain_count` independent chains in parallel and merges them
/// in chain order. The result does not depend on the thread count.
pub fn run_chains<T: Real>(model: &Model<T>, params: &SamplerParams) -> Result<SampleSet<T>> {
    use rayon::prelude::*;
    params.validate()?;
    let sets = (0..params.chain_count as u32)
        .into_par_iter()
        .map(|c| run_chain(model, params, c))
        .collect::<Result<Vec<_>>>()?;
    SampleSet::merge(sets)
}
