//! Reference form of the proposal and acceptance rule.
//!
//! An atom leaves mode `i` with probability `e^{-γε_i} N_i / A` and then lands
//! in mode `k` with probability `e^{-γε_k} (N⁻_k + 1) / B⁻`, where `N⁻` is the
//! occupation with the atom already removed. Removing before inserting is what
//! makes a self-move weigh `N_i²` at `γ = 0`. With
//! `A = Σ_m e^{-γε_m} N_m` and `C = Σ_m e^{-γε_m}` the insertion normaliser is
//! `B⁻ = A − e^{-γε_i} + C`, and since the reverse move sees the same `B⁻`,
//! the Hastings ratio reduces to `A / A'`.
//!
//! The functions here recompute the normalisers from scratch and are meant
//! for tests and exact transition matrices; [`Chain`](super::Chain) keeps
//! them up to date incrementally.

use rand::Rng;

use crate::model::{FockState, ModeBasis, Move};
use crate::num::Real;

/// A drawn move with the log densities of proposing it and its reverse.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proposal {
    pub mv: Move,
    pub log_forward: f64,
    pub log_backward: f64,
}

struct Normalisers {
    a: f64,
    c: f64,
}

fn tilt<T: Real>(basis: &ModeBasis<T>, gamma: f64, mode: usize) -> f64 {
    (-gamma * basis.energy(mode).as_f64()).exp()
}

fn normalisers<T: Real>(state: &FockState<T>, basis: &ModeBasis<T>, gamma: f64) -> Normalisers {
    let a = state.occupied().map(|m| tilt(basis, gamma, m) * f64::from(state.count(m))).sum();
    let c = (0..basis.len()).map(|m| tilt(basis, gamma, m)).sum();
    Normalisers { a, c }
}

/// Probability that one proposal step from `state` picks source `mv.source`
/// and destination `mv.dest`.
pub fn proposal_probability<T: Real>(state: &FockState<T>, basis: &ModeBasis<T>, gamma: f64, mv: Move) -> f64 {
    let n = normalisers(state, basis, gamma);
    let (i, k) = (mv.source, mv.dest);
    let ni = f64::from(state.count(i));
    if ni == 0.0 {
        return 0.0;
    }
    let ti = tilt(basis, gamma, i);
    let tk = tilt(basis, gamma, k);
    let b_minus = n.a - ti + n.c;
    let nk_minus = f64::from(state.count(k)) - if i == k { 1.0 } else { 0.0 };
    (ti * ni / n.a) * (tk * (nk_minus + 1.0) / b_minus)
}

/// Draws a move and returns the exact log proposal densities of the move
/// and of its reverse, the latter evaluated on the moved state.
pub fn propose<T: Real, R: Rng + ?Sized>(state: &FockState<T>, basis: &ModeBasis<T>, gamma: f64, rng: &mut R) -> Proposal {
    let n = normalisers(state, basis, gamma);

    let mut u = rng.random::<f64>() * n.a;
    let mut source = 0;
    for m in state.occupied() {
        source = m;
        u -= tilt(basis, gamma, m) * f64::from(state.count(m));
        if u < 0.0 {
            break;
        }
    }

    let ti = tilt(basis, gamma, source);
    let b_minus = n.a - ti + n.c;
    let mut u = rng.random::<f64>() * b_minus;
    let mut dest = basis.len() - 1;
    for m in 0..basis.len() {
        let occ = f64::from(state.count(m)) - if m == source { 1.0 } else { 0.0 };
        u -= tilt(basis, gamma, m) * (occ + 1.0);
        if u < 0.0 {
            dest = m;
            break;
        }
    }

    let mv = Move { source, dest };
    let log_forward = proposal_probability(state, basis, gamma, mv).ln();
    let log_backward = if source == dest {
        log_forward
    } else {
        let tk = tilt(basis, gamma, dest);
        let a_after = n.a - ti + tk;
        let nk_after = f64::from(state.count(dest)) + 1.0;
        let ni_after = f64::from(state.count(source)) - 1.0;
        ((tk * nk_after / a_after) * (ti * (ni_after + 1.0) / b_minus)).ln()
    };
    Proposal { mv, log_forward, log_backward }
}

/// Metropolis–Hastings acceptance, `min(0, −β ΔE + log q_rev − log q_fwd)`.
#[inline]
pub fn acceptance_log_prob(delta_e: f64, beta: f64, log_forward: f64, log_backward: f64) -> f64 {
    (-beta * delta_e + log_backward - log_forward).min(0.0)
}
