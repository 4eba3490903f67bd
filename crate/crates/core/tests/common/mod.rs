#![allow(dead_code)]

use std::collections::HashMap;

use fss::model::Move;
use fss::{FockState, ModeBasis, Model};
use fss::sampler::{acceptance_log_prob, proposal_probability};

/// Every occupation vector of `atoms` bosons over `modes` modes.
pub fn fock_states(modes: usize, atoms: u32) -> Vec<Vec<u32>> {
    fn go(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for n in 0..=left {
            cur[i] = n;
            go(i + 1, left - n, cur, out);
        }
    }
    let mut out = Vec::new();
    go(0, atoms, &mut vec![0; modes], &mut out);
    out
}

/// Number of configurations with `n` excited atoms and total energy `E`, by
/// walking all multisets of excited modes within the energy budget.
/// `levels[0]` must be the ground mode.
pub fn excited_counts(levels: &[u64], atoms: usize, e_max: u64) -> HashMap<(usize, u64), u64> {
    fn go(levels: &[u64], start: usize, n: usize, e: u64, atoms: usize, e_max: u64, out: &mut HashMap<(usize, u64), u64>) {
        *out.entry((n, e)).or_default() += 1;
        if n == atoms {
            return;
        }
        for m in start..levels.len() {
            let e2 = e + levels[m];
            if e2 <= e_max {
                go(levels, m, n + 1, e2, atoms, e_max, out);
            }
        }
    }
    let mut out = HashMap::new();
    go(levels, 1, 0, 0, atoms, e_max, &mut out);
    out
}

/// Boltzmann weight of a state.
pub fn weight(model: &Model, state: &FockState, beta: f64) -> f64 {
    (-beta * model.state_energy(state)).exp()
}

/// Probability of one sampler step taking `from` to the distinct state
/// reached by `mv`, from the reference proposal density.
pub fn transition(model: &Model, from: &FockState, mv: Move, gamma: f64, beta: f64) -> (f64, Vec<u32>) {
    let basis: &ModeBasis = model.basis();
    let q_fwd = proposal_probability(from, basis, gamma, mv);
    let mut to = from.clone();
    model.apply(&mut to, mv).unwrap();
    let q_bwd = proposal_probability(&to, basis, gamma, Move { source: mv.dest, dest: mv.source });
    let de = model.state_energy(&to) - model.state_energy(from);
    let acc = acceptance_log_prob(de, beta, q_fwd.ln(), q_bwd.ln()).exp();
    (q_fwd * acc, to.counts().to_vec())
}

/// Dense single-step transition matrix over `states`, rejections on the diagonal.
pub fn transition_matrix(model: &Model, states: &[Vec<u32>], gamma: f64, beta: f64) -> Vec<Vec<f64>> {
    let index: HashMap<&[u32], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let modes = model.basis().len();
    let mut p = vec![vec![0.0; states.len()]; states.len()];
    for (a, row) in p.iter_mut().enumerate() {
        let from = FockState::from_counts(model.basis(), states[a].clone(), model.coupling()).unwrap();
        for i in from.occupied().collect::<Vec<_>>() {
            for k in (0..modes).filter(|&k| k != i) {
                let (prob, to) = transition(model, &from, Move { source: i, dest: k }, gamma, beta);
                row[index[to.as_slice()]] += prob;
            }
        }
        row[a] = 1.0 - row.iter().enumerate().filter(|&(b, _)| b != a).map(|(_, v)| v).sum::<f64>();
    }
    p
}
