use super::jackknife::{chain_groups, jackknife_stderr, MIN_CHAINS_FOR_ERRORS};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::sampler::{SampleRecord, SampleSet};

/// Sample mean and population variance of `N0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentEstimate {
    pub mean_n0: f64,
    pub var_n0: f64,
    /// Jackknife over chains; `NaN` with fewer than four chains.
    pub stderr_mean: f64,
    pub stderr_var: f64,
    /// Number of records.
    pub w: usize,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    n: f64,
    s1: f64,
    s2: f64,
}

impl Sums {
    fn add(&mut self, x: f64) {
        self.n += 1.0;
        self.s1 += x;
        self.s2 += x * x;
    }

    fn minus(self, o: Sums) -> Sums {
        Sums { n: self.n - o.n, s1: self.s1 - o.s1, s2: self.s2 - o.s2 }
    }

    /// `(mean, variance)` of the shifted values, `Σx²/W − x̄²`.
    fn moments(self) -> (f64, f64) {
        let mean = self.s1 / self.n;
        (mean, (self.s2 / self.n - mean * mean).max(0.0))
    }
}

/// `N̄0 = Σ N0 / W` and `Δ²N0 = Σ N0² / W − N̄0²` over all records, with
/// errors from the spread of leave-one-chain-out estimates.
pub fn moments<T: Real>(set: &SampleSet<T>) -> Result<MomentEstimate> {
    moments_of_records(set.records())
}

pub(crate) fn moments_of_records<T: Real>(records: &[SampleRecord<T>]) -> Result<MomentEstimate> {
    if records.is_empty() {
        return Err(Error::EmptySet);
    }
    // A shift keeps Σx² from swamping the variance for large N0.
    let shift = f64::from(records[0].n0);
    let groups = chain_groups(records);
    let per_chain: Vec<Sums> = groups
        .iter()
        .map(|idx| {
            let mut s = Sums::default();
            for &i in idx {
                s.add(f64::from(records[i].n0) - shift);
            }
            s
        })
        .collect();
    let mut total = Sums::default();
    for s in &per_chain {
        total.n += s.n;
        total.s1 += s.s1;
        total.s2 += s.s2;
    }
    let (mean, var) = total.moments();

    let (stderr_mean, stderr_var) = if per_chain.len() >= MIN_CHAINS_FOR_ERRORS {
        let (means, vars): (Vec<f64>, Vec<f64>) = per_chain.iter().map(|&s| total.minus(s).moments()).unzip();
        (jackknife_stderr(&means), jackknife_stderr(&vars))
    } else {
        (f64::NAN, f64::NAN)
    };
    Ok(MomentEstimate { mean_n0: mean + shift, var_n0: var, stderr_mean, stderr_var, w: records.len() })
}

/// Mean and population variance of plain values.
pub fn mean_and_variance(xs: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var))
}
