//! Delete-one-chain jackknife. Chains are independent, so leaving one out at a
//! time gives honest errors even for statistics of correlated records such as
//! a variance after post-selection.

use crate::sampler::SampleRecord;

/// Fewest chains for which standard errors are reported.
pub const MIN_CHAINS_FOR_ERRORS: usize = 4;

/// Standard error from leave-one-out replicates, `NaN` for fewer than
/// [`MIN_CHAINS_FOR_ERRORS`] replicates.
pub fn jackknife_stderr(replicates: &[f64]) -> f64 {
    let g = replicates.len();
    if g < MIN_CHAINS_FOR_ERRORS {
        return f64::NAN;
    }
    let gf = g as f64;
    let mean = replicates.iter().sum::<f64>() / gf;
    let ss: f64 = replicates.iter().map(|r| (r - mean).powi(2)).sum();
    ((gf - 1.0) / gf * ss).sqrt()
}

/// Record indices grouped by chain id, in order of first appearance.
pub(crate) fn chain_groups<T>(records: &[SampleRecord<T>]) -> Vec<Vec<usize>> {
    let mut ids: Vec<u32> = Vec::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, r) in records.iter().enumerate() {
        match ids.iter().position(|&c| c == r.chain_id) {
            Some(g) => groups[g].push(i),
            None => {
                ids.push(r.chain_id);
                groups.push(vec![i]);
            }
        }
    }
    groups
}

/// Records of every chain except the `skip`-th group.
pub(crate) fn without_group<T: Copy>(records: &[SampleRecord<T>], groups: &[Vec<usize>], skip: usize) -> Vec<SampleRecord<T>> {
    groups
        .iter()
        .enumerate()
        .filter(|&(g, _)| g != skip)
        .flat_map(|(_, idx)| idx.iter().map(|&i| records[i]))
        .collect()
}

/// Leave-one-chain-out replicates of `stat`, or an empty vector when there
/// are too few chains.
pub(crate) fn replicates<T: Copy, F>(records: &[SampleRecord<T>], mut stat: F) -> Vec<f64>
where
    F: FnMut(&[SampleRecord<T>]) -> f64,
{
    let groups = chain_groups(records);
    if groups.len() < MIN_CHAINS_FOR_ERRORS {
        return Vec::new();
    }
    (0..groups.len()).map(|j| stat(&without_group(records, &groups, j))).collect()
}
