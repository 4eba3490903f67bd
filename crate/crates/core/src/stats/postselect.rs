use super::jackknife::{jackknife_stderr, replicates};
use crate::error::{Error, Result};
use crate::num::Real;
use crate::sampler::{SampleRecord, SampleSet, Window};

/// Default retained fractions, largest first.
pub const DEFAULT_FRACTIONS: [f64; 8] = [1.0, 0.8, 0.6, 0.4, 0.3, 0.2, 0.1, 0.05];

/// One point of a post-selection curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePoint {
    /// Requested fraction.
    pub target: f64,
    /// Fraction actually retained; exceeds `target` when records tie at the window edge.
    pub fraction: f64,
    pub delta_e: f64,
    pub var_n0: f64,
    pub stderr_var: f64,
    pub retained: usize,
}

/// Variance of `N0` as the energy window shrinks around the parent mean.
#[derive(Clone, Debug, PartialEq)]
pub struct PostSelectionCurve {
    pub temperature: f64,
    pub e_mean: f64,
    pub points: Vec<CurvePoint>,
}

fn mean_energy<T: Real>(records: &[SampleRecord<T>]) -> f64 {
    records.iter().map(|r| r.energy.as_f64()).sum::<f64>() / records.len() as f64
}

fn check_fraction(f: f64) -> Result<()> {
    if f > 0.0 && f <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("retained fraction must lie in (0, 1], got {f}")))
    }
}

/// Records sorted by distance from `e_mean`, ties kept in record order.
struct Ranked {
    dist: Vec<f64>,
    order: Vec<usize>,
}

impl Ranked {
    fn new<T: Real>(records: &[SampleRecord<T>], e_mean: f64) -> Self {
        let all: Vec<f64> = records.iter().map(|r| (r.energy.as_f64() - e_mean).abs()).collect();
        let mut order: Vec<usize> = (0..records.len()).collect();
        order.sort_by(|&a, &b| all[a].total_cmp(&all[b]).then(a.cmp(&b)));
        let dist = order.iter().map(|&i| all[i]).collect();
        Ranked { dist, order }
    }

    /// Number kept for fraction `f`: `ceil(f W)`, extended over ties at the edge.
    fn kept(&self, f: f64) -> usize {
        let w = self.dist.len();
        let mut m = ((f * w as f64) - 1e-9).ceil().clamp(1.0, w as f64) as usize;
        while m < w && self.dist[m] == self.dist[m - 1] {
            m += 1;
        }
        m
    }
}

/// Keeps the `ceil(f W)` records closest in energy to the mean of `set`,
/// plus any that tie with the last of them, so that the window is symmetric
/// and never splits a group of equal energies.
pub fn post_select<T: Real>(set: &SampleSet<T>, f: f64) -> Result<SampleSet<T>> {
    check_fraction(f)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let e_mean = mean_energy(set.records());
    post_select_around(set, f, e_mean)
}

/// [`post_select`] with an explicit window centre.
pub fn post_select_around<T: Real>(set: &SampleSet<T>, f: f64, e_mean: f64) -> Result<SampleSet<T>> {
    check_fraction(f)?;
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let ranked = Ranked::new(set.records(), e_mean);
    let m = ranked.kept(f);
    let mut keep: Vec<usize> = ranked.order[..m].to_vec();
    keep.sort_unstable();
    let records = keep.iter().map(|&i| set.records()[i]).collect();
    let window = Window { e_mean, delta_e: 2.0 * ranked.dist[m - 1], fraction: m as f64 / set.len() as f64 };
    Ok(set.with_records(records).with_window(window))
}

pub(crate) struct Point {
    pub(crate) fraction: f64,
    pub(crate) delta_e: f64,
    pub(crate) var: f64,
    retained: usize,
}

/// Variances for every fraction in one pass over the ranked records.
pub(crate) fn curve_points<T: Real>(records: &[SampleRecord<T>], fractions: &[f64]) -> Vec<Point> {
    let e_mean = mean_energy(records);
    let ranked = Ranked::new(records, e_mean);
    let shift = f64::from(records[0].n0);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut taken = 0;
    let mut ms: Vec<(usize, usize)> = fractions.iter().enumerate().map(|(i, &f)| (ranked.kept(f), i)).collect();
    ms.sort_unstable();
    let mut out: Vec<Option<Point>> = (0..fractions.len()).map(|_| None).collect();
    for (m, i) in ms {
        while taken < m {
            let x = f64::from(records[ranked.order[taken]].n0) - shift;
            s1 += x;
            s2 += x * x;
            taken += 1;
        }
        let mean = s1 / m as f64;
        out[i] = Some(Point {
            fraction: m as f64 / records.len() as f64,
            delta_e: 2.0 * ranked.dist[m - 1],
            var: (s2 / m as f64 - mean * mean).max(0.0),
            retained: m,
        });
    }
    out.into_iter().map(|p| p.expect("every fraction evaluated")).collect()
}

/// Post-selection curve over `fractions`, which must be strictly decreasing.
///
/// Each point's error comes from a jackknife over chains in which the window
/// centre and the retained set are recomputed for every replicate.
pub fn post_selection_curve<T: Real>(set: &SampleSet<T>, fractions: &[f64]) -> Result<PostSelectionCurve> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    for &f in fractions {
        check_fraction(f)?;
    }
    if fractions.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("fractions must be strictly decreasing".into()));
    }
    let records = set.records();
    let full = curve_points(records, fractions);
    let mut reps: Vec<Vec<f64>> = vec![Vec::new(); fractions.len()];
    replicates(records, |sub| {
        for (r, p) in reps.iter_mut().zip(curve_points(sub, fractions)) {
            r.push(p.var);
        }
        0.0
    });
    let points = full
        .into_iter()
        .zip(fractions)
        .zip(&reps)
        .map(|((p, &target), r)| CurvePoint {
            target,
            fraction: p.fraction,
            delta_e: p.delta_e,
            var_n0: p.var,
            stderr_var: jackknife_stderr(r),
            retained: p.retained,
        })
        .collect();
    Ok(PostSelectionCurve { temperature: set.params().temperature(), e_mean: mean_energy(records), points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelDescriptor, TrapSpec};
    use crate::sampler::SamplerParams;

    fn set_of(values: &[(u32, f64)]) -> SampleSet<f64> {
        let d = ModelDescriptor { trap: TrapSpec::harmonic1d(), atoms: 50, coupling: 0.0, cutoff: 10 };
        let recs = values
            .iter()
            .enumerate()
            .map(|(i, &(n0, energy))| SampleRecord { n0, energy, chain_id: (i % 4) as u32, step: i as u64 })
            .collect();
        SampleSet::from_records(d, SamplerParams::new(50, 1.0), recs)
    }

    #[test]
    fn full_fraction_is_identity() {
        let s = set_of(&[(1, 3.0), (2, 5.0), (3, 4.0), (9, 1.0)]);
        let p = post_select(&s, 1.0).unwrap();
        assert_eq!(p.records(), s.records());
        assert_eq!(p.window().unwrap().fraction, 1.0);
    }

    #[test]
    fn smallest_window_keeps_nearest_record() {
        let s = set_of(&[(1, 0.0), (2, 10.0), (3, 4.0), (4, 2.0)]); // mean 4
        let p = post_select(&s, 0.01).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.records()[0].n0, 3);
        assert_eq!(p.window().unwrap().delta_e, 0.0);
        assert!(post_select(&s, 0.0).is_err());
        assert!(post_select(&s, 1.5).is_err());
    }

    #[test]
    fn ties_at_the_edge_are_kept() {
        let s = set_of(&[(1, 1.0), (2, 3.0), (3, 1.0), (4, 3.0)]); // mean 2, all at distance 1
        assert_eq!(post_select(&s, 0.25).unwrap().len(), 4);
    }

    #[test]
    fn curve_matches_direct_post_selection() {
        let values: Vec<(u32, f64)> = (0..200).map(|i| ((i * 37 % 23) as u32, ((i * 91) % 101) as f64 * 0.37)).collect();
        let s = set_of(&values);
        let c = post_selection_curve(&s, &DEFAULT_FRACTIONS).unwrap();
        for p in &c.points {
            let direct = post_select(&s, p.target).unwrap();
            let n0: Vec<f64> = direct.records().iter().map(|r| f64::from(r.n0)).collect();
            let (_, var) = super::super::mean_and_variance(&n0).unwrap();
            assert!((p.var_n0 - var).abs() < 1e-9);
            assert_eq!(p.retained, direct.len());
            assert!(p.stderr_var.is_finite());
        }
        assert!(post_selection_curve(&s, &[0.5, 0.8]).is_err());
    }
}
