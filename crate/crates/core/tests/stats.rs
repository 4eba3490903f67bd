use fss::model::ModelDescriptor;
use fss::oracles::{canonical_moments, canonical_peak, Oscillator};
use fss::sampler::{run_chains, SamplerParams};
use fss::stats::{micro_variance, moments, post_select, post_selection_curve, scan_peak, MicroFit, DEFAULT_FRACTIONS};
use fss::{Model, SampleRecord, SampleSet, TrapSpec};
use proptest::prelude::*;

fn set_of(values: &[(u32, f64, u32)]) -> SampleSet {
    let d = ModelDescriptor { trap: TrapSpec::harmonic1d(), atoms: 100_000, coupling: 0.0, cutoff: 10 };
    let recs = values
        .iter()
        .enumerate()
        .map(|(i, &(n0, energy, chain_id))| SampleRecord { n0, energy, chain_id, step: i as u64 })
        .collect();
    SampleSet::from_records(d, SamplerParams::new(100, 1.0), recs)
}

/// `(mean, variance)` of integers in exact arithmetic.
fn exact_moments(xs: &[u32]) -> (f64, f64) {
    let w = xs.len() as i128;
    let s1: i128 = xs.iter().map(|&x| i128::from(x)).sum();
    let s2: i128 = xs.iter().map(|&x| i128::from(x) * i128::from(x)).sum();
    (s1 as f64 / w as f64, (w * s2 - s1 * s1) as f64 / (w * w) as f64)
}

fn records() -> impl Strategy<Value = Vec<(u32, f64, u32)>> {
    (1u32..100_000, 1usize..400).prop_flat_map(|(top, len)| {
        prop::collection::vec((0..=top, -50.0f64..50.0, 0u32..6), len)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimator_identity(values in records()) {
        let set = set_of(&values);
        let m = moments(&set).unwrap();
        let xs: Vec<u32> = values.iter().map(|v| v.0).collect();
        let (mean, var) = exact_moments(&xs);
        prop_assert!((m.mean_n0 - mean).abs() <= 1e-12 * mean.max(1.0));
        prop_assert!((m.var_n0 - var).abs() <= 1e-12 * var.max(1.0), "{} vs {var}", m.var_n0);
        prop_assert_eq!(m.w, values.len());

        let mut ids: Vec<u32> = values.iter().map(|v| v.2).collect();
        ids.sort_unstable();
        ids.dedup();
        if ids.len() >= 4 {
            let reps: Vec<f64> = ids
                .iter()
                .map(|&c| exact_moments(&values.iter().filter(|v| v.2 != c).map(|v| v.0).collect::<Vec<_>>()).1)
                .collect();
            let g = reps.len() as f64;
            let avg = reps.iter().sum::<f64>() / g;
            let se = ((g - 1.0) / g * reps.iter().map(|r| (r - avg).powi(2)).sum::<f64>()).sqrt();
            prop_assert!((m.stderr_var - se).abs() <= 1e-9 * se.max(1.0));
        } else {
            prop_assert!(m.stderr_var.is_nan());
        }
    }

    #[test]
    fn post_selection_nests(values in records(), f1 in 0.01f64..=1.0, shrink in 0.0f64..1.0) {
        let f2 = (f1 * shrink).max(1e-3);
        let set = set_of(&values);
        let (a, b) = (post_select(&set, f1).unwrap(), post_select(&set, f2).unwrap());
        // records carry unique step indices, so subset by step is subset as multisets
        let steps: std::collections::HashSet<u64> = a.records().iter().map(|r| r.step).collect();
        prop_assert!(b.records().iter().all(|r| steps.contains(&r.step)));
        prop_assert!(b.len() <= a.len());
        prop_assert!(a.len() as f64 >= (f1 * values.len() as f64).ceil() - 1e-9);
    }

    #[test]
    fn window_is_symmetric(values in records(), f in 0.01f64..=1.0) {
        let set = set_of(&values);
        let kept = post_select(&set, f).unwrap();
        let e_mean = kept.window().unwrap().e_mean;
        let mut parent: Vec<f64> = values.iter().map(|v| v.1).collect();
        parent.sort_by(f64::total_cmp);
        let gap = parent.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
        let hi = kept.records().iter().map(|r| r.energy).fold(f64::NEG_INFINITY, f64::max);
        let lo = kept.records().iter().map(|r| r.energy).fold(f64::INFINITY, f64::min);
        // Only meaningful while the window has parent records beyond it on both sides.
        if lo > parent[0] && hi < parent[parent.len() - 1] {
            prop_assert!(((hi - e_mean) - (e_mean - lo)).abs() <= gap + 1e-9);
        }
        let half = kept.window().unwrap().delta_e / 2.0;
        prop_assert!(kept.records().iter().all(|r| (r.energy - e_mean).abs() <= half + 1e-12));
    }

    #[test]
    fn curve_shape(values in records()) {
        prop_assume!(values.len() >= 20);
        let set = set_of(&values);
        let c = post_selection_curve(&set, &DEFAULT_FRACTIONS).unwrap();
        prop_assert!(c.points.windows(2).all(|w| w[1].fraction <= w[0].fraction));
        prop_assert!(c.points.windows(2).all(|w| w[1].delta_e <= w[0].delta_e));
        let full = moments(&set).unwrap();
        prop_assert!((c.points[0].var_n0 - full.var_n0).abs() <= 1e-9 * full.var_n0.max(1.0));
        prop_assert_eq!(c.points[0].retained, values.len());
    }
}

/// Ideal 3D gases at their canonical peak: the extrapolated microcanonical
/// variance may not exceed the canonical one by more than two standard errors.
#[test]
fn micro_does_not_exceed_canonical_in_3d() {
    for (lambda, atoms) in [(1.0, 60), (3.0, 60), (1.0, 120)] {
        let trap = TrapSpec::harmonic3d(lambda);
        let osc = Oscillator::for_trap(&trap).unwrap();
        let peak = canonical_peak(&osc, atoms).unwrap();
        let model = Model::build(trap, fss::model::default_cutoff(peak.t_max), atoms, 0.0).unwrap();
        let mut p = SamplerParams::at_temperature(atoms, peak.t_max);
        p.samples_target = 6000;
        p.chain_count = 8;
        p.seed = 3;
        let set = run_chains(&model, &p).unwrap();
        let cano = moments(&set).unwrap();
        let micro = micro_variance(&set, &MicroFit::default()).unwrap();
        let bound = cano.var_n0 + 2.0 * micro.stderr.hypot(cano.stderr_var);
        assert!(micro.value <= bound, "λ={lambda} N={atoms}: micro {} vs cano {} (bound {bound})", micro.value, cano.var_n0);
        // and the canonical estimate itself is right
        assert!((cano.var_n0 - peak.var_max).abs() < 4.0 * cano.stderr_var, "{cano:?} vs {}", peak.var_max);
    }
}

/// Near the peak the variance shrinks along the post-selection curve.
#[test]
fn variance_shrinks_with_window() {
    let model = Model::build(TrapSpec::harmonic1d(), 212, 100, 0.0).unwrap();
    let mut p = SamplerParams::at_temperature(100, 17.6);
    p.samples_target = 20_000;
    p.chain_count = 8;
    p.seed = 8;
    let set = run_chains(&model, &p).unwrap();
    let c = post_selection_curve(&set, &DEFAULT_FRACTIONS).unwrap();
    for w in c.points.windows(2) {
        let se = w[0].stderr_var.hypot(w[1].stderr_var);
        assert!(w[1].var_n0 <= w[0].var_n0 + 2.0 * se, "{:?}", c.points);
    }
    let last = c.points.last().unwrap();
    assert!(last.var_n0 < c.points[0].var_n0 - 2.0 * last.stderr_var.hypot(c.points[0].stderr_var), "{:?}", c.points);
}

#[test]
fn sampled_peak_matches_exact_location() {
    let atoms = 100;
    let osc = Oscillator::new(vec![1.0]).unwrap();
    let exact = canonical_peak(&osc, atoms).unwrap();
    let grid: Vec<f64> = (0..7).map(|i| 9.0 + 3.0 * i as f64).collect();
    let model = Model::build(TrapSpec::harmonic1d(), fss::model::default_cutoff(*grid.last().unwrap()), atoms, 0.0).unwrap();
    // one tilt for the whole grid, chosen for its hottest point
    let mut p = SamplerParams::new(atoms, 1.0 / grid.last().unwrap());
    p.samples_target = 4000;
    p.chain_count = 8;
    p.seed = 99;
    let scan = scan_peak(&model, &grid, &p).unwrap();
    assert!((scan.t_max - exact.t_max).abs() < 3.0, "{} vs {}", scan.t_max, exact.t_max);
    for (t, m) in &scan.grid {
        let v = canonical_moments(&osc, atoms, 1.0 / t).unwrap().1;
        assert!((m.var_n0 - v).abs() < 4.0 * m.stderr_var, "T={t}: {} vs {v}", m.var_n0);
    }
    assert!(fss::stats::scan_peak(&model, &grid[..4], &p).is_err());
}
