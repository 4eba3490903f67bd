//! Acceptance criteria, one PASS/FAIL line each.
//!
//! `cargo test -p fss-core --test acceptance` runs all of them;
//! `... -- 3 10` runs a subset. The process exits non-zero when any fails.

mod common;

use std::cell::OnceCell;
use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;

use fss::model::{build_basis, default_cutoff, LevelSpectrum};
use fss::oracles::*;
use fss::sampler::{run_chains, Chain, SamplerParams};
use fss::stats::{derive_seed, micro_variance, moments, s_tilde_from_set, sample_grid, scan_peak_from_sets, MicroFit};
use fss::{FockState, Model, SampleSet, Spectrum, TrapSpec};

const ATOMS: usize = 100;
const CHAINS: usize = 16;

struct Outcome {
    pass: bool,
    lines: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { pass: true, lines: Vec::new() }
    }

    fn require(&mut self, ok: bool, line: String) {
        self.pass &= ok;
        self.lines.push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

/// Canonical benchmark data shared by the canonical and microcanonical checks.
struct Bench {
    peak: CanonicalPeak,
    /// `(T, set, exact variance)`; the peak temperature is one of them.
    grid: Vec<(f64, SampleSet, f64)>,
}

const FACTORS: [f64; 10] = [0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.25, 1.4, 1.6];
const PEAK_INDEX: usize = 5;
/// Many short chains: 3σ tests on jackknife errors need enough replicates
/// for the error bar itself to be accurate.
const BENCH_CHAINS: usize = 64;

fn bench(trap: TrapSpec, one: &impl OneBody<f64>, seed: u64) -> Bench {
    let peak = canonical_peak(one, ATOMS).unwrap();
    let temps: Vec<f64> = FACTORS.iter().map(|f| f * peak.t_max).collect();
    let model = Model::build(trap, default_cutoff(*temps.last().unwrap()), ATOMS, 0.0).unwrap();
    let grid = temps
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let mut p = SamplerParams::at_temperature(ATOMS, t);
            p.chain_count = BENCH_CHAINS;
            p.samples_target = if k == PEAK_INDEX { 40_000 } else { 1_000 };
            p.seed = derive_seed(seed, k as u64);
            let set = run_chains(&model, &p).unwrap();
            (t, set, canonical_moments(one, ATOMS, 1.0 / t).unwrap().1)
        })
        .collect();
    Bench { peak, grid }
}

#[derive(Default)]
struct Shared {
    harmonic: OnceCell<Bench>,
    ring: OnceCell<Bench>,
}

/// Untruncated for practical purposes: `e^{-n²/T}` at the cutoff is far below
/// double precision for every temperature used here.
fn ring_spectrum() -> Spectrum {
    Spectrum::for_trap(&TrapSpec::ring(), 40_000).unwrap()
}

impl Shared {
    fn harmonic(&self) -> &Bench {
        self.harmonic.get_or_init(|| bench(TrapSpec::harmonic1d(), &Oscillator::new(vec![1.0]).unwrap(), 31))
    }

    fn ring(&self) -> &Bench {
        self.ring.get_or_init(|| bench(TrapSpec::ring(), &ring_spectrum(), 32))
    }
}

fn boltzmann(model: &Model, states: &[Vec<u32>], beta: f64) -> Vec<f64> {
    let w: Vec<f64> = states
        .iter()
        .map(|s| common::weight(model, &FockState::from_counts(model.basis(), s.clone(), 0.0).unwrap(), beta))
        .collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

fn stationarity(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let beta = 1.0;
    let model = Model::build(TrapSpec::harmonic1d(), 3, 3, 0.0).unwrap();
    assert_eq!(model.basis().len(), 4);
    let states = common::fock_states(4, 3);
    let exact = boltzmann(&model, &states, beta);
    let index: HashMap<&[u32], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    for gamma in [0.0, 0.2] {
        let mut p = SamplerParams::new(3, beta);
        p.gamma = gamma;
        p.seed = 1;
        let mut chain = Chain::new(&model, &p, 0).unwrap();
        chain.advance(p.burn_in_steps);
        let mut hist = vec![0u64; states.len()];
        let records = 1_000_000;
        for _ in 0..records {
            chain.advance(3);
            hist[index[chain.state().counts()]] += 1;
        }
        let tv = 0.5 * hist.iter().zip(&exact).map(|(&h, &e)| (h as f64 / records as f64 - e).abs()).sum::<f64>();
        out.require(tv < 0.01, format!("γ={gamma}: TV distance {tv:.5} over {records} records, {} states", states.len()));
    }
    let took = start.elapsed();
    out.require(took < Duration::from_secs(60), format!("runtime {took:.1?}"));
    out
}

fn detailed_balance(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let beta = 1.0;
    let model = Model::build(TrapSpec::harmonic1d(), 3, 3, 0.0).unwrap();
    let states = common::fock_states(4, 3);
    let pi = boltzmann(&model, &states, beta);
    for gamma in [0.0, 0.2] {
        let p = common::transition_matrix(&model, &states, gamma, beta);
        let (mut worst, mut pairs) = (0.0f64, 0);
        for a in 0..states.len() {
            for b in (0..states.len()).filter(|&b| b != a && p[a][b] > 0.0) {
                pairs += 1;
                let (l, r) = (pi[a] * p[a][b], pi[b] * p[b][a]);
                worst = worst.max((l - r).abs() / l.max(r));
            }
        }
        out.require(worst <= 1e-12 && pairs > 0, format!("γ={gamma}: {pairs} connected pairs, worst relative violation {worst:.1e}"));
    }
    out
}

fn canonical_benchmark(shared: &Shared) -> Outcome {
    let mut out = Outcome::new();
    for (name, b) in [("harmonic1d", shared.harmonic()), ("ring1d", shared.ring())] {
        let mut worst = 0.0f64;
        for (_, set, exact) in &b.grid {
            let m = moments(set).unwrap();
            worst = worst.max((m.var_n0 - exact).abs() / m.stderr_var);
        }
        out.require(worst <= 3.0, format!("{name}: 10 temperatures {:.2}..{:.2}, largest deviation {worst:.2} σ", b.grid[0].0, b.grid[9].0));
        let (t, set, exact) = &b.grid[PEAK_INDEX];
        let m = moments(set).unwrap();
        let rel = (m.var_n0 - exact) / exact;
        out.require(
            rel.abs() <= 0.02,
            format!("{name}: peak T={t:.3}, Δ²N0 {:.2} ± {:.2} vs exact {exact:.2} ({:+.2}%)", m.var_n0, m.stderr_var, 100.0 * rel),
        );
    }
    out
}

/// Linear interpolation of the exact microcanonical variance between integer energies.
fn micro_at(mm: &MicroMoments, e: f64) -> f64 {
    let lo = e.floor() as usize;
    let w = e - lo as f64;
    (1.0 - w) * mm.var[lo] + w * mm.var[lo + 1]
}

fn micro_benchmark(shared: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let b = shared.harmonic();
    let estimates: Vec<_> = b.grid.iter().map(|(t, s, _)| (*t, micro_variance(s, &MicroFit::default()).unwrap())).collect();
    let e_top = estimates.iter().map(|(_, m)| m.curve.e_mean).fold(0.0, f64::max);
    let mm = micro_moments(&TrapSpec::harmonic1d(), ATOMS, e_top.ceil() as u64 + 2, 0.0).unwrap();
    let mut worst = (0.0f64, 0.0);
    for (k, (t, m)) in estimates.iter().enumerate() {
        let exact = micro_at(&mm, m.curve.e_mean);
        if k == PEAK_INDEX {
            let rel = (m.value - exact) / exact;
            out.require(
                rel.abs() <= 0.05,
                format!("peak T={t:.3} (E={:.1}): {:.2} ± {:.2} vs exact {exact:.2} ({:+.2}%)", m.curve.e_mean, m.value, m.stderr, 100.0 * rel),
            );
        } else {
            let z = (m.value - exact).abs() / m.stderr;
            if z > worst.0 {
                worst = (z, *t);
            }
        }
    }
    out.require(worst.0 <= 3.0, format!("other 9 temperatures: largest deviation {:.2} σ (T={:.2})", worst.0, worst.1));
    out
}

fn combinatorics(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    for (trap, atoms, e_max) in [(TrapSpec::harmonic1d(), 8, 12), (TrapSpec::harmonic3d(1.0), 5, 8)] {
        let basis = build_basis::<f64>(trap, e_max).unwrap();
        let brute = common::excited_counts(basis.levels().unwrap(), atoms, e_max);
        let s = LevelSpectrum::for_trap(&trap, e_max).unwrap();
        let table = micro_recurrence::<BigUint>(&s, atoms, e_max, DEFAULT_MAX_ENTRIES).unwrap();
        let mismatches = (0..=atoms)
            .flat_map(|n| (0..=e_max).map(move |e| (n, e)))
            .filter(|&(n, e)| *table.get(n, e) != BigUint::from(brute.get(&(n, e)).copied().unwrap_or(0)))
            .count();
        out.require(mismatches == 0, format!("{trap}: N≤{atoms}, E≤{e_max}, {mismatches} mismatches against enumeration"));
    }
    let s = LevelSpectrum::for_trap(&TrapSpec::harmonic1d(), 51).unwrap();
    let table = micro_recurrence::<BigUint>(&s, 50, 51, DEFAULT_MAX_ENTRIES).unwrap();
    let bad: Vec<usize> = (1..=50).filter(|&n| *table.get(n, n as u64 + 1) != BigUint::from(1u8)).collect();
    out.require(bad.is_empty(), format!("Γ_ex(n, n+1) = 1 for 1 ≤ n ≤ 50 (violations: {bad:?})"));
    out
}

fn closed_form(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let osc = Oscillator::new(vec![1.0]).unwrap();
    let n = 20;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let t = 0.5 * 1.5f64.powi(k);
        let d = canonical_p_n0(&osc, n, 1.0 / t).unwrap();
        for n0 in 0..=n {
            worst = worst.max((harmonic1d_closed_form(n0, n, 1.0 / t).unwrap() - d.probabilities[n0]).abs());
        }
    }
    out.require(worst < 1e-10, format!("N=20, T=0.5..19.2: max |Δp| = {worst:.1e}"));
    out
}

fn one_dimensional_trend(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let start = Instant::now();
    let s: Vec<f64> = [10, 100, 1000].iter().map(|&n| exact_s(&TrapSpec::harmonic1d(), n).unwrap().s).collect();
    out.require(s[0] < s[1] && s[1] < s[2], format!("S(10, 100, 1000) = {:.4}, {:.4}, {:.4}", s[0], s[1], s[2]));
    out.require(s[2] > 0.9, format!("S(1000) = {:.4} > 0.9", s[2]));
    let took = start.elapsed();
    out.require(took < Duration::from_secs(600), format!("runtime {took:.1?}"));
    out
}

fn three_dimensional(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let trap = TrapSpec::harmonic3d(1.0);
    let mut at_1000 = None;
    for n in [500, 1000] {
        let r = exact_s(&trap, n).unwrap();
        let rel = (r.s - r.s_tilde).abs() / r.s;
        out.require(rel <= 0.02, format!("N={n}: S={:.4}, S̃={:.4}, differ by {:.2}%", r.s, r.s_tilde, 100.0 * rel));
        at_1000 = Some(r);
    }
    let exact = at_1000.unwrap();
    let model = Model::build(trap, default_cutoff(exact.t_max), 1000, 0.0).unwrap();
    let mut p = SamplerParams::at_temperature(1000, exact.t_max);
    p.chain_count = CHAINS;
    p.samples_target = 12_000;
    p.seed = 81;
    let set = run_chains(&model, &p).unwrap();
    let s = s_tilde_from_set(&set, &MicroFit::default()).unwrap();
    let z = (s.value - exact.s_tilde) / s.stderr;
    out.require(
        z.abs() <= 3.0,
        format!("sampled S̃ at N=1000, T={:.3}: {:.4} ± {:.4} vs exact {:.4} ({z:+.2} σ)", exact.t_max, s.value, s.stderr, exact.s_tilde),
    );
    out
}

/// `ζ(3)` from the central binomial series, independent of the library's
/// Euler–Maclaurin evaluation.
fn zeta3() -> f64 {
    let mut sum = 0.0;
    let mut central = 1.0; // C(2k, k)
    for k in 1..40 {
        let kf = k as f64;
        central *= (2.0 * kf - 1.0) * (2.0 * kf) / (kf * kf);
        let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
        sum += sign / (kf * kf * kf * central);
    }
    2.5 * sum
}

fn asymptotic_constants(_: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let pi2 = std::f64::consts::PI.powi(2);
    let (z2, z3, z4) = (pi2 / 6.0, zeta3(), pi2 * pi2 / 90.0);
    let want = [z2 / z3, z2 / z3 - 0.75 * z3 / z4, 1.0 - 3.0 * z3 * z3 / (4.0 * z4 * z2)];
    let a = asymptotics();
    let got = [a.canonical, a.microcanonical, a.s_3d];
    let worst = got.iter().zip(&want).map(|(g, w)| (g - w).abs()).fold(0.0, f64::max);
    out.require(worst <= 1e-12, format!("canonical {:.6}, microcanonical {:.6}, S_3D {:.6}; max deviation {worst:.1e}", got[0], got[1], got[2]));
    out.require((a.s_3d * 100.0).round() == 39.0, format!("S_3D = {:.4} rounds to 0.39", a.s_3d));
    out
}

fn sampled(model: &Model, t: f64, samples: usize, seed: u64) -> SampleSet {
    let mut p = SamplerParams::at_temperature(model.atoms(), t);
    p.chain_count = CHAINS;
    p.samples_target = samples;
    p.seed = seed;
    run_chains(model, &p).unwrap()
}

/// Coarse geometric scan for the rough peak location, then a finer one
/// spanning the neighbours of the coarse maximum.
fn refined_peak(trap: TrapSpec, g: f64, seed: u64) -> fss::Result<fss::stats::PeakScan> {
    let coarse: Vec<f64> = (0..14).map(|i| 10.0 * 1.3f64.powi(i)).collect();
    let model = Model::build(trap, default_cutoff(*coarse.last().unwrap()), ATOMS, g)?;
    let mut p = SamplerParams::at_temperature(ATOMS, *coarse.last().unwrap());
    p.chain_count = 8;
    p.samples_target = 1_000;
    p.seed = seed;
    let rough = sample_grid(&model, &coarse, &p)?;
    let vars = rough.iter().map(|(_, s)| moments(s).map(|m| m.var_n0)).collect::<fss::Result<Vec<_>>>()?;
    let i = (0..vars.len()).max_by(|&a, &b| vars[a].total_cmp(&vars[b])).unwrap().clamp(1, coarse.len() - 2);
    let (lo, hi) = (coarse[i - 1], coarse[i + 1]);
    let fine: Vec<f64> = (0..9).map(|k| lo * (hi / lo).powf(k as f64 / 8.0)).collect();
    let model = Model::build(trap, default_cutoff(hi), ATOMS, g)?;
    let mut p = SamplerParams::at_temperature(ATOMS, hi);
    p.chain_count = CHAINS;
    p.samples_target = 8_000;
    p.seed = seed + 1;
    scan_peak_from_sets(&sample_grid(&model, &fine, &p)?)
}

fn interaction_signs(shared: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let couplings = [0.0, 0.5, 1.0];

    // ring at T = 5
    let low: Vec<_> = couplings
        .iter()
        .map(|&g| {
            let model = Model::build(TrapSpec::ring(), default_cutoff(5.0), ATOMS, g).unwrap();
            moments(&sampled(&model, 5.0, if g == 0.0 { 10_000 } else { 100_000 }, 101)).unwrap()
        })
        .collect();
    for i in 0..2 {
        let (a, b) = (&low[i], &low[i + 1]);
        let z = (a.var_n0 - b.var_n0) / a.stderr_var.hypot(b.stderr_var);
        out.require(
            z > 3.0,
            format!(
                "ring T=5: Δ²N0(g={}) = {:.3e} ± {:.1e} > Δ²N0(g={}) = {:.3e} ± {:.1e} ({z:.1} σ)",
                couplings[i], a.var_n0, a.stderr_var, couplings[i + 1], b.var_n0, b.stderr_var
            ),
        );
    }

    // ring peak; the ideal gas from the exact oracle
    let mut peaks = vec![(shared.ring().peak.t_max, shared.ring().peak.var_max, 0.0)];
    for (k, &g) in couplings[1..].iter().enumerate() {
        // The scan locates T_max; a long run there measures the peak height,
        // which the three-point parabola only resolves to a few percent.
        match refined_peak(TrapSpec::ring(), g, 200 + 10 * k as u64) {
            Ok(s) => {
                let model = Model::build(TrapSpec::ring(), default_cutoff(s.t_max), ATOMS, g).unwrap();
                let mut p = SamplerParams::at_temperature(ATOMS, s.t_max);
                p.chain_count = BENCH_CHAINS;
                p.samples_target = 100_000;
                p.seed = 205 + 10 * k as u64;
                let m = moments(&run_chains(&model, &p).unwrap()).unwrap();
                peaks.push((s.t_max, m.var_n0, m.stderr_var));
            }
            Err(e) => {
                out.require(false, format!("ring peak at g={g}: {e}"));
                peaks.push((f64::NAN, f64::NAN, f64::NAN));
            }
        }
    }
    for i in 0..2 {
        let (a, b) = (peaks[i], peaks[i + 1]);
        let z = (b.1 - a.1) / a.2.hypot(b.2);
        out.require(
            z > 3.0,
            format!(
                "ring peak: Δ²N0(g={}) = {:.1} ± {:.1} at T={:.1} < Δ²N0(g={}) = {:.1} ± {:.1} at T={:.1} ({z:.1} σ)",
                couplings[i], a.1, a.2, a.0, couplings[i + 1], b.1, b.2, b.0
            ),
        );
    }

    // harmonic1d peak shift
    let t0 = shared.harmonic().peak.t_max;
    let grid: Vec<f64> = (0..8).map(|i| t0 * (0.55 + 0.1 * i as f64)).collect();
    let g = 0.1;
    let model = Model::build(TrapSpec::harmonic1d(), default_cutoff(*grid.last().unwrap()), ATOMS, g).unwrap();
    let mut p = SamplerParams::at_temperature(ATOMS, *grid.last().unwrap());
    p.chain_count = CHAINS;
    p.samples_target = 8_000;
    p.seed = 301;
    match scan_peak_from_sets(&sample_grid(&model, &grid, &p).unwrap()) {
        Ok(scan) => {
            let z = (t0 - scan.t_max) / scan.t_max_stderr;
            out.require(z > 3.0, format!("harmonic1d: T_max(g={g}) = {:.2} ± {:.2} < T_max(0) = {t0:.2} ({z:.1} σ)", scan.t_max, scan.t_max_stderr));
        }
        Err(e) => out.require(false, format!("harmonic1d peak at g={g}: {e}")),
    }

    // harmonic3d microcanonical suppression at the ideal-gas canonical peak
    for lambda in [1.0, 7.0] {
        let trap = TrapSpec::harmonic3d(lambda);
        let t = canonical_peak(&Oscillator::for_trap(&trap).unwrap(), ATOMS).unwrap().t_max;
        for g in [0.0, 0.05] {
            let model = Model::build(trap, default_cutoff(t), ATOMS, g).unwrap();
            let set = sampled(&model, t, 6_000, 401);
            let (c, m) = (moments(&set).unwrap(), micro_variance(&set, &MicroFit::default()).unwrap());
            let z = (c.var_n0 - m.value) / c.stderr_var.hypot(m.stderr);
            out.require(
                z > 3.0,
                format!(
                    "harmonic3d λ={lambda} g={g} T={t:.3}: micro {:.1} ± {:.1} < canonical {:.1} ± {:.1} ({z:.1} σ)",
                    m.value, m.stderr, c.var_n0, c.stderr_var
                ),
            );
        }
    }
    out
}

fn cutoff_independence(shared: &Shared) -> Outcome {
    let mut out = Outcome::new();
    let t = shared.harmonic().peak.t_max;
    let c = default_cutoff(t);
    // Both runs share the seed, but the chains part ways after the first draw
    // that lands differently, so the two estimates are effectively independent.
    let runs: Vec<_> = [c, 2 * c]
        .iter()
        .map(|&cut| {
            let model = Model::build(TrapSpec::harmonic1d(), cut, ATOMS, 0.0).unwrap();
            moments(&sampled(&model, t, 20_000, 501)).unwrap()
        })
        .collect();
    let (a, b) = (&runs[0], &runs[1]);
    let (dm, sm) = ((a.mean_n0 - b.mean_n0).abs(), a.stderr_mean.hypot(b.stderr_mean));
    let (dv, sv) = ((a.var_n0 - b.var_n0).abs(), a.stderr_var.hypot(b.stderr_var));
    out.require(dm < sm, format!("cutoff {c} → {}: |Δ mean N0| = {dm:.3e} < {sm:.3}", 2 * c));
    out.require(dv < sv, format!("cutoff {c} → {}: |Δ Δ²N0| = {dv:.3e} < {sv:.3}", 2 * c));
    out
}

type Criterion = (u32, &'static str, fn(&Shared) -> Outcome);

const CRITERIA: [Criterion; 11] = [
    (1, "sampler stationarity, N=3 over 4 modes", stationarity),
    (2, "exact detailed balance", detailed_balance),
    (3, "canonical benchmark, N=100", canonical_benchmark),
    (4, "microcanonical benchmark via post-selection, N=100", micro_benchmark),
    (5, "exact combinatorics", combinatorics),
    (6, "closed form vs recurrence", closed_form),
    (7, "1D ensemble equivalence trend", one_dimensional_trend),
    (8, "3D ensemble non-equivalence", three_dimensional),
    (9, "asymptotic constants", asymptotic_constants),
    (10, "interaction sign trends", interaction_signs),
    (11, "cutoff independence", cutoff_independence),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let shared = Shared::default();
    let mut failed = Vec::new();
    for (id, name, run) in CRITERIA.iter().filter(|c| wanted.is_empty() || wanted.contains(&c.0)) {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run(&shared))).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Outcome { pass: false, lines: vec![format!("FAIL panicked: {}", msg.unwrap_or_default())] }
        });
        let verdict = if outcome.pass { "PASS" } else { "FAIL" };
        println!("criterion {id:>2} {verdict}  {name}  [{:.1?}]", start.elapsed());
        for line in &outcome.lines {
            println!("    {line}");
        }
        if !outcome.pass {
            failed.push(*id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
