//! Quick built-in checks of the sampler and the exact oracles, each against an
//! independent route to the same number. The full suites live in the test
//! targets; these take seconds and run from the installed binary.

use std::collections::HashMap;

use fss::model::LevelSpectrum;
use fss::oracles::{
    asymptotics, canonical_moments, canonical_p_n0, canonical_peak, exact_s, harmonic1d_closed_form, harmonic1d_micro_moments,
    micro_recurrence, partitions_1d, Oscillator, DEFAULT_MAX_ENTRIES,
};
use fss::sampler::{run_chains, SamplerParams};
use fss::stats::{micro_variance, moments, MicroFit};
use fss::{Model, TrapSpec};

pub struct Check {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

type CheckFn = fn() -> Result<(bool, String), String>;

const CHECKS: [(&str, CheckFn); 8] = [
    ("closed form vs canonical recurrence", closed_form),
    ("state counts vs integer partitions", state_counts),
    ("one state at one quantum above threshold", threshold_counts),
    ("asymptotic constants vs zeta series", constants),
    ("sampler reproduces Boltzmann weights", stationarity),
    ("sampled canonical variance at the peak", canonical_peak_variance),
    ("post-selected microcanonical variance", microcanonical_variance),
    ("1D ensemble ratio grows with N", ratio_trend),
];

/// Runs every check, reporting each as it finishes.
pub fn run_checks(mut report: impl FnMut(&Check)) -> Vec<Check> {
    CHECKS
        .iter()
        .map(|(name, f)| {
            let (pass, detail) = f().unwrap_or_else(|e| (false, format!("error: {e}")));
            let c = Check { name, pass, detail };
            report(&c);
            c
        })
        .collect()
}

pub fn csv(checks: &[Check]) -> String {
    let mut s = String::from("check,result,detail\n");
    for c in checks {
        s.push_str(&format!("\"{}\",{},\"{}\"\n", c.name, if c.pass { "pass" } else { "fail" }, c.detail.replace('"', "\"\"")));
    }
    s
}

fn err(e: fss::Error) -> String {
    e.to_string()
}

fn closed_form() -> Result<(bool, String), String> {
    let atoms = 20;
    let osc = Oscillator::new(vec![1.0]).map_err(err)?;
    let mut worst = 0.0f64;
    for k in 0..10 {
        let beta = 1.0 / (0.5 * 1.5f64.powi(k));
        let p = canonical_p_n0(&osc, atoms, beta).map_err(err)?;
        for (n0, q) in p.probabilities.iter().enumerate() {
            worst = worst.max((harmonic1d_closed_form(n0, atoms, beta).map_err(err)? - q).abs());
        }
    }
    Ok((worst < 1e-10, format!("N=20, 10 temperatures, max |difference| {worst:.1e}")))
}

fn same<C: PartialEq>(a: &C, b: &C) -> bool {
    a == b
}

fn state_counts() -> Result<(bool, String), String> {
    let (atoms, e_max) = (10, 40);
    let spectrum = LevelSpectrum::for_trap(&TrapSpec::harmonic1d(), e_max).map_err(err)?;
    let table = micro_recurrence(&spectrum, atoms, e_max, DEFAULT_MAX_ENTRIES).map_err(err)?;
    let mut bad = 0;
    for n in 0..=atoms {
        for e in 0..=e_max {
            if !same(table.get(n, e), &partitions_1d(n, e)) {
                bad += 1;
            }
        }
    }
    Ok((bad == 0, format!("harmonic1d Γ_ex(n, E), n ≤ {atoms}, E ≤ {e_max}: {bad} mismatches")))
}

fn threshold_counts() -> Result<(bool, String), String> {
    let top = 50;
    let spectrum = LevelSpectrum::for_trap(&TrapSpec::harmonic1d(), top + 1).map_err(err)?;
    let table = micro_recurrence(&spectrum, top as usize, top + 1, DEFAULT_MAX_ENTRIES).map_err(err)?;
    let one = partitions_1d(1, 1);
    let bad = (1..=top as usize).filter(|&n| !same(table.get(n, n as u64 + 1), &one)).count();
    Ok((bad == 0, format!("Γ_ex(n, n+1) = 1 for 1 ≤ n ≤ {top}: {bad} exceptions")))
}

/// `ζ(3)` from its central binomial series, independent of the library's
/// Euler–Maclaurin sum.
fn zeta3() -> f64 {
    let (mut sum, mut central) = (0.0, 1.0);
    for k in 1..40 {
        let kf = k as f64;
        central *= (2.0 * kf - 1.0) * (2.0 * kf) / (kf * kf);
        sum += if k % 2 == 1 { 1.0 } else { -1.0 } / (kf * kf * kf * central);
    }
    2.5 * sum
}

fn constants() -> Result<(bool, String), String> {
    let pi2 = std::f64::consts::PI.powi(2);
    let (z2, z3, z4) = (pi2 / 6.0, zeta3(), pi2 * pi2 / 90.0);
    let a = asymptotics();
    let want = 1.0 - 3.0 * z3 * z3 / (4.0 * z4 * z2);
    let dev = (a.s_3d - want).abs().max((a.canonical - z2 / z3).abs());
    Ok((dev <= 1e-12, format!("S_3D = {:.6}, deviation {dev:.1e}", a.s_3d)))
}

/// Total-variation distance of the sampled `(N0, E)` distribution from exact
/// Boltzmann weights of every Fock state of three atoms in four modes.
fn stationarity() -> Result<(bool, String), String> {
    let (atoms, beta) = (3usize, 1.0);
    let model = Model::build(TrapSpec::harmonic1d(), 3, atoms, 0.0).map_err(err)?;
    let mut exact: HashMap<(u32, i64), f64> = HashMap::new();
    for a in 0..4u32 {
        for b in a..4 {
            for c in b..4 {
                let n0 = [a, b, c].iter().filter(|&&m| m == 0).count() as u32;
                let e = i64::from(a + b + c);
                *exact.entry((n0, e)).or_default() += (-beta * e as f64).exp();
            }
        }
    }
    let z: f64 = exact.values().sum();
    let mut p = SamplerParams::new(atoms, beta);
    p.chain_count = 4;
    p.samples_target = 50_000;
    p.seed = 17;
    let set = run_chains(&model, &p).map_err(err)?;
    let mut seen: HashMap<(u32, i64), f64> = HashMap::new();
    for r in set.records() {
        *seen.entry((r.n0, r.energy.round() as i64)).or_default() += 1.0 / set.len() as f64;
    }
    let tv = 0.5 * exact.iter().map(|(k, w)| (w / z - seen.get(k).copied().unwrap_or(0.0)).abs()).sum::<f64>()
        + 0.5 * seen.iter().filter(|(k, _)| !exact.contains_key(k)).map(|(_, q)| q).sum::<f64>();
    Ok((tv < 0.01, format!("{} records, total variation {tv:.4}", set.len())))
}

fn canonical_peak_variance() -> Result<(bool, String), String> {
    let atoms = 40;
    let osc = Oscillator::new(vec![1.0]).map_err(err)?;
    let peak = canonical_peak(&osc, atoms).map_err(err)?;
    let model = Model::build(TrapSpec::harmonic1d(), fss::model::default_cutoff(peak.t_max), atoms, 0.0).map_err(err)?;
    let mut p = SamplerParams::at_temperature(atoms, peak.t_max);
    p.chain_count = 16;
    p.samples_target = 4000;
    p.seed = 23;
    let m = moments(&run_chains(&model, &p).map_err(err)?).map_err(err)?;
    let (_, exact) = canonical_moments(&osc, atoms, 1.0 / peak.t_max).map_err(err)?;
    let z = (m.var_n0 - exact) / m.stderr_var;
    Ok((z.abs() <= 4.0, format!("N={atoms}, T={:.3}: {:.2} ± {:.2} vs exact {exact:.2} ({z:+.1} σ)", peak.t_max, m.var_n0, m.stderr_var)))
}

fn microcanonical_variance() -> Result<(bool, String), String> {
    let atoms = 40;
    let osc = Oscillator::new(vec![1.0]).map_err(err)?;
    let peak = canonical_peak(&osc, atoms).map_err(err)?;
    let model = Model::build(TrapSpec::harmonic1d(), fss::model::default_cutoff(peak.t_max), atoms, 0.0).map_err(err)?;
    let mut p = SamplerParams::at_temperature(atoms, peak.t_max);
    p.chain_count = 32;
    p.samples_target = 4000;
    p.seed = 29;
    let m = micro_variance(&run_chains(&model, &p).map_err(err)?, &MicroFit::default()).map_err(err)?;
    let e = m.curve.e_mean;
    let mm = harmonic1d_micro_moments(atoms, e.ceil() as u64 + 1, DEFAULT_MAX_ENTRIES).map_err(err)?;
    let lo = e.floor() as usize;
    let w = e - lo as f64;
    let exact = (1.0 - w) * mm.var[lo] + w * mm.var[lo + 1];
    let z = (m.value - exact) / m.stderr;
    Ok((z.abs() <= 4.0, format!("N={atoms}, E={e:.1}: {:.2} ± {:.2} vs exact {exact:.2} ({z:+.1} σ)", m.value, m.stderr)))
}

fn ratio_trend() -> Result<(bool, String), String> {
    let s: Vec<f64> = [10, 100].iter().map(|&n| exact_s(&TrapSpec::harmonic1d(), n).map(|r| r.s)).collect::<Result<_, _>>().map_err(err)?;
    Ok((s[0] < s[1], format!("S(10) = {:.4}, S(100) = {:.4}", s[0], s[1])))
}
