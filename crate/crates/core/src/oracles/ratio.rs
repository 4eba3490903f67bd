//! Exact ensemble ratios `S = max_E Δ²N0_micro / max_T Δ²N0_cano` and the
//! fixed-temperature `S̃`.

use super::canonical::{canonical_mean_energy, canonical_moments};
use super::micro::{micro_recurrence, MicroMoments, DEFAULT_MAX_ENTRIES};
use super::newton::{moments_from_rows, newton_exact, newton_scaled};
use super::onebody::{OneBody, TrapOneBody};
use super::partitions::harmonic1d_micro_moments;
use crate::error::{Error, Result};
use crate::model::{LevelSpectrum, TrapSpec};

/// Above this many atoms the 3D counts switch from exact integers to the
/// scaled floating-point recurrence.
const EXACT_3D_ATOMS: usize = 150;
const MAX_ENTRIES: u128 = 400_000_000;

/// Maximum of the canonical variance over temperature.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CanonicalPeak {
    pub t_max: f64,
    pub var_max: f64,
    pub mean_n0: f64,
}

/// Scans a geometric temperature grid for the variance maximum, then narrows
/// the bracketing interval by golden-section search.
pub fn canonical_peak(one: &impl OneBody<f64>, atoms: usize) -> Result<CanonicalPeak> {
    let var = |t: f64| canonical_moments(one, atoms, 1.0 / t).map(|m| m.1);
    let (t0, ratio, t_limit) = (0.05, 1.08, 1e7);
    let mut grid = vec![(t0, var(t0)?)];
    let mut best = 0;
    while grid.len() - 1 < best + 10 {
        let t = grid.last().expect("non-empty").0 * ratio;
        if t > t_limit {
            return Err(Error::PeakAtBoundary { axis: "temperature", at: grid[best].0 });
        }
        grid.push((t, var(t)?));
        if grid[grid.len() - 1].1 > grid[best].1 {
            best = grid.len() - 1;
        }
    }
    if best == 0 {
        return Err(Error::PeakAtBoundary { axis: "temperature", at: t0 });
    }
    let (mut a, mut b) = (grid[best - 1].0, grid[best + 1].0);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut fc, mut fd) = (var(c)?, var(d)?);
    while b - a > 1e-10 * b {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = var(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = var(d)?;
        }
    }
    let t_max = 0.5 * (a + b);
    let (mean_n0, var_max) = canonical_moments(one, atoms, 1.0 / t_max)?;
    Ok(CanonicalPeak { t_max, var_max, mean_n0 })
}

/// Exact microcanonical moments at all energies `0..=e_max`.
///
/// `beta0` sets the tilt of the floating-point recurrence used for large 3D
/// systems and is ignored otherwise.
pub fn micro_moments(trap: &TrapSpec, atoms: usize, e_max: u64, beta0: f64) -> Result<MicroMoments> {
    trap.validate()?;
    match *trap {
        TrapSpec::Harmonic1d { .. } => harmonic1d_micro_moments(atoms, e_max, MAX_ENTRIES),
        TrapSpec::Harmonic3d { .. } => {
            let l = trap.require_integer_grid().and_then(|_| {
                trap.integer_aspect().ok_or_else(|| Error::NonIntegerGrid(trap.to_string()))
            })?;
            let strides = [l, l, 1];
            if atoms <= EXACT_3D_ATOMS {
                newton_exact(&strides, atoms, e_max, MAX_ENTRIES).map(|rows| moments_from_rows(&rows))
            } else {
                newton_scaled(&strides, atoms, e_max, beta0, MAX_ENTRIES).map(|rows| rows.moments())
            }
        }
        TrapSpec::Ring1d { .. } => {
            let spectrum = LevelSpectrum::for_trap(trap, e_max)?;
            let table = micro_recurrence(&spectrum, atoms, e_max, DEFAULT_MAX_ENTRIES)?;
            MicroMoments::from_table(&table, atoms)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExactRatio {
    pub atoms: usize,
    pub t_max: f64,
    pub var_cano_max: f64,
    /// Canonical mean energy at `t_max`, above the ground state.
    pub e_mean: f64,
    /// Integer energy closest to `e_mean` (among reachable ones).
    pub e_star: u64,
    pub var_micro_at_e_star: f64,
    pub e_peak: u64,
    pub var_micro_max: f64,
    pub s: f64,
    pub s_tilde: f64,
}

/// `S` and `S̃` for the ideal gas in a trap on an integer energy grid.
pub fn exact_s(trap: &TrapSpec, atoms: usize) -> Result<ExactRatio> {
    trap.require_integer_grid()?;
    if atoms == 0 {
        return Err(Error::InvalidParameter("at least one atom is required".into()));
    }
    let mut cutoff = 256u64;
    let (one, peak) = loop {
        let one = TrapOneBody::<f64>::for_trap(trap, cutoff)?;
        let peak = canonical_peak(&one, atoms)?;
        if matches!(one, TrapOneBody::Oscillator(_)) || cutoff as f64 >= 40.0 * peak.t_max {
            break (one, peak);
        }
        cutoff = (80.0 * peak.t_max).ceil() as u64;
    };
    let beta0 = 1.0 / peak.t_max;
    let e_mean = canonical_mean_energy(&one, atoms, beta0)?;

    let mut e_max = (1.25 * e_mean).ceil() as u64 + 20;
    let mut attempts = 0;
    let (moments, e_peak, var_micro_max) = loop {
        let m = micro_moments(trap, atoms, e_max, beta0)?;
        let (e, v) = m.max_variance();
        if (e as f64) < 0.9 * e_max as f64 {
            break (m, e, v);
        }
        attempts += 1;
        if attempts == 4 {
            return Err(Error::PeakAtBoundary { axis: "energy", at: e as f64 });
        }
        e_max = e_max * 3 / 2;
    };

    let target = e_mean.round() as i64;
    let e_star = (0..=moments.e_max())
        .filter(|&e| moments.var[e as usize].is_finite())
        .min_by_key(|&e| (e as i64 - target).abs())
        .ok_or(Error::UnreachableEnergy { energy: target as u64 })?;
    let var_micro_at_e_star = moments.var[e_star as usize];
    Ok(ExactRatio {
        atoms,
        t_max: peak.t_max,
        var_cano_max: peak.var_max,
        e_mean,
        e_star,
        var_micro_at_e_star,
        e_peak,
        var_micro_max,
        s: var_micro_max / peak.var_max,
        s_tilde: var_micro_at_e_star / peak.var_max,
    })
}
