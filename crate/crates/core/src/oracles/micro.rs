//! Microcanonical state counts of the ideal gas on an integer energy grid.
//!
//! Levels are added one at a time: with `D` orbitals at energy `ε`,
//! `Γ'(n, E) = Σ_m Γ(n − m, E − mε) C(D + m − 1, m)`.
//! Starting from `δ_{n0} δ_{E0}` and sweeping the excited levels gives
//! `Γ_ex(n, E)`, the number of states with exactly `n` excited atoms.
//! Starting from `δ_{E0}` for every `n` gives the ground-inclusive count
//! `Γ(n, E) = Σ_{k≤n} Γ_ex(k, E)` directly.

use std::fmt::Display;
use std::io::Write;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::distribution::{Ensemble, GroundStateDistribution};
use crate::count::{big_ratio, multiset, Count};
use crate::error::{Error, Result};
use crate::model::LevelSpectrum;

/// Default cap on table entries held at once (both sweep buffers).
pub const DEFAULT_MAX_ENTRIES: u128 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    /// `Γ_ex(n, E)`.
    Excited,
    /// `Γ(n, E)`, ground mode included.
    GroundInclusive,
}

/// Counts for `0 ≤ n ≤ atoms`, `0 ≤ E ≤ e_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroTable<C> {
    kind: TableKind,
    atoms: usize,
    e_max: u64,
    values: Vec<C>,
}

impl<C: Count> MicroTable<C> {
    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn atoms(&self) -> usize {
        self.atoms
    }

    pub fn e_max(&self) -> u64 {
        self.e_max
    }

    fn width(&self) -> usize {
        self.e_max as usize + 1
    }

    /// Raw entry: `Γ_ex(n, E)` or `Γ(n, E)` depending on the kind.
    pub fn get(&self, n: usize, energy: u64) -> &C {
        assert!(n <= self.atoms && energy <= self.e_max, "({n}, {energy}) outside the table");
        &self.values[n * self.width() + energy as usize]
    }

    /// `Γ(n, E)`.
    pub fn gamma(&self, n: usize, energy: u64) -> C {
        match self.kind {
            TableKind::GroundInclusive => self.get(n, energy).clone(),
            TableKind::Excited => {
                let mut acc = C::zero();
                for k in 0..=n {
                    acc.add_assign_ref(self.get(k, energy));
                }
                acc
            }
        }
    }

    fn check(&self, n: usize, energy: u64) -> Result<()> {
        if n > self.atoms || energy > self.e_max {
            return Err(Error::InvalidParameter(format!(
                "(N, E) = ({n}, {energy}) outside the table (N ≤ {}, E ≤ {})",
                self.atoms, self.e_max
            )));
        }
        Ok(())
    }

    /// Decimal dump, one `n,E,count` line per entry.
    pub fn write_audit<W: Write>(&self, mut w: W) -> Result<()>
    where
        C: Display,
    {
        let kind = match self.kind {
            TableKind::Excited => "excited",
            TableKind::GroundInclusive => "ground_inclusive",
        };
        writeln!(w, "# kind={kind} atoms={} e_max={}", self.atoms, self.e_max)?;
        writeln!(w, "n,E,count")?;
        for n in 0..=self.atoms {
            for e in 0..=self.e_max {
                writeln!(w, "{n},{e},{}", self.get(n, e))?;
            }
        }
        Ok(())
    }
}

fn sweep<C: Count>(
    spectrum: &LevelSpectrum,
    atoms: usize,
    e_max: u64,
    max_entries: u128,
    kind: TableKind,
) -> Result<MicroTable<C>> {
    if spectrum.cutoff() < e_max {
        return Err(Error::Precondition(format!(
            "spectrum cutoff {} is below the largest requested energy {e_max}",
            spectrum.cutoff()
        )));
    }
    let w = e_max as usize + 1;
    let entries = 2 * (atoms as u128 + 1) * w as u128;
    if entries > max_entries {
        return Err(Error::Resource { what: "microcanonical table entries".into(), count: entries, limit: max_entries });
    }
    let mut old = vec![C::zero(); (atoms + 1) * w];
    match kind {
        TableKind::Excited => old[0] = C::one(),
        TableKind::GroundInclusive => (0..=atoms).for_each(|n| old[n * w] = C::one()),
    }
    let mut new = old.clone();
    for eps in 1..=e_max {
        let d = spectrum.degeneracy(eps);
        if d == 0 {
            continue;
        }
        let m_max = atoms.min((e_max / eps) as usize);
        let mult: Vec<C> = (0..=m_max as u64).map(|m| multiset::<C>(d, m)).collect();
        let step = eps as usize;
        for n in 0..=atoms {
            for e in 0..w {
                let mut acc = old[n * w + e].clone();
                for m in 1..=n.min(e / step).min(m_max) {
                    let prev = &old[(n - m) * w + e - m * step];
                    if !prev.is_zero() {
                        acc.add_assign_ref(&prev.mul_ref(&mult[m]));
                    }
                }
                new[n * w + e] = acc;
            }
        }
        std::mem::swap(&mut old, &mut new);
    }
    Ok(MicroTable { kind, atoms, e_max, values: old })
}

/// `Γ_ex(n, E)` for all `n ≤ atoms`, `E ≤ e_max`.
///
/// The spectrum must cover every level up to `e_max`; tables that would
/// exceed `max_entries` are refused.
pub fn micro_recurrence<C: Count>(
    spectrum: &LevelSpectrum,
    atoms: usize,
    e_max: u64,
    max_entries: u128,
) -> Result<MicroTable<C>> {
    sweep(spectrum, atoms, e_max, max_entries, TableKind::Excited)
}

/// Ground-inclusive `Γ(n, E)` from the same sweep.
pub fn micro_recurrence_inclusive<C: Count>(
    spectrum: &LevelSpectrum,
    atoms: usize,
    e_max: u64,
    max_entries: u128,
) -> Result<MicroTable<C>> {
    sweep(spectrum, atoms, e_max, max_entries, TableKind::GroundInclusive)
}

fn require_kind<C>(table: &MicroTable<C>, kind: TableKind) -> Result<()> {
    if table.kind != kind {
        return Err(Error::Precondition(format!("expected a {kind:?} table, got {:?}", table.kind)));
    }
    Ok(())
}

/// `p(N0 | E) = Γ_ex(N − N0, E) / Γ(N, E)`.
pub fn micro_p_n0<C: Count>(table: &MicroTable<C>, atoms: usize, energy: u64) -> Result<GroundStateDistribution> {
    require_kind(table, TableKind::Excited)?;
    table.check(atoms, energy)?;
    let total = table.gamma(atoms, energy);
    if total.is_zero() {
        return Err(Error::UnreachableEnergy { energy });
    }
    let probabilities = (0..=atoms).map(|n0| C::ratio_f64(table.get(atoms - n0, energy), &total)).collect();
    Ok(GroundStateDistribution { probabilities, ensemble: Ensemble::Microcanonical { energy } })
}

/// Exact `p(N0 | E)` as rationals.
pub fn micro_p_n0_exact(table: &MicroTable<BigUint>, atoms: usize, energy: u64) -> Result<Vec<BigRational>> {
    require_kind(table, TableKind::Excited)?;
    table.check(atoms, energy)?;
    let total = table.gamma(atoms, energy);
    if Count::is_zero(&total) {
        return Err(Error::UnreachableEnergy { energy });
    }
    Ok((0..=atoms).map(|n0| big_ratio(table.get(atoms - n0, energy), &total)).collect())
}

/// Exact `p(N0 | E)` from a ground-inclusive table:
/// `[Γ(N − N0, E) − Γ(N − N0 − 1, E)] / Γ(N, E)` with `Γ(−1, E) = 0`.
pub fn micro_p_n0_inclusive(table: &MicroTable<BigUint>, atoms: usize, energy: u64) -> Result<Vec<BigRational>> {
    require_kind(table, TableKind::GroundInclusive)?;
    table.check(atoms, energy)?;
    let total = table.get(atoms, energy);
    if Count::is_zero(total) {
        return Err(Error::UnreachableEnergy { energy });
    }
    Ok((0..=atoms)
        .map(|n0| {
            let k = atoms - n0;
            let upper = table.get(k, energy);
            let diff = if k == 0 { upper.clone() } else { upper - table.get(k - 1, energy) };
            big_ratio(&diff, total)
        })
        .collect())
}

/// Rationals to a float distribution.
pub fn to_distribution(p: &[BigRational], energy: u64) -> GroundStateDistribution {
    GroundStateDistribution {
        probabilities: p.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect(),
        ensemble: Ensemble::Microcanonical { energy },
    }
}

/// Mean and variance of `N0` for every energy `0..=e_max`.
#[derive(Clone, Debug, PartialEq)]
pub struct MicroMoments {
    pub atoms: usize,
    /// `NaN` at unreachable energies.
    pub mean: Vec<f64>,
    pub var: Vec<f64>,
}

impl MicroMoments {
    pub fn e_max(&self) -> u64 {
        self.var.len() as u64 - 1
    }

    /// Largest variance and its energy.
    pub fn max_variance(&self) -> (u64, f64) {
        self.var
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(e, &v)| (e as u64, v))
            .unwrap_or((0, f64::NAN))
    }

    /// Exact moments from the sums `S_j(E) = Σ_{N0} N0^j Γ_ex(N − N0, E)`.
    pub(crate) fn from_sums(atoms: usize, s0: &[BigUint], s1: &[BigUint], s2: &[BigUint]) -> Self {
        let (mut mean, mut var) = (Vec::with_capacity(s0.len()), Vec::with_capacity(s0.len()));
        for ((a, b), c) in s0.iter().zip(s1).zip(s2) {
            if Count::is_zero(a) {
                mean.push(f64::NAN);
                var.push(f64::NAN);
                continue;
            }
            mean.push(BigUint::ratio_f64(b, a));
            // (S2 S0 − S1²) / S0², exact up to the final rounding.
            let num = c * a - b * b;
            var.push(BigUint::ratio_f64(&num, &(a * a)));
        }
        MicroMoments { atoms, mean, var }
    }

    /// Moments from an excited-atom table.
    pub fn from_table(table: &MicroTable<BigUint>, atoms: usize) -> Result<Self> {
        require_kind(table, TableKind::Excited)?;
        table.check(atoms, 0)?;
        let w = table.width();
        let (mut s0, mut s1, mut s2) = (vec![BigUint::default(); w], vec![BigUint::default(); w], vec![BigUint::default(); w]);
        for n0 in 0..=atoms {
            for e in 0..w {
                let g = table.get(atoms - n0, e as u64);
                s0[e] += g;
                s1[e] += g * n0 as u64;
                s2[e] += g * (n0 as u64 * n0 as u64);
            }
        }
        Ok(Self::from_sums(atoms, &s0, &s1, &s2))
    }
}
