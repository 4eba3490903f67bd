//! Canonical ensemble of the ideal gas from the recurrence
//! `Z(N, β) = (1/N) Σ_{k=1}^{N} Z1(kβ) Z(N−k, β)`, evaluated in log space.

use super::distribution::{distribution_moments, Ensemble, GroundStateDistribution};
use super::onebody::OneBody;
use crate::error::{Error, Result};
use crate::num::{log_sum_exp, Real};

/// Whether the table counts all modes or the excited ones only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    Full,
    ExcitedOnly,
}

/// `ln Z(n, β)` for `n = 0..=N`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalTable<T> {
    pub beta: T,
    pub variant: Variant,
    pub log_z: Vec<T>,
}

fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta > T::zero() && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")))
    }
}

fn log_z1_multiples<T: Real>(one: &impl OneBody<T>, n: usize, beta: T, variant: Variant) -> Vec<T> {
    (1..=n)
        .map(|k| {
            let b = beta * T::of_usize(k);
            match variant {
                Variant::Full => one.log_z1(b),
                Variant::ExcitedOnly => one.log_z1_excited(b),
            }
        })
        .collect()
}

fn recurrence<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut log_z = Vec::with_capacity(n + 1);
    log_z.push(T::zero());
    let mut terms = Vec::with_capacity(n);
    for m in 1..=n {
        terms.clear();
        terms.extend((1..=m).map(|k| a[k - 1] + log_z[m - k]));
        log_z.push(log_sum_exp(&terms) - T::of_usize(m).ln());
    }
    log_z
}

pub fn canonical_z<T: Real>(one: &impl OneBody<T>, n: usize, beta: T, variant: Variant) -> Result<CanonicalTable<T>> {
    check_beta(beta)?;
    let a = log_z1_multiples(one, n, beta, variant);
    Ok(CanonicalTable { beta, variant, log_z: recurrence(&a, n) })
}

/// `p(N0) = Z_ex(N − N0) / Z(N)` with `Z(N) = Σ_k Z_ex(k)`.
pub fn canonical_p_n0<T: Real>(one: &impl OneBody<T>, n: usize, beta: T) -> Result<GroundStateDistribution> {
    let ex = canonical_z(one, n, beta, Variant::ExcitedOnly)?;
    let log_total = log_sum_exp(&ex.log_z);
    let probabilities = (0..=n).map(|n0| (ex.log_z[n - n0] - log_total).exp().as_f64()).collect();
    Ok(GroundStateDistribution { probabilities, ensemble: Ensemble::Canonical { beta: beta.as_f64() } })
}

/// Mean and variance of `N0` at inverse temperature `beta`.
pub fn canonical_moments<T: Real>(one: &impl OneBody<T>, n: usize, beta: T) -> Result<(f64, f64)> {
    canonical_p_n0(one, n, beta).map(|d| distribution_moments(&d))
}

/// Mean total energy `E(N, β)` above the ground state, from
/// `E_N = Σ_k w_k [k e1(kβ) + E_{N−k}]` with `w_k = Z1(kβ) Z(N−k) / (N Z(N))`.
pub fn canonical_mean_energy<T: Real>(one: &impl OneBody<T>, n: usize, beta: T) -> Result<T> {
    check_beta(beta)?;
    let a = log_z1_multiples(one, n, beta, Variant::Full);
    let log_z = recurrence(&a, n);
    let e1: Vec<T> = (1..=n).map(|k| one.mean_energy(beta * T::of_usize(k))).collect();
    let mut energy = vec![T::zero(); n + 1];
    for m in 1..=n {
        let norm = T::of_usize(m).ln() + log_z[m];
        energy[m] = (1..=m)
            .map(|k| (a[k - 1] + log_z[m - k] - norm).exp() * (T::of_usize(k) * e1[k - 1] + energy[m - k]))
            .sum();
    }
    Ok(energy[n])
}

/// Closed form for the 1D oscillator,
/// `p(N0) = x^{N−N0} Π_{j=N−N0+1}^{N} (1 − x^j)` with `x = e^{-β}`,
/// evaluated in log space.
pub fn harmonic1d_closed_form(n0: usize, n: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if n0 > n {
        return Err(Error::InvalidParameter(format!("N0 = {n0} exceeds N = {n}")));
    }
    let n_ex = (n - n0) as f64;
    let log_p = -beta * n_ex + (n - n0 + 1..=n).map(|j| (-(-beta * j as f64).exp_m1()).ln()).sum::<f64>();
    Ok(log_p.exp())
}
