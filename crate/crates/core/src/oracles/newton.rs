//! Excited-atom counts for separable oscillators from the recurrence over
//! atom number, applied to generating functions in `q = e^{-β}`:
//!
//! `n Z_ex(n) = Σ_{k=1}^{n} [P(q^k) − 1] Z_ex(n − k)`, `P(q) = Π_a 1/(1 − q^{s_a})`.
//!
//! The coefficient of `q^E` in `Z_ex(n)` is `Γ_ex(n, E)`. Multiplying by
//! `P(q^k) − 1 = Σ_a q^{k s_a} Π_{b≤a} 1/(1 − q^{k s_b})` is a chain of
//! strided prefix sums, all with positive terms.

use num_bigint::BigUint;

use super::micro::MicroMoments;
use crate::count::Count;
use crate::error::{Error, Result};

fn check(strides: &[u64], atoms: usize, e_max: u64, max_entries: u128) -> Result<usize> {
    if strides.is_empty() || strides.contains(&0) {
        return Err(Error::InvalidParameter("strides must be positive".into()));
    }
    let w = e_max as usize + 1;
    let entries = (atoms as u128 + 2) * w as u128;
    if entries > max_entries {
        return Err(Error::Resource { what: "recurrence table entries".into(), count: entries, limit: max_entries });
    }
    Ok(w)
}

/// `Γ_ex(n, E)` exactly, indexed `[n][E]`.
pub fn newton_exact(strides: &[u64], atoms: usize, e_max: u64, max_entries: u128) -> Result<Vec<Vec<BigUint>>> {
    let w = check(strides, atoms, e_max, max_entries)?;
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(atoms + 1);
    let mut first = vec![BigUint::default(); w];
    first[0] = BigUint::from(1u32);
    rows.push(first);
    for n in 1..=atoms {
        let mut acc = vec![BigUint::default(); w];
        for k in 1..=n {
            let mut buf = rows[n - k].clone();
            for &s in strides {
                let st = k * s as usize;
                for e in st..w {
                    let (lo, hi) = buf.split_at_mut(e);
                    hi[0] += &lo[e - st];
                    acc[e] += &lo[e - st];
                }
            }
        }
        rows.push(acc.iter().map(|v| v.div_u64(n as u64)).collect());
    }
    Ok(rows)
}

/// Moments of `N0 = N − n` at every energy from exact rows.
pub fn moments_from_rows(rows: &[Vec<BigUint>]) -> MicroMoments {
    let atoms = rows.len() - 1;
    let w = rows[0].len();
    let (mut s0, mut s1, mut s2) = (vec![BigUint::default(); w], vec![BigUint::default(); w], vec![BigUint::default(); w]);
    for (n, row) in rows.iter().enumerate() {
        let u = (atoms - n) as u64;
        for e in 0..w {
            s0[e] += &row[e];
            s1[e] += &row[e] * u;
            s2[e] += &row[e] * (u * u);
        }
    }
    MicroMoments::from_sums(atoms, &s0, &s1, &s2)
}

/// `Γ_ex(n, E) = rows[n][E] · exp(log_scale[n] + beta0 E)`.
///
/// The tilt `e^{-β0 E}` keeps each row within floating-point range around
/// the energies typical of inverse temperature `beta0`; entries far outside
/// that window may underflow to zero.
#[derive(Clone, Debug)]
pub struct ScaledRows {
    pub beta0: f64,
    pub log_scale: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
}

impl ScaledRows {
    pub fn ln_gamma_ex(&self, n: usize, energy: u64) -> f64 {
        self.rows[n][energy as usize].ln() + self.log_scale[n] + self.beta0 * energy as f64
    }

    pub fn moments(&self) -> MicroMoments {
        let atoms = self.rows.len() - 1;
        let w = self.rows[0].len();
        let (mut mean, mut var) = (vec![f64::NAN; w], vec![f64::NAN; w]);
        let mut logs = vec![f64::NEG_INFINITY; atoms + 1];
        for e in 0..w {
            for (n, l) in logs.iter_mut().enumerate() {
                *l = self.rows[n][e].ln() + self.log_scale[n];
            }
            let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if top == f64::NEG_INFINITY {
                continue;
            }
            let p: Vec<f64> = logs.iter().map(|l| (l - top).exp()).collect();
            let z: f64 = p.iter().sum();
            let m = p.iter().enumerate().map(|(n, q)| (atoms - n) as f64 * q).sum::<f64>() / z;
            let v = p.iter().enumerate().map(|(n, q)| ((atoms - n) as f64 - m).powi(2) * q).sum::<f64>() / z;
            mean[e] = m;
            var[e] = v;
        }
        MicroMoments { atoms, mean, var }
    }
}

/// Floating-point version of [`newton_exact`] for sizes beyond exact
/// arithmetic, with a per-row scale and the tilt `e^{-beta0 E}`.
pub fn newton_scaled(strides: &[u64], atoms: usize, e_max: u64, beta0: f64, max_entries: u128) -> Result<ScaledRows> {
    let w = check(strides, atoms, e_max, max_entries)?;
    if !(beta0 > 0.0 && beta0.is_finite()) {
        return Err(Error::InvalidParameter(format!("tilt must be positive, got {beta0}")));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(atoms + 1);
    let mut log_scale = Vec::with_capacity(atoms + 1);
    let mut first = vec![0.0; w];
    first[0] = 1.0;
    rows.push(first);
    log_scale.push(0.0);
    let mut buf = vec![0.0; w];
    for n in 1..=atoms {
        let reference = log_scale.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = vec![0.0; w];
        for k in 1..=n {
            let m = n - k;
            let f = (log_scale[m] - reference).exp();
            if f == 0.0 {
                continue;
            }
            buf.iter_mut().zip(&rows[m]).for_each(|(b, r)| *b = r * f);
            for &s in strides {
                let st = k * s as usize;
                if st >= w {
                    continue;
                }
                let r = (-beta0 * st as f64).exp();
                for e in st..w {
                    let prev = r * buf[e - st];
                    buf[e] += prev;
                    acc[e] += prev;
                }
            }
        }
        let top = acc.iter().copied().fold(0.0, f64::max);
        if top > 0.0 {
            acc.iter_mut().for_each(|v| *v /= top);
            log_scale.push(reference + top.ln() - (n as f64).ln());
        } else {
            log_scale.push(f64::NEG_INFINITY);
        }
        rows.push(acc);
    }
    Ok(ScaledRows { beta0, log_scale, rows })
}
