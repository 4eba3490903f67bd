//! The 1D oscillator: `Γ_ex(n, E)` is the number of partitions of `E` into
//! exactly `n` positive parts, which obeys
//! `Γ_ex(n, E) = Γ_ex(n, E − n) + Γ_ex(n − 1, E − 1)`.

use num_bigint::BigUint;

use super::micro::MicroMoments;
use crate::error::{Error, Result};

fn next_row(prev: &[BigUint], row: &mut [BigUint], n: usize) {
    for e in 0..row.len() {
        let mut v = if e >= 1 { prev[e - 1].clone() } else { BigUint::default() };
        if e >= n {
            let (lo, hi) = row.split_at_mut(e);
            v += &lo[e - n];
            hi[0] = v;
        } else {
            row[e] = v;
        }
    }
}

/// Partitions of `energy` into exactly `parts` positive parts.
pub fn partitions_1d(parts: usize, energy: u64) -> BigUint {
    if parts as u64 > energy {
        return BigUint::default();
    }
    let w = energy as usize + 1;
    let mut prev = vec![BigUint::default(); w];
    prev[0] = BigUint::from(1u32);
    let mut row = vec![BigUint::default(); w];
    for n in 1..=parts {
        next_row(&prev, &mut row, n);
        std::mem::swap(&mut prev, &mut row);
    }
    prev[energy as usize].clone()
}

/// Exact microcanonical mean and variance of `N0` for `N` atoms in the 1D
/// oscillator at every energy `0..=e_max`.
///
/// Row `n` of the partition table is folded into three running prefix sums
/// over `n`, from which `Σ N0^j Γ_ex(N − N0, E)` follow for `j = 0, 1, 2`
/// without any multiplication inside the loop.
pub fn harmonic1d_micro_moments(atoms: usize, e_max: u64, max_entries: u128) -> Result<MicroMoments> {
    let w = e_max as usize + 1;
    let entries = 5 * w as u128;
    if entries > max_entries {
        return Err(Error::Resource { what: "partition table entries".into(), count: entries, limit: max_entries });
    }
    let mut prev = vec![BigUint::default(); w];
    prev[0] = BigUint::from(1u32);
    let mut row = vec![BigUint::default(); w];
    let (mut c, mut b, mut d) = (prev.clone(), prev.clone(), prev.clone());
    for n in 1..=atoms {
        if n < w {
            next_row(&prev, &mut row, n);
        } else {
            row.iter_mut().for_each(|v| *v = BigUint::default());
        }
        std::mem::swap(&mut prev, &mut row);
        for e in 0..w {
            c[e] += &prev[e];
            b[e] += &c[e];
            d[e] += &b[e];
        }
    }
    // With u = N0: Σ Γ (u+1) = B, Σ Γ (u+1)(u+2)/2 = D.
    let s1: Vec<BigUint> = b.iter().zip(&c).map(|(b, c)| b - c).collect();
    let s2: Vec<BigUint> = d.iter().zip(&b).zip(&c).map(|((d, b), c)| (d * 2u32 + c) - b * 3u32).collect();
    Ok(MicroMoments::from_sums(atoms, &c, &s1, &s2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_partition_numbers() {
        // p(8 into 3 parts) = 5: 6+1+1, 5+2+1, 4+3+1, 4+2+2, 3+3+2
        assert_eq!(partitions_1d(3, 8), BigUint::from(5u32));
        assert_eq!(partitions_1d(0, 0), BigUint::from(1u32));
        assert_eq!(partitions_1d(0, 3), BigUint::default());
        assert_eq!(partitions_1d(4, 3), BigUint::default());
        assert_eq!(partitions_1d(1, 9), BigUint::from(1u32));
        let total: BigUint = (0..=30).map(|k| partitions_1d(k, 30)).sum();
        assert_eq!(total, BigUint::from(5604u32));
    }

    #[test]
    fn moments_at_tiny_sizes() {
        // N = 2, E = 2: states (0,0,2 quanta on one atom) and (1+1): N0 = 1 or 0.
        let m = harmonic1d_micro_moments(2, 4, 1000).unwrap();
        assert_eq!(m.mean[0], 2.0);
        assert_eq!(m.var[0], 0.0);
        assert!((m.mean[2] - 0.5).abs() < 1e-15);
        assert!((m.var[2] - 0.25).abs() < 1e-15);
    }
}
