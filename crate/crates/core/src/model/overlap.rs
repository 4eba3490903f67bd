//! Density-overlap integrals `I(a, b) = ∫ |φ_a|² |φ_b|²` for the trap orbitals.

use crate::num::Real;

/// Overlap integrals in trap units.
#[derive(Clone, Debug)]
pub enum Overlap<T> {
    /// Every pair overlaps equally (plane waves on a ring: `1/L`).
    Uniform(T),
    /// Per-axis Hermite-function table, `size × size`, row-major. A 3D mode
    /// overlap is the product of three lookups.
    Hermite { table: Vec<T>, size: usize },
}

impl<T: Real> Overlap<T> {
    #[inline]
    pub fn axis(&self, a: u32, b: u32) -> T {
        match self {
            Overlap::Uniform(v) => *v,
            Overlap::Hermite { table, size } => table[a as usize * size + b as usize],
        }
    }
}

/// `∫ ψ_a(x)² ψ_b(x)² dx` for normalised Hermite functions `ψ_n`, with `x`
/// in units of the oscillator length, for all `a, b ≤ n_max`.
///
/// Uses the trapezoid rule, which converges spectrally for these smooth,
/// Gaussian-decaying integrands. The step resolves the fastest oscillation of
/// a product of four functions of index `≤ n_max`.
pub fn hermite_overlap_table(n_max: usize) -> Vec<f64> {
    let size = n_max + 1;
    let turning = ((2 * n_max + 1) as f64).sqrt();
    let h = (0.5 / turning).min(0.1);
    let x_max = turning + 9.0;
    let points = (x_max / h).ceil() as usize + 1;

    // Squared Hermite functions on the half line x_j = j h; the integrand is even.
    let mut sq = vec![0.0f64; size * points];
    let mut column = vec![0.0f64; size];
    for j in 0..points {
        hermite_squares(j as f64 * h, &mut column);
        for (n, v) in column.iter().enumerate() {
            sq[n * points + j] = *v;
        }
    }
    let weight = |j: usize| if j == 0 { h } else { 2.0 * h };

    let mut table = vec![0.0f64; size * size];
    for a in 0..size {
        let row_a = &sq[a * points..(a + 1) * points];
        for b in a..size {
            let row_b = &sq[b * points..(b + 1) * points];
            let mut acc = 0.0;
            for j in 0..points {
                acc += weight(j) * row_a[j] * row_b[j];
            }
            table[a * size + b] = acc;
            table[b * size + a] = acc;
        }
    }
    table
}

/// Fills `out[n] = ψ_n(x)²` for `n < out.len()`.
///
/// The three-term recurrence is run on a rescaled value with a separate log
/// scale so that neither the Gaussian factor underflows nor the polynomial
/// overflows for large `n`.
fn hermite_squares(x: f64, out: &mut [f64]) {
    const RESCALE: f64 = 1e150;
    let ln_rescale = RESCALE.ln();
    let mut log_scale = -0.5 * x * x - 0.25 * std::f64::consts::PI.ln();
    let mut prev = 0.0f64;
    let mut cur = 1.0f64;
    for (n, slot) in out.iter_mut().enumerate() {
        *slot = if cur == 0.0 {
            0.0
        } else {
            (2.0 * (cur.abs().ln() + log_scale)).exp()
        };
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            prev /= RESCALE;
            log_scale += ln_rescale;
        }
    }
}

pub(crate) fn convert_table<T: Real>(table: Vec<f64>) -> Vec<T> {
    table.into_iter().map(T::of).collect()
}
