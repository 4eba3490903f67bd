//! Large-`N` limits of the condensate variance in an isotropic 3D trap.

use crate::num::zeta;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Asymptotics {
    /// `lim Δ²N0_cano / N = ζ(2)/ζ(3)`.
    pub canonical: f64,
    /// `lim Δ²N0_micro / N = ζ(2)/ζ(3) − (3/4) ζ(3)/ζ(4)`.
    pub microcanonical: f64,
    /// `S_3D = 1 − 3ζ(3)² / (4 ζ(4) ζ(2))`, the ratio of the two.
    pub s_3d: f64,
}

pub fn asymptotics() -> Asymptotics {
    let (z2, z3, z4) = (zeta(2.0), zeta(3.0), zeta(4.0));
    Asymptotics {
        canonical: z2 / z3,
        microcanonical: z2 / z3 - 0.75 * z3 / z4,
        s_3d: 1.0 - 3.0 * z3 * z3 / (4.0 * z4 * z2),
    }
}
