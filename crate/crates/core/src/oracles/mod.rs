//! Exact results for the ideal gas, used to validate the sampler.

mod asymptotics;
mod canonical;
mod distribution;
mod micro;
mod newton;
mod onebody;
mod partitions;
mod ratio;

pub use asymptotics::{asymptotics, Asymptotics};
pub use canonical::{
    canonical_mean_energy, canonical_moments, canonical_p_n0, canonical_z, harmonic1d_closed_form, CanonicalTable, Variant,
};
pub use distribution::{distribution_moments, Ensemble, GroundStateDistribution};
pub use micro::{
    micro_p_n0, micro_p_n0_exact, micro_p_n0_inclusive, micro_recurrence, micro_recurrence_inclusive, to_distribution,
    MicroMoments, MicroTable, TableKind, DEFAULT_MAX_ENTRIES,
};
pub use newton::{moments_from_rows, newton_exact, newton_scaled, ScaledRows};
pub use onebody::{OneBody, Oscillator, TrapOneBody};
pub use partitions::{harmonic1d_micro_moments, partitions_1d};
pub use ratio::{canonical_peak, exact_s, micro_moments, CanonicalPeak, ExactRatio};
