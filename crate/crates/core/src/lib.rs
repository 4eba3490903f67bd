//! Fock state sampling (FSS) of trapped Bose gases.
//!
//! A Metropolis–Hastings walk over occupation-number states produces canonical
//! samples of the ground-mode occupation `N0` and the energy. Shrinking an
//! energy window around the mean turns them into microcanonical estimates.
//! Exact recurrences for the ideal gas serve as oracles.
//!
//! Floating point code is generic over [`num::Real`]; the aliases below fix it
//! to `f64`, which is what the command-line tool uses.

// `!(x > 0)` is how NaN gets rejected along with the out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod count;
pub mod error;
pub mod model;
pub mod num;
pub mod oracles;
pub mod sampler;
pub mod stats;

pub use error::{Error, Result};
pub use model::TrapSpec;

pub type ModeBasis = model::ModeBasis<f64>;
pub type FockState = model::FockState<f64>;
pub type Model = model::Model<f64>;
pub type Spectrum = model::Spectrum<f64>;
pub type SampleSet = sampler::SampleSet<f64>;
pub type SampleRecord = sampler::SampleRecord<f64>;
