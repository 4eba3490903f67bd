//! Metropolis–Hastings walk over Fock states.

mod chain;
mod params;
mod proposal;
mod set;

pub use chain::{run_chain, run_chains, Chain};
pub use params::{default_gamma, SamplerParams};
pub use proposal::{acceptance_log_prob, proposal_probability, propose, Proposal};
pub use set::{ChainDiagnostics, SampleRecord, SampleSet, Window};
