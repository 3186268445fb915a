//! Discrete-time simulation of separable temporal exponential random graph
//! models, where each step draws a formation network and a dissolution network
//! from the previous one, plus tools for tie-duration distributions and
//! discrete hazards.

pub mod duration;
pub mod error;
pub mod hazard;
pub mod network;
pub mod sampler;
pub mod scenario;
pub mod stats;

pub use error::{Error, Result};
pub use network::{combine, Dyad, EdgeAgeState, Network, Spell, SpellLog};
pub use sampler::{simulate, SamplerConfig, SimState, Trajectory};
pub use stats::{ModelSpec, Phase, StatTerm};
