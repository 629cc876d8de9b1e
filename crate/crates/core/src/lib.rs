//! Interaction-induced freezing of a weakly driven spin coupled to a strongly
//! driven partner: two-spin and NV electron/14N models, Lindblad dynamics,
//! multitone RF noise and quantum discord.

pub mod cli;
pub mod discord;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod hamiltonians;
pub mod linalg;
pub mod noise;
pub mod operators;

pub use error::{Error, Result};
