pub mod channel;
pub mod cli;
pub mod contraction;
pub mod ensembles;
pub mod error;
pub mod finite_time;
pub mod foundation;
pub mod report;
pub mod rng;
pub(crate) mod serde_ext;
pub mod spectral;
pub mod stability;

pub use error::{QmsError, Result};
