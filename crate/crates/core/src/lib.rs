//! Exact simulation and closed-form analysis of multi-hop qubit teleportation
//! over partially entangled channels `alpha|00> + beta|11>`.
//!
//! Two protocols are modelled. In the separate protocol every hop filters its
//! own amplitude distortion before passing the qubit on; in the global
//! protocol only the final receiver filters, so distortions from different
//! hops can cancel each other. [`verification`] checks the simulator against
//! an exhaustive walk of the outcome tree and against [`analytics`].

pub mod analytics;
pub mod channels;
pub mod checks;
pub mod cli;
pub mod error;
pub mod protocols;
pub mod quantum;
pub mod verification;

pub use error::{Error, Result};
