//! Exact simulation and closed-form analysis of entanglement concentration
//! for three-electron W states.
//!
//! Two protocols turn a known but unbalanced three-party W state into the
//! maximally entangled one using a spare electron per step: one routes
//! electrons through polarizing beam splitters and keeps branches flagged
//! by a charge detector, the other replaces that optic with a parity-check
//! gate whose odd outcomes can be recycled for further rounds.
//!
//! [`state`] holds the multi-electron state vectors, [`elements`] the
//! circuit primitives, [`protocols`] the closed-form probabilities and
//! step-by-step runs, and [`oracle`] a brute-force branch enumeration used
//! to cross-check everything else.

pub mod elements;
pub mod error;
pub mod oracle;
pub mod protocols;
pub mod state;

pub use error::{Error, Result};
