//! Routing, spectrum and core assignment (RSCA) for multi-core fiber networks.
//!
//! Cores of an MCF can either all propagate one way (co-propagation, fibers
//! deployed in opposed pairs) or pick a direction per core
//! (counter-propagation). Counter-propagating neighbours do not couple, so a
//! fiber can host both directions of a link with less crosstalk.

pub mod crosstalk;
pub mod demand;
pub mod experiment;
pub mod error;
pub mod geometry;
pub mod heuristic;
pub mod ilp;
pub mod oracle;
pub mod state;
pub mod topology;

pub use error::{Error, Result};
