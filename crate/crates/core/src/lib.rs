//! Exact, generating-function and simulated comparison counts for
//! dual-pivot quickselect under several classification strategies.

pub mod exactdp;
pub mod exactnum;
pub mod formulas;
pub mod gfcatalog;
pub mod harness;
pub mod selector;
pub mod series;
pub mod simkit;
pub mod strategies;

/// First line of every CSV file written by this crate.
pub const CSV_HEADER_COMMENT: &str = "# dpqs-lab v1";
