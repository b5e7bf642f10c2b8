//! File formats, parallel sweeps, CSV output and the command line for
//! [`polyiter_core`].

pub mod cli;
pub mod format;
pub mod report;
pub mod sweep;
