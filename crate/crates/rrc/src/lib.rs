//! File formats, noise synthesis, benchmark harness and command-line plumbing
//! around [`rrc_core`].

pub mod bench;
pub mod context;
pub mod io;
pub mod noise;
pub mod pipeline;
pub mod trace;

pub use rrc_core;
