//! Windowed, overlapped, frequency-domain block matched filtering for
//! direct-sequence preamble acquisition.
//!
//! The crate is organised bottom-up:
//!
//! * [`signals`] generates Gold/m-sequence preambles, analysis and synthesis
//!   windows, and synthesizes time signals from STFT grids.
//! * [`block_filter`] holds the STFT analysis, the block-partitioned
//!   frequency-domain filter with head/tail carries, the direct convolution
//!   oracle, the Doppler grid, spectral excision and the complexity counts.
//! * [`acquisition`] is the CFAR detector with serial and maximum search.
//! * [`channels`] provides seeded AWGN, Rayleigh and Rician channel models.
//! * [`analytics`] evaluates detection, false-alarm and maximum-search
//!   probabilities, including the Marcum Q-function.
//! * [`harness`] runs Monte Carlo experiments and writes CSV.

pub mod acquisition;
pub mod analytics;
pub mod block_filter;
pub mod channels;
mod error;
pub mod harness;
pub mod signals;

pub use error::{Error, Result};
pub use num_complex::Complex64;
