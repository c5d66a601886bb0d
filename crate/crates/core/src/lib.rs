//! OFDM integrated sensing and communication toolkit.
//!
//! The crate is organised along the processing chain:
//!
//! - [`grid`]: numerology and the M x N resource grid with per-RE allocation kinds
//! - [`refsig`]: Gold sequences, PRS/DMRS mapping and the 16-QAM PDSCH payload
//! - [`channel`]: bistatic multi-target frequency-domain echo model plus AWGN
//! - [`estimator`]: two-stage range/Doppler periodogram and the derived metrics
//! - [`deghost`]: PRS/DMRS fusion that removes comb-induced range ghosts
//! - [`allocator`]: PRB/slot split between PDSCH and per-target PRS
//!
//! Every stage is a pure function of its inputs and seeds.

pub mod allocator;
pub mod channel;
pub mod deghost;
mod error;
pub mod estimator;
mod fft;
pub mod grid;
pub mod refsig;

pub use error::{Error, Result};
pub use ndarray;
pub use num_complex;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
