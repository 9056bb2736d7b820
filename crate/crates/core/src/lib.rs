//! Bounded-coefficient arithmetic circuits: an IR with evaluation and
//! validation, generators for FFT-based convolution and its relatives,
//! spectral lower bounds, and Monte Carlo checks of the probabilistic
//! estimates behind them.

pub mod bounds;
pub mod circuit;
pub mod generators;
pub mod oracles;
pub mod probability;
pub mod spectral;
pub mod transforms;

pub use num_complex::Complex64;
