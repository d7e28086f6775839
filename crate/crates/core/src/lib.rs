//! Sampling and verification kernels for the Fourier coefficients of the
//! critical holomorphic multiplicative chaos, the secular coefficients of the
//! Circular Unitary Ensemble, the critical chaos measures on the circle, and
//! the Dickman-distribution machinery tying them together.
//!
//! The crate is organised around the objects themselves:
//!
//! * [`rng`] — deterministic, splittable random source; one substream per
//!   Monte Carlo replica makes every experiment independent of worker count.
//! * [`series`] — formal power-series kernels: exponentiation (quadratic
//!   reference and FFT-accelerated path), composition-sum oracles, and the
//!   permutation-cycle DP.
//! * [`hmc`] — chaos coefficient samplers, the good/bad splitting of a
//!   coefficient by its largest active frequency, linear statistics.
//! * [`gmc`] — critical chaos approximation measures on an angular grid,
//!   exact covariance formulas, Toeplitz moment matrices, Parseval checks.
//! * [`cue`] — secular coefficients of Haar-unitary characteristic
//!   polynomials (Szegő-recursion sampler plus a small-N QR oracle).
//! * [`dickman`] — the Dickman function, its distribution, and the block
//!   weight functions entering the martingale variance limit.
//! * [`limitlaw`] — reference samplers and closed forms for the limit
//!   objects, plus the Kolmogorov–Smirnov test kit.
//! * [`parallel`] — replica-parallel map with a sequential fallback (the
//!   `parallel` feature toggles rayon; results are identical either way).

pub mod cue;
pub mod dickman;
pub mod error;
pub(crate) mod fft;
pub mod gmc;
pub mod hmc;
pub mod limitlaw;
pub mod parallel;
pub mod rng;
pub mod series;
pub(crate) mod util;

pub use error::Error;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Complex scalar used everywhere.
pub type C64 = num_complex::Complex64;
