//! Finite sections of Hardy and Bergman Toeplitz operators with harmonic
//! trigonometric-polynomial symbols.
//!
//! The crate is organised bottom-up:
//!
//! - [`symbol`]: harmonic symbols `φ = ḡ + f`, their boundary curves and
//!   winding numbers.
//! - [`operators`]: Hardy (`[b_{i-j}]`) and Bergman (`τ_{i,j}`) finite
//!   sections and the Hilbert–Schmidt norm of their difference.
//! - [`linalg`]: dense complex Hessenberg/QR eigenvalues, LU and smallest
//!   singular values.
//! - [`spectra`]: pseudospectra, discrete eigenvalue detection across a ladder
//!   of section orders, and component classification.
//! - [`analysis`]: distances to the Hardy–Toeplitz spectrum, the
//!   `Σ dist^{3+ε}` eigenvalue sum and the assembled [`analysis::SpectralReport`].

// Negated comparisons are used so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod operators;
pub mod spectra;
pub mod symbol;

pub use error::{Error, Result};
pub use num_complex::Complex64;
