//! Rudin–Shapiro type sequences built from periodic sign patterns.
//!
//! The crate covers the whole pipeline for such a sequence:
//!
//! * [`rudin`] runs the sign-modulated polynomial recursion, reads off the
//!   binary sequence and derives the equivalent constant-length substitution
//!   on the four-letter alphabet `ABCD`.
//! * [`subst`] holds the combinatorics of constant-length substitutions:
//!   instruction and substitution matrices, primitivity, a left-neighbourhood
//!   aperiodicity test, Perron–Frobenius data and fixed-point prefixes.
//! * [`correlation`] computes exact pair-correlation vectors by digit-carry
//!   renormalization, the ergodic decomposition of the bi-substitution, the
//!   positive semidefinite family of class weights with its extreme rays, and
//!   a certified pure point / absolutely continuous classification.
//! * [`fourier`] is the floating point side: exponential sums, an oversampled
//!   sup-norm estimate, the parallelogram identity and periodograms.
//!
//! All combinatorial and algebraic work is done in exact rational arithmetic.

pub mod correlation;
pub mod error;
pub mod exact;
pub mod exec;
pub mod format;
pub mod fourier;
pub mod regression;
pub mod rudin;
pub mod subst;

pub use error::{Error, Result};
pub use num_rational::BigRational;
pub use rudin::{PolyPair, Sign, SignSequence, WeightMap};
pub use subst::{Alphabet, IntMatrix, PerronData, SubstitutionRule};
