//! Eavesdropping analysis for BB84 with weak coherent pulses and inefficient
//! detectors, under an eavesdropper who can act on the quantum channel only.
//!
//! The crate compares three two-photon eavesdropping processes at matched raw
//! bit rate:
//!
//! - the photon-number-splitting (PNS) process combined with the optimal
//!   individual attack on single photons,
//! - strategy A, a 2→3 universal asymmetric cloner,
//! - strategy B, a 2→3 phase-covariant cloner,
//!
//! and maps the attack disturbance `D` onto the observed error rate `e` and the
//! channel loss. Every closed form is paired with a brute-force route in
//! [`oracle`], which builds the cloning unitaries explicitly, reduces them by
//! partial traces and searches measurements numerically.
//!
//! Module map:
//!
//! | module | contents |
//! |---|---|
//! | [`linalg`] | dense complex kets/operators, tensor products, partial traces |
//! | [`optics`] | BB84 signals, Poisson photon statistics, two-photon symmetric encoding |
//! | [`detection`] | inefficient-detector POVM, outcome distributions, sifting |
//! | [`infotheory`] | `Φ`, optimal single-photon attack information, Levitin information |
//! | [`attacks`] | PNS / strategy A / strategy B information-vs-disturbance |
//! | [`channel`] | detection probabilities, `e ↔ D`, transmission window, crossover |
//! | [`oracle`] | simulation, numeric measurement search, Monte Carlo |
//! | [`verify`] | the named verification suites driven by `qel verify` |

// `!(x < y)` is how NaN inputs get rejected throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attacks;
pub mod channel;
pub mod detection;
pub mod error;
pub mod infotheory;
pub mod linalg;
pub mod optics;
pub mod oracle;
pub mod roots;
pub mod verify;

pub use error::{Error, Result};
