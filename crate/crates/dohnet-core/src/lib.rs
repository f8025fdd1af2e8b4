//! Frequency-domain two-port toolkit for transformer-based series Doherty
//! power-amplifier output networks.
//!
//! The crate covers the full path from an abstract design (a quarter-wave
//! impedance inverter plus a two-stage impedance scaling network) to a compact
//! transformer realization:
//!
//! * [`twoport`] — ABCD (chain) matrix algebra, S-parameter conversion, and
//!   frequency-spectrum containers.
//! * [`mna`] — an independent modified-nodal-analysis solver used as a
//!   validation oracle for cascade-built networks.
//! * [`elements`] — lumped element factories: ideal lines, quarter-wave
//!   lumped equivalents, coupled inductors, and the compact transformer model.
//! * [`synth`] — synthesis of the three-line output network, element
//!   absorption bookkeeping, and impedance-transformation-ratio reporting.
//! * [`fit`] — damped least-squares extraction of transformer model
//!   parameters from a target frequency response.
//! * [`loadmod`] — two-source load-modulation analysis, ideal efficiency
//!   curves, S-parameter sweeps with finite element Q, and bandwidth
//!   extraction.
//!
//! The crate is `no_std` (it requires `alloc`); all file formats and the
//! command-line frontend live in the companion `dohnet` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod elements;
pub mod fit;
mod linalg;
pub mod loadmod;
pub mod mna;
pub mod synth;
pub mod twoport;

pub use num_complex::Complex64;
