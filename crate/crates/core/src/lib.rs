//! Quantum tunneling of a two-state Ramsey clock through one-dimensional
//! barriers: scattering amplitudes, tunneling delays, the clock phase budget
//! and experiment design helpers.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod barrier;
pub mod clock;
pub mod design;
pub mod error;
pub mod optimize;
pub mod presets;
pub mod quad;
pub mod rect;
pub mod solver;
pub mod transfer;
pub mod units;
pub mod validation;
pub mod wavepacket;

pub use barrier::{BarrierProfile, InternalState, Shape, StatePotential};
pub use clock::{
    ClockSpecies, LaserPhase, PerturbationSet, PhaseBudget, RamseySignal, TransmittedStates,
};
pub use error::{Error, Result};
pub use rect::{ExpansionCoefficients, ScatteringSolution};
pub use units::{DimensionlessPoint, PhysicalConstants, ShapeKind, CONSTANTS};
