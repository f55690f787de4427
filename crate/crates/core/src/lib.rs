//! Tree-level QED evaluation of the triple Compton effect
//! `e⁻ + γ → e⁻ + γ + γ + γ`: amplitudes, differential and integrated
//! cross sections, and the polarization entanglement of the emitted
//! photon triplet.

pub mod algebra;
pub mod amplitude;
pub mod constants;
pub mod cross_section;
pub mod entanglement;
pub mod error;
pub mod integration;
pub mod kinematics;
pub mod scenario;

pub use error::{Error, Result};
