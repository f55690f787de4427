//! Physical constants and unit conversions. Energies are in MeV throughout.

/// Electron mass (CODATA 2018), MeV.
pub const ELECTRON_MASS: f64 = 0.510_998_950;

/// Fine-structure constant.
pub const ALPHA: f64 = 1.0 / 137.036;

/// (ħc)² in barn·MeV². Multiplying a cross section in MeV⁻² by this gives barn.
pub const HBARC_SQ_BARN_MEV2: f64 = 0.389_379_372_1e3;

/// One barn in m².
pub const BARN_M2: f64 = 1.0e-28;

/// Classical electron radius squared, barn.
pub fn classical_radius_sq_barn() -> f64 {
    (ALPHA / ELECTRON_MASS).powi(2) * HBARC_SQ_BARN_MEV2
}

pub fn inv_mev2_to_barn(x: f64) -> f64 {
    x * HBARC_SQ_BARN_MEV2
}

pub fn barn_to_inv_mev2(x: f64) -> f64 {
    x / HBARC_SQ_BARN_MEV2
}
