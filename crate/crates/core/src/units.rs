//! Physical constants and defaults shared across modules.

use std::f64::consts::PI;

/// Reduced Planck constant in J·s (exact SI value).
pub const HBAR: f64 = 1.054_571_817e-34;

/// Natural linewidth of the rubidium D2 line, 2π·6.07 MHz, in rad/s.
pub const RB_D2_LINEWIDTH: f64 = 2.0 * PI * 6.07e6;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
