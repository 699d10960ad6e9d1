//! Physical constants and the natural scales of a particle falling above a mirror.
//!
//! All public interfaces work in SI units. The gravitational length, energy and
//! time scales turn positions, energies and velocities into the dimensionless
//! variables used internally by the Airy-basis code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Atomic mass of hydrogen (kg).
pub const HYDROGEN_MASS: f64 = 1.673_557_5e-27;
/// Default local free-fall acceleration (m/s²).
pub const DEFAULT_G: f64 = 9.81;
/// Standard free-fall acceleration, used as the Fisher-information normalizer (m/s²).
pub const STANDARD_G: f64 = 9.806_65;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub m: f64,
    pub g: f64,
    pub g0: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            m: HYDROGEN_MASS,
            g: DEFAULT_G,
            g0: STANDARD_G,
        }
    }
}

/// Accepted range for `g` and `g0`, meant to catch unit mistakes.
pub const DEFAULT_G_BAND: (f64, f64) = (1.0, 100.0);

impl PhysicalConstants {
    /// Same constants with a different local acceleration.
    pub fn with_g(&self, g: f64) -> Self {
        Self { g, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_band(DEFAULT_G_BAND)
    }

    pub fn validate_with_band(&self, band: (f64, f64)) -> Result<()> {
        for (name, v) in [("hbar", self.hbar), ("m", self.m), ("g", self.g), ("g0", self.g0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
            }
        }
        for (name, v) in [("g", self.g), ("g0", self.g0)] {
            if v < band.0 || v > band.1 {
                return Err(Error::Domain(format!(
                    "{name} = {v} m/s² outside the accepted band [{}, {}]",
                    band.0, band.1
                )));
            }
        }
        Ok(())
    }
}

/// Natural length, energy and time of the linear gravitational potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GqsScales {
    pub l_gqs: f64,
    pub e_gqs: f64,
    pub t_gqs: f64,
}

impl GqsScales {
    /// Velocity unit `l_gqs / t_gqs`.
    pub fn velocity(&self) -> f64 {
        self.l_gqs / self.t_gqs
    }
}

/// Scales without the `g` band check; used internally where `g` is perturbed
/// or deliberately tiny.
pub(crate) fn scales_unchecked(c: &PhysicalConstants) -> GqsScales {
    let l_gqs = (c.hbar * c.hbar / (2.0 * c.g * c.m * c.m)).cbrt();
    let e_gqs = c.m * c.g * l_gqs;
    let t_gqs = c.hbar / e_gqs;
    GqsScales { l_gqs, e_gqs, t_gqs }
}

pub fn gqs_scales(c: &PhysicalConstants) -> Result<GqsScales> {
    for (name, v) in [("hbar", c.hbar), ("m", c.m), ("g", c.g)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")));
        }
    }
    Ok(scales_unchecked(c))
}

/// Dimensionless position, energy and velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reduced {
    pub zeta: f64,
    pub eps: f64,
    pub nu: f64,
}

pub fn reduce(z: f64, energy: f64, v: f64, s: &GqsScales) -> Reduced {
    Reduced {
        zeta: z / s.l_gqs,
        eps: energy / s.e_gqs,
        nu: v * s.t_gqs / s.l_gqs,
    }
}
