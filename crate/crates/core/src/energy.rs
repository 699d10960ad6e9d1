//! Energy representation of the wave packet in the Airy eigenbasis.
//!
//! The initial state is a minimum-uncertainty Gaussian. Its expansion
//! coefficients `c0(E)` have a closed form in terms of Ai at a complex
//! argument; the mirror multiplies each coefficient by a unimodular
//! reflection amplitude.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airy;
use crate::constants::{scales_unchecked, GqsScales, PhysicalConstants};
use crate::error::{Error, Result};

/// Lowest energy kept on any grid, in units of `e_gqs`.
pub const ENERGY_FLOOR_REDUCED: f64 = -20.0;
/// Default grid half-width in units of the energy spread.
pub const DEFAULT_HALFWIDTH_SIGMAS: f64 = 10.0;
/// Smallest energy-grid size.
pub const MIN_GRID_N: usize = 1 << 14;
/// Tolerance on the quadrature norm of `c0`.
pub const NORM_TOL: f64 = 1e-6;

/// Gaussian wave packet launched above the mirror.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavepacketParams {
    /// Mean altitude (m).
    pub z0: f64,
    /// Mean vertical velocity (m/s), negative downward.
    pub v0: f64,
    /// Velocity dispersion (m/s).
    pub sigma_v: f64,
    /// Time of flight to the detector (s).
    pub t_flight: f64,
    /// Number of detected events.
    pub n_events: f64,
}

impl Default for WavepacketParams {
    fn default() -> Self {
        Self {
            z0: 1e-3,
            v0: -0.0915,
            sigma_v: 0.079,
            t_flight: 0.3,
            n_events: 1.0,
        }
    }
}

impl WavepacketParams {
    /// Position dispersion of the minimum-uncertainty state.
    pub fn sigma_z(&self, c: &PhysicalConstants) -> f64 {
        c.hbar / (2.0 * c.m * self.sigma_v)
    }

    /// Mean energy `m g z0 + m v0²/2`.
    pub fn mean_energy(&self, c: &PhysicalConstants) -> f64 {
        c.m * c.g * self.z0 + 0.5 * c.m * self.v0 * self.v0
    }

    /// Energy spread estimate `m(|v0| + σv)σv + m g σz`.
    pub fn energy_spread(&self, c: &PhysicalConstants) -> f64 {
        c.m * (self.v0.abs() + self.sigma_v) * self.sigma_v + c.m * c.g * self.sigma_z(c)
    }

    pub fn validate(&self, c: &PhysicalConstants) -> Result<()> {
        let finite_pos = |key: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(key, format!("must be finite and > 0, got {v}")))
            }
        };
        finite_pos("wavepacket.z0_m", self.z0)?;
        finite_pos("wavepacket.sigma_v_mps", self.sigma_v)?;
        finite_pos("wavepacket.T_s", self.t_flight)?;
        if !self.v0.is_finite() {
            return Err(Error::config("wavepacket.v0_mps", "must be finite"));
        }
        if !(self.n_events.is_finite() && self.n_events >= 1.0) {
            return Err(Error::config(
                "wavepacket.n_events",
                format!("must be >= 1, got {}", self.n_events),
            ));
        }
        let sz = self.sigma_z(c);
        if self.z0 < 5.0 * sz {
            return Err(Error::config(
                "wavepacket.z0_m",
                format!("packet not above the mirror: z0 = {} m < 5 sigma_z = {} m", self.z0, 5.0 * sz),
            ));
        }
        Ok(())
    }
}

/// Uniform energy grid with `n` nodes from `e_min` to `e_max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyGrid {
    pub e_min: f64,
    pub e_max: f64,
    pub n: usize,
}

impl EnergyGrid {
    pub fn new(e_min: f64, e_max: f64, n: usize) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite() && e_min < e_max) {
            return Err(Error::Grid(format!("invalid energy range [{e_min}, {e_max}]")));
        }
        if n < 1 << 10 {
            return Err(Error::Grid(format!("energy grid needs at least 1024 nodes, got {n}")));
        }
        Ok(Self { e_min, e_max, n })
    }

    /// Grid starting at `e_min` with the given node spacing.
    pub fn with_spacing(e_min: f64, spacing: f64, n: usize) -> Result<Self> {
        Self::new(e_min, e_min + spacing * (n - 1) as f64, n)
    }

    pub fn spacing(&self) -> f64 {
        (self.e_max - self.e_min) / (self.n - 1) as f64
    }

    pub fn energy(&self, i: usize) -> f64 {
        self.e_min + self.spacing() * i as f64
    }

    pub fn energies(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.energy(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeTag {
    Initial,
    Reflected,
}

/// Expansion coefficients `c(E)` on an energy grid, normalized so that
/// `∫|c|² dE = 1` (units J^-1/2).
#[derive(Debug, Clone)]
pub struct EnergyAmplitude {
    pub grid: EnergyGrid,
    pub values: Vec<Complex64>,
    pub tag: AmplitudeTag,
}

impl EnergyAmplitude {
    /// Trapezoid estimate of `∫|c|² dE`.
    pub fn norm(&self) -> f64 {
        trapezoid(self.values.iter().map(|v| v.norm_sqr()), self.grid.spacing())
    }
}

pub(crate) fn trapezoid(values: impl ExactSizeIterator<Item = f64>, h: f64) -> f64 {
    let n = values.len();
    let mut s = 0.0;
    for (i, v) in values.enumerate() {
        s += if i == 0 || i + 1 == n { 0.5 * v } else { v };
    }
    s * h
}

/// Largest reduced energy step that keeps the conjugate momentum window
/// wide enough for the reflected packet.
pub fn max_reduced_step(p: &WavepacketParams, c: &PhysicalConstants, halfwidth_sigmas: f64) -> f64 {
    let s = scales_unchecked(c);
    let zeta0 = p.z0 / s.l_gqs;
    let tau = p.t_flight / s.t_gqs;
    let e_hi = (p.mean_energy(c) + halfwidth_sigmas * p.energy_spread(c)) / s.e_gqs;
    let k_hi = 2.0 * e_hi.sqrt() + (e_hi - zeta0).max(0.0).sqrt();
    let k_lo = (3.0 * zeta0).sqrt();
    let width = 1.15 * (k_hi - k_lo + 1.5 * zeta0 / tau) + 20.0;
    2.0 * std::f64::consts::PI / width
}

/// Reduced energy interval `[lo, hi]` of the half-width rule.
pub fn reduced_support(p: &WavepacketParams, c: &PhysicalConstants, halfwidth_sigmas: f64) -> (f64, f64) {
    let s = scales_unchecked(c);
    let mean = p.mean_energy(c) / s.e_gqs;
    let spread = p.energy_spread(c) / s.e_gqs;
    let lo = (mean - halfwidth_sigmas * spread).max(ENERGY_FLOOR_REDUCED);
    (lo, mean + halfwidth_sigmas * spread)
}

/// Grid centered on the mean energy with the given half-width and at least
/// `n_min` nodes.
pub fn energy_grid(
    p: &WavepacketParams,
    c: &PhysicalConstants,
    halfwidth_sigmas: f64,
    n_min: usize,
) -> Result<EnergyGrid> {
    let s = scales_unchecked(c);
    let (lo, hi) = reduced_support(p, c, halfwidth_sigmas);
    let step = max_reduced_step(p, c, halfwidth_sigmas);
    let n = (((hi - lo) / step).ceil() as usize + 1).next_power_of_two().max(n_min);
    EnergyGrid::new(lo * s.e_gqs, hi * s.e_gqs, n)
}

pub fn default_energy_grid(p: &WavepacketParams, c: &PhysicalConstants) -> Result<EnergyGrid> {
    energy_grid(p, c, DEFAULT_HALFWIDTH_SIGMAS, MIN_GRID_N)
}

/// Dimensionless packet parameters `(ζ0, ν0, σζ)`.
pub(crate) fn reduced_packet(p: &WavepacketParams, c: &PhysicalConstants, s: &GqsScales) -> (f64, f64, f64) {
    (
        p.z0 / s.l_gqs,
        p.v0 * s.t_gqs / s.l_gqs,
        p.sigma_z(c) / s.l_gqs,
    )
}

/// Closed-form `c0` at a reduced energy, normalized in reduced units.
pub(crate) fn c0_reduced(eps: f64, zeta0: f64, nu0: f64, sig: f64) -> Result<Complex64> {
    let s2 = sig * sig;
    let w = Complex64::new(zeta0 - eps + s2 * s2, s2 * nu0);
    let ai = airy::ai_complex(w)?;
    let expo = Complex64::new(
        s2 * (zeta0 - eps - nu0 * nu0 / 4.0 + 2.0 * s2 * s2 / 3.0),
        s2 * s2 * nu0,
    );
    let pre = (8.0 * std::f64::consts::PI).powf(0.25) * sig.sqrt();
    Ok(ai * expo.exp() * pre)
}

/// `c0(E)` in SI units (J^-1/2) at a single energy.
pub fn initial_amplitude_at(e: f64, p: &WavepacketParams, c: &PhysicalConstants) -> Result<Complex64> {
    let s = scales_unchecked(c);
    let (zeta0, nu0, sig) = reduced_packet(p, c, &s);
    Ok(c0_reduced(e / s.e_gqs, zeta0, nu0, sig)? / s.e_gqs.sqrt())
}

/// `c0` on a grid, checked for unit norm.
pub fn initial_amplitude(p: &WavepacketParams, c: &PhysicalConstants, grid: &EnergyGrid) -> Result<EnergyAmplitude> {
    p.validate(c)?;
    let s = scales_unchecked(c);
    let (zeta0, nu0, sig) = reduced_packet(p, c, &s);
    let norm_e = s.e_gqs.sqrt();
    let values = (0..grid.n)
        .into_par_iter()
        .map(|i| c0_reduced(grid.energy(i) / s.e_gqs, zeta0, nu0, sig).map(|v| v / norm_e))
        .collect::<Result<Vec<_>>>()?;
    let amp = EnergyAmplitude {
        grid: *grid,
        values,
        tag: AmplitudeTag::Initial,
    };
    let norm = amp.norm();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(Error::Grid(format!(
            "energy grid [{:e}, {:e}] J does not capture the packet: norm = {norm}",
            grid.e_min, grid.e_max
        )));
    }
    Ok(amp)
}

/// Reflection amplitude `ρ(E)` of the mirror.
pub fn reflection_amplitude(e: f64, c: &PhysicalConstants) -> Result<Complex64> {
    let s = scales_unchecked(c);
    airy::reflection_coefficient(e / s.e_gqs)
}

/// Apply one bounce: `c1 = ρ c0`.
pub fn bounce(c0: &EnergyAmplitude, c: &PhysicalConstants) -> Result<EnergyAmplitude> {
    if c0.tag != AmplitudeTag::Initial {
        return Err(Error::Usage("bounce expects an initial (unreflected) amplitude".into()));
    }
    Ok(EnergyAmplitude {
        grid: c0.grid,
        values: apply_reflection(c0, c)?,
        tag: AmplitudeTag::Reflected,
    })
}

/// Multiply by `ρ(E)` regardless of the tag.
pub fn apply_reflection(a: &EnergyAmplitude, c: &PhysicalConstants) -> Result<Vec<Complex64>> {
    let s = scales_unchecked(c);
    a.values
        .par_iter()
        .enumerate()
        .map(|(i, v)| Ok(airy::reflection_coefficient(a.grid.energy(i) / s.e_gqs)? * v))
        .collect()
}
