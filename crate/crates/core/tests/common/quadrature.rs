//! Brute-force reference integrals.

use airy_bounce::constants::{gqs_scales, PhysicalConstants};
use airy_bounce::energy::{self, EnergyAmplitude, EnergyGrid, WavepacketParams};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Reflected amplitude on a fine energy grid covering `[-20, e_hi]` reduced.
pub fn fine_reflected(p: &WavepacketParams, c: &PhysicalConstants, reduced_step: f64, e_hi: f64) -> EnergyAmplitude {
    let s = gqs_scales(c).unwrap();
    let lo = -20.0;
    let n = ((e_hi - lo) / reduced_step).round() as usize + 1;
    let grid = EnergyGrid::with_spacing(lo * s.e_gqs, reduced_step * s.e_gqs, n).unwrap();
    let c0 = energy::initial_amplitude(p, c, &grid).unwrap();
    energy::bounce(&c0, c).unwrap()
}

/// Momentum wavefunction by direct summation over the energy basis:
/// `Ψ̃(p) = ∫ c(E) (2πħmg)^{-1/2} exp(-i p (E - p²/6m) / (ħmg)) dE`.
pub fn momentum_direct(c1: &EnergyAmplitude, p: f64, c: &PhysicalConstants) -> Complex64 {
    let hmg = c.hbar * c.m * c.g;
    let de = c1.grid.spacing();
    let n = c1.grid.n;
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, v) in c1.values.iter().enumerate() {
        let e = c1.grid.energy(j);
        let w = if j == 0 || j + 1 == n { 0.5 } else { 1.0 };
        let phase = -p / hmg * (e - p * p / (6.0 * c.m));
        acc += v * Complex64::from_polar(w, phase);
    }
    acc * de / (2.0 * PI * hmg).sqrt()
}

/// `c0(E) = ∫ Ψ0(z) ψ_E(z) dz` for the Gaussian packet, by Simpson's rule
/// over ±12 σ_z.
pub fn c0_by_overlap(p: &WavepacketParams, c: &PhysicalConstants, e: f64) -> Complex64 {
    let s = gqs_scales(c).unwrap();
    let sz = p.sigma_z(c);
    let n = 4000;
    let (a, b) = (p.z0 - 12.0 * sz, p.z0 + 12.0 * sz);
    let h = (b - a) / n as f64;
    let norm = (2.0 * PI * sz * sz).powf(-0.25);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        let z = a + h * i as f64;
        let w = if i == 0 || i == n {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let dz = z - p.z0;
        let psi0 = Complex64::from_polar(
            norm * (-dz * dz / (4.0 * sz * sz)).exp(),
            c.m * p.v0 * dz / c.hbar,
        );
        let basis = super::airy_oracle_fast_ai(z / s.l_gqs - e / s.e_gqs) / (s.l_gqs * s.e_gqs).sqrt();
        acc += psi0 * (w * basis);
    }
    acc * h / 3.0
}
