//! Fisher information on `g` from the exact detector pattern, from the
//! image momentum distribution, and from the closed-form estimate.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::PhysicalConstants;
use crate::energy::{self, WavepacketParams};
use crate::error::{Error, Result};
use crate::propagation::{self, FftLayout, Pipeline, WindowStart};
use crate::semiclassical;

/// Controls of the finite-difference derivative with respect to `g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherNumerics {
    /// Relative step `δ` of the `g` derivative.
    pub delta_g_rel: f64,
    /// Shrink `δ` so that the pattern phase moves by at most 0.05 rad.
    pub cap_delta: bool,
    /// Largest accepted relative change of the information when `δ` is halved.
    pub halving_tol: f64,
    /// Lower bound on the energy grid size.
    pub grid_n_min: usize,
    /// Half-width of the energy support in units of `σ_E`.
    pub halfwidth_sigmas: f64,
}

impl Default for FisherNumerics {
    fn default() -> Self {
        Self {
            delta_g_rel: 1e-6,
            cap_delta: true,
            halving_tol: 0.01,
            grid_n_min: energy::MIN_GRID_N,
            halfwidth_sigmas: energy::DEFAULT_HALFWIDTH_SIGMAS,
        }
    }
}

impl FisherNumerics {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta_g_rel.is_finite() && self.delta_g_rel > 0.0 && self.delta_g_rel < 1e-2) {
            return Err(Error::config(
                "numerics.delta_g_rel",
                format!("must lie in (0, 1e-2), got {}", self.delta_g_rel),
            ));
        }
        if !(self.halving_tol > 0.0) {
            return Err(Error::config("numerics.halving_tol", "must be > 0"));
        }
        if self.grid_n_min < 1024 {
            return Err(Error::config("grid.n", "must be at least 1024"));
        }
        if !(self.halfwidth_sigmas >= 4.0) {
            return Err(Error::config("grid.halfwidth_sigmas", "must be at least 4"));
        }
        Ok(())
    }
}

/// Numerical settings echoed with a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportNumerics {
    /// Relative step actually used.
    pub delta_g_rel: f64,
    /// Energy grid size.
    pub grid_n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FisherReport {
    pub i_z: f64,
    pub i_p: f64,
    pub i_s: f64,
    /// `σ_CR / g₀` from `i_z`.
    pub cr_relative: f64,
    pub n_events: f64,
    pub numerics: ReportNumerics,
}

/// Full output of one Fisher evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherDetail {
    pub report: FisherReport,
    /// `I_p` with the `2g₀∂_g` term dropped.
    pub i_p_drift: f64,
    /// `I_Z` and `I_p` recomputed with `δ/2`.
    pub i_z_half: f64,
    pub i_p_half: f64,
}

/// `I_S = 2 (m g z0)(m σ_v²) T² / (3ħ²)`.
pub fn fisher_simple(p: &WavepacketParams, c: &PhysicalConstants) -> Result<f64> {
    semiclassical::gamma(p.sigma_v, c)?;
    Ok(fisher_simple_unchecked(p, c))
}

/// [`fisher_simple`] without the fringe-count check.
pub fn fisher_simple_unchecked(p: &WavepacketParams, c: &PhysicalConstants) -> f64 {
    2.0 * (c.m * c.g * p.z0) * (c.m * p.sigma_v * p.sigma_v) * p.t_flight * p.t_flight / (3.0 * c.hbar * c.hbar)
}

/// Relative Cramér-Rao bound `1/√(N i)`; infinite when `i = 0`.
pub fn cramer_rao(i: f64, n_events: f64) -> Result<f64> {
    if !(i >= 0.0 && i.is_finite()) {
        return Err(Error::Domain(format!("information must be finite and >= 0, got {i}")));
    }
    if !(n_events >= 1.0 && n_events.is_finite()) {
        return Err(Error::Domain(format!("n_events must be >= 1, got {n_events}")));
    }
    if i == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / (n_events * i).sqrt())
}

pub fn fisher_position(p: &WavepacketParams, c: &PhysicalConstants, numerics: &FisherNumerics) -> Result<f64> {
    Ok(fisher_detail(p, c, numerics)?.report.i_z)
}

pub fn fisher_momentum(p: &WavepacketParams, c: &PhysicalConstants, numerics: &FisherNumerics) -> Result<f64> {
    Ok(fisher_detail(p, c, numerics)?.report.i_p)
}

pub fn fisher_report(p: &WavepacketParams, c: &PhysicalConstants, numerics: &FisherNumerics) -> Result<FisherReport> {
    Ok(fisher_detail(p, c, numerics)?.report)
}

struct Amplitudes {
    detector: Vec<f64>,
    momentum: Vec<f64>,
}

fn amplitudes(run: &Pipeline) -> Amplitudes {
    Amplitudes {
        detector: run.detector.values.iter().map(|v| v.norm()).collect(),
        momentum: run.momentum.values.iter().map(|v| v.norm()).collect(),
    }
}

/// Fourth-order central difference from samples at `±h` and `±2h`.
fn five_point(m2: &[f64], m1: &[f64], p1: &[f64], p2: &[f64], h: f64) -> Vec<f64> {
    (0..m1.len())
        .map(|i| (8.0 * (p1[i] - m1[i]) - (p2[i] - m2[i])) / (12.0 * h))
        .collect()
}

/// Central differences in the interior, one-sided at the ends.
fn gradient(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|i| match i {
            0 => (f[1] - f[0]) / h,
            _ if i == n - 1 => (f[n - 1] - f[n - 2]) / h,
            _ => (f[i + 1] - f[i - 1]) / (2.0 * h),
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Evaluate `I_Z` and `I_p`, with the initial packet held fixed in SI units
/// while `g` is perturbed.
pub fn fisher_detail(p: &WavepacketParams, c: &PhysicalConstants, numerics: &FisherNumerics) -> Result<FisherDetail> {
    c.validate()?;
    p.validate(c)?;
    numerics.validate()?;
    let i_s = fisher_simple_unchecked(p, c);
    let mut delta = numerics.delta_g_rel;
    if numerics.cap_delta {
        delta = delta.min(0.05 / i_s.sqrt());
    }

    let grid = energy::energy_grid(p, c, numerics.halfwidth_sigmas, numerics.grid_n_min)?;
    let n_fft = propagation::fft_size(p, c, &grid, numerics.grid_n_min);
    let base = Pipeline::run(p, c, &grid, &FftLayout::auto(p, c, n_fft))?;
    let image = propagation::image_position(&base.momentum, c, &base.layout)?;
    let fixed = FftLayout {
        momentum_start: WindowStart::Fixed(base.momentum.x_min),
        image_start: WindowStart::Fixed(image.x_min),
        detector_start: WindowStart::Fixed(base.detector.x_min),
        ..base.layout
    };
    let h_nat = base.detector.spacing();
    let dp = base.momentum.spacing();
    let a0 = amplitudes(&base);
    drop(base);

    let steps = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
    let runs = steps
        .par_iter()
        .map(|&k| {
            let cg = c.with_g(c.g * (1.0 + k * delta));
            let grid = propagation::grid_for_native_spacing(p, &cg, n_fft, h_nat, numerics.halfwidth_sigmas)?;
            let run = Pipeline::run(p, &cg, &grid, &fixed)?;
            let aligned = close(run.detector.spacing(), h_nat, 1e-9)
                && close(run.momentum.spacing(), dp, 1e-9)
                && run.detector.n == a0.detector.len()
                && run.momentum.n == a0.momentum.len();
            if !aligned {
                return Err(Error::Numerics("perturbed run is not aligned with the base grids".into()));
            }
            Ok(amplitudes(&run))
        })
        .collect::<Result<Vec<_>>>()?;
    let [m2, m1, mh, ph, p1, p2] = &runs[..] else {
        unreachable!()
    };

    let g0 = c.g0;
    let t = p.t_flight;
    let dpsi_dp = gradient(&a0.momentum, dp);
    let info = |dz: &[f64], dm: &[f64]| {
        let i_z = (2.0 * g0).powi(2) * dz.iter().map(|d| d * d).sum::<f64>() * h_nat;
        let i_p = dm
            .iter()
            .zip(&dpsi_dp)
            .map(|(dg, dq)| (2.0 * g0 * dg + c.m * g0 * t * dq).powi(2))
            .sum::<f64>()
            * dp;
        (i_z, i_p)
    };
    let h = delta * c.g;
    let (i_z, i_p) = info(
        &five_point(&m2.detector, &m1.detector, &p1.detector, &p2.detector, h),
        &five_point(&m2.momentum, &m1.momentum, &p1.momentum, &p2.momentum, h),
    );
    let (i_z_half, i_p_half) = info(
        &five_point(&m1.detector, &mh.detector, &ph.detector, &p1.detector, 0.5 * h),
        &five_point(&m1.momentum, &mh.momentum, &ph.momentum, &p1.momentum, 0.5 * h),
    );
    for (name, a, b) in [("I_Z", i_z, i_z_half), ("I_p", i_p, i_p_half)] {
        if !close(a, b, numerics.halving_tol) {
            return Err(Error::Numerics(format!(
                "{name} changes from {a:e} to {b:e} when the g step is halved"
            )));
        }
    }
    let i_p_drift = dpsi_dp.iter().map(|d| (c.m * g0 * t * d).powi(2)).sum::<f64>() * dp;

    Ok(FisherDetail {
        report: FisherReport {
            i_z,
            i_p,
            i_s,
            cr_relative: cramer_rao(i_z, p.n_events)?,
            n_events: p.n_events,
            numerics: ReportNumerics {
                delta_g_rel: delta,
                grid_n: grid.n,
            },
        },
        i_p_drift,
        i_z_half,
        i_p_half,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_information_laws() {
        let c = PhysicalConstants::default();
        let p = WavepacketParams::default();
        let i = fisher_simple(&p, &c).unwrap();
        assert!((i.sqrt() / 3.0e4 - 1.0).abs() < 0.02, "{}", i.sqrt());
        let t2 = WavepacketParams { t_flight: 0.6, ..p };
        assert!((fisher_simple(&t2, &c).unwrap() / i - 4.0).abs() < 1e-12);
        let s2 = WavepacketParams { sigma_v: 0.158, ..p };
        assert!((fisher_simple(&s2, &c).unwrap() / i - 4.0).abs() < 1e-12);
    }

    #[test]
    fn cramer_rao_laws() {
        assert_eq!(cramer_rao(1.0, 1.0).unwrap(), 1.0);
        assert!((cramer_rao(9.25e8, 1.0).unwrap() - 3.288e-5).abs() < 1e-8);
        let a = cramer_rao(7.0, 1.0).unwrap();
        assert!((cramer_rao(7.0, 4.0).unwrap() - 0.5 * a).abs() < 1e-15);
        assert_eq!(cramer_rao(0.0, 3.0).unwrap(), f64::INFINITY);
        assert!(cramer_rao(-1.0, 1.0).is_err());
    }

    #[test]
    fn stencils() {
        let xs: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let f = |s: f64| xs.iter().map(|x| (x + s).powi(4)).collect::<Vec<_>>();
        let h = 0.01;
        let d = five_point(&f(-2.0 * h), &f(-h), &f(h), &f(2.0 * h), h);
        for (x, v) in xs.iter().zip(&d) {
            assert!((v - 4.0 * x.powi(3)).abs() < 1e-9);
        }
        let g = gradient(&xs.iter().map(|x| x * x).collect::<Vec<_>>(), 0.1);
        assert!((g[10] - 2.0).abs() < 1e-12);
    }
}
