//! Image wavefunction in momentum and position space.
//!
//! The production path runs three shifted FFTs in reduced units:
//!
//! 1. energy → momentum: `Ψ̃(κ) = e^{iκ³/3} (2π)^{-1/2} ∫ c1(ε) e^{-iκε} dε`;
//! 2. momentum → image position at `t = 0`;
//! 3. a Fresnel transform of the chirped image position to the detector.
//!
//! Step 3 is the free-fall propagator written as chirp–FFT–chirp, so the
//! detector pattern is sampled on a native grid whose spacing is set by the
//! energy step. Window offsets for each transform are found from the data
//! (the middle of the longest quiet stretch of the periodic discrete sum)
//! unless the caller pins them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::airy;
use crate::constants::{scales_unchecked, GqsScales, PhysicalConstants};
use crate::energy::{self, AmplitudeTag, EnergyAmplitude, EnergyGrid, WavepacketParams};
use crate::error::{Error, Result};
use crate::fourier::shifted_dft;

/// Relative density levels below which a sample counts as empty, tried in order.
const QUIET_LEVELS: [f64; 4] = [1e-12, 1e-11, 1e-10, 1e-9];
/// Relative density allowed at a window edge.
const EDGE_LEVEL: f64 = 1e-10;

/// Uniform sampling `start + i·step`, `i < n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub start: f64,
    pub step: f64,
    pub n: usize,
}

impl UniformGrid {
    pub fn new(start: f64, end: f64, n: usize) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start && n >= 2) {
            return Err(Error::Grid(format!("invalid grid [{start}, {end}] with {n} points")));
        }
        Ok(Self {
            start,
            step: (end - start) / (n - 1) as f64,
            n,
        })
    }

    pub fn point(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn end(&self) -> f64 {
        self.point(self.n - 1)
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Position,
    Momentum,
}

/// SI-normalized wavefunction samples on a uniform axis
/// (`∫|values|² dx = 1` over the full line).
#[derive(Debug, Clone)]
pub struct GriddedWavefunction {
    pub axis: Axis,
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub time: f64,
    pub values: Vec<Complex64>,
}

impl GriddedWavefunction {
    fn from_start(axis: Axis, start: f64, step: f64, time: f64, values: Vec<Complex64>) -> Self {
        let n = values.len();
        Self {
            axis,
            x_min: start,
            x_max: start + step * (n - 1) as f64,
            n,
            time,
            values,
        }
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n - 1) as f64
    }

    pub fn coordinate(&self, i: usize) -> f64 {
        self.x_min + self.spacing() * i as f64
    }

    pub fn grid(&self) -> UniformGrid {
        UniformGrid {
            start: self.x_min,
            step: self.spacing(),
            n: self.n,
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm_sqr()).collect()
    }

    /// Trapezoid estimate of `∫|ψ|² dx` over the samples.
    pub fn norm(&self) -> f64 {
        energy::trapezoid(self.values.iter().map(|v| v.norm_sqr()), self.spacing())
    }

    /// Grid error unless the samples hold unit probability within `tol`.
    pub fn check_norm(&self, tol: f64) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > tol {
            return Err(Error::Grid(format!(
                "grid [{:e}, {:e}] does not capture the wavefunction: norm = {n}",
                self.x_min, self.x_max
            )));
        }
        Ok(())
    }

    /// Index of the sample at `x`, which must sit on the grid.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let h = self.spacing();
        let r = (x - self.x_min) / h;
        let i = r.round();
        if i < 0.0 || i as usize >= self.n || (r - i).abs() > 1e-6 {
            return None;
        }
        Some(i as usize)
    }

    /// Values at points of `grid`, each of which must coincide with a sample.
    pub fn aligned_values(&self, grid: &UniformGrid) -> Result<Vec<Complex64>> {
        grid.points()
            .into_iter()
            .map(|x| {
                self.index_of(x).map(|i| self.values[i]).ok_or_else(|| {
                    Error::Usage(format!("point {x:e} is not on the native grid"))
                })
            })
            .collect()
    }

    /// Density interpolated at `x` (cubic through four neighbours).
    pub fn density_at(&self, x: f64) -> Option<f64> {
        let h = self.spacing();
        let r = (x - self.x_min) / h;
        if !(r >= 0.0 && r <= (self.n - 1) as f64) {
            return None;
        }
        let i = (r.floor() as usize).min(self.n - 2);
        let t = r - i as f64;
        let d = |k: isize| -> f64 {
            let j = (i as isize + k).clamp(0, self.n as isize - 1) as usize;
            self.values[j].norm_sqr()
        };
        let (p0, p1, p2, p3) = (d(-1), d(0), d(1), d(2));
        let v = p1
            + 0.5
                * t
                * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
        Some(v.max(0.0))
    }
}

/// How the offset of a transform window is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowStart {
    /// From the data.
    Auto,
    /// Exactly this SI coordinate.
    Fixed(f64),
    /// From the data, snapped to `anchor + k·spacing`.
    Anchored(f64),
}

/// FFT length and window offsets of the production pipeline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FftLayout {
    pub n_fft: usize,
    pub momentum_start: WindowStart,
    pub image_start: WindowStart,
    pub detector_start: WindowStart,
    /// Points known to lie inside each window, in reduced units.
    pub hints: WindowHints,
}

impl FftLayout {
    pub fn auto(p: &WavepacketParams, c: &PhysicalConstants, n_fft: usize) -> Self {
        Self {
            n_fft,
            momentum_start: WindowStart::Auto,
            image_start: WindowStart::Auto,
            detector_start: WindowStart::Auto,
            hints: window_hints(p, c),
        }
    }
}

/// Reduced extent of the image wave at `t = 0` that the position window
/// has to hold.
pub fn required_image_range(p: &WavepacketParams, c: &PhysicalConstants) -> f64 {
    let s = scales_unchecked(c);
    let zeta0 = p.z0 / s.l_gqs;
    let e5 = (p.mean_energy(c) + 5.0 * p.energy_spread(c)) / s.e_gqs;
    let span = 4.0 * e5 + 4.0 * (e5 * (e5 - zeta0).max(0.0)).sqrt() - zeta0;
    1.1 * span + zeta0
}

/// Smallest admissible FFT length for an energy grid.
pub fn fft_size(p: &WavepacketParams, c: &PhysicalConstants, grid: &EnergyGrid, n_min: usize) -> usize {
    let s = scales_unchecked(c);
    let de = grid.spacing() / s.e_gqs;
    let need = (required_image_range(p, c) / de).ceil() as usize;
    need.max(grid.n).max(n_min).next_power_of_two()
}

/// Native detector spacing `4π τ ℓ / (N Δε)` of a layout.
pub fn native_spacing(t_flight: f64, c: &PhysicalConstants, n_fft: usize, reduced_step: f64) -> f64 {
    let s = scales_unchecked(c);
    4.0 * PI * (t_flight / s.t_gqs) * s.l_gqs / (n_fft as f64 * reduced_step)
}

/// Energy grid whose detector samples are spaced exactly `h_nat` apart for
/// an FFT of length `n_fft`.
pub fn grid_for_native_spacing(
    p: &WavepacketParams,
    c: &PhysicalConstants,
    n_fft: usize,
    h_nat: f64,
    halfwidth_sigmas: f64,
) -> Result<EnergyGrid> {
    let s = scales_unchecked(c);
    let de = native_spacing(p.t_flight, c, n_fft, 1.0) / h_nat;
    let (lo, hi) = energy::reduced_support(p, c, halfwidth_sigmas);
    let n = (((hi - lo) / de).ceil() as usize + 1).next_power_of_two();
    if n > n_fft {
        return Err(Error::Grid(format!("energy grid of {n} nodes exceeds FFT length {n_fft}")));
    }
    EnergyGrid::with_spacing(lo * s.e_gqs, de * s.e_gqs, n)
}

/// Energy grid and layout whose native detector grid contains every point
/// of `detector`.
pub fn detector_layout(
    p: &WavepacketParams,
    c: &PhysicalConstants,
    detector: &UniformGrid,
    halfwidth_sigmas: f64,
    n_min: usize,
) -> Result<(EnergyGrid, FftLayout)> {
    let de_max = energy::max_reduced_step(p, c, halfwidth_sigmas);
    let range = required_image_range(p, c);
    let (lo, hi) = energy::reduced_support(p, c, halfwidth_sigmas);
    let mut n_fft = ((range / de_max).ceil() as usize).max(n_min).next_power_of_two();
    loop {
        let h_min = native_spacing(p.t_flight, c, n_fft, de_max);
        let stride = (detector.step / h_min).floor();
        if stride >= 1.0 {
            let h_nat = detector.step / stride;
            let de = native_spacing(p.t_flight, c, n_fft, 1.0) / h_nat;
            let n_e = (((hi - lo) / de).ceil() as usize + 1).next_power_of_two();
            if n_fft as f64 * de >= range && n_e <= n_fft {
                let grid = grid_for_native_spacing(p, c, n_fft, h_nat, halfwidth_sigmas)?;
                let layout = FftLayout {
                    detector_start: WindowStart::Anchored(detector.start),
                    ..FftLayout::auto(p, c, n_fft)
                };
                return Ok((grid, layout));
            }
        }
        n_fft *= 2;
        if n_fft > 1 << 26 {
            return Err(Error::Grid("no FFT layout fits the detector spacing".into()));
        }
    }
}

fn reduced(c: &PhysicalConstants) -> GqsScales {
    scales_unchecked(c)
}

/// Classical estimates locating the image wave: centres of the reduced
/// momentum, image-position and detector (`q`) ranges swept by launch
/// velocities within three standard deviations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowHints {
    pub kappa: f64,
    pub zeta: f64,
    pub q: f64,
}

pub fn window_hints(p: &WavepacketParams, c: &PhysicalConstants) -> WindowHints {
    let s = reduced(c);
    let zeta0 = p.z0 / s.l_gqs;
    let tau = p.t_flight / s.t_gqs;
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for k in 0..=60 {
        let v = p.v0 + p.sigma_v * (-3.0 + 0.1 * k as f64);
        let kappa0 = 0.5 * v * s.t_gqs / s.l_gqs;
        let root = (zeta0 + kappa0 * kappa0).sqrt();
        let tb = kappa0 + root;
        let kappa1 = 2.0 * root + kappa0;
        let zeta1 = -2.0 * root * tb - tb * tb;
        let vals = [kappa1, zeta1, kappa1 + zeta1 / (2.0 * tau)];
        for i in 0..3 {
            lo[i] = lo[i].min(vals[i]);
            hi[i] = hi[i].max(vals[i]);
        }
    }
    WindowHints {
        kappa: 0.5 * (lo[0] + hi[0]),
        zeta: 0.5 * (lo[1] + hi[1]),
        q: 0.5 * (lo[2] + hi[2]),
    }
}

/// Index at which to start a periodic window: the middle of the longest
/// circular stretch of negligible density, tried at increasing levels.
fn quiet_start(density: &[f64], what: &str) -> Result<usize> {
    let n = density.len();
    let peak = density.iter().cloned().fold(0.0, f64::max);
    let mut best_len = 0;
    for level in QUIET_LEVELS {
        let (len, start) = longest_quiet_run(density, level * peak);
        if len >= n / 64 {
            return Ok((start + len / 2) % n);
        }
        best_len = best_len.max(len);
    }
    Err(Error::Grid(format!(
        "{what} window too short: wavefunction wraps around ({best_len} of {n} samples quiet)"
    )))
}

/// Length and start of the longest circular run with density `<= thr`.
fn longest_quiet_run(density: &[f64], thr: f64) -> (usize, usize) {
    let n = density.len();
    let (mut best_len, mut best_start) = (0usize, 0usize);
    let (mut run, mut run_start) = (0usize, 0usize);
    for k in 0..2 * n {
        if density[k % n] <= thr {
            if run == 0 {
                run_start = k;
            }
            run += 1;
            if run > best_len {
                best_len = run.min(n);
                best_start = run_start;
            }
        } else {
            run = 0;
        }
    }
    (best_len, best_start)
}

fn check_edges(values: &[Complex64], what: &str) -> Result<()> {
    let n = values.len();
    let peak = values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let m = (n / 200).max(1);
    let edge = values[..m]
        .iter()
        .chain(&values[n - m..])
        .map(|v| v.norm_sqr())
        .fold(0.0, f64::max);
    if edge > EDGE_LEVEL * peak {
        return Err(Error::Grid(format!(
            "{what} window edges carry relative density {:e}",
            edge / peak
        )));
    }
    Ok(())
}

/// Run a windowed transform, choosing the output offset per `start`.
/// `eval(k0)` returns the outputs at `k0 + m·dk`.
fn windowed(
    start: WindowStart,
    to_reduced: f64,
    dk: f64,
    hint: f64,
    what: &str,
    eval: impl Fn(f64) -> Vec<Complex64>,
) -> Result<(f64, Vec<Complex64>)> {
    let (k0, out) = match start {
        WindowStart::Fixed(x) => {
            let k0 = x * to_reduced;
            (k0, eval(k0))
        }
        WindowStart::Auto | WindowStart::Anchored(_) => {
            let trial = match start {
                WindowStart::Anchored(a) => a * to_reduced,
                _ => 0.0,
            };
            let first = eval(trial);
            let dens: Vec<f64> = first.iter().map(|v| v.norm_sqr()).collect();
            let i0 = quiet_start(&dens, what)?;
            // The discrete sum is periodic; take the period holding `hint`.
            let period = first.len() as f64 * dk;
            let s0 = trial + i0 as f64 * dk;
            let k0 = s0 + ((hint - s0) / period).floor() * period;
            (k0, eval(k0))
        }
    };
    check_edges(&out, what)?;
    Ok((k0, out))
}

/// Momentum-space image wavefunction `Ψ̃₁(p, 0)`.
pub fn image_momentum(c1: &EnergyAmplitude, consts: &PhysicalConstants, layout: &FftLayout) -> Result<GriddedWavefunction> {
    let n = layout.n_fft;
    if !c1.grid.n.is_power_of_two() || !n.is_power_of_two() {
        return Err(Error::Usage(format!(
            "energy grid ({}) and FFT length ({n}) must be powers of two",
            c1.grid.n
        )));
    }
    if n < c1.grid.n {
        return Err(Error::Usage(format!("FFT length {n} shorter than energy grid {}", c1.grid.n)));
    }
    let s = reduced(consts);
    let de = c1.grid.spacing() / s.e_gqs;
    let e0 = c1.grid.e_min / s.e_gqs;
    let root_e = s.e_gqs.sqrt();
    let last = c1.grid.n - 1;
    let mut padded = vec![Complex64::new(0.0, 0.0); n];
    for (j, v) in c1.values.iter().enumerate() {
        let w = if j == 0 || j == last { 0.5 } else { 1.0 };
        padded[j] = v * (root_e * w);
    }
    let dk = 2.0 * PI / (n as f64 * de);
    let scale = de / (2.0 * PI).sqrt();
    let to_kappa = s.l_gqs / consts.hbar;
    let (k0, raw) = windowed(layout.momentum_start, to_kappa, dk, layout.hints.kappa, "momentum", |k0| {
        shifted_dft(&padded, e0, de, k0, -1.0)
    })?;
    let si = to_kappa.sqrt();
    let values = raw
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let k = k0 + m as f64 * dk;
            v * Complex64::from_polar(scale * si, k * k * k / 3.0)
        })
        .collect();
    Ok(GriddedWavefunction::from_start(
        Axis::Momentum,
        k0 / to_kappa,
        dk / to_kappa,
        0.0,
        values,
    ))
}

fn require_momentum(psi_p: &GriddedWavefunction) -> Result<()> {
    if psi_p.axis != Axis::Momentum || psi_p.time != 0.0 || !psi_p.n.is_power_of_two() {
        return Err(Error::Usage(
            "expected a momentum-space wavefunction at t = 0 on a power-of-two grid".into(),
        ));
    }
    Ok(())
}

/// Reduced image wave at `t = 0`: returns `(ζ'_start, Δζ', values)`.
fn image_position_reduced(
    psi_p: &GriddedWavefunction,
    consts: &PhysicalConstants,
    start: WindowStart,
    hint: f64,
) -> Result<(f64, f64, Vec<Complex64>)> {
    let s = reduced(consts);
    let to_kappa = s.l_gqs / consts.hbar;
    let k0 = psi_p.x_min * to_kappa;
    let dk = psi_p.spacing() * to_kappa;
    let n = psi_p.n;
    let dz = 2.0 * PI / (n as f64 * dk);
    let red: Vec<Complex64> = psi_p.values.iter().map(|v| v / to_kappa.sqrt()).collect();
    let scale = dk / (2.0 * PI).sqrt();
    let (z0, raw) = windowed(start, 1.0 / s.l_gqs, dz, hint, "image position", |z0| {
        shifted_dft(&red, k0, dk, z0, 1.0)
    })?;
    Ok((z0, dz, raw.into_iter().map(|v| v * scale).collect()))
}

/// Position-space image wavefunction `Ψ₁(z, 0)`.
pub fn image_position(
    psi_p: &GriddedWavefunction,
    consts: &PhysicalConstants,
    layout: &FftLayout,
) -> Result<GriddedWavefunction> {
    require_momentum(psi_p)?;
    let s = reduced(consts);
    let (z0, dz, vals) = image_position_reduced(psi_p, consts, layout.image_start, layout.hints.zeta)?;
    let root_l = s.l_gqs.sqrt();
    Ok(GriddedWavefunction::from_start(
        Axis::Position,
        z0 * s.l_gqs,
        dz * s.l_gqs,
        0.0,
        vals.into_iter().map(|v| v / root_l).collect(),
    ))
}

/// Free fall of the image wave for a time `t_flight`, sampled on the native
/// detector grid.
pub fn propagate_to_detector(
    psi_p: &GriddedWavefunction,
    t_flight: f64,
    consts: &PhysicalConstants,
    layout: &FftLayout,
) -> Result<GriddedWavefunction> {
    require_momentum(psi_p)?;
    if !(t_flight.is_finite() && t_flight > 0.0) {
        return Err(Error::Domain(format!("time of flight must be > 0, got {t_flight}")));
    }
    let s = reduced(consts);
    let tau = t_flight / s.t_gqs;
    let (zs, dz, psi1) = image_position_reduced(psi_p, consts, layout.image_start, layout.hints.zeta)?;
    let n = psi1.len();

    // The chirp must be sampled finely enough wherever the image wave lives.
    let peak = psi1.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
    let worst = psi1
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm_sqr() > 1e-14 * peak)
        .map(|(j, _)| (zs + j as f64 * dz).abs() * dz / (2.0 * tau))
        .fold(0.0, f64::max);
    if worst >= PI {
        return Err(Error::Resolution(format!(
            "free-fall chirp advances {worst:.3} rad per sample (limit π); refine the energy step or increase T"
        )));
    }

    let chirped: Vec<Complex64> = psi1
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let z = zs + j as f64 * dz;
            v * Complex64::from_polar(1.0, z * z / (4.0 * tau))
        })
        .collect();
    let dq = 2.0 * PI / (n as f64 * dz);
    // Detector Z maps to q = (Z + gT²/2) / (2τℓ).
    let half_drop = 0.5 * consts.g * t_flight * t_flight;
    let q_of = |z_si: f64| (z_si + half_drop) / (2.0 * tau * s.l_gqs);
    let start = match layout.detector_start {
        WindowStart::Auto => WindowStart::Auto,
        WindowStart::Fixed(z) => WindowStart::Fixed(q_of(z)),
        WindowStart::Anchored(z) => WindowStart::Anchored(q_of(z)),
    };
    let (q0, raw) = windowed(start, 1.0, dq, layout.hints.q, "detector", |q0| shifted_dft(&chirped, zs, dz, q0, -1.0))?;
    let scale = dz / (2.0 * PI).sqrt() / (2.0 * tau).sqrt() / s.l_gqs.sqrt();
    let values = raw
        .iter()
        .enumerate()
        .map(|(m, v)| {
            let q = q0 + m as f64 * dq;
            let xi = 2.0 * tau * q;
            let zeta = xi - tau * tau;
            let phase = -tau * zeta - tau * tau * tau / 3.0 - PI / 4.0 + xi * xi / (4.0 * tau);
            v * Complex64::from_polar(scale, phase)
        })
        .collect();
    let h = 2.0 * tau * s.l_gqs * dq;
    Ok(GriddedWavefunction::from_start(
        Axis::Position,
        2.0 * tau * s.l_gqs * q0 - half_drop,
        h,
        t_flight,
        values,
    ))
}

/// `Ψ(z, t) = ∫ c(E) ψ_E(z) e^{-iEt/ħ} dE` by trapezoid quadrature.
pub fn position_wave_direct(
    c: &EnergyAmplitude,
    t: f64,
    z_grid: &UniformGrid,
    consts: &PhysicalConstants,
) -> Result<GriddedWavefunction> {
    let s = reduced(consts);
    let tau = t / s.t_gqs;
    let de = c.grid.spacing() / s.e_gqs;
    let e0 = c.grid.e_min / s.e_gqs;
    let e_max = c.grid.e_max / s.e_gqs;
    let zeta_min = z_grid.start.min(z_grid.end()) / s.l_gqs;
    let amp_freq = match c.tag {
        AmplitudeTag::Initial => 1.0,
        AmplitudeTag::Reflected => 3.0,
    } * e_max.max(0.0).sqrt();
    let freq = tau.abs() + (e_max - zeta_min).max(0.0).sqrt() + amp_freq;
    if freq * de >= PI {
        return Err(Error::Resolution(format!(
            "energy step {de:.4} too coarse for direct quadrature (needs < {:.4})",
            PI / freq
        )));
    }
    let root_e = s.e_gqs.sqrt();
    let last = c.grid.n - 1;
    let weighted: Vec<Complex64> = c
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let w = if j == 0 || j == last { 0.5 } else { 1.0 };
            let eps = e0 + j as f64 * de;
            v * root_e * w * Complex64::from_polar(1.0, -eps * tau)
        })
        .collect();
    let scale = de / s.l_gqs.sqrt();
    let values = z_grid
        .points()
        .par_iter()
        .map(|&z| {
            let zeta = z / s.l_gqs;
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, w) in weighted.iter().enumerate() {
                let eps = e0 + j as f64 * de;
                acc += w * airy::ai_real(zeta - eps)?;
            }
            Ok(acc * scale)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GriddedWavefunction::from_start(Axis::Position, z_grid.start, z_grid.step, t, values))
}

/// Far-field map `p_Z = (m/T)(Z + gT²/2 − z_c)` with `z_c = −5 z0 / 3`.
pub fn farfield_map(z: f64, t_flight: f64, z0: f64, consts: &PhysicalConstants) -> f64 {
    let z_c = -5.0 * z0 / 3.0;
    consts.m / t_flight * (z + 0.5 * consts.g * t_flight * t_flight - z_c)
}

/// Far-field estimate `(m/T)|Ψ̃₁(p_Z, 0)|²` of the detector density.
pub fn farfield_pattern(
    psi_p: &GriddedWavefunction,
    t_flight: f64,
    z0: f64,
    z_grid: &[f64],
    consts: &PhysicalConstants,
) -> Result<Vec<f64>> {
    require_momentum(psi_p)?;
    z_grid
        .iter()
        .map(|&z| {
            let p = farfield_map(z, t_flight, z0, consts);
            psi_p
                .density_at(p)
                .map(|d| d * consts.m / t_flight)
                .ok_or_else(|| Error::Range(format!("p_Z = {p:e} at Z = {z} lies outside the momentum grid")))
        })
        .collect()
}

/// Reflected packet carried through the production pipeline.
#[derive(Debug, Clone)]
pub struct Pipeline {
    pub consts: PhysicalConstants,
    pub params: WavepacketParams,
    pub c1: EnergyAmplitude,
    pub layout: FftLayout,
    pub momentum: GriddedWavefunction,
    pub detector: GriddedWavefunction,
}

impl Pipeline {
    /// Build `c0`, bounce it and propagate with the given grid and layout.
    pub fn run(p: &WavepacketParams, c: &PhysicalConstants, grid: &EnergyGrid, layout: &FftLayout) -> Result<Self> {
        let c0 = energy::initial_amplitude(p, c, grid)?;
        let c1 = energy::bounce(&c0, c)?;
        let momentum = image_momentum(&c1, c, layout)?;
        let detector = propagate_to_detector(&momentum, p.t_flight, c, layout)?;
        Ok(Self {
            consts: *c,
            params: *p,
            c1,
            layout: *layout,
            momentum,
            detector,
        })
    }

    /// Default grid and an automatic layout.
    pub fn run_default(p: &WavepacketParams, c: &PhysicalConstants, n_min: usize) -> Result<Self> {
        let grid = energy::energy_grid(p, c, energy::DEFAULT_HALFWIDTH_SIGMAS, n_min)?;
        let n_fft = fft_size(p, c, &grid, n_min);
        Self::run(p, c, &grid, &FftLayout::auto(p, c, n_fft))
    }

    /// Grid and layout aligned with the detector window.
    pub fn run_for_detector(p: &WavepacketParams, c: &PhysicalConstants, detector: &UniformGrid, n_min: usize) -> Result<Self> {
        let (grid, layout) = detector_layout(p, c, detector, energy::DEFAULT_HALFWIDTH_SIGMAS, n_min)?;
        Self::run(p, c, &grid, &layout)
    }

    /// Exact detector density at the points of `detector`.
    pub fn detector_density(&self, detector: &UniformGrid) -> Result<Vec<f64>> {
        Ok(self.detector.aligned_values(detector)?.iter().map(|v| v.norm_sqr()).collect())
    }

    pub fn farfield_density(&self, z: &[f64]) -> Result<Vec<f64>> {
        farfield_pattern(&self.momentum, self.params.t_flight, self.params.z0, z, &self.consts)
    }
}
