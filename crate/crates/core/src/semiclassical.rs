//! Classical bounce trajectories and the uniform Airy model of the fringes.

use std::f64::consts::PI;

use crate::airy;
use crate::constants::PhysicalConstants;
use crate::error::{Error, Result};

/// Smallest fringe count for which the uniform model is accepted.
pub const GAMMA_MIN: f64 = 10.0;
/// Fringe count below which the model is flagged as marginal.
pub const GAMMA_WARN: f64 = 30.0;

/// Coefficients of the reduced bounce-time cubic
/// `t̄³ − (3λ/2g) t̄ − Tμ/(2g) = 0` with `t̄ = t_b − T/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub l: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl CubicCoeffs {
    pub fn new(z0: f64, z: f64, t: f64, g: f64) -> Self {
        let l = 0.5 * g * t * t;
        Self {
            l,
            lambda: (l - 2.0 * (z + z0)) / 3.0,
            mu: z0 - z,
        }
    }
}

/// `D = λ³ − Lμ²`; positive where two classical paths exist.
pub fn discriminant(k: &CubicCoeffs) -> f64 {
    k.lambda.powi(3) - k.l * k.mu * k.mu
}

/// Physical bounce times at a detector point.
#[derive(Debug, Clone, PartialEq)]
pub struct BounceTimes {
    /// Roots with `0 < t_b < T`, ascending.
    pub roots: Vec<f64>,
    /// The two lowest roots of the cubic coincide.
    pub double_root: bool,
}

/// Residual `−z0(T − t) + Z t + g t (T − t)(T/2 − t)` of the bounce-time
/// equation, the expanded form of the reduced cubic.
pub fn bounce_residual(z0: f64, z: f64, t: f64, g: f64, tb: f64) -> f64 {
    -z0 * (t - tb) + z * tb + g * tb * (t - tb) * (0.5 * t - tb)
}

/// Real roots of `x³ + px + q = 0` and whether two of them coincide.
fn depressed_cubic(p: f64, q: f64, d_sign: f64, double: bool) -> Vec<f64> {
    if double {
        if p == 0.0 {
            return vec![0.0];
        }
        let single = 3.0 * q / p;
        let twin = -1.5 * q / p;
        return vec![single, twin, twin];
    }
    if d_sign > 0.0 {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (1.5 * q / p * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3).map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos()).collect()
    } else {
        let h = (0.25 * q * q + p * p * p / 27.0).max(0.0).sqrt();
        let u = (-0.5 * q + h).cbrt();
        let v = (-0.5 * q - h).cbrt();
        vec![u + v]
    }
}

/// Bounce times `t_b` of the classical paths from `(z0, 0)` to `(Z, T)`.
pub fn bounce_times(z0: f64, z: f64, t: f64, g: f64) -> BounceTimes {
    let k = CubicCoeffs::new(z0, z, t, g);
    let d = discriminant(&k);
    let scale = k.lambda.abs().powi(3) + k.l * k.mu * k.mu;
    let double = d.abs() <= 1e-13 * scale;
    let p = -1.5 * k.lambda / g;
    let q = -0.5 * t * k.mu / g;
    let mut roots: Vec<f64> = depressed_cubic(p, q, d, double)
        .into_iter()
        .map(|x| x + 0.5 * t)
        .filter(|&tb| tb > 0.0 && tb < t)
        .collect();
    roots.sort_by(f64::total_cmp);
    // A double root is reported once.
    roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * t);
    let double_root = double && roots.iter().any(|&r| (r - (0.5 * t + -1.5 * q / p)).abs() <= 1e-12 * t);
    BounceTimes { roots, double_root }
}

/// Branchpoint where the two classical paths coalesce.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchpointData {
    /// Detector position `Z_c ≃ −L + v_c T + z_c` (m).
    pub z_detector: f64,
    /// Initial image velocity `v_c = √(6 g z0)` (m/s).
    pub v_c: f64,
    /// Initial image position `z_c = −5 z0 / 3` (m).
    pub z_c: f64,
    /// Root of `D(Z) = 0` nearest the estimate (m).
    pub z_detector_exact: f64,
}

pub fn branchpoint(z0: f64, t: f64, g: f64) -> Result<BranchpointData> {
    for (name, v) in [("z0", z0), ("T", t), ("g", g)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!("{name} must be > 0, got {v}")));
        }
    }
    let l = 0.5 * g * t * t;
    let v_c = (6.0 * g * z0).sqrt();
    let z_c = -5.0 * z0 / 3.0;
    let est = -l + v_c * t + z_c;
    let d = |z: f64| discriminant(&CubicCoeffs::new(z0, z, t, g));
    // Bracket outward from the estimate, then bisect.
    let mut w = 1e-3 * (l + z0);
    let (mut a, mut b) = (est - w, est + w);
    while d(a) * d(b) > 0.0 {
        w *= 2.0;
        a = est - w;
        b = est + w;
        if w > 10.0 * (l + z0) {
            return Err(Error::Numerics("no branchpoint found near the estimate".into()));
        }
    }
    let da = d(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if d(m) * da > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(BranchpointData {
        z_detector: est,
        v_c,
        z_c,
        z_detector_exact: 0.5 * (a + b),
    })
}

/// Fringe count `γ = (3m/ħg)^{2/3} σ_v²`.
pub fn gamma(sigma_v: f64, c: &PhysicalConstants) -> Result<f64> {
    let g = gamma_unchecked(sigma_v, c);
    if !(g >= GAMMA_MIN) {
        return Err(Error::ModelValidity(format!(
            "gamma = {g:.3} below {GAMMA_MIN}: too few fringes for the uniform model"
        )));
    }
    Ok(g)
}

pub fn gamma_unchecked(sigma_v: f64, c: &PhysicalConstants) -> f64 {
    (3.0 * c.m / (c.hbar * c.g)).powf(2.0 / 3.0) * sigma_v * sigma_v
}

/// Inputs of the analytic fringe models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub z0: f64,
    pub t_flight: f64,
    pub gamma: f64,
}

impl ModelParams {
    pub fn new(z0: f64, t_flight: f64, sigma_v: f64, c: &PhysicalConstants) -> Result<Self> {
        Ok(Self {
            z0,
            t_flight,
            gamma: gamma(sigma_v, c)?,
        })
    }
}

/// `Δ(Z)` and `dΔ/dZ` of the uniform model.
pub fn delta_with_slope(z: f64, mp: &ModelParams, c: &PhysicalConstants) -> Result<(f64, f64)> {
    let k = CubicCoeffs::new(mp.z0, z, mp.t_flight, c.g);
    let lm = k.lambda * k.mu;
    if !(k.lambda > 0.0 && k.mu > 0.0) {
        return Err(Error::ModelValidity(format!(
            "Z = {z} m outside the model domain (lambda = {:e}, mu = {:e})",
            k.lambda, k.mu
        )));
    }
    let d = discriminant(&k);
    let pre = c.m.powf(2.0 / 3.0) / (2.0 * c.hbar * mp.t_flight * (3.0 * k.l).sqrt()).powf(2.0 / 3.0);
    let lm23 = lm.powf(-2.0 / 3.0);
    let (dl, dm) = (-2.0 / 3.0, -1.0);
    let dd = 3.0 * k.lambda * k.lambda * dl - 2.0 * k.l * k.mu * dm;
    let dlm = dl * k.mu + k.lambda * dm;
    let delta = pre * d * lm23;
    let slope = pre * lm23 * (dd - 2.0 / 3.0 * d * dlm / lm);
    Ok((delta, slope))
}

fn uniform_amplitude(delta: f64, slope: f64, gamma: f64) -> Result<f64> {
    let ai = airy::ai_real(-delta)?;
    Ok((8.0 * PI / gamma).powf(0.25) * slope.sqrt() * ai.abs() * (-delta / gamma).exp())
}

/// Uniform-Airy model of `|Ψ₁(Z, T)|` (m^-1/2).
pub fn model_pattern(z_grid: &[f64], mp: &ModelParams, c: &PhysicalConstants) -> Result<Vec<f64>> {
    if mp.gamma < GAMMA_MIN {
        return Err(Error::ModelValidity(format!("gamma = {} below {GAMMA_MIN}", mp.gamma)));
    }
    z_grid
        .iter()
        .map(|&z| {
            let (delta, slope) = delta_with_slope(z, mp, c)?;
            if !(slope > 0.0) {
                return Err(Error::ModelValidity(format!("dDelta/dZ <= 0 at Z = {z}")));
            }
            uniform_amplitude(delta, slope, mp.gamma)
        })
        .collect()
}

/// `Δ̃(v₁)` and its derivative for the far-field model.
pub fn delta_farfield(v1: f64, z0: f64, c: &PhysicalConstants) -> (f64, f64) {
    let vc2 = 6.0 * c.g * z0;
    let pre = c.m.powf(2.0 / 3.0) / (9.0 * c.hbar * c.g).powf(2.0 / 3.0);
    (pre * (v1 * v1 - vc2), 2.0 * pre * v1)
}

/// Uniform-Airy model of the image velocity amplitude `|Ψ̃₁(v₁)|` ((m/s)^-1/2).
pub fn model_farfield(v1_grid: &[f64], z0: f64, gamma: f64, c: &PhysicalConstants) -> Result<Vec<f64>> {
    if gamma < GAMMA_MIN {
        return Err(Error::ModelValidity(format!("gamma = {gamma} below {GAMMA_MIN}")));
    }
    v1_grid
        .iter()
        .map(|&v| {
            let (delta, slope) = delta_farfield(v, z0, c);
            if !(slope > 0.0) {
                return Err(Error::ModelValidity(format!("dDelta/dv1 <= 0 at v1 = {v}")));
            }
            uniform_amplitude(delta, slope, gamma)
        })
        .collect()
}

/// Launch velocity `−√(6 g z0)/3` giving a far-field branchpoint centred on
/// the velocity distribution.
pub fn optimal_v0(z0: f64, g: f64) -> f64 {
    -(6.0 * g * z0).sqrt() / 3.0
}
