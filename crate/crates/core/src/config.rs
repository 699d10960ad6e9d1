//! Run configuration: JSON on disk, validated into the library's types.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::constants::{PhysicalConstants, DEFAULT_G, HBAR, HYDROGEN_MASS, STANDARD_G};
use crate::energy::{self, WavepacketParams};
use crate::error::{Error, Result};
use crate::fisher::FisherNumerics;
use crate::propagation::UniformGrid;
use crate::semiclassical;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct ConstantsSection {
    pub hbar_Js: f64,
    pub mass_kg: f64,
    pub g_mps2: f64,
    pub g0_mps2: f64,
}

impl Default for ConstantsSection {
    fn default() -> Self {
        Self {
            hbar_Js: HBAR,
            mass_kg: HYDROGEN_MASS,
            g_mps2: DEFAULT_G,
            g0_mps2: STANDARD_G,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
#[allow(non_snake_case)]
pub struct WavepacketSection {
    pub z0_m: f64,
    pub v0_mps: f64,
    pub sigma_v_mps: f64,
    pub T_s: f64,
    pub n_events: f64,
}

impl Default for WavepacketSection {
    fn default() -> Self {
        let p = WavepacketParams::default();
        Self {
            z0_m: p.z0,
            v0_mps: p.v0,
            sigma_v_mps: p.sigma_v,
            T_s: p.t_flight,
            n_events: p.n_events,
        }
    }
}

/// Detector window; omitted bounds follow the branchpoint.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectorWindow {
    pub z_min_m: Option<f64>,
    pub z_max_m: Option<f64>,
    pub n_points: usize,
}

impl Default for DetectorWindow {
    fn default() -> Self {
        Self {
            z_min_m: None,
            z_max_m: None,
            n_points: 8192,
        }
    }
}

/// Velocity window of the image momentum output; omitted bounds follow `v_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MomentumWindow {
    pub v_min_mps: Option<f64>,
    pub v_max_mps: Option<f64>,
    pub n_points: usize,
}

impl Default for MomentumWindow {
    fn default() -> Self {
        Self {
            v_min_mps: None,
            v_max_mps: None,
            n_points: 2048,
        }
    }
}

/// Energy grid and output windows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    /// Smallest energy-grid size; the step rule may ask for more.
    pub n: usize,
    /// Half-width of the energy support in units of `σ_E`.
    pub halfwidth_sigmas: f64,
    pub detector: DetectorWindow,
    pub momentum: MomentumWindow,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: energy::MIN_GRID_N,
            halfwidth_sigmas: energy::DEFAULT_HALFWIDTH_SIGMAS,
            detector: DetectorWindow::default(),
            momentum: MomentumWindow::default(),
        }
    }
}

/// Finite-difference controls of the Fisher estimators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    pub delta_g_rel: f64,
    pub cap_delta: bool,
    pub halving_tol: f64,
}

impl Default for NumericsSection {
    fn default() -> Self {
        let f = FisherNumerics::default();
        Self {
            delta_g_rel: f.delta_g_rel,
            cap_delta: f.cap_delta,
            halving_tol: f.halving_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
pub enum SweepAxis {
    T,
    #[serde(rename = "sigma_v")]
    #[value(name = "sigma_v")]
    SigmaV,
    #[serde(rename = "z0")]
    #[value(name = "z0")]
    Z0,
}

impl SweepAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweepAxis::T => "T_s",
            SweepAxis::SigmaV => "sigma_v_mps",
            SweepAxis::Z0 => "z0_m",
        }
    }

    /// Range used when the config gives no bounds.
    pub fn default_range(self) -> (f64, f64, usize) {
        match self {
            SweepAxis::T => (0.1, 1.0, 10),
            SweepAxis::SigmaV => (0.04, 0.12, 9),
            SweepAxis::Z0 => (0.5e-3, 4e-3, 8),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub axis: SweepAxis,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub n_points: Option<usize>,
    /// On a `z0` sweep, launch every point at the optimal velocity.
    pub couple_v0: bool,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            axis: SweepAxis::T,
            min: None,
            max: None,
            n_points: None,
            couple_v0: true,
        }
    }
}

impl SweepSection {
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi, n) = self.axis.default_range();
        let (lo, hi, n) = (self.min.unwrap_or(lo), self.max.unwrap_or(hi), self.n_points.unwrap_or(n));
        if n == 1 {
            return vec![lo];
        }
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }
}

/// Bounds of the single-bounce regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsSection {
    pub sigma_v_max_mps: f64,
    pub z0_max_m: f64,
}

impl Default for LimitsSection {
    fn default() -> Self {
        Self {
            sigma_v_max_mps: 0.12,
            z0_max_m: 5e-3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub constants: ConstantsSection,
    pub wavepacket: WavepacketSection,
    pub grid: GridSection,
    pub numerics: NumericsSection,
    pub sweep: SweepSection,
    pub limits: LimitsSection,
}

impl RunConfig {
    pub fn fisher_numerics(&self) -> FisherNumerics {
        FisherNumerics {
            delta_g_rel: self.numerics.delta_g_rel,
            cap_delta: self.numerics.cap_delta,
            halving_tol: self.numerics.halving_tol,
            grid_n_min: self.grid.n,
            halfwidth_sigmas: self.grid.halfwidth_sigmas,
        }
    }

    pub fn physical(&self) -> PhysicalConstants {
        PhysicalConstants {
            hbar: self.constants.hbar_Js,
            m: self.constants.mass_kg,
            g: self.constants.g_mps2,
            g0: self.constants.g0_mps2,
        }
    }

    pub fn params(&self) -> WavepacketParams {
        let w = &self.wavepacket;
        WavepacketParams {
            z0: w.z0_m,
            v0: w.v0_mps,
            sigma_v: w.sigma_v_mps,
            t_flight: w.T_s,
            n_events: w.n_events,
        }
    }

    /// Copy with one swept parameter replaced.
    pub fn with_axis_value(&self, axis: SweepAxis, value: f64) -> Self {
        let mut out = *self;
        match axis {
            SweepAxis::T => out.wavepacket.T_s = value,
            SweepAxis::SigmaV => out.wavepacket.sigma_v_mps = value,
            SweepAxis::Z0 => {
                out.wavepacket.z0_m = value;
                if self.sweep.couple_v0 {
                    out.wavepacket.v0_mps = semiclassical::optimal_v0(value, self.constants.g_mps2);
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let c = self.physical();
        let constants = [
            ("constants.hbar_Js", c.hbar),
            ("constants.mass_kg", c.m),
            ("constants.g_mps2", c.g),
            ("constants.g0_mps2", c.g0),
        ];
        for (key, v) in constants {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, format!("must be finite and > 0, got {v}")));
            }
        }
        if let Err(Error::Domain(msg)) = c.validate() {
            let key = if msg.starts_with("g0") { "constants.g0_mps2" } else { "constants.g_mps2" };
            return Err(Error::config(key, msg));
        }
        self.validate_point()?;
        self.fisher_numerics().validate()?;

        let det = &self.grid.detector;
        if det.n_points < 2 {
            return Err(Error::config("grid.detector.n_points", "must be at least 2"));
        }
        let mom = &self.grid.momentum;
        if mom.n_points < 2 {
            return Err(Error::config("grid.momentum.n_points", "must be at least 2"));
        }
        for (key, v) in [
            ("grid.detector.z_min_m", det.z_min_m),
            ("grid.detector.z_max_m", det.z_max_m),
            ("grid.momentum.v_min_mps", mom.v_min_mps),
            ("grid.momentum.v_max_mps", mom.v_max_mps),
        ] {
            if v.is_some_and(|x| !x.is_finite()) {
                return Err(Error::config(key, "must be finite"));
            }
        }
        let (lo, hi) = self.detector_bounds();
        if !(lo < hi) {
            return Err(Error::config("grid.detector.z_max_m", format!("must exceed z_min_m ({lo} >= {hi})")));
        }
        let (lo, hi) = self.momentum_bounds();
        if !(0.0 < lo && lo < hi) {
            return Err(Error::config(
                "grid.momentum.v_min_mps",
                format!("need 0 < v_min_mps < v_max_mps, got [{lo}, {hi}]"),
            ));
        }

        let s = &self.sweep;
        if s.n_points == Some(0) {
            return Err(Error::config("sweep.n_points", "must be at least 1"));
        }
        for (key, v) in [("sweep.min", s.min), ("sweep.max", s.max)] {
            if v.is_some_and(|x| !(x.is_finite() && x > 0.0)) {
                return Err(Error::config(key, "must be finite and > 0"));
            }
        }
        let values = s.values();
        if values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::config("sweep.max", "must exceed sweep.min"));
        }
        for v in values {
            self.with_axis_value(s.axis, v).validate_point().map_err(|e| match e {
                Error::Config { path, message } => Error::config(
                    "sweep",
                    format!("point {} = {v} is invalid ({path}: {message})", s.axis.column()),
                ),
                other => other,
            })?;
        }

        let l = &self.limits;
        for (key, v) in [("limits.sigma_v_max_mps", l.sigma_v_max_mps), ("limits.z0_max_m", l.z0_max_m)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, "must be finite and > 0"));
            }
        }
        Ok(())
    }

    /// Checks that depend on the wave packet only.
    fn validate_point(&self) -> Result<()> {
        let c = self.physical();
        let p = self.params();
        p.validate(&c)?;
        if p.sigma_v > self.limits.sigma_v_max_mps {
            return Err(Error::config(
                "wavepacket.sigma_v_mps",
                format!(
                    "{} exceeds the single-bounce limit limits.sigma_v_max_mps = {}",
                    p.sigma_v, self.limits.sigma_v_max_mps
                ),
            ));
        }
        if p.z0 > self.limits.z0_max_m {
            return Err(Error::config(
                "wavepacket.z0_m",
                format!("{} exceeds limits.z0_max_m = {}", p.z0, self.limits.z0_max_m),
            ));
        }
        if p.v0 > 0.0 {
            return Err(Error::config("wavepacket.v0_mps", "packet must move toward the mirror (v0 <= 0)"));
        }
        Ok(())
    }

    /// Detector window `[Z_c − 20 mm, Z_c + 60 mm]` at the paper's `σ_v T`,
    /// scaled with `σ_v T` elsewhere, unless overridden.
    pub fn detector_bounds(&self) -> (f64, f64) {
        let p = self.params();
        let c = self.physical();
        let zc = -0.5 * c.g * p.t_flight * p.t_flight + (6.0 * c.g * p.z0).sqrt() * p.t_flight - 5.0 * p.z0 / 3.0;
        let w = p.sigma_v * p.t_flight;
        let det = &self.grid.detector;
        (det.z_min_m.unwrap_or(zc - w * 20.0 / 23.7), det.z_max_m.unwrap_or(zc + w * 60.0 / 23.7))
    }

    pub fn detector_grid(&self) -> Result<UniformGrid> {
        let (lo, hi) = self.detector_bounds();
        UniformGrid::new(lo, hi, self.grid.detector.n_points)
    }

    /// Velocity window `[v_c − σ_v/2, v_c + 3.3 σ_v]` unless overridden.
    pub fn momentum_bounds(&self) -> (f64, f64) {
        let p = self.params();
        let vc = (6.0 * self.constants.g_mps2 * p.z0).sqrt();
        let m = &self.grid.momentum;
        (
            m.v_min_mps.unwrap_or((vc - 0.5 * p.sigma_v).max(0.5 * vc)),
            m.v_max_mps.unwrap_or(vc + 3.3 * p.sigma_v),
        )
    }
}

/// Parse and validate a configuration from JSON text; blank text means defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = if text.trim().is_empty() {
        RunConfig::default()
    } else {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn dump_config(cfg: &RunConfig) -> String {
    serde_json::to_string_pretty(cfg).expect("config serializes")
}
