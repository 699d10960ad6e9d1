//! Command-line front end: subcommands that emit CSV or JSON.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use rayon::prelude::*;

use crate::config::{self, RunConfig, SweepAxis};
use crate::energy;
use crate::error::{Error, Result};
use crate::fisher;
use crate::propagation::{self, Pipeline};
use crate::semiclassical::{self, ModelParams, GAMMA_WARN};

#[derive(Debug, Parser)]
#[command(name = "airy-bounce", version, about = "Quantum bounce interference patterns and Fisher information on g")]
pub struct Cli {
    /// JSON configuration file; defaults apply to omitted keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "AIRY_BOUNCE_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detector pattern: exact, far-field and uniform-model densities.
    Pattern,
    /// Image momentum distribution against the far-field model.
    Momentum,
    /// Uniform-model detector pattern only.
    Model,
    /// Fisher information report as JSON.
    Fisher,
    /// Fisher information along one parameter axis.
    Sweep {
        /// Overrides `sweep.axis`.
        #[arg(long, value_enum)]
        axis: Option<SweepAxis>,
    },
}

/// Float text: 12 significant digits, shortest form.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        return "0".into();
    }
    let a = r.abs();
    if (1e-4..1e15).contains(&a) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn warn_gamma(cfg: &RunConfig) -> f64 {
    let g = semiclassical::gamma_unchecked(cfg.wavepacket.sigma_v_mps, &cfg.physical());
    if g < GAMMA_WARN {
        eprintln!("warning: gamma = {g:.2}; the uniform model needs many fringes (gamma >> 1)");
    }
    g
}

fn model_params(cfg: &RunConfig) -> Result<ModelParams> {
    warn_gamma(cfg);
    let p = cfg.params();
    ModelParams::new(p.z0, p.t_flight, p.sigma_v, &cfg.physical())
}

fn pattern_csv(z: &[f64], columns: [Option<&[f64]>; 3]) -> Result<String> {
    let mut w = csv_writer();
    w.write_record(["Z_m", "prob_density_exact", "prob_density_farfield", "prob_density_model"]).map_err(csv_err)?;
    for (i, &zi) in z.iter().enumerate() {
        let mut row = vec![format_f64(zi)];
        row.extend(columns.iter().map(|c| c.map(|v| format_f64(v[i])).unwrap_or_default()));
        w.write_record(&row).map_err(csv_err)?;
    }
    finish(w)
}

/// Detector-window CSV: `Z_m`, then exact, far-field and model densities.
pub fn run_pattern(cfg: &RunConfig) -> Result<String> {
    let c = cfg.physical();
    let p = cfg.params();
    let mp = model_params(cfg)?;
    let grid = cfg.detector_grid()?;
    let (egrid, layout) =
        propagation::detector_layout(&p, &c, &grid, cfg.grid.halfwidth_sigmas, cfg.grid.n)?;
    let run = Pipeline::run(&p, &c, &egrid, &layout)?;
    let z = grid.points();
    let exact = run.detector_density(&grid)?;
    let far = run.farfield_density(&z)?;
    let model: Vec<f64> = semiclassical::model_pattern(&z, &mp, &c)?.iter().map(|a| a * a).collect();
    pattern_csv(&z, [Some(&exact), Some(&far), Some(&model)])
}

/// Same schema as [`run_pattern`] with only the model column filled.
pub fn run_model(cfg: &RunConfig) -> Result<String> {
    let c = cfg.physical();
    let mp = model_params(cfg)?;
    let z = cfg.detector_grid()?.points();
    let model: Vec<f64> = semiclassical::model_pattern(&z, &mp, &c)?.iter().map(|a| a * a).collect();
    pattern_csv(&z, [None, None, Some(&model)])
}

/// Image velocity densities per m/s: exact and uniform model.
pub fn run_momentum(cfg: &RunConfig) -> Result<String> {
    let c = cfg.physical();
    let p = cfg.params();
    let mp = model_params(cfg)?;
    let egrid = energy::energy_grid(&p, &c, cfg.grid.halfwidth_sigmas, cfg.grid.n)?;
    let n_fft = propagation::fft_size(&p, &c, &egrid, cfg.grid.n);
    let c0 = energy::initial_amplitude(&p, &c, &egrid)?;
    let c1 = energy::bounce(&c0, &c)?;
    let psi = propagation::image_momentum(&c1, &c, &propagation::FftLayout::auto(&p, &c, n_fft))?;

    let (lo, hi) = cfg.momentum_bounds();
    let inside: Vec<usize> = (0..psi.n)
        .filter(|&i| {
            let v = psi.coordinate(i) / c.m;
            v >= lo && v <= hi
        })
        .collect();
    if inside.is_empty() {
        return Err(Error::Range(format!("velocity window [{lo}, {hi}] m/s misses the momentum grid")));
    }
    let stride = inside.len().div_ceil(cfg.grid.momentum.n_points).max(1);
    let picked: Vec<usize> = inside.into_iter().step_by(stride).collect();
    let v: Vec<f64> = picked.iter().map(|&i| psi.coordinate(i) / c.m).collect();
    let model = semiclassical::model_farfield(&v, mp.z0, mp.gamma, &c)?;

    let mut w = csv_writer();
    w.write_record(["v1_mps", "prob_density", "prob_density_model"]).map_err(csv_err)?;
    for ((&i, vi), a) in picked.iter().zip(&v).zip(&model) {
        let exact = c.m * psi.values[i].norm_sqr();
        w.write_record([format_f64(*vi), format_f64(exact), format_f64(a * a)])
            .map_err(csv_err)?;
    }
    finish(w)
}

/// Fisher report as pretty-printed JSON.
pub fn run_fisher(cfg: &RunConfig) -> Result<String> {
    warn_gamma(cfg);
    let report = fisher::fisher_report(&cfg.params(), &cfg.physical(), &cfg.fisher_numerics())?;
    let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// One evaluated point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub sqrt_i_s: f64,
    pub outcome: std::result::Result<fisher::FisherReport, Error>,
}

pub fn sweep_rows(cfg: &RunConfig, axis: SweepAxis) -> Vec<SweepRow> {
    let mut base = *cfg;
    base.sweep.axis = axis;
    base.sweep
        .values()
        .par_iter()
        .map(|&value| {
            let point = base.with_axis_value(axis, value);
            let p = point.params();
            let c = point.physical();
            SweepRow {
                value,
                sqrt_i_s: fisher::fisher_simple_unchecked(&p, &c).sqrt(),
                outcome: fisher::fisher_report(&p, &c, &point.fisher_numerics()),
            }
        })
        .collect()
}

/// CSV of `sqrt_i_z`, `sqrt_i_s`, `sqrt_i_p` and `cr_relative` along an axis.
pub fn run_sweep(cfg: &RunConfig, axis: Option<SweepAxis>) -> Result<String> {
    let axis = axis.unwrap_or(cfg.sweep.axis);
    let rows = sweep_rows(cfg, axis);
    let mut w = csv_writer();
    w.write_record([axis.column(), "sqrt_i_z", "sqrt_i_s", "sqrt_i_p", "cr_relative", "status", "error"])
        .map_err(csv_err)?;
    for row in &rows {
        let record = match &row.outcome {
            Ok(r) => [
                format_f64(row.value),
                format_f64(r.i_z.sqrt()),
                format_f64(row.sqrt_i_s),
                format_f64(r.i_p.sqrt()),
                format_f64(r.cr_relative),
                "ok".into(),
                String::new(),
            ],
            Err(e) => [
                format_f64(row.value),
                String::new(),
                format_f64(row.sqrt_i_s),
                String::new(),
                String::new(),
                "failed".into(),
                e.to_string(),
            ],
        };
        w.write_record(&record).map_err(csv_err)?;
    }
    finish(w)
}

fn execute(cli: &Cli) -> Result<String> {
    let cfg = match &cli.config {
        Some(path) => config::load_config(path)?,
        None => RunConfig::default(),
    };
    match &cli.command {
        Command::Pattern => run_pattern(&cfg),
        Command::Momentum => run_momentum(&cfg),
        Command::Model => run_model(&cfg),
        Command::Fisher => run_fisher(&cfg),
        Command::Sweep { axis } => run_sweep(&cfg, *axis),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io(e.to_string())),
    }
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(&cli)).and_then(|text| emit(&cli, &text)) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
