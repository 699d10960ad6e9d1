mod common;

use airy_bounce::airy;
use airy_bounce::constants::{gqs_scales, PhysicalConstants};
use airy_bounce::energy::{self, EnergyGrid, WavepacketParams, DEFAULT_HALFWIDTH_SIGMAS, MIN_GRID_N};
use airy_bounce::propagation::{self, FftLayout, Pipeline, WindowStart};
use num_complex::Complex64;
use proptest::prelude::*;

fn setup() -> (WavepacketParams, PhysicalConstants) {
    (WavepacketParams::default(), PhysicalConstants::default())
}

#[test]
fn closed_form_matches_overlap_integral_at_32_energies() {
    let (p, c) = setup();
    let s = gqs_scales(&c).unwrap();
    let (lo, _) = energy::reduced_support(&p, &c, DEFAULT_HALFWIDTH_SIGMAS);
    let mean = p.mean_energy(&c) / s.e_gqs;
    let spread = p.energy_spread(&c) / s.e_gqs;
    let mut worst = 0.0f64;
    for k in 0..32 {
        // Pseudo-random energies across the bulk of the distribution.
        let u = ((k as f64 * 0.618_033_988_75) % 1.0) * 2.0 - 1.0;
        let eps = (mean + 1.5 * spread * u).max(lo);
        let e = eps * s.e_gqs;
        let closed = energy::initial_amplitude_at(e, &p, &c).unwrap();
        let direct = common::quadrature::c0_by_overlap(&p, &c, e);
        worst = worst.max((closed - direct).norm() / direct.norm());
    }
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn norm_converges_when_doubling_n() {
    let (p, c) = setup();
    let g1 = energy::default_energy_grid(&p, &c).unwrap();
    let g2 = EnergyGrid::new(g1.e_min, g1.e_max, 2 * g1.n).unwrap();
    let n1 = energy::initial_amplitude(&p, &c, &g1).unwrap().norm();
    let n2 = energy::initial_amplitude(&p, &c, &g2).unwrap().norm();
    assert!((n1 - n2).abs() < 1e-9, "{n1} vs {n2}");
}

#[test]
fn reflection_phase_unwraps_consistently() {
    let c = PhysicalConstants::default();
    let s = gqs_scales(&c).unwrap();
    let n = 25_000;
    let mut total = 0.0;
    let mut prev = energy::reflection_amplitude(0.0, &c).unwrap();
    for k in 1..=n {
        let eps = 25.0 * k as f64 / n as f64;
        let cur = energy::reflection_amplitude(eps * s.e_gqs, &c).unwrap();
        total += (cur / prev).arg();
        prev = cur;
    }
    // Unwrapped arg from π/3 at ε = 0 against the continuous phase function.
    let start = std::f64::consts::FRAC_PI_3;
    let want = airy::reflection_phase(25.0).unwrap() - airy::reflection_phase(0.0).unwrap();
    assert!((total - want).abs() < 1e-9, "{total} vs {want}");
    assert!((airy::reflection_phase(0.0).unwrap() - start).abs() < 1e-12);
}

#[test]
fn doubling_n_leaves_detector_density_unchanged() {
    let (p, c) = setup();
    let coarse = Pipeline::run_default(&p, &c, MIN_GRID_N).unwrap();
    let n_fft = 2 * coarse.layout.n_fft;
    let h = coarse.detector.spacing();
    let g2 = propagation::grid_for_native_spacing(&p, &c, n_fft, h, DEFAULT_HALFWIDTH_SIGMAS).unwrap();
    assert!(g2.spacing() < 0.51 * coarse.c1.grid.spacing());
    let layout = FftLayout {
        detector_start: WindowStart::Fixed(coarse.detector.x_min),
        ..FftLayout::auto(&p, &c, n_fft)
    };
    let fine = Pipeline::run(&p, &c, &g2, &layout).unwrap();
    assert!((fine.detector.spacing() / coarse.detector.spacing() - 1.0).abs() < 1e-12);
    let zc = airy_bounce::semiclassical::branchpoint(p.z0, p.t_flight, c.g).unwrap().z_detector;
    let (lo, hi) = (zc - 0.020, zc + 0.060);
    let a = coarse.detector.density();
    let b = fine.detector.density();
    let mut peak = 0.0f64;
    let mut diff = 0.0f64;
    for i in 0..coarse.detector.n {
        let z = coarse.detector.coordinate(i);
        if z >= lo && z <= hi {
            peak = peak.max(a[i]);
            diff = diff.max((a[i] - b[i]).abs());
        }
    }
    assert!(diff / peak < 1e-6, "relative L∞ change {:e}", diff / peak);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reflection_is_a_pure_phase(eps in -200.0f64..3000.0) {
        let c = PhysicalConstants::default();
        let s = gqs_scales(&c).unwrap();
        let rho = energy::reflection_amplitude(eps * s.e_gqs, &c).unwrap();
        prop_assert!((rho.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_is_finite_over_the_grid(u in 0.0f64..1.0) {
        let (p, c) = setup();
        let g = energy::default_energy_grid(&p, &c).unwrap();
        let e = g.e_min + u * (g.e_max - g.e_min);
        let v: Complex64 = energy::initial_amplitude_at(e, &p, &c).unwrap();
        prop_assert!(v.re.is_finite() && v.im.is_finite());
    }
}
