//! Fringe bookkeeping shared by the pattern tests.

use airy_bounce::airy;
use airy_bounce::constants::PhysicalConstants;
use airy_bounce::semiclassical::{self, ModelParams};

/// k-th zero of `Ai(-x)` (k = 1, 2, ...), by bisection around the
/// asymptotic estimate.
pub fn ai_zero(k: usize) -> f64 {
    let t = 3.0 * std::f64::consts::PI / 8.0 * (4.0 * k as f64 - 1.0);
    let guess = t.powf(2.0 / 3.0) * (1.0 + 5.0 / 48.0 / (t * t));
    let f = |x: f64| airy::ai_real(-x).unwrap();
    let (mut a, mut b) = (guess - 0.15, guess + 0.15);
    assert!(f(a) * f(b) < 0.0, "zero {k} not bracketed");
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Detector position where the model argument reaches `target`.
pub fn z_at_delta(target: f64, mp: &ModelParams, c: &PhysicalConstants, mut lo: f64, mut hi: f64) -> f64 {
    let d = |z: f64| semiclassical::delta_with_slope(z, mp, c).unwrap().0 - target;
    assert!(d(lo) < 0.0 && d(hi) > 0.0, "target not bracketed");
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if d(m) < 0.0 {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Velocity where the far-field model argument reaches `target`.
pub fn v_at_delta(target: f64, z0: f64, c: &PhysicalConstants) -> f64 {
    let vc2 = 6.0 * c.g * z0;
    (vc2 + target * (9.0 * c.hbar * c.g / c.m).powf(2.0 / 3.0)).sqrt()
}

/// Positions of local maxima whose prominence exceeds `min_prom` times the
/// global maximum, refined by a parabola through three samples.
pub fn peaks(x: &[f64], y: &[f64], min_prom: f64) -> Vec<f64> {
    let n = y.len();
    let top = y.iter().cloned().fold(0.0, f64::max);
    let mut out = Vec::new();
    for i in 1..n - 1 {
        if !(y[i] > y[i - 1] && y[i] >= y[i + 1]) {
            continue;
        }
        let mut left = y[i];
        for j in (0..i).rev() {
            if y[j] > y[i] {
                break;
            }
            left = left.min(y[j]);
        }
        let mut right = y[i];
        for &v in &y[i + 1..] {
            if v > y[i] {
                break;
            }
            right = right.min(v);
        }
        if y[i] - left.max(right) < min_prom * top {
            continue;
        }
        let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
        let den = a - 2.0 * b + c;
        let shift = if den != 0.0 { 0.5 * (a - c) / den } else { 0.0 };
        out.push(x[i] + shift * (x[i + 1] - x[i]));
    }
    out
}

/// Trapezoid rule on a uniform grid.
pub fn trapezoid(step: f64, y: &[f64]) -> f64 {
    let n = y.len();
    step * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[n - 1]))
}

/// `max |model − exact| / max |exact|` over the samples where `keep` holds.
pub fn rel_linf(model: &[f64], exact: &[f64], keep: impl Fn(usize) -> bool) -> f64 {
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for i in (0..exact.len()).filter(|&i| keep(i)) {
        num = num.max((model[i] - exact[i]).abs());
        den = den.max(exact[i].abs());
    }
    num / den
}
