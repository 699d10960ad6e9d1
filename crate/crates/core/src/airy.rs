//! Airy functions Ai and Bi on real and complex arguments.
//!
//! Evaluation is split by modulus: a Maclaurin series near the origin,
//! Poincaré asymptotic expansions far out, and Taylor stepping of the Airy
//! equation `y'' = w y` across the annulus in between. The stepping direction
//! is chosen per ray so that Ai is never the recessive solution along the
//! integration path.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_239_26;
const AIP0: f64 = -0.258_819_403_792_806_798_405;
const BI0: f64 = 0.614_926_627_446_000_735_15;
const BIP0: f64 = 0.448_288_357_353_826_357_91;

const SERIES_RADIUS: f64 = 3.5;
const ASYMPTOTIC_RADIUS: f64 = 9.5;
const BI_SERIES_LIMIT: f64 = 11.0;
const BI_MAX_ARG: f64 = 100.0;
const MAX_STEP: f64 = 0.4;
const N_COEF: usize = 90;

/// Values of Ai and Bi at a common real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryPair {
    pub ai: f64,
    pub bi: f64,
}

/// Ai, Ai', Bi and Bi' at a common real argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryValues {
    pub ai: f64,
    pub aip: f64,
    pub bi: f64,
    pub bip: f64,
}

impl AiryValues {
    pub fn pair(&self) -> AiryPair {
        AiryPair {
            ai: self.ai,
            bi: self.bi,
        }
    }

    /// `Ai Bi' - Ai' Bi`, equal to `1/pi` for exact values.
    pub fn wronskian(&self) -> f64 {
        self.ai * self.bip - self.aip * self.bi
    }
}

trait Field:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
    + Neg<Output = Self>
{
    fn one() -> Self;
    fn modulus(self) -> f64;
}

impl Field for f64 {
    fn one() -> Self {
        1.0
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Field for Complex64 {
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// The two even/odd Maclaurin solutions `f`, `g` and their derivatives.
fn maclaurin<T: Field>(z: T) -> [T; 4] {
    let z3 = z * z * z;
    let mut a = T::one();
    let mut c = z * z * 0.5;
    let mut b = z;
    let mut d = T::one();
    let (mut f, mut fp, mut g, mut gp) = (a, c, b, d);
    for k in 0..200 {
        let kf = k as f64;
        a = a * z3 / ((3.0 * kf + 2.0) * (3.0 * kf + 3.0));
        b = b * z3 / ((3.0 * kf + 3.0) * (3.0 * kf + 4.0));
        d = d * z3 / ((3.0 * kf + 1.0) * (3.0 * kf + 3.0));
        f = f + a;
        g = g + b;
        gp = gp + d;
        if k >= 1 {
            c = c * z3 / ((3.0 * kf) * (3.0 * kf + 2.0));
            fp = fp + c;
        }
        let tail = a.modulus() + b.modulus() + c.modulus() + d.modulus();
        let scale = f.modulus() + g.modulus() + fp.modulus() + gp.modulus();
        if k > 2 && tail <= 1e-18 * scale {
            break;
        }
    }
    [f, fp, g, gp]
}

/// Advance `(y, y')` of `y'' = w y` from `from` to `to` in Taylor steps.
fn step_ode<T: Field>(from: T, to: T, mut y: T, mut yp: T) -> (T, T) {
    let span = to - from;
    let n = (span.modulus() / MAX_STEP).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut z = from;
    for _ in 0..n {
        // Taylor coefficients a_k of y(z + t) in t.
        let mut a_prev2 = y;
        let mut a_prev1 = yp;
        let mut a_cur = z * y * 0.5;
        let mut hk = h; // h^(k-1) for the current a_k, k = 2
        let mut y_new = y + yp * h;
        let mut yp_new = yp;
        for k in 2..80usize {
            let kf = k as f64;
            yp_new = yp_new + a_cur * hk * kf;
            hk = hk * h;
            let term = a_cur * hk;
            y_new = y_new + term;
            let mag = term.modulus();
            let next = (z * a_prev1 + a_prev2) / (kf * (kf + 1.0));
            a_prev2 = a_prev1;
            a_prev1 = a_cur;
            a_cur = next;
            let scale = y_new.modulus() + yp_new.modulus();
            if k > 6 && mag <= 1e-19 * scale && (a_cur * hk).modulus() <= 1e-19 * scale {
                break;
            }
        }
        y = y_new;
        yp = yp_new;
        z = z + h;
    }
    (y, yp)
}

struct Coefficients {
    u: [f64; N_COEF],
    v: [f64; N_COEF],
}

fn coefficients() -> &'static Coefficients {
    static TABLE: OnceLock<Coefficients> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut u = [0.0; N_COEF];
        let mut v = [0.0; N_COEF];
        u[0] = 1.0;
        v[0] = 1.0;
        for k in 1..N_COEF {
            let kf = k as f64;
            u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / (216.0 * kf * (2.0 * kf - 1.0));
            v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
        }
        Coefficients { u, v }
    })
}

/// Sum `sum_k s^k c_k / xi^k` until terms stop shrinking or become negligible.
fn asym_sum<T: Field>(coef: &[f64], inv_xi: T, sign: f64) -> T {
    let mut sum = T::one();
    let mut pow = T::one();
    let mut last = f64::INFINITY;
    let mut s = 1.0;
    for &c in &coef[1..] {
        pow = pow * inv_xi;
        s *= sign;
        let term = pow * (c * s);
        let mag = term.modulus();
        if mag >= last {
            break;
        }
        sum = sum + term;
        last = mag;
        if mag <= 1e-17 * sum.modulus() {
            break;
        }
    }
    sum
}

/// Even and odd partial sums of the oscillatory expansion.
fn asym_even_odd<T: Field>(coef: &[f64], inv_xi: T) -> (T, T) {
    let mut even = T::one();
    let mut odd = inv_xi * coef[1];
    let mut pow = inv_xi;
    let mut last = odd.modulus();
    let mut sign = 1.0;
    let mut k = 2;
    while k + 1 < coef.len() {
        sign = -sign;
        pow = pow * inv_xi;
        let te = pow * (coef[k] * sign);
        pow = pow * inv_xi;
        let to = pow * (coef[k + 1] * sign);
        let mag = te.modulus().max(to.modulus());
        if mag >= last {
            break;
        }
        even = even + te;
        odd = odd + to;
        last = mag;
        if mag <= 1e-17 * (even.modulus() + odd.modulus()) {
            break;
        }
        k += 2;
    }
    (even, odd)
}

fn check_finite(x: f64, what: &str) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what}: non-finite argument {x}")))
    }
}

// ---------------------------------------------------------------- real axis

fn ai_real_series(x: f64) -> (f64, f64) {
    let [f, fp, g, gp] = maclaurin(x);
    (AI0 * f + AIP0 * g, AI0 * fp + AIP0 * gp)
}

fn bi_real_series(x: f64) -> (f64, f64) {
    let [f, fp, g, gp] = maclaurin(x);
    (BI0 * f + BIP0 * g, BI0 * fp + BIP0 * gp)
}

/// Ai and Ai' for x at or beyond the asymptotic radius, x > 0.
fn ai_pos_asym(x: f64) -> (f64, f64) {
    let co = coefficients();
    let sx = x.sqrt();
    let xi = 2.0 / 3.0 * x * sx;
    let q = x.sqrt().sqrt();
    let e = (-xi).exp();
    if e == 0.0 {
        return (0.0, 0.0);
    }
    let pre = e / (2.0 * PI.sqrt());
    let su = asym_sum(&co.u, 1.0 / xi, -1.0);
    let sv = asym_sum(&co.v, 1.0 / xi, -1.0);
    (pre / q * su, -pre * q * sv)
}

/// Bi and Bi' for x > 0 beyond the series limit, or a range error.
fn bi_pos_asym(x: f64) -> Result<(f64, f64)> {
    if x > BI_MAX_ARG {
        return Err(Error::Range(format!("Bi({x}) overflows scaling policy (x > {BI_MAX_ARG})")));
    }
    let co = coefficients();
    let sx = x.sqrt();
    let xi = 2.0 / 3.0 * x * sx;
    let q = sx.sqrt();
    let pre = xi.exp() / PI.sqrt();
    let su = asym_sum(&co.u, 1.0 / xi, 1.0);
    let sv = asym_sum(&co.v, 1.0 / xi, 1.0);
    Ok((pre / q * su, pre * q * sv))
}

/// Ai, Ai', Bi, Bi' at -z for z at or beyond the asymptotic radius.
fn airy_neg_asym(z: f64) -> AiryValues {
    let co = coefficients();
    let sz = z.sqrt();
    let xi = 2.0 / 3.0 * z * sz;
    let q = sz.sqrt();
    let (s, c) = (xi - FRAC_PI_4).sin_cos();
    let inv = 1.0 / xi;
    let (pu, qu) = asym_even_odd(&co.u, inv);
    let (pv, qv) = asym_even_odd(&co.v, inv);
    let rp = 1.0 / PI.sqrt();
    AiryValues {
        ai: rp / q * (c * pu + s * qu),
        aip: rp * q * (s * pv - c * qv),
        bi: rp / q * (-s * pu + c * qu),
        bip: rp * q * (c * pv + s * qv),
    }
}

fn airy_neg(x: f64) -> AiryValues {
    let z = -x;
    if z >= ASYMPTOTIC_RADIUS {
        return airy_neg_asym(z);
    }
    if z <= SERIES_RADIUS {
        let (ai, aip) = ai_real_series(x);
        let (bi, bip) = bi_real_series(x);
        return AiryValues { ai, aip, bi, bip };
    }
    // Oscillatory region: integrate outward from the series boundary.
    let x0 = -SERIES_RADIUS;
    let (a0, ap0) = ai_real_series(x0);
    let (b0, bp0) = bi_real_series(x0);
    let (ai, aip) = step_ode(x0, x, a0, ap0);
    let (bi, bip) = step_ode(x0, x, b0, bp0);
    AiryValues { ai, aip, bi, bip }
}

fn ai_pos(x: f64) -> (f64, f64) {
    if x <= SERIES_RADIUS {
        ai_real_series(x)
    } else if x >= ASYMPTOTIC_RADIUS {
        ai_pos_asym(x)
    } else {
        let (a, ap) = ai_pos_asym(ASYMPTOTIC_RADIUS);
        step_ode(ASYMPTOTIC_RADIUS, x, a, ap)
    }
}

fn bi_pos(x: f64) -> Result<(f64, f64)> {
    if x <= BI_SERIES_LIMIT {
        Ok(bi_real_series(x))
    } else {
        bi_pos_asym(x)
    }
}

/// Ai(x) for real x. Underflows gracefully to zero for large positive x.
pub fn ai_real(x: f64) -> Result<f64> {
    check_finite(x, "ai_real")?;
    Ok(if x >= 0.0 { ai_pos(x).0 } else { airy_neg(x).ai })
}

/// Ai'(x) for real x.
pub fn ai_prime_real(x: f64) -> Result<f64> {
    check_finite(x, "ai_prime_real")?;
    Ok(if x >= 0.0 { ai_pos(x).1 } else { airy_neg(x).aip })
}

/// Bi(x) for real x. Raises a range error for x > 100.
pub fn bi_real(x: f64) -> Result<f64> {
    check_finite(x, "bi_real")?;
    Ok(if x >= 0.0 { bi_pos(x)?.0 } else { airy_neg(x).bi })
}

/// Bi'(x) for real x. Raises a range error for x > 100.
pub fn bi_prime_real(x: f64) -> Result<f64> {
    check_finite(x, "bi_prime_real")?;
    Ok(if x >= 0.0 { bi_pos(x)?.1 } else { airy_neg(x).bip })
}

/// All four real Airy values at `x`.
pub fn airy_real(x: f64) -> Result<AiryValues> {
    check_finite(x, "airy_real")?;
    if x >= 0.0 {
        let (ai, aip) = ai_pos(x);
        let (bi, bip) = bi_pos(x)?;
        Ok(AiryValues { ai, aip, bi, bip })
    } else {
        Ok(airy_neg(x))
    }
}

/// Ai and Bi at `x`.
pub fn airy_pair(x: f64) -> Result<AiryPair> {
    airy_real(x).map(|v| v.pair())
}

// ------------------------------------------------------------- complex plane

fn ai_complex_series(w: Complex64) -> (Complex64, Complex64) {
    let [f, fp, g, gp] = maclaurin(w);
    (f * AI0 + g * AIP0, fp * AI0 + gp * AIP0)
}

fn ai_complex_asym(w: Complex64) -> Result<(Complex64, Complex64)> {
    let co = coefficients();
    let rp = 1.0 / PI.sqrt();
    if w.arg().abs() <= 2.0 * FRAC_PI_3 {
        let sw = w.sqrt();
        let xi = w * sw * (2.0 / 3.0);
        if -xi.re > 700.0 {
            return Err(Error::Range(format!("Ai({w}) overflows")));
        }
        if -xi.re < -745.0 {
            let zero = Complex64::new(0.0, 0.0);
            return Ok((zero, zero));
        }
        let q = sw.sqrt();
        let e = (-xi).exp() * (0.5 * rp);
        let inv = xi.inv();
        let su = asym_sum(&co.u, inv, -1.0);
        let sv = asym_sum(&co.v, inv, -1.0);
        Ok((e / q * su, -(e * q * sv)))
    } else {
        let z = -w;
        let sz = z.sqrt();
        let xi = z * sz * (2.0 / 3.0);
        let theta = xi - FRAC_PI_4;
        if theta.im.abs() > 700.0 {
            return Err(Error::Range(format!("Ai({w}) overflows")));
        }
        let q = sz.sqrt();
        let inv = xi.inv();
        let (pu, qu) = asym_even_odd(&co.u, inv);
        let (pv, qv) = asym_even_odd(&co.v, inv);
        let (s, c) = (theta.sin(), theta.cos());
        Ok(((c * pu + s * qu) * rp / q, (s * pv - c * qv) * q * rp))
    }
}

fn ai_complex_both(w: Complex64) -> Result<(Complex64, Complex64)> {
    let r = w.norm();
    if r <= SERIES_RADIUS {
        return Ok(ai_complex_series(w));
    }
    if r >= ASYMPTOTIC_RADIUS {
        return ai_complex_asym(w);
    }
    let unit = w / r;
    let (res, resp) = if w.arg().abs() <= FRAC_PI_3 {
        let start = unit * ASYMPTOTIC_RADIUS;
        let (a, ap) = ai_complex_asym(start)?;
        step_ode(start, w, a, ap)
    } else {
        let start = unit * SERIES_RADIUS;
        let (a, ap) = ai_complex_series(start);
        step_ode(start, w, a, ap)
    };
    if !(res.re.is_finite() && res.im.is_finite()) {
        return Err(Error::Range(format!("Ai({w}) overflows")));
    }
    Ok((res, resp))
}

/// Ai(w) for complex w.
pub fn ai_complex(w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("ai_complex: non-finite argument {w}")));
    }
    if w.im == 0.0 {
        return ai_real(w.re).map(|v| Complex64::new(v, 0.0));
    }
    let v = ai_complex_both(w)?.0;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(Error::Range(format!("Ai({w}) overflows")));
    }
    Ok(v)
}

/// Ai'(w) for complex w.
pub fn ai_prime_complex(w: Complex64) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("ai_prime_complex: non-finite argument {w}")));
    }
    if w.im == 0.0 {
        return ai_prime_real(w.re).map(|v| Complex64::new(v, 0.0));
    }
    ai_complex_both(w).map(|v| v.1)
}

// ------------------------------------------------------------ reflection

/// Continuous reflection phase `arg rho(eps)` for the scattering amplitude
/// `rho = -(Ai(-eps) - i Bi(-eps)) / (Ai(-eps) + i Bi(-eps))`.
///
/// The branch is fixed by continuity from `phase(0) = pi/3`; the large-energy
/// asymptote is `(4/3) eps^{3/2} + pi/2`.
pub fn reflection_phase(eps: f64) -> Result<f64> {
    check_finite(eps, "reflection_phase")?;
    let x = -eps;
    if x > BI_MAX_ARG {
        // Bi dominates; phase = 2 atan(Ai/Bi), with Ai/Bi ~ e^{-2 xi}/2.
        let co = coefficients();
        let xi = 2.0 / 3.0 * x * x.sqrt();
        let ratio = 0.5 * (-2.0 * xi).exp() * asym_sum(&co.u, 1.0 / xi, -1.0)
            / asym_sum(&co.u, 1.0 / xi, 1.0);
        return Ok(2.0 * ratio.atan());
    }
    let p = airy_pair(x)?;
    let mut theta = p.bi.atan2(p.ai);
    if eps > 2.0 {
        let e32 = eps * eps.sqrt();
        let estimate = FRAC_PI_4 - 2.0 / 3.0 * e32 - 5.0 / (48.0 * e32);
        let k = ((estimate - theta) / (2.0 * PI)).round();
        theta += 2.0 * PI * k;
    }
    Ok(PI - 2.0 * theta)
}

/// Branch constant in the asymptote `(4/3) eps^{3/2} + C` of the phase.
pub const REFLECTION_PHASE_OFFSET: f64 = std::f64::consts::FRAC_PI_2;

/// The unimodular reflection amplitude at reduced energy `eps`.
pub fn reflection_coefficient(eps: f64) -> Result<Complex64> {
    check_finite(eps, "reflection_coefficient")?;
    if -eps > BI_MAX_ARG {
        return Ok(Complex64::from_polar(1.0, reflection_phase(eps)?));
    }
    let p = airy_pair(-eps)?;
    // (Ai - iBi)/(Ai + iBi) = e^{-2iθ} with θ = arg(Ai + iBi); avoids Bi² overflow.
    let theta = p.bi.atan2(p.ai);
    Ok(-Complex64::from_polar(1.0, -2.0 * theta))
}
