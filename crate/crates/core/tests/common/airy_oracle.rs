//! Slow extended-precision Airy evaluator used only as a test reference.
//!
//! Fixed-point big-integer arithmetic: a value `x` is stored as the integer
//! `round(x * 2^bits)`. The Maclaurin series is summed exactly enough that
//! cancellation at large |w| is absorbed by the working precision.

use num_bigint::{BigInt, BigUint, Sign};
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Clone)]
struct Fix {
    bits: u64,
}

impl Fix {
    fn one(&self) -> BigInt {
        BigInt::one() << self.bits
    }

    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) >> self.bits
    }

    fn div(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a << self.bits) / b
    }

    fn from_f64(&self, x: f64) -> BigInt {
        assert!(x.is_finite());
        if x == 0.0 {
            return BigInt::zero();
        }
        let b = x.to_bits();
        let sign = if b >> 63 == 1 { -1 } else { 1 };
        let exp = ((b >> 52) & 0x7ff) as i64;
        let frac = b & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        let m = BigInt::from(mant) * sign;
        let shift = self.bits as i64 + e;
        if shift >= 0 {
            m << shift as u64
        } else {
            m >> (-shift) as u64
        }
    }

    fn to_f64(&self, x: &BigInt) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let nb = x.bits();
        let (m, shift) = if nb > 64 {
            (x >> (nb - 64), (nb - 64) as i64)
        } else {
            (x.clone(), 0)
        };
        let mf = m.to_f64().unwrap();
        let e = shift - self.bits as i64;
        // Split the exponent so intermediate powers stay representable.
        let half = e / 2;
        mf * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    fn sqrt(&self, x: &BigInt) -> BigInt {
        let u: BigUint = (x << self.bits).to_biguint().unwrap();
        BigInt::from_biguint(Sign::Plus, u.sqrt())
    }

    fn cbrt(&self, x: &BigInt) -> BigInt {
        let u: BigUint = (x << (2 * self.bits)).to_biguint().unwrap();
        BigInt::from_biguint(Sign::Plus, u.nth_root(3))
    }

    /// arctan(1/n) by its Taylor series.
    fn atan_inv(&self, n: u64) -> BigInt {
        let n2 = BigInt::from(n * n);
        let mut term = self.one() / BigInt::from(n);
        let mut sum = term.clone();
        let mut k = 1u64;
        loop {
            term = -term / &n2;
            let t = &term / BigInt::from(2 * k + 1);
            if t.is_zero() {
                break;
            }
            sum += t;
            k += 1;
        }
        sum
    }

    fn pi(&self) -> BigInt {
        // Machin: pi/4 = 4 atan(1/5) - atan(1/239)
        (self.atan_inv(5) * 16) - (self.atan_inv(239) * 4)
    }

    fn agm(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let (mut a, mut b) = (a.clone(), b.clone());
        let eps = BigInt::from(4);
        while (&a - &b).abs() > eps {
            let an = (&a + &b) >> 1u32;
            let bn = self.sqrt(&self.mul(&a, &b));
            a = an;
            b = bn;
        }
        a
    }

    /// (Ai(0), Ai'(0)).
    fn airy_origin(&self) -> (BigInt, BigInt) {
        let one = self.one();
        let pi = self.pi();
        let s2 = self.sqrt(&(&one * 2));
        let s3 = self.sqrt(&(&one * 3));
        let s6 = self.sqrt(&(&one * 6));
        // K(k) with k = sin 15 deg; complementary modulus cos 15 deg.
        let cos15 = (&s6 + &s2) >> 2u32;
        let agm = self.agm(&one, &cos15);
        let kk = self.div(&pi, &(agm * 2));
        // Gamma(1/3)^3 = 2^{7/3} pi K / 3^{1/4}
        let two_13 = self.cbrt(&(&one * 2));
        let three_14 = self.sqrt(&s3);
        let g3 = self.div(&self.mul(&self.mul(&(two_13 * 4), &pi), &kk), &three_14);
        let gamma13 = self.cbrt(&g3);
        let three_16 = self.cbrt(&self.sqrt(&(&one * 3)));
        let three_13 = self.cbrt(&(&one * 3));
        let ai0 = self.div(&gamma13, &self.mul(&three_16, &(&pi * 2)));
        let aip0 = -self.div(&one, &self.mul(&three_13, &gamma13));
        (ai0, aip0)
    }

    fn sqrt3(&self) -> BigInt {
        self.sqrt(&(self.one() * 3))
    }
}

type C = (BigInt, BigInt);

fn cmul(fx: &Fix, a: &C, b: &C) -> C {
    (
        fx.mul(&a.0, &b.0) - fx.mul(&a.1, &b.1),
        fx.mul(&a.0, &b.1) + fx.mul(&a.1, &b.0),
    )
}

fn cdiv_int(a: &C, n: u64) -> C {
    let n = BigInt::from(n);
    (&a.0 / &n, &a.1 / &n)
}

fn bits_for(modulus: f64) -> u64 {
    (1.9236 * modulus.powf(1.5) + 96.0).ceil() as u64
}

/// Maclaurin pair f, g summed at fixed point.
fn series(fx: &Fix, z: &C) -> (C, C) {
    let z3 = cmul(fx, &cmul(fx, z, z), z);
    let one = fx.one();
    let mut a: C = (one.clone(), BigInt::zero());
    let mut b: C = z.clone();
    let mut f = a.clone();
    let mut g = b.clone();
    let mut k = 0u64;
    loop {
        a = cdiv_int(&cmul(fx, &a, &z3), (3 * k + 2) * (3 * k + 3));
        b = cdiv_int(&cmul(fx, &b, &z3), (3 * k + 3) * (3 * k + 4));
        f = (f.0 + &a.0, f.1 + &a.1);
        g = (g.0 + &b.0, g.1 + &b.1);
        k += 1;
        if a.0.is_zero() && a.1.is_zero() && b.0.is_zero() && b.1.is_zero() {
            break;
        }
    }
    (f, g)
}

/// Ai(w) with close to full double accuracy.
pub fn ai(w: Complex64) -> Complex64 {
    let fx = Fix {
        bits: bits_for(w.norm()),
    };
    let z = (fx.from_f64(w.re), fx.from_f64(w.im));
    let (ai0, aip0) = fx.airy_origin();
    let (f, g) = series(&fx, &z);
    let re = fx.mul(&ai0, &f.0) + fx.mul(&aip0, &g.0);
    let im = fx.mul(&ai0, &f.1) + fx.mul(&aip0, &g.1);
    Complex64::new(fx.to_f64(&re), fx.to_f64(&im))
}

pub fn ai_real(x: f64) -> f64 {
    ai(Complex64::new(x, 0.0)).re
}

/// Bi(x) for real x.
pub fn bi_real(x: f64) -> f64 {
    let fx = Fix {
        bits: bits_for(x.abs()),
    };
    let z = (fx.from_f64(x), BigInt::zero());
    let (ai0, aip0) = fx.airy_origin();
    let s3 = fx.sqrt3();
    let (f, g) = series(&fx, &z);
    let v = fx.mul(&s3, &(fx.mul(&ai0, &f.0) - fx.mul(&aip0, &g.0)));
    fx.to_f64(&v)
}
