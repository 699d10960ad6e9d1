#![allow(dead_code)]

pub mod airy_oracle;
pub mod patterns;
pub mod quadrature;

/// Ai on the real axis for brute-force integrals.
pub fn airy_oracle_fast_ai(x: f64) -> f64 {
    airy_bounce::airy::ai_real(x).unwrap()
}

/// Relative L2 distance `‖a − b‖ / ‖b‖`.
pub fn rel_l2(a: &[num_complex::Complex64], b: &[num_complex::Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}
