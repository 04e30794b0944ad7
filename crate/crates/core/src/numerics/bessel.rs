//! Spherical Bessel functions j0, j1, j2 and the transverse/longitudinal
//! bracket that appears in the two-point angular kernel.

use super::Real;
use crate::{Error, Result};

/// Below this argument the power series is used; it converges to full
/// precision with [`SERIES_TERMS`] terms.
const SERIES_CUTOFF: f64 = 1.0;
const SERIES_TERMS: usize = 14;

/// Power-series coefficients of j_n(x) / x^n in y = x^2.
fn series_coefficients<T: Real>(order: u32) -> [T; SERIES_TERMS] {
    // j_n(x) = x^n sum_k (-1)^k y^k / (2^k k! (2n + 2k + 1)!!)
    let mut out = [T::zero(); SERIES_TERMS];
    let mut double_fact = T::one();
    for m in 1..=(2 * order + 1) {
        if m % 2 == 1 {
            double_fact = double_fact * T::lit(m as f64);
        }
    }
    let mut coef = double_fact.recip();
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = coef;
        let k1 = T::lit(k as f64 + 1.0);
        let odd = T::lit((2 * order as usize + 2 * k + 3) as f64);
        coef = -coef / (T::lit(2.0) * k1 * odd);
    }
    out
}

fn eval_series<T: Real>(coefs: &[T], y: T) -> T {
    coefs.iter().rev().fold(T::zero(), |acc, &c| acc * y + c)
}

/// Spherical Bessel function of the first kind for orders 0, 1, 2.
pub fn spherical_bessel<T: Real>(order: u32, x: T) -> Result<T> {
    if order > 2 {
        return Err(Error::domain(format!(
            "spherical_bessel supports orders 0, 1, 2; got {order}"
        )));
    }
    if x.is_nan() {
        return Err(Error::domain("spherical_bessel argument is NaN"));
    }
    let sign = if x < T::zero() && order == 1 {
        -T::one()
    } else {
        T::one()
    };
    let x = x.abs();
    Ok(sign * j_abs(order, x))
}

fn j_abs<T: Real>(order: u32, x: T) -> T {
    if x < T::lit(SERIES_CUTOFF) {
        let y = x * x;
        let s = eval_series(&series_coefficients::<T>(order), y);
        return s * x.powi(order as i32);
    }
    let (s, c) = x.sin_cos();
    match order {
        0 => s / x,
        1 => s / (x * x) - c / x,
        _ => (T::lit(3.0) / (x * x) - T::one()) * s / x - T::lit(3.0) * c / (x * x),
    }
}

/// j1(x)/x, finite at the origin (limit 1/3).
pub fn j1_over_x<T: Real>(x: T) -> T {
    let x = x.abs();
    if x < T::lit(SERIES_CUTOFF) {
        eval_series(&series_coefficients::<T>(1), x * x)
    } else {
        j_abs(1, x) / x
    }
}

/// B(x) = j0^2 + 2 (j1/x)^2 + (j0 - 2 j1/x)^2.
///
/// Uses j1/x = (j0 + j2)/3 and j0 - 2 j1/x = (j0 - 2 j2)/3 so that no
/// division by x occurs. B(0) = 4/3 and B(x) ~ 2/x^2 for large x.
pub fn kernel_bracket<T: Real>(x: T) -> T {
    let x = x.abs();
    let j0 = j_abs(0, x);
    let j2 = j_abs(2, x);
    let three = T::lit(3.0);
    let transverse = (j0 + j2) / three;
    let longitudinal = (j0 - T::lit(2.0) * j2) / three;
    j0 * j0 + T::lit(2.0) * transverse * transverse + longitudinal * longitudinal
}

/// 4/3 - B(x), computed from its Taylor series in x^2 for small x so that
/// the leading (4/9) x^2 behaviour is free of cancellation.
pub fn kernel_bracket_deficit<T: Real>(x: T) -> T {
    let x = x.abs();
    if x >= T::lit(SERIES_CUTOFF) {
        return T::lit(4.0) / T::lit(3.0) - kernel_bracket(x);
    }
    let y = x * x;
    let coefs = deficit_coefficients::<T>();
    // deficit = -sum_{m>=1} b_m y^m
    y * eval_series(&coefs[1..], y)
}

fn deficit_coefficients<T: Real>() -> [T; SERIES_TERMS] {
    let a = series_coefficients::<T>(0);
    let c2 = series_coefficients::<T>(2);
    // j2 = y * c2(y): shift by one power of y.
    let mut c = [T::zero(); SERIES_TERMS];
    c[1..].copy_from_slice(&c2[..SERIES_TERMS - 1]);
    let three = T::lit(3.0);
    let t: Vec<T> = a.iter().zip(&c).map(|(&a, &c)| (a + c) / three).collect();
    let l: Vec<T> = a
        .iter()
        .zip(&c)
        .map(|(&a, &c)| (a - T::lit(2.0) * c) / three)
        .collect();
    let mut out = [T::zero(); SERIES_TERMS];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut b = T::zero();
        for i in 0..=m {
            b = b + a[i] * a[m - i] + T::lit(2.0) * t[i] * t[m - i] + l[i] * l[m - i];
        }
        *slot = -b;
    }
    out
}
