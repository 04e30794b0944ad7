//! Dormand-Prince 5(4) embedded Runge-Kutta for scalar ODEs y' = f(x, y).

use super::Real;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_steps: usize,
}

impl<T: Real> Default for OdeConfig<T> {
    fn default() -> Self {
        OdeConfig {
            rel_tol: T::lit(1e-10),
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            max_steps: 1_000_000,
        }
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order minus embedded fourth-order weights.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Integrate from (x0, y0) and return y at each of `targets`, which must be
/// monotone in one direction away from x0. Steps land exactly on targets.
pub fn solve<T, F>(mut f: F, x0: T, y0: T, targets: &[T], cfg: &OdeConfig<T>) -> Result<Vec<T>>
where
    T: Real,
    F: FnMut(T, T) -> T,
{
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    let dir = if targets[targets.len() - 1] >= x0 {
        T::one()
    } else {
        -T::one()
    };
    let monotone = std::iter::once(&x0)
        .chain(targets.iter())
        .collect::<Vec<_>>()
        .windows(2)
        .all(|w| (*w[1] - *w[0]) * dir >= T::zero());
    if !monotone {
        return Err(Error::domain(
            "ODE output points must be monotone away from the start",
        ));
    }

    let span = (targets[targets.len() - 1] - x0).abs();
    let mut h = dir * (span * T::lit(1e-3)).max(T::epsilon());
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y);
    let mut out = Vec::with_capacity(targets.len());
    let mut steps = 0;

    for &target in targets {
        while (target - x) * dir > T::zero() {
            steps += 1;
            if steps > cfg.max_steps {
                return Err(Error::Stiffness { at: x.as_f64() });
            }
            let remaining = target - x;
            let last = (h * dir) >= remaining * dir;
            let step = if last { remaining } else { h };

            let mut k = [T::zero(); 7];
            k[0] = k1;
            for i in 1..7 {
                let mut yi = y;
                for j in 0..i {
                    yi = yi + step * T::lit(A[i][j]) * k[j];
                }
                k[i] = f(x + T::lit(C[i]) * step, yi);
            }
            // FSAL: the 7th stage is evaluated at the 5th-order solution.
            let mut y_new = y;
            for j in 0..6 {
                y_new = y_new + step * T::lit(A[6][j]) * k[j];
            }
            let mut err = T::zero();
            for j in 0..7 {
                err = err + step * T::lit(E[j]) * k[j];
            }
            let scale = cfg.abs_tol + cfg.rel_tol * y.abs().max(y_new.abs());
            let ratio = (err / scale).abs();

            if !y_new.is_finite() || !ratio.is_finite() {
                h = step * T::lit(0.25);
            } else if ratio <= T::one() {
                x = if last { target } else { x + step };
                y = y_new;
                k1 = k[6];
                let grow = if ratio == T::zero() {
                    T::lit(5.0)
                } else {
                    (T::lit(0.9) * ratio.powf(T::lit(-0.2))).min(T::lit(5.0))
                };
                if !last {
                    h = step * grow.max(T::lit(0.2));
                }
            } else {
                let shrink = (T::lit(0.9) * ratio.powf(T::lit(-0.2))).max(T::lit(0.2));
                h = step * shrink;
            }
            if h.abs() <= T::lit(16.0) * T::epsilon() * x.abs().max(T::one()) {
                return Err(Error::Stiffness { at: x.as_f64() });
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let xs: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        let ys = solve(|_x, y: f64| -y, 0.0, 1.0, &xs, &OdeConfig::default()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            assert!((y - (-x).exp()).abs() / (-x).exp() < 1e-9);
        }
    }

    #[test]
    fn backward_integration() {
        let xs = [0.5, 0.1];
        let ys = solve(
            |x: f64, _y| x.cos(),
            1.0,
            1.0_f64.sin(),
            &xs,
            &OdeConfig::default(),
        )
        .unwrap();
        assert!((ys[0] - 0.5_f64.sin()).abs() < 1e-10);
        assert!((ys[1] - 0.1_f64.sin()).abs() < 1e-10);
    }

    #[test]
    fn output_at_start_point() {
        let ys = solve(|_x, y: f64| y, 2.0, 3.0, &[2.0], &OdeConfig::default()).unwrap();
        assert_eq!(ys, vec![3.0]);
    }

    #[test]
    fn blow_up_reports_stiffness() {
        // y' = y^2, y(0) = 1 blows up at x = 1.
        let r = solve(|_x, y: f64| y * y, 0.0, 1.0, &[2.0], &OdeConfig::default());
        assert!(matches!(r, Err(Error::Stiffness { .. })));
    }

    #[test]
    fn non_monotone_targets_rejected() {
        let r = solve(|_x, y: f64| y, 0.0, 1.0, &[1.0, 0.5], &OdeConfig::default());
        assert!(r.is_err());
    }
}
