//! df/dt = d/dv [ xi v f + (xi k_B T / m) df/dv ] on a uniform cell grid.
//!
//! Interface fluxes use the Chang-Cooper weighting, so the sampled
//! Maxwell-Boltzmann profile is an exact discrete steady state, and the
//! zero-flux walls conserve the norm to rounding. Time stepping is TR-BDF2.

use crate::constants::CGS;
use crate::thermal::check_temperature;
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Cells across the grid.
pub const DEFAULT_CELLS: usize = 1024;
/// Half-width of the grid in thermal velocities sqrt(k_B T / m).
pub const DEFAULT_HALF_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VelocityDistribution {
    /// Cell centres, uniform.
    pub v_grid: Vec<f64>,
    /// Cell-averaged probability density.
    pub f_values: Vec<f64>,
    pub mass: f64,
    pub temperature: f64,
    pub xi: f64,
    /// xi t elapsed since the initial state.
    pub xi_t: f64,
}

fn check_params(mass: f64, temperature: f64, xi: f64) -> Result<()> {
    check_temperature(temperature)?;
    if !(mass > 0.0 && mass.is_finite()) || !(xi > 0.0 && xi.is_finite()) {
        return Err(Error::domain(format!(
            "mass and xi must be positive, got m = {mass}, xi = {xi}"
        )));
    }
    Ok(())
}

impl VelocityDistribution {
    /// Cell centres of `cells` cells over +-half_width thermal velocities.
    pub fn thermal_grid(mass: f64, temperature: f64, cells: usize, half_width: f64) -> Vec<f64> {
        let vt = (CGS.k_b * temperature / mass).sqrt();
        let dv = 2.0 * half_width * vt / cells as f64;
        (0..cells)
            .map(|i| -half_width * vt + (i as f64 + 0.5) * dv)
            .collect()
    }

    /// Normalized Gaussian of mean v0 and width sigma, sampled at cell centres.
    pub fn gaussian(
        mass: f64,
        temperature: f64,
        xi: f64,
        v0: f64,
        sigma: f64,
        cells: usize,
        half_width: f64,
    ) -> Result<Self> {
        check_params(mass, temperature, xi)?;
        if cells < 16 || !(half_width > 0.0) || !(sigma > 0.0) {
            return Err(Error::domain(
                "need at least 16 cells, positive half-width and sigma",
            ));
        }
        let v_grid = Self::thermal_grid(mass, temperature, cells, half_width);
        let f_values = v_grid
            .iter()
            .map(|v| (-(v - v0).powi(2) / (2.0 * sigma * sigma)).exp())
            .collect();
        let mut d = VelocityDistribution {
            v_grid,
            f_values,
            mass,
            temperature,
            xi,
            xi_t: 0.0,
        };
        let norm = d.norm();
        if !(norm > 0.0) {
            return Err(Error::domain("initial Gaussian lies outside the grid"));
        }
        d.f_values.iter_mut().for_each(|f| *f /= norm);
        Ok(d)
    }

    pub fn maxwell_boltzmann(
        mass: f64,
        temperature: f64,
        xi: f64,
        cells: usize,
        half_width: f64,
    ) -> Result<Self> {
        let vt = (CGS.k_b * temperature / mass).sqrt();
        Self::gaussian(mass, temperature, xi, 0.0, vt, cells, half_width)
    }

    /// sqrt(k_B T / m).
    pub fn thermal_velocity(&self) -> f64 {
        (CGS.k_b * self.temperature / self.mass).sqrt()
    }

    pub fn dv(&self) -> f64 {
        self.v_grid[1] - self.v_grid[0]
    }

    /// Trapezoid rule over the cell centres.
    pub fn norm(&self) -> f64 {
        let f = &self.f_values;
        let n = f.len();
        self.dv() * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1]))
    }

    pub fn mean(&self) -> f64 {
        self.moment(|v| v) / self.norm()
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.moment(|v| (v - m).powi(2)) / self.norm()
    }

    fn moment(&self, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.f_values.len();
        let s: f64 = self
            .v_grid
            .iter()
            .zip(&self.f_values)
            .map(|(&v, &f)| g(v) * f)
            .sum();
        let ends = 0.5 * (g(self.v_grid[0]) * self.f_values[0] + g(self.v_grid[n - 1]) * self.f_values[n - 1]);
        self.dv() * (s - ends)
    }

    /// (m / 2 pi k_B T)^{1/2} e^{-m v^2 / 2 k_B T}.
    pub fn maxwell_density(&self, v: f64) -> f64 {
        let vt2 = CGS.k_b * self.temperature / self.mass;
        (-v * v / (2.0 * vt2)).exp() / (2.0 * PI * vt2).sqrt()
    }

    /// Trapezoid L1 distance to the continuous Maxwell-Boltzmann density.
    pub fn l1_to_maxwell(&self) -> f64 {
        let d: Vec<f64> = self
            .v_grid
            .iter()
            .zip(&self.f_values)
            .map(|(&v, &f)| (f - self.maxwell_density(v)).abs())
            .collect();
        let n = d.len();
        self.dv() * (d.iter().sum::<f64>() - 0.5 * (d[0] + d[n - 1]))
    }

    fn validate(&self) -> Result<()> {
        check_params(self.mass, self.temperature, self.xi)?;
        let n = self.v_grid.len();
        if n < 16 || n != self.f_values.len() {
            return Err(Error::domain("grid and values must match with >= 16 cells"));
        }
        let dv = self.dv();
        if self
            .v_grid
            .windows(2)
            .any(|w| ((w[1] - w[0]) - dv).abs() > 1e-9 * dv)
        {
            return Err(Error::domain("velocity grid must be uniform"));
        }
        let vmax = self.v_grid[0].abs().min(self.v_grid[n - 1].abs());
        if vmax < 6.0 * self.thermal_velocity() {
            return Err(Error::domain(format!(
                "grid half-width {:.3} thermal velocities is below 6",
                vmax / self.thermal_velocity()
            )));
        }
        if self.f_values.iter().any(|&f| !(f >= 0.0)) {
            return Err(Error::domain("initial density must be non-negative"));
        }
        if (self.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::domain(format!(
                "initial density not normalized (norm {})",
                self.norm()
            )));
        }
        Ok(())
    }
}

/// Mean and variance of the Ornstein-Uhlenbeck process started from a
/// distribution with the given mean and variance.
pub fn ou_moments(mean0: f64, var0: f64, xi: f64, mass: f64, temperature: f64, t: f64) -> (f64, f64) {
    let decay = (-xi * t).exp();
    let vt2 = CGS.k_b * temperature / mass;
    (mean0 * decay, var0 * decay * decay + vt2 * (-(-2.0 * xi * t).exp_m1()))
}

/// Tridiagonal generator A with df/dt = A f, as (lower, diag, upper).
struct Generator {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Generator {
    fn new(dist: &VelocityDistribution) -> Self {
        let n = dist.v_grid.len();
        let dv = dist.dv();
        let c = dist.xi * CGS.k_b * dist.temperature / dist.mass;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        // Flux through interface i+1/2, G = b f_{i+1/2} + c (f_{i+1} - f_i)/dv,
        // with f_{i+1/2} = (1 - delta) f_{i+1} + delta f_i.
        for i in 0..n - 1 {
            let v_half = 0.5 * (dist.v_grid[i] + dist.v_grid[i + 1]);
            let b = dist.xi * v_half;
            let w = dv * b / c;
            let delta = chang_cooper_delta(w);
            let gi = b * delta - c / dv; // coefficient of f_i in G
            let gj = b * (1.0 - delta) + c / dv; // coefficient of f_{i+1}
            // df_i/dt += G / dv, df_{i+1}/dt -= G / dv.
            diag[i] += gi / dv;
            upper[i] += gj / dv;
            lower[i + 1] -= gi / dv;
            diag[i + 1] -= gj / dv;
        }
        Generator { lower, diag, upper }
    }

    /// y = (I + s A) x.
    fn apply(&self, s: f64, x: &[f64], y: &mut [f64]) {
        let n = x.len();
        for i in 0..n {
            let mut acc = x[i] + s * self.diag[i] * x[i];
            if i > 0 {
                acc += s * self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                acc += s * self.upper[i] * x[i + 1];
            }
            y[i] = acc;
        }
    }

    /// Solve (I - s A) x = rhs by the Thomas algorithm. The matrix is an
    /// M-matrix with column sums 1, so no pivoting is needed.
    fn solve(&self, s: f64, rhs: &[f64], x: &mut [f64], scratch: &mut [f64]) {
        let n = rhs.len();
        let a = |i: usize| -s * self.lower[i];
        let b = |i: usize| 1.0 - s * self.diag[i];
        let c = |i: usize| -s * self.upper[i];
        scratch[0] = c(0) / b(0);
        x[0] = rhs[0] / b(0);
        for i in 1..n {
            let m = b(i) - a(i) * scratch[i - 1];
            scratch[i] = c(i) / m;
            x[i] = (rhs[i] - a(i) * x[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            x[i] -= scratch[i] * x[i + 1];
        }
    }
}

/// 1/w - 1/(e^w - 1), with its series near w = 0.
fn chang_cooper_delta(w: f64) -> f64 {
    if w.abs() < 1e-3 {
        0.5 - w / 12.0 + w.powi(3) / 720.0
    } else {
        1.0 / w - 1.0 / w.exp_m1()
    }
}

const TR_BDF2_GAMMA: f64 = 2.0 - std::f64::consts::SQRT_2;

/// Evolve to xi t = `xi_t_final` with steps of at most `xi_dt` (both in units
/// of 1/xi). A step that would make the density negative is rejected with a
/// suggested smaller step.
pub fn fokker_planck_evolve(
    f0: &VelocityDistribution,
    xi_t_final: f64,
    xi_dt: f64,
) -> Result<VelocityDistribution> {
    Ok(fokker_planck_checkpoints(f0, &[xi_t_final], xi_dt)?
        .pop()
        .expect("one checkpoint"))
}

/// Snapshots at each of the ascending checkpoints xi t.
pub fn fokker_planck_checkpoints(
    f0: &VelocityDistribution,
    checkpoints: &[f64],
    xi_dt: f64,
) -> Result<Vec<VelocityDistribution>> {
    f0.validate()?;
    if !(xi_dt > 0.0 && xi_dt.is_finite()) {
        return Err(Error::domain(format!("time step must be positive, got {xi_dt}")));
    }
    if checkpoints.is_empty()
        || checkpoints.iter().any(|&t| !(t >= 0.0) || !t.is_finite())
        || checkpoints.windows(2).any(|w| w[1] < w[0])
    {
        return Err(Error::domain("checkpoints must be non-negative and ascending"));
    }

    let gen = Generator::new(f0);
    let n = f0.f_values.len();
    let mut f = f0.f_values.clone();
    let mut stage = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let g = TR_BDF2_GAMMA;
    let mut now = 0.0;
    let mut out = Vec::with_capacity(checkpoints.len());

    for &target in checkpoints {
        while now < target {
            let remaining = target - now;
            let step_xi = if remaining <= xi_dt * (1.0 + 1e-12) {
                remaining
            } else {
                xi_dt
            };
            let dt = step_xi / f0.xi;
            // Trapezoidal stage to t + g dt.
            gen.apply(0.5 * g * dt, &f, &mut rhs);
            gen.solve(0.5 * g * dt, &rhs, &mut stage, &mut scratch);
            // BDF2 stage to t + dt.
            let inv = 1.0 / (g * (2.0 - g));
            let w_old = (1.0 - g).powi(2) * inv;
            for i in 0..n {
                rhs[i] = inv * stage[i] - w_old * f[i];
            }
            gen.solve((1.0 - g) / (2.0 - g) * dt, &rhs, &mut next, &mut scratch);

            let peak = next.iter().fold(0.0f64, |a, &b| a.max(b));
            if next.iter().any(|&x| x < -1e-12 * peak || !x.is_finite()) {
                return Err(Error::StepRejected {
                    reason: format!("density went negative at xi t = {now:.6}"),
                    suggested_dt: 0.5 * xi_dt,
                });
            }
            std::mem::swap(&mut f, &mut next);
            now = if step_xi == remaining { target } else { now + step_xi };
        }
        out.push(VelocityDistribution {
            f_values: f.clone(),
            xi_t: target,
            ..f0.clone()
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const M: f64 = 1e-22;
    const T: f64 = 300.0;
    const XI: f64 = 2.0;

    fn vt() -> f64 {
        (CGS.k_b * T / M).sqrt()
    }

    #[test]
    fn maxwellian_is_stationary() {
        let f0 = VelocityDistribution::maxwell_boltzmann(M, T, XI, 512, 8.0).unwrap();
        let f1 = fokker_planck_evolve(&f0, 1.0, 0.05).unwrap();
        let drift = f0
            .f_values
            .iter()
            .zip(&f1.f_values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let peak = f0.f_values.iter().fold(0.0f64, |a, &b| a.max(b));
        assert!(drift / peak < 1e-6, "{}", drift / peak);
    }

    #[test]
    fn relaxes_to_maxwell_boltzmann() {
        let f0 =
            VelocityDistribution::gaussian(M, T, XI, 3.0 * vt(), 0.2 * vt(), 1024, 8.0).unwrap();
        let f = fokker_planck_evolve(&f0, 10.0, 0.01).unwrap();
        assert!(f.l1_to_maxwell() < 1e-3, "{}", f.l1_to_maxwell());
        assert!((f.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mean_decay_rate_bias() {
        // The Chang-Cooper weights slow the mean by dv^2 / 6 v_t^2 relative.
        let f0 =
            VelocityDistribution::gaussian(M, T, XI, 3.0 * vt(), 0.2 * vt(), 1024, 8.0).unwrap();
        let f = fokker_planck_evolve(&f0, 5.0, 0.005).unwrap();
        let exact = f0.mean() * (-5.0f64).exp();
        let bias = (f.mean() / exact).ln() / 5.0;
        let predicted = (f0.dv() / vt()).powi(2) / 6.0;
        assert!((bias - predicted).abs() < 0.05 * predicted, "{bias} vs {predicted}");
    }

    #[test]
    fn moments_follow_ou() {
        let f0 =
            VelocityDistribution::gaussian(M, T, XI, 3.0 * vt(), 0.2 * vt(), 4096, 8.0).unwrap();
        let (m0, v0) = (f0.mean(), f0.variance());
        let snaps = fokker_planck_checkpoints(&f0, &[0.5, 1.0, 2.0, 5.0, 10.0], 0.005).unwrap();
        for s in &snaps {
            let (m, v) = ou_moments(m0, v0, XI, M, T, s.xi_t / XI);
            assert!((s.mean() - m).abs() / m.abs() < 1e-4, "t={} {}", s.xi_t, (s.mean() - m) / m);
            assert!((s.variance() - v).abs() / v < 1e-4, "t={} {}", s.xi_t, (s.variance() - v) / v);
        }
    }

    #[test]
    fn norm_and_positivity() {
        let f0 =
            VelocityDistribution::gaussian(M, T, XI, -2.0 * vt(), 0.1 * vt(), 1024, 8.0).unwrap();
        for s in fokker_planck_checkpoints(&f0, &[0.1, 1.0, 3.0], 0.01).unwrap() {
            assert!((s.norm() - 1.0).abs() < 1e-9 * s.xi_t.max(1.0));
            assert!(s.f_values.iter().all(|&x| x >= -1e-12));
        }
    }

    #[test]
    fn rejects_narrow_grid_and_bad_step() {
        let f0 = VelocityDistribution::maxwell_boltzmann(M, T, XI, 512, 4.0).unwrap();
        assert!(fokker_planck_evolve(&f0, 1.0, 0.01).is_err());
        let f0 = VelocityDistribution::maxwell_boltzmann(M, T, XI, 512, 8.0).unwrap();
        assert!(fokker_planck_evolve(&f0, 1.0, 0.0).is_err());
    }

    #[test]
    fn delta_series_is_continuous() {
        for w in [9.99e-4, 1.001e-3, -9.99e-4] {
            let exact = 1.0 / w - 1.0 / f64::exp_m1(w);
            assert!((chang_cooper_delta(w) - exact).abs() < 1e-9);
        }
    }
}
