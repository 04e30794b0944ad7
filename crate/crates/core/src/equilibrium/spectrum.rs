//! dn/dx = -S(n) with x = hbar omega / k_B T.
//!
//! Balancing (1/2m) D against the drag power for every alpha_I forces the
//! integrands to cancel pointwise. S = n gives Wien, S = n^2 Rayleigh-Jeans
//! and S = n^2 + n Planck.

use crate::constants::CGS;
use crate::numerics::ode::{solve, OdeConfig};
use crate::numerics::quadrature::QuadratureConfig;
use crate::polarizability::PolarizabilityModel;
use crate::thermal::{alpha_integral, check_temperature};
use crate::{Error, Result, Statistics};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumBranch {
    Wien,
    RayleighJeans,
    Planck,
}

impl SpectrumBranch {
    pub const ALL: [SpectrumBranch; 3] = [
        SpectrumBranch::Wien,
        SpectrumBranch::RayleighJeans,
        SpectrumBranch::Planck,
    ];

    /// The diffusion statistics whose balance ODE has this branch as its solution.
    pub fn statistics(self) -> Statistics {
        match self {
            SpectrumBranch::Wien => Statistics::Particle,
            SpectrumBranch::RayleighJeans => Statistics::Wave,
            SpectrumBranch::Planck => Statistics::Full,
        }
    }

    pub fn from_statistics(stats: Statistics) -> Self {
        match stats {
            Statistics::Particle => SpectrumBranch::Wien,
            Statistics::Wave => SpectrumBranch::RayleighJeans,
            Statistics::Full => SpectrumBranch::Planck,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumBranch::Wien => "wien",
            SpectrumBranch::RayleighJeans => "rayleigh_jeans",
            SpectrumBranch::Planck => "planck",
        }
    }

    /// Constant of integration fixed by n(x0) = n0.
    ///
    /// Wien: n = C e^{-x}. Rayleigh-Jeans: n = 1/(x + c). Planck:
    /// n = 1/(e^{x + mu} - 1), mu being a chemical potential in units of k_B T.
    pub fn integration_constant(self, x0: f64, n0: f64) -> f64 {
        match self {
            SpectrumBranch::Wien => n0 * x0.exp(),
            SpectrumBranch::RayleighJeans => 1.0 / n0 - x0,
            SpectrumBranch::Planck => (1.0 / n0).ln_1p() - x0,
        }
    }

    /// Constant of the member without a chemical potential: n = e^{-x},
    /// k_B T / hbar omega and the Planck occupation.
    pub fn canonical_constant(self) -> f64 {
        match self {
            SpectrumBranch::Wien => 1.0,
            SpectrumBranch::RayleighJeans | SpectrumBranch::Planck => 0.0,
        }
    }

    /// Analytic member of the family with the given constant.
    pub fn analytic(self, x: f64, constant: f64) -> f64 {
        match self {
            SpectrumBranch::Wien => constant * (-x).exp(),
            SpectrumBranch::RayleighJeans => 1.0 / (x + constant),
            SpectrumBranch::Planck => 1.0 / (x + constant).exp_m1(),
        }
    }

    /// dn/dx of the canonical member, written independently of S(n).
    fn analytic_slope(self, x: f64) -> f64 {
        match self {
            SpectrumBranch::Wien => -(-x).exp(),
            SpectrumBranch::RayleighJeans => -1.0 / (x * x),
            SpectrumBranch::Planck => {
                let e = (-x).exp();
                let d = -(-x).exp_m1();
                -e / (d * d)
            }
        }
    }
}

impl std::str::FromStr for SpectrumBranch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wien" => Ok(SpectrumBranch::Wien),
            "rayleigh_jeans" | "rayleigh-jeans" | "rj" => Ok(SpectrumBranch::RayleighJeans),
            "planck" => Ok(SpectrumBranch::Planck),
            other => Err(Error::domain(format!("unknown spectrum branch '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSolution {
    pub omega_grid: Vec<f64>,
    pub n_values: Vec<f64>,
    pub branch: SpectrumBranch,
    pub integration_constant: f64,
}

impl SpectrumSolution {
    /// Largest pointwise relative deviation from the analytic family member.
    pub fn max_rel_deviation(&self, temperature: f64) -> f64 {
        let scale = CGS.hbar / (CGS.k_b * temperature);
        self.omega_grid
            .iter()
            .zip(&self.n_values)
            .map(|(&w, &n)| {
                let exact = self.branch.analytic(w * scale, self.integration_constant);
                ((n - exact) / exact).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Integrate the balance ODE of `branch` from the anchor (omega0, n0) to every
/// point of an ascending grid, in both directions as needed.
pub fn spectrum_ode_solve(
    branch: SpectrumBranch,
    temperature: f64,
    omega0: f64,
    n0: f64,
    grid: &[f64],
) -> Result<SpectrumSolution> {
    check_temperature(temperature)?;
    if !(omega0 > 0.0 && omega0.is_finite()) || !(n0 > 0.0 && n0.is_finite()) {
        return Err(Error::domain(format!(
            "anchor needs omega0 > 0 and n0 > 0, got ({omega0}, {n0})"
        )));
    }
    if grid.is_empty() || grid.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::domain("frequency grid must be non-empty and positive"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("frequency grid must be strictly ascending"));
    }

    let scale = CGS.hbar / (CGS.k_b * temperature);
    let x0 = omega0 * scale;
    let stats = branch.statistics();
    let rhs = |_x: f64, n: f64| -stats.factor(n);
    let cfg = OdeConfig::default();

    let xs: Vec<f64> = grid.iter().map(|w| w * scale).collect();
    let split = xs.partition_point(|&x| x < x0);
    let below: Vec<f64> = xs[..split].iter().rev().copied().collect();
    let mut low = solve(rhs, x0, n0, &below, &cfg)?;
    low.reverse();
    let high = solve(rhs, x0, n0, &xs[split..], &cfg)?;
    low.extend(high);

    if low.iter().any(|&n| !(n > 0.0) || !n.is_finite()) {
        return Err(Error::Stiffness { at: x0 });
    }
    Ok(SpectrumSolution {
        omega_grid: grid.to_vec(),
        n_values: low,
        branch,
        integration_constant: branch.integration_constant(x0, n0),
    })
}

/// Both terms of the balance and their normalized sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquilibriumResidual {
    /// (1/2m) D_full per unit 1/m: (4 hbar^2/3 pi c^5) Int omega^5 alpha_I (n^2 + n).
    pub diffusion_term: f64,
    /// k_B T (4 hbar / 3 pi c^5) Int omega^5 alpha_I dn/d omega.
    pub drag_term: f64,
    /// (diffusion_term + drag_term) / diffusion_term.
    pub residual: f64,
}

/// Balance check with the Planck occupation.
pub fn equilibrium_residual(
    model: &PolarizabilityModel,
    temperature: f64,
    cfg: &QuadratureConfig<f64>,
) -> Result<EquilibriumResidual> {
    equilibrium_residual_with(model, temperature, SpectrumBranch::Planck, cfg)
}

/// Balance check with the canonical occupation of `branch` substituted
/// in both terms. The mass cancels from the normalized residual.
pub fn equilibrium_residual_with(
    model: &PolarizabilityModel,
    temperature: f64,
    branch: SpectrumBranch,
    cfg: &QuadratureConfig<f64>,
) -> Result<EquilibriumResidual> {
    model.require_absorptive()?;
    check_temperature(temperature)?;
    let n = |x: f64| branch.analytic(x, branch.canonical_constant());
    let diff = alpha_integral(
        model,
        temperature,
        5,
        |x| Statistics::Full.factor(n(x)),
        cfg,
    )?;
    let drag = alpha_integral(model, temperature, 5, |x| branch.analytic_slope(x), cfg)?;
    // Both carry (k_B T/hbar)^6; dn/d omega = (hbar/k_B T) dn/dx.
    let pre = 4.0 * CGS.hbar * CGS.hbar / (3.0 * std::f64::consts::PI * CGS.c.powi(5));
    let diffusion_term = pre * diff.value;
    let drag_term = pre * drag.value;
    Ok(EquilibriumResidual {
        diffusion_term,
        drag_term,
        residual: (diffusion_term + drag_term) / diffusion_term,
    })
}
