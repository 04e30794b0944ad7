//! Complex polarizabilities and Rayleigh scattering.
//!
//! Time dependence is e^{-i omega t}, so absorption shows up as Im alpha > 0.

use crate::constants::CGS;
use crate::rate::relative_difference;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PolarizabilityModel {
    /// Free charge with Abraham-Lorentz radiation reaction:
    /// alpha = -(e^2/m) / (omega^2 + i tau omega^3).
    Electron { mass: f64, charge: f64, tau: f64 },
    /// Small dielectric sphere, alpha = a^3 (eps - 1)/(eps + 2).
    Sphere { radius: f64, epsilon: Complex64 },
    /// Two-level atom in the rotating-wave approximation,
    /// alpha = (mu^2/3 hbar)(p1 - p2)/(omega0 - omega - i beta).
    TwoLevel {
        omega0: f64,
        dipole: f64,
        linewidth: f64,
        p1: f64,
        p2: f64,
    },
}

/// alpha_I as used in rate formulas, with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbsorptivePart {
    pub value: f64,
    /// Value came from the optical theorem because Im alpha vanished.
    pub radiative: bool,
}

impl AbsorptivePart {
    /// Negative alpha_I: population inversion.
    pub fn is_gain(&self) -> bool {
        self.value < 0.0
    }
}

/// Total Rayleigh cross section from |alpha|^2 and from alpha_I.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RayleighCrossSection {
    /// (8 pi / 3) k^4 |alpha|^2.
    pub scattering: f64,
    /// (4 pi omega / c) alpha_I.
    pub extinction: f64,
}

impl RayleighCrossSection {
    pub fn value(&self) -> f64 {
        self.scattering
    }

    pub fn rel_diff(&self) -> f64 {
        relative_difference(self.scattering, self.extinction)
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {x}"
        )))
    }
}

impl PolarizabilityModel {
    /// Free electron with CODATA mass and charge.
    pub fn electron() -> Self {
        Self::charged_particle(CGS.m_e, CGS.e_charge).expect("constants are positive")
    }

    /// Free point charge; tau = 2 q^2 / 3 m c^3.
    pub fn charged_particle(mass: f64, charge: f64) -> Result<Self> {
        positive("mass", mass)?;
        positive("|charge|", charge.abs())?;
        Ok(PolarizabilityModel::Electron {
            mass,
            charge,
            tau: CGS.radiation_reaction_time(mass, charge),
        })
    }

    pub fn sphere(radius: f64, epsilon: Complex64) -> Result<Self> {
        positive("radius", radius)?;
        if !(epsilon.re.is_finite() && epsilon.im.is_finite()) {
            return Err(Error::domain("epsilon must be finite"));
        }
        if epsilon.im < 0.0 {
            return Err(Error::domain("Im epsilon must be non-negative"));
        }
        if (epsilon + 2.0).norm() == 0.0 {
            return Err(Error::domain("epsilon = -2 is the Froehlich pole"));
        }
        Ok(PolarizabilityModel::Sphere { radius, epsilon })
    }

    pub fn two_level(omega0: f64, dipole: f64, linewidth: f64, p1: f64, p2: f64) -> Result<Self> {
        positive("omega0", omega0)?;
        positive("dipole", dipole)?;
        positive("linewidth", linewidth)?;
        for (name, p) in [("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if (p1 + p2 - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!(
                "p1 + p2 must equal 1, got {}",
                p1 + p2
            )));
        }
        Ok(PolarizabilityModel::TwoLevel {
            omega0,
            dipole,
            linewidth,
            p1,
            p2,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            PolarizabilityModel::Electron { .. } => "electron",
            PolarizabilityModel::Sphere { .. } => "sphere",
            PolarizabilityModel::TwoLevel { .. } => "two_level",
        }
    }

    /// Particle mass where the model defines one.
    pub fn mass(&self) -> Option<f64> {
        match *self {
            PolarizabilityModel::Electron { mass, .. } => Some(mass),
            _ => None,
        }
    }

    /// alpha(omega) for omega > 0.
    pub fn alpha(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!(
                "omega must be positive, got {omega}"
            )));
        }
        Ok(self.alpha_unchecked(omega))
    }

    /// alpha at any non-zero real frequency, using alpha(-omega) = alpha*(omega).
    pub fn alpha_signed(&self, omega: f64) -> Result<Complex64> {
        if omega < 0.0 {
            self.alpha(-omega).map(|a| a.conj())
        } else {
            self.alpha(omega)
        }
    }

    pub(crate) fn alpha_unchecked(&self, omega: f64) -> Complex64 {
        match *self {
            PolarizabilityModel::Electron { mass, charge, tau } => {
                let denom = Complex64::new(omega * omega, tau * omega.powi(3));
                -(charge * charge / mass) / denom
            }
            PolarizabilityModel::Sphere { radius, epsilon } => {
                radius.powi(3) * (epsilon - 1.0) / (epsilon + 2.0)
            }
            PolarizabilityModel::TwoLevel {
                omega0,
                dipole,
                linewidth,
                p1,
                p2,
            } => {
                let strength = dipole * dipole / (3.0 * CGS.hbar) * (p1 - p2);
                strength / Complex64::new(omega0 - omega, -linewidth)
            }
        }
    }

    /// alpha_I, falling back to the optical-theorem value (2/3)(omega/c)^3 |alpha|^2
    /// where Im alpha vanishes. Negative values are returned, flagged by
    /// [`AbsorptivePart::is_gain`].
    pub fn alpha_i_effective(&self, omega: f64) -> Result<AbsorptivePart> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::domain(format!(
                "omega must be positive, got {omega}"
            )));
        }
        let a = self.alpha_unchecked(omega);
        if a.im != 0.0 {
            return Ok(AbsorptivePart {
                value: a.im,
                radiative: false,
            });
        }
        Ok(AbsorptivePart {
            value: radiative_alpha_i(omega, a.norm_sqr()),
            radiative: true,
        })
    }

    /// Fast alpha_I for integrands; `omega > 0` is the caller's job.
    #[inline]
    pub(crate) fn alpha_i(&self, omega: f64) -> f64 {
        match *self {
            PolarizabilityModel::Electron { mass, charge, tau } => {
                let t = tau * omega;
                charge * charge / mass * tau / (omega * (1.0 + t * t))
            }
            PolarizabilityModel::TwoLevel {
                omega0,
                dipole,
                linewidth,
                p1,
                p2,
            } => {
                let d = omega0 - omega;
                dipole * dipole / (3.0 * CGS.hbar) * (p1 - p2) * linewidth
                    / (d * d + linewidth * linewidth)
            }
            PolarizabilityModel::Sphere { .. } => {
                let a = self.alpha_unchecked(omega);
                if a.im != 0.0 {
                    a.im
                } else {
                    radiative_alpha_i(omega, a.norm_sqr())
                }
            }
        }
    }

    /// Small-frequency form c sigma_T / (4 pi omega) for a free charge.
    pub fn electron_alpha_i_approx(&self, omega: f64) -> Option<f64> {
        match *self {
            PolarizabilityModel::Electron { mass, charge, tau } => {
                Some(charge * charge * tau / (mass * omega))
            }
            _ => None,
        }
    }

    /// Line centre and half-width of a resonant model.
    pub fn resonance(&self) -> Option<(f64, f64)> {
        match *self {
            PolarizabilityModel::TwoLevel {
                omega0, linewidth, ..
            } => Some((omega0, linewidth)),
            _ => None,
        }
    }

    /// alpha at omega = omega0 + delta, with the detuning passed separately
    /// so that narrow lines are resolved below the rounding of omega itself.
    /// Non-resonant models ignore `delta`.
    pub(crate) fn alpha_detuned(&self, omega: f64, delta: f64) -> Complex64 {
        match *self {
            PolarizabilityModel::TwoLevel {
                dipole,
                linewidth,
                p1,
                p2,
                ..
            } => {
                let strength = dipole * dipole / (3.0 * CGS.hbar) * (p1 - p2);
                strength / Complex64::new(-delta, -linewidth)
            }
            _ => self.alpha_unchecked(omega),
        }
    }

    /// alpha_I counterpart of [`Self::alpha_detuned`].
    #[inline]
    pub(crate) fn alpha_i_detuned(&self, omega: f64, delta: f64) -> f64 {
        match *self {
            PolarizabilityModel::TwoLevel {
                dipole,
                linewidth,
                p1,
                p2,
                ..
            } => {
                dipole * dipole / (3.0 * CGS.hbar) * (p1 - p2) * linewidth
                    / (delta * delta + linewidth * linewidth)
            }
            _ => self.alpha_i(omega),
        }
    }

    /// Error unless alpha_I >= 0 at omega. Used by rate formulas derived
    /// from the optical theorem.
    pub(crate) fn require_absorptive(&self) -> Result<()> {
        if let PolarizabilityModel::TwoLevel { p1, p2, .. } = *self {
            if p2 > p1 {
                return Err(Error::NegativeAbsorption(format!(
                    "two-level populations p1 = {p1}, p2 = {p2} are inverted"
                )));
            }
        }
        Ok(())
    }

    /// Both forms of the total Rayleigh cross section. For the free charge and
    /// the lossless sphere they must agree to 1e-12.
    pub fn rayleigh_cross_section(&self, omega: f64) -> Result<RayleighCrossSection> {
        let a = self.alpha(omega)?;
        let k = omega / CGS.c;
        let out = RayleighCrossSection {
            scattering: 8.0 * PI / 3.0 * k.powi(4) * a.norm_sqr(),
            extinction: 4.0 * PI * k * self.alpha_i_effective(omega)?.value,
        };
        let exact = match *self {
            PolarizabilityModel::Electron { mass, charge, tau } => {
                relative_difference(tau, CGS.radiation_reaction_time(mass, charge)) < 1e-15
            }
            PolarizabilityModel::Sphere { epsilon, .. } => epsilon.im == 0.0,
            PolarizabilityModel::TwoLevel { .. } => false,
        };
        if exact && out.rel_diff() > 1e-12 {
            return Err(Error::Consistency {
                what: "Rayleigh cross section: |alpha|^2 vs optical theorem".into(),
                rel_diff: out.rel_diff(),
                tolerance: 1e-12,
            });
        }
        Ok(out)
    }

    /// k^4 |alpha|^2 (1 + cos^2 theta)/2 per steradian.
    pub fn differential_cross_section(&self, omega: f64, theta: f64) -> Result<f64> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::domain(format!(
                "theta must lie in [0, pi], got {theta}"
            )));
        }
        let a = self.alpha(omega)?;
        let k = omega / CGS.c;
        let c = theta.cos();
        Ok(k.powi(4) * a.norm_sqr() * (1.0 + c * c) / 2.0)
    }
}

#[inline]
fn radiative_alpha_i(omega: f64, alpha_sq: f64) -> f64 {
    2.0 / 3.0 * (omega / CGS.c).powi(3) * alpha_sq
}

/// |(eps - 1)/(eps + 2)|^2.
pub fn clausius_mossotti_sq(epsilon: Complex64) -> f64 {
    ((epsilon - 1.0) / (epsilon + 2.0)).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quadrature::{integrate, QuadratureConfig};

    #[test]
    fn electron_tau() {
        let PolarizabilityModel::Electron { tau, .. } = PolarizabilityModel::electron() else {
            unreachable!()
        };
        assert!((tau - 6.27e-24).abs() < 0.01e-24);
        // quoted "6.3e-24 s"
        assert!((tau - 6.3e-24).abs() < 0.05e-24);
    }

    #[test]
    fn electron_low_frequency_matches_thomson_form() {
        let m = PolarizabilityModel::electron();
        let omega = 1e13;
        let ai = m.alpha_i_effective(omega).unwrap().value;
        let expected = CGS.c * CGS.thomson_cross_section() / (4.0 * PI * omega);
        assert!((ai - expected).abs() / expected < 1e-15);
        let approx = m.electron_alpha_i_approx(omega).unwrap();
        assert!((approx - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn electron_thomson_limit() {
        let m = PolarizabilityModel::electron();
        let s = m.rayleigh_cross_section(1e10).unwrap();
        assert!(
            (s.scattering - CGS.thomson_cross_section()).abs() / CGS.thomson_cross_section()
                < 1e-12
        );
    }

    #[test]
    fn electron_optical_theorem_is_exact() {
        let m = PolarizabilityModel::electron();
        for &omega in &[1e8, 1e14, 1e18, 1e22] {
            let s = m.rayleigh_cross_section(omega).unwrap();
            assert!(s.rel_diff() < 1e-12, "{omega}");
        }
    }

    #[test]
    fn lossless_sphere() {
        let m = PolarizabilityModel::sphere(1e-5, Complex64::new(2.1, 0.0)).unwrap();
        let a = m.alpha(1e14).unwrap();
        assert_eq!(a.im, 0.0);
        let cm = 1.1 / 4.1;
        assert!((a.re - 1e-15 * cm).abs() < 1e-30);
        let ai = m.alpha_i_effective(1e14).unwrap();
        assert!(ai.radiative);
        let expected = 2.0 / 3.0 * (1e14 / CGS.c).powi(3) * 1e-30 * cm * cm;
        assert!((ai.value - expected).abs() / expected < 1e-14);
        assert!(m.rayleigh_cross_section(1e14).unwrap().rel_diff() < 1e-12);
    }

    #[test]
    fn two_level_on_resonance() {
        let (omega0, mu, beta) = (1e15, 1e-18, 1e7);
        let m = PolarizabilityModel::two_level(omega0, mu, beta, 0.9, 0.1).unwrap();
        let a = m.alpha(omega0).unwrap();
        assert!(a.re.abs() < 1e-12 * a.im.abs());
        let expected = mu * mu * 0.8 / (3.0 * CGS.hbar * beta);
        assert!((a.im - expected).abs() / expected < 1e-14);
        assert!((m.alpha_i(omega0) - expected).abs() / expected < 1e-14);
    }

    #[test]
    fn two_level_balanced_and_inverted() {
        let m = PolarizabilityModel::two_level(1e15, 1e-18, 1e7, 0.5, 0.5).unwrap();
        assert_eq!(m.alpha_i_effective(1e15).unwrap().value, 0.0);
        let inv = PolarizabilityModel::two_level(1e15, 1e-18, 1e7, 0.2, 0.8).unwrap();
        assert!(inv.alpha_i_effective(1e15).unwrap().is_gain());
        assert!(inv.require_absorptive().is_err());
    }

    #[test]
    fn crossing_symmetry() {
        let models = [
            PolarizabilityModel::electron(),
            PolarizabilityModel::sphere(1e-5, Complex64::new(3.0, 0.5)).unwrap(),
            PolarizabilityModel::two_level(1e15, 1e-18, 1e7, 1.0, 0.0).unwrap(),
        ];
        for m in &models {
            for &w in &[1e12, 1e15, 3e16] {
                let plus = m.alpha_signed(w).unwrap();
                let minus = m.alpha_signed(-w).unwrap();
                assert_eq!(minus, plus.conj());
            }
        }
        // The electron formula itself obeys it when evaluated at -omega.
        let PolarizabilityModel::Electron { mass, charge, tau } = models[0] else {
            unreachable!()
        };
        let w = 1e15;
        let direct = -(charge * charge / mass) / Complex64::new(w * w, -tau * w.powi(3));
        assert_eq!(direct, models[0].alpha(w).unwrap().conj());
    }

    #[test]
    fn domain_errors() {
        let m = PolarizabilityModel::electron();
        assert!(m.alpha(0.0).is_err());
        assert!(m.alpha(-1.0).is_err());
        assert!(PolarizabilityModel::sphere(-1.0, Complex64::new(2.0, 0.0)).is_err());
        assert!(PolarizabilityModel::two_level(1e15, 1e-18, 1e7, 0.6, 0.6).is_err());
        assert!(PolarizabilityModel::two_level(1e15, 1e-18, 0.0, 1.0, 0.0).is_err());
        assert!(m.differential_cross_section(1e15, 4.0).is_err());
    }

    #[test]
    fn differential_cross_section_shape() {
        let m = PolarizabilityModel::sphere(1e-5, Complex64::new(2.1, 0.0)).unwrap();
        let f0 = m.differential_cross_section(1e14, 0.0).unwrap();
        let f90 = m.differential_cross_section(1e14, PI / 2.0).unwrap();
        assert!((f90 / f0 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn differential_integrates_to_total() {
        let cfg = QuadratureConfig::default();
        let models = [
            PolarizabilityModel::electron(),
            PolarizabilityModel::sphere(1e-5, Complex64::new(2.1, 0.3)).unwrap(),
            PolarizabilityModel::two_level(1e15, 1e-18, 1e7, 1.0, 0.0).unwrap(),
        ];
        for m in &models {
            let omega = 1e15 + 3e6;
            let total = integrate(
                |t: f64| 2.0 * PI * t.sin() * m.differential_cross_section(omega, t).unwrap(),
                0.0,
                PI,
                &cfg,
            )
            .unwrap();
            let sigma = m.rayleigh_cross_section(omega).unwrap().scattering;
            assert!((total.value - sigma).abs() / sigma < 1e-10, "{}", m.name());
        }
    }
}
