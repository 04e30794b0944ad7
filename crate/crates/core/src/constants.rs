//! Physical constants in Gaussian-cgs units and exact SI conversion factors.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant, erg s.
    pub hbar: f64,
    /// Speed of light, cm/s.
    pub c: f64,
    /// Boltzmann constant, erg/K.
    pub k_b: f64,
    /// Elementary charge, statC.
    pub e_charge: f64,
    /// Electron mass, g.
    pub m_e: f64,
}

/// CODATA 2018 values. `e_charge` is 1.602176634e-19 C times c/10 exactly.
pub const CGS: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-27,
    c: 2.997_924_58e10,
    k_b: 1.380_649e-16,
    e_charge: 4.803_204_712_570_263e-10,
    m_e: 9.109_383_701_5e-28,
};

impl Default for PhysicalConstants {
    fn default() -> Self {
        CGS
    }
}

impl PhysicalConstants {
    /// Classical electron radius e^2 / (m_e c^2), cm.
    pub fn classical_electron_radius(&self) -> f64 {
        self.e_charge * self.e_charge / (self.m_e * self.c * self.c)
    }

    /// Thomson cross section (8 pi / 3) r_e^2, cm^2.
    pub fn thomson_cross_section(&self) -> f64 {
        let r = self.classical_electron_radius();
        8.0 * std::f64::consts::PI / 3.0 * r * r
    }

    /// Abraham-Lorentz time 2 e^2 / (3 m c^3), s.
    pub fn radiation_reaction_time(&self, mass: f64, charge: f64) -> f64 {
        2.0 * charge * charge / (3.0 * mass * self.c.powi(3))
    }

    /// Thermal angular frequency k_B T / hbar, rad/s.
    pub fn thermal_frequency(&self, temperature: f64) -> f64 {
        self.k_b * temperature / self.hbar
    }

    /// Thermal photon wavelength 2 pi hbar c / (k_B T), cm.
    pub fn thermal_wavelength(&self, temperature: f64) -> f64 {
        2.0 * std::f64::consts::PI * self.hbar * self.c / (self.k_b * temperature)
    }
}

/// Exact multiplicative factors from cgs to SI.
pub mod si {
    pub const CM: f64 = 1e-2;
    pub const GRAM: f64 = 1e-3;
    pub const DYNE: f64 = 1e-5;
    pub const ERG: f64 = 1e-7;
    /// statC cm to C m: 1 statC = 0.1 / c_SI coulomb.
    pub const STATC_CM: f64 = 1e-2 * 0.1 / 299_792_458.0;
}
