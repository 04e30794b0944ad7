use serde::Serialize;

/// How a number was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Quadrature,
    ClosedForm,
    MonteCarlo,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Quadrature => "quadrature",
            Method::ClosedForm => "closed_form",
            Method::MonteCarlo => "monte_carlo",
        }
    }
}

/// Physical dimension of a reported quantity. Values are stored in cgs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Unit {
    /// <Delta p^2>/Delta t.
    MomentumSquaredPerTime,
    /// <Delta K^2>/Delta t and the scattering constant.
    WavenumberSquaredPerTime,
    MomentumSquared,
    Rate,
    Force,
    /// m xi.
    ForcePerVelocity,
    Area,
    AreaPerSteradian,
    /// Polarizability volume.
    Volume,
    Length,
    Velocity,
    VelocitySquared,
    Mass,
    NumberDensity,
    Dimensionless,
}

impl Unit {
    pub fn gaussian_symbol(self) -> &'static str {
        match self {
            Unit::MomentumSquaredPerTime => "g^2 cm^2 s^-3",
            Unit::WavenumberSquaredPerTime => "cm^-2 s^-1",
            Unit::MomentumSquared => "g^2 cm^2 s^-2",
            Unit::Rate => "s^-1",
            Unit::Force => "dyn",
            Unit::ForcePerVelocity => "g s^-1",
            Unit::Area => "cm^2",
            Unit::AreaPerSteradian => "cm^2 sr^-1",
            Unit::Volume => "cm^3",
            Unit::Length => "cm",
            Unit::Velocity => "cm s^-1",
            Unit::VelocitySquared => "cm^2 s^-2",
            Unit::Mass => "g",
            Unit::NumberDensity => "cm^-3",
            Unit::Dimensionless => "1",
        }
    }

    pub fn si_symbol(self) -> &'static str {
        match self {
            Unit::MomentumSquaredPerTime => "kg^2 m^2 s^-3",
            Unit::WavenumberSquaredPerTime => "m^-2 s^-1",
            Unit::MomentumSquared => "kg^2 m^2 s^-2",
            Unit::Rate => "s^-1",
            Unit::Force => "N",
            Unit::ForcePerVelocity => "kg s^-1",
            Unit::Area => "m^2",
            Unit::AreaPerSteradian => "m^2 sr^-1",
            Unit::Volume => "m^3",
            Unit::Length => "m",
            Unit::Velocity => "m s^-1",
            Unit::VelocitySquared => "m^2 s^-2",
            Unit::Mass => "kg",
            Unit::NumberDensity => "m^-3",
            Unit::Dimensionless => "1",
        }
    }

    /// Exact factor taking a cgs value of this dimension to SI.
    pub fn si_factor(self) -> f64 {
        match self {
            Unit::MomentumSquaredPerTime | Unit::MomentumSquared => 1e-10,
            Unit::WavenumberSquaredPerTime => 1e4,
            Unit::Rate | Unit::Dimensionless => 1.0,
            Unit::Force => 1e-5,
            Unit::ForcePerVelocity => 1e-3,
            Unit::Area | Unit::AreaPerSteradian | Unit::VelocitySquared => 1e-4,
            Unit::Volume => 1e-6,
            Unit::Length | Unit::Velocity => 1e-2,
            Unit::Mass => 1e-3,
            Unit::NumberDensity => 1e6,
        }
    }
}

/// A second, independent evaluation of the same quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    pub value: f64,
    pub method: Method,
    pub rel_diff: f64,
}

impl CrossCheck {
    pub fn against(primary: f64, value: f64, method: Method) -> Self {
        CrossCheck {
            value,
            method,
            rel_diff: relative_difference(primary, value),
        }
    }
}

/// A computed rate or coefficient with provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateResult {
    pub value: f64,
    pub unit: Unit,
    pub err_estimate: f64,
    pub method: Method,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
}

impl RateResult {
    pub fn new(value: f64, unit: Unit, err_estimate: f64, method: Method) -> Self {
        debug_assert!(err_estimate.is_finite() && err_estimate >= 0.0);
        RateResult {
            value,
            unit,
            err_estimate,
            method,
            cross_check: None,
        }
    }

    pub fn closed_form(value: f64, unit: Unit) -> Self {
        // Rounding of a handful of flops.
        RateResult::new(
            value,
            unit,
            8.0 * f64::EPSILON * value.abs(),
            Method::ClosedForm,
        )
    }

    pub fn with_cross_check(mut self, value: f64, method: Method) -> Self {
        self.cross_check = Some(CrossCheck::against(self.value, value, method));
        self
    }

    /// Multiply value and error by a positive constant.
    pub fn scaled(mut self, factor: f64) -> Self {
        self.value *= factor;
        self.err_estimate *= factor.abs();
        if let Some(cc) = self.cross_check.as_mut() {
            cc.value *= factor;
        }
        self
    }

    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            self.err_estimate
        } else {
            self.err_estimate / self.value.abs()
        }
    }
}

pub(crate) fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
