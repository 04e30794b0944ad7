use crate::output::{Format, UnitSystem};
use crate::quantity::{parse_quantity, parse_sweep, Dimension, ParseError};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

/// Sorted, non-empty list of cgs values.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep(pub Vec<f64>);

macro_rules! parsers {
    ($($name:ident, $sweep:ident => $dim:expr;)*) => {$(
        pub fn $name(s: &str) -> Result<f64, ParseError> {
            parse_quantity(s, $dim)
        }
        #[allow(dead_code)]
        pub fn $sweep(s: &str) -> Result<Sweep, ParseError> {
            parse_sweep(s, $dim).map(Sweep)
        }
    )*};
}

parsers! {
    length, length_sweep => Dimension::Length;
    temperature, temperature_sweep => Dimension::Temperature;
    mass, mass_sweep => Dimension::Mass;
    frequency, frequency_sweep => Dimension::Frequency;
    density, density_sweep => Dimension::NumberDensity;
    dipole, dipole_sweep => Dimension::Dipole;
    velocity, velocity_sweep => Dimension::Velocity;
    scalar, scalar_sweep => Dimension::Dimensionless;
}

/// Integer count, also written as 1e6.
pub fn count(s: &str) -> Result<usize, ParseError> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| ParseError(format!("cannot read '{s}' as a count")))?;
    if v.is_nan() || v < 0.0 || v.fract() != 0.0 || v > 9.007_199_254_740_992e15 {
        return Err(ParseError(format!("'{s}' is not a non-negative integer")));
    }
    Ok(v as usize)
}

pub fn epsilon(s: &str) -> Result<Complex64, ParseError> {
    s.trim()
        .parse::<Complex64>()
        .map_err(|_| ParseError(format!("cannot read '{s}' as a permittivity like 2.1 or 2.1+0.01i")))
}

#[derive(Debug, Parser)]
#[command(
    name = "blackbody",
    version,
    about = "Momentum diffusion, decoherence and drag in thermal radiation",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Unit system for emitted values.
    #[arg(long, global = true, value_enum, default_value = "gaussian")]
    pub units: UnitSystem,
    /// key = value defaults; flags given on the command line win.
    #[arg(long, global = true, env = "BLACKBODY_CONFIG")]
    pub config: Option<std::path::PathBuf>,
    /// Quadrature relative tolerance.
    #[arg(long, global = true, value_parser = scalar)]
    pub rel_tol: Option<f64>,
    /// Quadrature absolute tolerance.
    #[arg(long, global = true, value_parser = scalar)]
    pub abs_tol: Option<f64>,
    /// Interval budget of the adaptive quadrature.
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    Electron,
    Sphere,
    TwoLevel,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Charged particle mass (default: electron).
    #[arg(long, value_parser = mass)]
    pub particle_mass: Option<f64>,
    /// Charge in statC (default: electron).
    #[arg(long, value_parser = scalar, allow_hyphen_values = true)]
    pub charge: Option<f64>,
    #[arg(long, value_parser = length)]
    pub radius: Option<f64>,
    /// Relative permittivity, real or complex (2.1+0.01i).
    #[arg(long, value_parser = epsilon)]
    pub epsilon: Option<Complex64>,
    /// Transition angular frequency.
    #[arg(long, value_parser = frequency)]
    pub omega0: Option<f64>,
    /// Transition dipole moment.
    #[arg(long, value_parser = dipole)]
    pub dipole: Option<f64>,
    /// Half width of the line, angular frequency.
    #[arg(long, value_parser = frequency)]
    pub linewidth: Option<f64>,
    /// Lower-level population.
    #[arg(long, value_parser = scalar, default_value = "1")]
    pub p1: f64,
    /// Upper-level population.
    #[arg(long, value_parser = scalar, default_value = "0")]
    pub p2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Space {
    Momentum,
    K,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McMode {
    Kicks,
    Recoil,
    Ou,
    Fields,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Momentum (or K-space) diffusion constant.
    Diffusion {
        #[command(flatten)]
        model: ModelArgs,
        /// Temperature sweep.
        #[arg(long, value_parser = temperature_sweep)]
        temperature: Sweep,
        /// particle, wave or full.
        #[arg(long, default_value = "full")]
        statistics: String,
        /// Momentum-space D or K-space diffusion.
        #[arg(long, value_enum, default_value = "momentum")]
        space: Space,
    },
    /// Nonrelativistic drag coefficient and the fluctuation-dissipation check.
    Drag {
        #[command(flatten)]
        model: ModelArgs,
        /// Temperature sweep.
        #[arg(long, value_parser = temperature_sweep)]
        temperature: Sweep,
    },
    /// Relativistic drag force on a grid of v/c.
    DragRelativistic {
        #[command(flatten)]
        model: ModelArgs,
        /// v/c values.
        #[arg(long, value_parser = scalar_sweep)]
        beta: Sweep,
        /// Lab (radiation) temperature.
        #[arg(long, value_parser = temperature)]
        temperature: f64,
        /// Particle rest-frame temperature (default: the lab temperature).
        #[arg(long, value_parser = temperature)]
        particle_temperature: Option<f64>,
        /// Also extrapolate F/v to v = 0 at equal temperatures.
        #[arg(long)]
        slope_limit: bool,
    },
    /// Decoherence factor F(d) = R11 - R12 over a separation sweep.
    Decoherence {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_parser = temperature)]
        temperature: f64,
        /// Separation sweep.
        #[arg(long, value_parser = length_sweep)]
        separations: Sweep,
    },
    /// Scattering constant Lambda from the small-separation limit.
    Lambda {
        #[command(flatten)]
        model: ModelArgs,
        /// Temperature sweep.
        #[arg(long, value_parser = temperature_sweep)]
        temperature: Sweep,
    },
    /// Solve a balance ODE for the occupation and compare with its analytic family.
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// wien, rayleigh_jeans or planck.
        #[arg(long, default_value = "planck")]
        branch: String,
        #[arg(long, value_parser = temperature)]
        temperature: f64,
        /// Grid in x = hbar omega / k_B T.
        #[arg(long, value_parser = scalar_sweep, default_value = "0.1:20:log200")]
        x_grid: Sweep,
        /// Anchor point x0.
        #[arg(long, value_parser = scalar, default_value = "1")]
        anchor_x: f64,
        /// Occupation at the anchor (default: the canonical family member).
        #[arg(long, value_parser = scalar)]
        anchor_n: Option<f64>,
    },
    /// Relax a velocity distribution with the Fokker-Planck equation.
    FokkerPlanck {
        #[command(flatten)]
        model: ModelArgs,
        /// Particle mass (default: the model's mass).
        #[arg(long, value_parser = mass)]
        mass: Option<f64>,
        #[arg(long, value_parser = temperature)]
        temperature: f64,
        /// Drag rate (default: from the model's drag coefficient).
        #[arg(long, value_parser = frequency)]
        xi: Option<f64>,
        /// Initial mean in thermal velocities.
        #[arg(long, value_parser = scalar, default_value = "3", allow_hyphen_values = true)]
        v0: f64,
        /// Initial width in thermal velocities.
        #[arg(long, value_parser = scalar, default_value = "0.2")]
        sigma: f64,
        /// Velocity cells.
        #[arg(long, value_parser = count, default_value = "1024")]
        cells: usize,
        /// Grid half width in thermal velocities.
        #[arg(long, value_parser = scalar, default_value = "8")]
        half_width: f64,
        /// Step in units of 1/xi.
        #[arg(long, value_parser = scalar, default_value = "0.005")]
        dt: f64,
        /// Output times xi t.
        #[arg(long, value_parser = scalar_sweep, default_value = "0.5,1,2,5,10")]
        checkpoints: Sweep,
    },
    /// Monte Carlo: Poisson kicks, recoil moment, Ornstein-Uhlenbeck paths or field independence.
    Montecarlo {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        mode: McMode,
        /// Stream seed; equal seeds give bit-identical output.
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, value_parser = temperature, default_value = "300")]
        temperature: f64,
        /// Expected kicks over all paths.
        #[arg(long, value_parser = scalar, default_value = "1e6")]
        kicks: f64,
        /// Independent paths (kicks, ou).
        #[arg(long, value_parser = count, default_value = "64")]
        paths: usize,
        /// paper_uniform, phase_function or forward_only.
        #[arg(long, default_value = "paper_uniform")]
        sampling: String,
        /// Override the friction rate beta of the kick process.
        #[arg(long, value_parser = frequency)]
        beta: Option<f64>,
        /// Samples (recoil, fields).
        #[arg(long, value_parser = count, default_value = "1e6")]
        samples: usize,
        /// OU: drag rate.
        #[arg(long, value_parser = frequency, default_value = "1")]
        xi: f64,
        /// OU: particle mass.
        #[arg(long, value_parser = mass, default_value = "1e-18")]
        mass: f64,
        /// OU: initial velocity.
        #[arg(long, value_parser = velocity, default_value = "0", allow_hyphen_values = true)]
        v0: f64,
        /// OU: time step.
        #[arg(long, value_parser = scalar, default_value = "0.01")]
        dt: f64,
        /// OU: output times.
        #[arg(long, value_parser = scalar_sweep, default_value = "1,2,5,10")]
        checkpoints: Sweep,
        /// OU: euler_maruyama or exact.
        #[arg(long, default_value = "euler_maruyama")]
        scheme: String,
        /// Fields: modes per sample.
        #[arg(long, value_parser = count, default_value = "100")]
        modes: usize,
        /// OU: write every path's velocity at each checkpoint to this CSV file.
        #[arg(long)]
        dump_paths: Option<std::path::PathBuf>,
    },
    /// Momentum diffusion of a sphere from gas collisions.
    Air {
        #[arg(long, value_parser = length)]
        radius: f64,
        /// Temperature sweep.
        #[arg(long, value_parser = temperature_sweep)]
        temperature: Sweep,
        /// Mass of a gas molecule.
        #[arg(long, value_parser = mass, default_value = "28.0134u")]
        molecule_mass: f64,
        /// Gas number density.
        #[arg(long, value_parser = density, default_value = "2.5e19")]
        number_density: f64,
    },
    /// Run the cross-validation suite and print a pass/fail table.
    Verify {
        /// Criterion ids to run (default: all).
        #[arg(long, value_delimiter = ',')]
        criteria: Vec<u8>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Diffusion { .. } => "diffusion",
            Command::Drag { .. } => "drag",
            Command::DragRelativistic { .. } => "drag-relativistic",
            Command::Decoherence { .. } => "decoherence",
            Command::Lambda { .. } => "lambda",
            Command::Spectrum { .. } => "spectrum",
            Command::FokkerPlanck { .. } => "fokker-planck",
            Command::Montecarlo { .. } => "montecarlo",
            Command::Air { .. } => "air",
            Command::Verify { .. } => "verify",
        }
    }
}
