//! Radiative equilibrium: the occupation ODE fixed by balancing momentum
//! diffusion against drag, and the Fokker-Planck relaxation of a velocity
//! distribution.

mod fokker_planck;
mod spectrum;

pub use fokker_planck::{
    fokker_planck_checkpoints, fokker_planck_evolve, ou_moments, VelocityDistribution,
    DEFAULT_CELLS, DEFAULT_HALF_WIDTH,
};
pub use spectrum::{
    equilibrium_residual, equilibrium_residual_with, spectrum_ode_solve, EquilibriumResidual,
    SpectrumBranch, SpectrumSolution,
};
