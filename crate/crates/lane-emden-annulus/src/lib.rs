//! Sign-changing solutions of -Δu = |u|^(p-1) u on annuli, with the
//! spectral machinery to decide when they are degenerate and how unstable
//! they are.
//!
//! The radial m-zone solution is built by shooting ([`shoot_nodal`]) and
//! cross-checked variationally ([`minimize_nodal`]). Its linearization
//! separates over spherical harmonics into a weighted radial pencil
//! ([`mode_slice`]); tracking those eigenvalues in p locates the exponents
//! where a nonradial kernel appears ([`find_degeneracies`]) and yields the
//! Morse index in closed form ([`morse_index_at`]). Both ends of the
//! exponent range have sharp descriptions ([`p_to_1_diagnostics`],
//! [`large_p_bound_check`]). In the plane, the solution continues onto
//! trigonometrically deformed annuli by a pullback Newton iteration
//! ([`newton_solve`]) whose nodal pattern and index can be measured
//! directly ([`nodal_count_2d`], [`morse_index_2d`]).
//!
//! The `examples/` directory is the intended entry point, one runnable
//! program per capability:
//!
//! - `solve_radial`: shoot profiles, inspect zeros and residuals
//! - `scaling_identity`: dilation covariance across annuli
//! - `variational_crosscheck`: shooting vs constrained minimization
//! - `spectrum_slice`: eigenvalue structure of the linearization
//! - `degeneracy_scan`: bracket and refine kernel exponents
//! - `morse_table`: indices and their lower bound across p, N, m
//! - `asymptotic_regimes`: the p -> 1 collapse and the large-p bound
//! - `perturbed_continuation`: bend the domain, keep the solution
//!
//! The same capabilities are scriptable through the `lane-emden-annulus`
//! binary (see [`cli`]), which writes CSV/JSON artifacts deterministically.

pub mod annulus;
pub mod asymptotics;
pub mod cli;
pub mod config;
pub mod degeneracy;
pub mod error;
pub mod export;
pub mod interp;
pub mod nehari;
pub mod ode;
pub mod perturbed;
pub mod radial;
pub mod roots;
pub mod spectrum;
pub mod tridiag;

pub use annulus::AnnulusSpec;
pub use asymptotics::{
    laplace_radial_eigen, large_p_bound_check, p_to_1_diagnostics, AsymptoticsOptions,
    LaplaceEigenpair, LargePRow, LinearLimitRow,
};
pub use config::PerturbConfig;
pub use degeneracy::{
    find_degeneracies, morse_index, morse_index_at, spherical_multiplicity, DegeneracyOptions,
    DegeneracyPoint, DegeneracyScan, MorseReport,
};
pub use error::{Error, Result};
pub use nehari::{minimize_nodal, NehariOptions, NehariSolution};
pub use perturbed::{
    build_deformation, morse_index_2d, morse_index_2d_refined, newton_solve, nodal_count_2d,
    safety_bound, shape_compare_eigen, shape_compare_radial, DeformationSpec, FourierTerm,
    PerturbedSolution, PolarGrid,
};
pub use radial::{integrate_radial_ivp, shoot_nodal, RadialOptions, RadialProfile, Trajectory};
pub use spectrum::{mode_slice, EigenMode, SpectrumOptions, SpectrumSlice};
