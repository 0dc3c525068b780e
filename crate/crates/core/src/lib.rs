//! Quantum decay in a purely absorptive delta-shell potential.
//!
//! The crate locates the complex poles of the outgoing Green's function for
//! `H = -d²/dr² - i b δ(r - a)` (units ħ = 2m = 1, s-waves), builds the
//! normalized resonant states attached to them, and expands the survival
//! amplitude of an initial state confined to `r ≤ a` in that basis. An
//! independent reference built from the closed-form Green's function and a
//! rotated-contour quadrature checks every expansion.
//!
//! Module map:
//!
//! * [`model`]: potential parameters and the sine-type initial state.
//! * [`pole_solver`]: argument-principle root counting and Newton polishing.
//! * [`resonant_basis`]: resonant states, normalization and sum rules.
//! * [`expansion`]: overlap coefficients and the survival amplitude.
//! * [`oracle`]: Jost function, closed-form `G⁺` and the exact propagator.
//! * [`singularity`]: pole continuation in `b` and spectral singularities.
//! * [`io`]: CSV / JSON schemas shared by the command-line front end.

pub mod analysis;
pub mod error;
pub mod expansion;
pub mod io;
pub mod model;
pub mod oracle;
pub mod pole_solver;
pub mod quadrature;
pub mod resonant_basis;
pub mod singularity;
pub mod verify;

mod cmath;

pub use error::{Error, Result};
pub use model::{DeltaShellPotential, SineInitialState};
pub use pole_solver::{Pole, PoleSet, Quadrant};

/// Complex wavenumbers, energies and amplitudes.
pub type C64 = num_complex::Complex64;
