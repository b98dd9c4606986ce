//! Travelling-wave shock profiles of the viscous–dispersive quantum
//! hydrodynamics system and their spectral stability.
//!
//! The crate is organised bottom-up:
//!
//! * [`shock_states`]: Euler end states, the profile nonlinearity `f` and its primitives.
//! * [`profile`]: the planar profile ODE, equilibria, existence tests and shooting.
//! * [`essential_spectrum`]: dispersion curves and consistent splitting at the end states.
//! * [`evans`]: quartic roots, the linearised system, the Evans function and winding numbers.
//! * [`bounds`]: the energy bound on `Re λ` and the high-frequency exclusion radius.
//! * [`cli`]: scenario files and the command-line front end.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod essential_spectrum;
pub mod evans;
pub mod ode;
pub mod profile;
pub mod shock_states;

pub use error::{Error, Result};
pub use shock_states::{EndStates, ShockParams};
