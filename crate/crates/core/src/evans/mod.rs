//! Evans-function machinery.

pub mod contour;
pub mod eval;
pub mod quartic;
pub mod system;

pub use contour::{winding_number, Contour, ContourSample, EvansContourResult, Piece, WindingOptions};
pub use eval::{constant_state_evans, evans_function, truncation_lengths, EvansMethod, EvansOptions, EvansValue};
pub use system::{asymptotic_matrix, LinearizedSystem};
