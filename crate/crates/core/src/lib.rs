//! Geometrically anisotropic localisation: Morse coherent states over a
//! transformed metric, closed-form localisation regions and moments, the
//! analytic eigensystem of the radial localisation operator with its
//! Nyström discretization, an anisotropic 2-D continuous wavelet transform,
//! and stationary random-field synthesis for demonstrations.

pub mod anisotropy;
pub mod coherent;
pub mod eigensystem;
pub mod grid;
pub mod morse;
pub mod operator;
pub mod quad;
pub mod region;
pub mod specfun;

pub use anisotropy::{AnisotropySpec, Mat2, Vec2};
pub use coherent::{LocalIndex, RadialIndex};
pub use eigensystem::EigenSpec;
pub use grid::{FieldGrid, GridData};
pub use morse::{MorseConstants, MorseParams};
pub use region::ConcentrationLevel;
