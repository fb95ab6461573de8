pub mod applications;
pub mod dispersion;
pub mod error;
pub mod exponents;
pub mod norms;
pub mod onstrichartz;
pub mod oscillatory;
pub mod spectral;

pub use error::{LabError, Result};
