//! Weighted oscillatory integrals and their decay.

pub mod bessel;
pub mod bump;
pub mod fit;
pub mod kernels;
pub mod quad;
pub mod rules;
pub mod vdc;

pub use bessel::{bessel_j, sphere_ft, SphereFt};
pub use bump::{dyadic_piece, smooth_bump};
pub use fit::{fit_decay, fit_line, log_grid, regress_samples, DecayFitReport, DecaySample, KappaFit, LineFit, XPolicy};
pub use kernels::{eval_oscillatory, gaussian_calibration, rescale_identity_check, GaussianCalibration, EvalOptions, OscIntegralSpec, OscKind, OscValue};
pub use vdc::vdc_bound;
