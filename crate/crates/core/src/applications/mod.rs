//! Velocity averaging, the semiclassical density limit and a desk-scale Hartree fixed point.

pub mod hartree;
pub mod kinetic;
pub mod semiclassical;

pub use hartree::{
    free_trajectory, SolutionNorm,
    hartree_bisect, hartree_duhamel, hartree_fixed_point, inhomogeneous_bound_check, BisectionReport, FixedPointOutcome,
    FixedPointReport, HartreeOptions, HartreeState, InhomogeneousReport, Trajectory,
};
pub use kinetic::{velocity_average, PhaseSpaceFunction, Sampler, VelocityOptions};
pub use semiclassical::{semiclassical_density, SemiclassicalOptions};
