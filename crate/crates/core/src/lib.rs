//! Rotationally invariant spheres in the homogeneous spaces E(k, τ) and the
//! Willmore-like energy `E = ∫ (H² + K̄/4 + k/4 − τ²/4) dμ`.

pub mod error;
pub mod execution;
pub mod experiments;
pub mod functional;
pub mod geometry;
pub mod numerics;
pub mod profile;

pub use error::{Error, Result};
pub use execution::Execution;
pub use functional::{canonical_coefficients, energy, EnergyReport, FunctionalCoefficients};
pub use geometry::{CylindricalPoint, DomainRadius, GeometryParams};
pub use profile::{
    generate_cmc_sphere, integrate, perturbed_sphere, PerturbationSpec, Profile, ProfileState,
    StopCondition,
};
