//! Contractive function systems on the line and the plane: affine maps,
//! attractor computation on a grid, random iteration, and code-space
//! addresses.

pub mod boxset;
pub mod chaos;
pub mod map;
pub mod system;

pub use boxset::{compute_attractor, hausdorff_distance, hutchinson_step, AttractorResult, BoxSet};
pub use chaos::{balanced_measure_residual, cantor_membership, chaos_game, PointCloud};
pub use map::{AffineMap, ProbVector};
pub use system::{
    address_point, baire_distance, cantor_system, koch_maps, koch_system, Address, IfsSystem,
};
