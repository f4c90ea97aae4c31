//! Attractors, invariant measures, and fractal dimensions of iterated
//! function systems, with two applications to stochastic growth models.
//!
//! The crate is organized around a few concrete types:
//!
//! - [`AffineMap`] and [`IfsSystem`]: finite families of affine
//!   contractions with an optional probability vector.
//! - [`BoxSet`]: grid-cell approximations of compact sets, on which the
//!   Hutchinson operator is iterated to a fixed point
//!   ([`compute_attractor`]).
//! - [`PointCloud`]: sampled orbits, produced by [`chaos_game`] and
//!   consumed by the dimension estimators.
//! - [`dimension`]: box-counting regression and the similarity-dimension
//!   equation.
//! - [`dynamics`]: scalar interval maps, periodic orbits, and the
//!   Sharkovskii order.
//! - [`econ`]: random utility processes and the optimal stochastic growth
//!   model whose log-capital process is conjugate to a Cantor system.

pub mod dimension;
pub mod dynamics;
pub mod econ;
pub mod error;
pub mod ifs;
pub mod rng;

pub use dimension::{box_count, box_dimension, similarity_dimension, DimensionReport, EpsSchedule};
pub use dynamics::{
    find_periodic_orbits, iterate, liyorke_pair_stats, sensitivity_probe, sharkovskii_precedes,
    PeriodicOrbit, ScalarMap,
};
pub use econ::{
    affine_closed_form, conjugacy_to_unit, euler_residual, growth_attractor_conjugated,
    growth_policy, log_capital_ifs, multiplicative_closed_form, policy_euler_residual,
    simulate_affine_utility, simulate_affine_utility_with_shocks, simulate_growth,
    simulate_growth_with_shocks, simulate_multiplicative_utility,
    simulate_multiplicative_utility_with_shocks, solve_growth_numerically, AffineUtilityParams,
    GrowthParams, GrowthPath, GrowthSolution, MultiplicativeUtilityParams,
};
pub use error::{Error, Result};
pub use ifs::{
    address_point, baire_distance, balanced_measure_residual, cantor_membership, cantor_system,
    chaos_game, compute_attractor, hausdorff_distance, hutchinson_step, koch_maps, koch_system,
    Address, AffineMap, AttractorResult, BoxSet, IfsSystem, PointCloud, ProbVector,
};
pub use rng::SplitMix64;
