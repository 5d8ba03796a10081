//! Numerical laboratory for continuous Steiner symmetrization and nonlocal
//! energies.
//!
//! The crate is organized around a small set of carriers:
//!
//! - [`interval::IntervalUnion`]: finite disjoint unions of open intervals,
//!   the state on which the one-dimensional rearrangement motion acts.
//! - [`grid::GridFunction`]: nonnegative functions sampled on uniform 1D/2D
//!   grids, symmetrized level set by level set.
//! - [`good::GoodProfile`]: analytic piecewise-linear profiles whose level-set
//!   endpoints admit explicit energy and derivative formulas.
//! - [`height::HeightFunction`]: the height-function coordinate in which
//!   radial decreasing profiles interpolate linearly.
//!
//! On top of these, [`energy`] provides quadrature engines for Gagliardo
//! seminorms, regularized nonlocal energies, interaction/potential energies,
//! and a fractional Laplacian evaluator; [`thinfilm`] collects the stationary
//! profile toolkit; [`suite`] bundles the acceptance checks run by the CLI and
//! the integration tests.

pub mod energy;
pub mod fixtures;
pub mod good;
pub mod grid;
pub mod height;
pub mod interval;
pub mod quad;
pub mod radial;
pub mod report;
pub mod suite;
pub mod symmetrize;
pub mod thinfilm;
pub mod util;

pub use grid::{Axis, GridFunction};
pub use interval::{IntervalUnion, MergeEvent};
