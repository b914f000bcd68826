//! Symplectic billiards on strictly convex planar domains.
//!
//! Boundaries are parametrized by affine arc length ([`curve`]); the billiard
//! map and its generating function live in [`billiard`]; maximizing periodic
//! orbits are found variationally in [`orbits`]; [`spectrum`], [`expansion`]
//! and [`deformation`] build on those to measure area spectra, asymptotic
//! expansions and deformation identities.

pub mod billiard;
pub mod cli;
pub mod curve;
pub mod deformation;
pub mod error;
pub mod expansion;
pub mod geometry;
pub mod orbits;
pub mod roots;
pub mod spectrum;
pub mod trig;

pub use curve::{AffineCurve, AffineTransform, CurveSpec, Shape};
pub use error::{Error, Result};
pub use geometry::{det, Vec2};
