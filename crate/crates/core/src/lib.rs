#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Radial projection of planar point sets.
//!
//! Generates circular patches of the square lattice, Poisson samples,
//! cyclotomic model sets and substitution tilings, filters the points visible
//! from a reference point, and turns the visible directions into a normalised
//! angular spacing distribution that can be compared with closed-form
//! reference densities.

pub mod analysis;
pub mod cyclo;
pub mod error;
pub mod generators;
pub mod pipeline;
pub mod ring;
pub mod visibility;

pub use cyclo::{CycloTag, ModulePoint, PlanarPoint, Window};
pub use error::{Error, Result};
pub use ring::{QuadInt, RingTag};
