//! Anisotropic osmosis filtering for shadow removal.
//!
//! The pipeline estimates edge directions by tensor voting, turns them into
//! per-pixel diffusion tensors, discretises the osmosis equation with
//! nonnegative lattice stencils and evolves it with exact exponential steps.

// `!(x > 0.0)` deliberately rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod anisotropy;
pub mod error;
pub mod expm;
pub mod grid;
pub mod operator;
pub mod pipeline;
pub mod structure;
pub mod synthetic;

pub use error::{OsmoseError, Result};
pub use grid::{ImageBuffer, MaskField, ScalarField};
