//! Geometry and dynamics of relativistic extended objects with massive edges.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: frames, induced metric, extrinsic curvature and twist of a
//!   parametric worldsheet in a (flat or curved) background.
//! * [`boundary`]: the edge as a hypersurface of the worldsheet and as a
//!   submanifold of spacetime; edge equation and boundary conditions.
//! * [`integrability`]: Gauss-Codazzi, Codazzi-Mainardi and Ricci residuals at
//!   all three embedding levels.
//! * [`variation`]: the area actions, their analytic first variation and a
//!   finite-difference cross-check.
//! * [`dynamics`]: a string with massive endpoints evolved in conformal gauge.
//! * [`catalog`]: closed-form solutions used as fixtures and initial data.

pub mod background;
pub mod boundary;
pub mod catalog;
pub mod dynamics;
pub mod embedding;
pub mod error;
pub mod geometry;
pub mod integrability;
pub mod variation;

pub use background::{BackgroundMetric, Flat, Signature};
pub use boundary::{BoundaryEmbedding, FnBoundary};
pub use embedding::{Embedding, FnEmbedding};
pub use error::{GeometryError, Result};
