//! Spherical curves whose geodesic curvature is confined to an interval
//! (κ₁, κ₂): frames and lifted frames, invariants, component classification,
//! bands, convexity tools, and explicit homotopies.

pub mod geom3;
pub mod convexity;
pub mod curve;
pub mod bands;
pub mod fixtures;
pub mod classify;
pub mod homotopy;
pub mod cli;
