//! Cone-volume sets of planar polygons.
//!
//! For a finite set `U` of outer unit normals positively spanning the plane,
//! every polygon `P(U, b) = {x : <u_i, x> <= b_i}` with `b >= 0` has a
//! cone-volume vector `gamma(U, b)`: the areas of the cones `conv({0} ∪ F_i)`
//! over its edges. This crate
//!
//! - builds the polygons and their cone-volume vectors ([`geometry`]),
//! - classifies normal sets into triangle-capable and trapezoid-only normals
//!   ([`classification`]),
//! - constructs the subspace concentration polytope and the closed convex hull
//!   of the unit-area cone-volume set in vertex and halfspace form ([`polytope`]),
//! - decides membership exactly for quadrilateral normal sets ([`quad`]),
//! - inverts the cone-volume map numerically and runs a membership pipeline
//!   ([`solver`]),
//! - samples cone-volume vectors and checks the structural laws on them
//!   ([`harness`]).
//!
//! All index-valued results refer to the canonical (counterclockwise, sorted by
//! angle in `[0, 2π)`) order of a [`NormalSet`].

pub mod classification;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod io;
pub mod polytope;
pub mod quad;
pub mod solver;

pub use classification::{classify, ClassificationResult};
pub use error::{Error, Result};
pub use geometry::{
    cone_volume_vector, intersect_halfplanes, normalize_to_unit_area, transform_unimodular,
    validate_normals, ConeVolumeVector, DiscreteMeasure, NormalSet, Polygon2D, RawNormals,
    SupportVector,
};
pub use polytope::{Halfspace, PolytopeRep};
pub use quad::QuadLabeling;
pub use solver::{MembershipVerdict, SolveOptions, SolveResult, SolveStatus, Verdict};

/// Numerical tolerances shared across the crate.
pub mod tol {
    /// Allowed deviation of a normal from unit length.
    pub const UNIT: f64 = 1e-9;
    /// Angular resolution (radians) for distinctness, antipodes and the π gap.
    pub const ANGLE: f64 = 1e-9;
    /// Area below which a polygon is degenerate; also the edge-length
    /// threshold (relative to `max(1, max b)`) for an active constraint.
    pub const AREA: f64 = 1e-12;
    /// Tolerance on sums of normalized cone volumes and on polytope slack.
    pub const SUM: f64 = 1e-9;
    /// Allowed deviation of `|det A|` from 1.
    pub const DET: f64 = 1e-12;
}
