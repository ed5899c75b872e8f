//! Embedded configurations: cone angles, hulls, intersections, developments,
//! slices and curvature estimates.

pub mod angles;
pub mod config;
pub mod crofton;
pub mod develop;
pub mod figures;
pub mod hull;
pub mod intersect;
pub mod slice;

pub use angles::{cone_angles, triangle_angle, FlatnessReport};
pub use config::{build_pup_tent, Configuration, PupTentParams};
pub use crofton::{crofton_estimate, vertex_link};
pub use develop::{develop, Development};
pub use hull::{convex_hull, HullReport};
pub use intersect::{is_embedded_float, tri_pair_relation, PairKind, PairRelation};
pub use slice::{slice_plane, Plane, SliceResult};
