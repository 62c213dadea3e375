//! Random quadrangulations: generation, random-walk mixing, bottlenecks and
//! the exact formulas describing their hulls.

pub mod analytic;
pub mod cut;
pub mod geodesy;
pub mod harness;
pub mod map;
pub mod treegen;
pub mod walk;

pub use map::{CanonicalCode, MapError, PlanarMap, Quadrangulation};
pub use treegen::{LabeledPlaneTree, PointedQuadrangulation};
