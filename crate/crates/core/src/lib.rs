//! Deterministic indoor navigation on occupancy grids.
//!
//! The pipeline is: [`gridmap`] turns floor-plan masks into per-floor
//! occupancy grids joined by portals, [`planner`] finds optimal 8-connected
//! routes with A*, [`compressor`] folds a route into terse compass commands
//! ("Go SE 5 steps"), and [`narrator`] turns those into a numbered walking
//! guide.
//!
//! Cost-carrying types are generic over [`Scalar`] (`f32` or `f64`). The
//! aliases at the crate root fix the scalar for the common cases.

pub mod compressor;
pub mod gridmap;
pub mod narrator;
pub mod num;
pub mod planner;
pub mod synth;

pub use num::Scalar;

pub use gridmap::{CellCoord, FloorId, NodeRef, OccupancyGrid, PortalKind};
pub use planner::{CornerRule, Direction};

pub type BuildingMap = gridmap::BuildingMap<f64>;
pub type BuildingMapF32 = gridmap::BuildingMap<f32>;
pub type Portal = gridmap::Portal<f64>;
pub type PortalF32 = gridmap::Portal<f32>;
pub type Path = planner::Path<f64>;
pub type PathF32 = planner::Path<f32>;
