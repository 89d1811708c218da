//! Occupancy grids, multi-floor building maps and their persistence.

mod binarize;
mod building;
mod bundle;
mod grid;

pub use binarize::{binarize_mask, suggest_dimensions, BinarizeParams, GrayMask, LuminanceCutoff};
pub use building::{BuildingMap, Floor, FloorId, NodeRef, Poi, Portal, PortalKind, Violation};
pub use bundle::{
    from_bundle_str, load_bundle, save_bundle, to_bundle_string, BundleError, BUNDLE_SCHEMA,
};
pub use grid::{CellCoord, OccupancyGrid};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GridError {
    #[error("mask is empty")]
    EmptyMask,
    #[error("mask of {width}x{height} pixels has {len} bytes")]
    MaskShape {
        width: usize,
        height: usize,
        len: usize,
    },
    #[error("grid {rows}x{cols} is larger than the {height}x{width} mask")]
    GridLargerThanMask {
        rows: usize,
        cols: usize,
        height: usize,
        width: usize,
    },
    #[error("blocked threshold {0} outside (0, 1]")]
    InvalidThreshold(f64),
    #[error("grid dimensions must be positive, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("{len} cells cannot fill a {rows}x{cols} grid")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("row {row} has {found} cells, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} col {col}: expected '0' or '1', found {ch:?}")]
    BadCellChar { row: usize, col: usize, ch: char },
    #[error("declared shape {declared:?} does not match grid {actual:?}")]
    DeclaredShape {
        declared: (usize, usize),
        actual: (usize, usize),
    },
    #[error("cell {cell} outside {rows}x{cols} grid")]
    OutOfBounds {
        cell: CellCoord,
        rows: usize,
        cols: usize,
    },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EditError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("unknown floor {0}")]
    UnknownFloor(FloorId),
    #[error("blocking {at} would strand {anchor}")]
    WouldOrphanPoiOrPortal { at: NodeRef, anchor: String },
    #[error("{0} not found")]
    NotFound(String),
    #[error("edit breaks map invariants: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}
