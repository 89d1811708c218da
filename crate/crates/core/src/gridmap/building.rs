use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CellCoord, EditError, GridError, OccupancyGrid};
use crate::num::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FloorId(pub u32);

impl fmt::Display for FloorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A cell on a specific floor. Graph nodes, portal endpoints and POI
/// locations all use this.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeRef {
    pub floor: FloorId,
    pub cell: CellCoord,
}

impl NodeRef {
    pub const fn new(floor: u32, i: usize, j: usize) -> Self {
        Self {
            floor: FloorId(floor),
            cell: CellCoord { i, j },
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.floor, self.cell.i, self.cell.j)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Floor {
    pub id: FloorId,
    pub label: String,
    pub grid: OccupancyGrid,
    pub source_image: Option<String>,
}

impl Floor {
    pub fn new(id: u32, label: impl Into<String>, grid: OccupancyGrid) -> Self {
        Self {
            id: FloorId(id),
            label: label.into(),
            grid,
            source_image: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortalKind {
    Escalator,
    Elevator,
    Staircase,
}

impl PortalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PortalKind::Escalator => "escalator",
            PortalKind::Elevator => "elevator",
            PortalKind::Staircase => "staircase",
        }
    }
}

impl fmt::Display for PortalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for PortalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "escalator" => Ok(PortalKind::Escalator),
            "elevator" => Ok(PortalKind::Elevator),
            "staircase" | "stairs" => Ok(PortalKind::Staircase),
            other => Err(format!("unknown portal kind '{other}'")),
        }
    }
}

/// Bidirectional link between cells on two different floors.
#[derive(Clone, Debug, PartialEq)]
pub struct Portal<S> {
    pub kind: PortalKind,
    pub a: NodeRef,
    pub b: NodeRef,
    pub cost: S,
}

impl<S: Scalar> Portal<S> {
    /// Portal with the default traversal cost of one grid step.
    pub fn new(kind: PortalKind, a: NodeRef, b: NodeRef) -> Self {
        Self {
            kind,
            a,
            b,
            cost: S::one(),
        }
    }

    pub fn with_cost(mut self, cost: S) -> Self {
        self.cost = cost;
        self
    }

    /// The endpoint opposite `at`, if `at` is one of this portal's endpoints.
    pub fn other_end(&self, at: NodeRef) -> Option<NodeRef> {
        if at == self.a {
            Some(self.b)
        } else if at == self.b {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn connects(&self, x: NodeRef, y: NodeRef) -> bool {
        (self.a == x && self.b == y) || (self.a == y && self.b == x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poi {
    pub name: String,
    pub location: NodeRef,
}

impl Poi {
    pub fn new(name: impl Into<String>, location: NodeRef) -> Self {
        Self {
            name: name.into(),
            location,
        }
    }
}

/// One broken invariant of a [`BuildingMap`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    NoFloors,
    DuplicateFloorId(FloorId),
    PoiUnknownFloor {
        poi: String,
        floor: FloorId,
    },
    PoiOutOfBounds {
        poi: String,
        at: NodeRef,
    },
    PoiBlocked {
        poi: String,
        at: NodeRef,
    },
    DuplicatePoiName(String),
    PortalSameFloor {
        portal: usize,
        floor: FloorId,
    },
    PortalUnknownFloor {
        portal: usize,
        floor: FloorId,
    },
    PortalOutOfBounds {
        portal: usize,
        at: NodeRef,
    },
    PortalBlocked {
        portal: usize,
        at: NodeRef,
    },
    PortalBadCost {
        portal: usize,
        cost: String,
    },
    /// Two portals of the same kind leave the same cell for the same floor,
    /// so a transit command could not tell them apart.
    AmbiguousPortal {
        portal: usize,
        other: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            NoFloors => write!(f, "map has no floors"),
            DuplicateFloorId(id) => write!(f, "floor id {id} declared more than once"),
            PoiUnknownFloor { poi, floor } => {
                write!(f, "POI '{poi}' references unknown floor {floor}")
            }
            PoiOutOfBounds { poi, at } => write!(f, "POI '{poi}' at {at} is outside the grid"),
            PoiBlocked { poi, at } => write!(f, "POI '{poi}' at {at} sits on a blocked cell"),
            DuplicatePoiName(n) => write!(f, "POI name '{n}' is not unique"),
            PortalSameFloor { portal, floor } => {
                write!(f, "portal #{portal} links floor {floor} to itself")
            }
            PortalUnknownFloor { portal, floor } => {
                write!(f, "portal #{portal} references unknown floor {floor}")
            }
            PortalOutOfBounds { portal, at } => {
                write!(f, "portal #{portal} endpoint {at} is outside the grid")
            }
            PortalBlocked { portal, at } => {
                write!(f, "portal #{portal} endpoint {at} sits on a blocked cell")
            }
            PortalBadCost { portal, cost } => {
                write!(f, "portal #{portal} has invalid traversal cost {cost}")
            }
            AmbiguousPortal { portal, other } => {
                write!(
                    f,
                    "portal #{portal} duplicates the departure of portal #{other}"
                )
            }
        }
    }
}

/// Floors, portals and POIs of one building. This is the persisted unit.
#[derive(Clone, Debug, PartialEq)]
pub struct BuildingMap<S> {
    pub name: String,
    /// Real-world length of one grid step, if known. Informational only.
    pub meters_per_cell: Option<f64>,
    pub floors: Vec<Floor>,
    pub portals: Vec<Portal<S>>,
    pub pois: Vec<Poi>,
}

impl<S: Scalar> BuildingMap<S> {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            meters_per_cell: None,
            floors: Vec::new(),
            portals: Vec::new(),
            pois: Vec::new(),
        }
    }

    pub fn single_floor(name: impl Into<String>, grid: OccupancyGrid) -> Self {
        let mut m = Self::new(name);
        m.floors.push(Floor::new(0, "Ground Floor", grid));
        m
    }

    pub fn with_floor(mut self, floor: Floor) -> Self {
        self.floors.push(floor);
        self
    }

    pub fn with_portal(mut self, portal: Portal<S>) -> Self {
        self.portals.push(portal);
        self
    }

    pub fn with_poi(mut self, poi: Poi) -> Self {
        self.pois.push(poi);
        self
    }

    pub fn floor(&self, id: FloorId) -> Option<&Floor> {
        self.floors.iter().find(|f| f.id == id)
    }

    pub fn floor_index(&self, id: FloorId) -> Option<usize> {
        self.floors.iter().position(|f| f.id == id)
    }

    pub fn grid(&self, id: FloorId) -> Option<&OccupancyGrid> {
        self.floor(id).map(|f| &f.grid)
    }

    pub fn is_free(&self, node: NodeRef) -> bool {
        self.grid(node.floor).is_some_and(|g| g.is_free(node.cell))
    }

    /// Case-insensitive exact lookup.
    pub fn find_poi(&self, name: &str) -> Option<&Poi> {
        let wanted = name.trim().to_lowercase();
        self.pois.iter().find(|p| p.name.to_lowercase() == wanted)
    }

    /// Portals with an endpoint at `node`, in declaration order, paired with
    /// the opposite endpoint.
    pub fn portals_at(&self, node: NodeRef) -> impl Iterator<Item = (&Portal<S>, NodeRef)> + '_ {
        self.portals
            .iter()
            .filter_map(move |p| p.other_end(node).map(|o| (p, o)))
    }

    /// The first declared portal joining `x` and `y`.
    pub fn portal_between(&self, x: NodeRef, y: NodeRef) -> Option<&Portal<S>> {
        self.portals.iter().find(|p| p.connects(x, y))
    }

    /// Returns every broken invariant; empty means the map is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.floors.is_empty() {
            out.push(Violation::NoFloors);
        }
        let mut seen = HashSet::new();
        for f in &self.floors {
            if !seen.insert(f.id) {
                out.push(Violation::DuplicateFloorId(f.id));
            }
        }

        let mut names = HashSet::new();
        for poi in &self.pois {
            let at = poi.location;
            match self.grid(at.floor) {
                None => out.push(Violation::PoiUnknownFloor {
                    poi: poi.name.clone(),
                    floor: at.floor,
                }),
                Some(g) if !g.in_bounds(at.cell) => out.push(Violation::PoiOutOfBounds {
                    poi: poi.name.clone(),
                    at,
                }),
                Some(g) if !g.is_free(at.cell) => out.push(Violation::PoiBlocked {
                    poi: poi.name.clone(),
                    at,
                }),
                Some(_) => {}
            }
            if !names.insert(poi.name.to_lowercase()) {
                out.push(Violation::DuplicatePoiName(poi.name.clone()));
            }
        }

        let mut departures: HashMap<(NodeRef, FloorId, PortalKind), usize> = HashMap::new();
        for (idx, p) in self.portals.iter().enumerate() {
            if p.a.floor == p.b.floor {
                out.push(Violation::PortalSameFloor {
                    portal: idx,
                    floor: p.a.floor,
                });
            }
            for end in [p.a, p.b] {
                match self.grid(end.floor) {
                    None => out.push(Violation::PortalUnknownFloor {
                        portal: idx,
                        floor: end.floor,
                    }),
                    Some(g) if !g.in_bounds(end.cell) => out.push(Violation::PortalOutOfBounds {
                        portal: idx,
                        at: end,
                    }),
                    Some(g) if !g.is_free(end.cell) => out.push(Violation::PortalBlocked {
                        portal: idx,
                        at: end,
                    }),
                    Some(_) => {}
                }
            }
            if !(p.cost.is_finite() && p.cost >= S::zero()) {
                out.push(Violation::PortalBadCost {
                    portal: idx,
                    cost: p.cost.to_string(),
                });
            }
            for (from, to) in [(p.a, p.b.floor), (p.b, p.a.floor)] {
                if let Some(&other) = departures.get(&(from, to, p.kind)) {
                    if other != idx {
                        out.push(Violation::AmbiguousPortal { portal: idx, other });
                    }
                } else {
                    departures.insert((from, to, p.kind), idx);
                }
            }
        }
        out
    }

    fn anchored_at(&self, node: NodeRef) -> Option<String> {
        if let Some(p) = self.pois.iter().find(|p| p.location == node) {
            return Some(format!("POI '{}'", p.name));
        }
        self.portals
            .iter()
            .position(|p| p.a == node || p.b == node)
            .map(|idx| format!("portal #{idx}"))
    }

    /// Changes one cell. Blocking a cell that hosts a POI or portal endpoint
    /// is rejected and leaves the map untouched.
    pub fn set_cell(
        &mut self,
        floor: FloorId,
        cell: CellCoord,
        free: bool,
    ) -> Result<(), EditError> {
        let node = NodeRef { floor, cell };
        let idx = self
            .floor_index(floor)
            .ok_or(EditError::UnknownFloor(floor))?;
        if !self.floors[idx].grid.in_bounds(cell) {
            let g = &self.floors[idx].grid;
            return Err(GridError::OutOfBounds {
                cell,
                rows: g.rows(),
                cols: g.cols(),
            }
            .into());
        }
        if !free {
            if let Some(anchor) = self.anchored_at(node) {
                return Err(EditError::WouldOrphanPoiOrPortal { at: node, anchor });
            }
        }
        self.floors[idx].grid.set(cell, free)?;
        Ok(())
    }

    /// Value-style [`set_cell`](Self::set_cell).
    pub fn with_cell(
        &self,
        floor: FloorId,
        cell: CellCoord,
        free: bool,
    ) -> Result<Self, EditError> {
        let mut next = self.clone();
        next.set_cell(floor, cell, free)?;
        Ok(next)
    }

    pub fn add_poi(&mut self, poi: Poi) -> Result<(), EditError> {
        self.pois.push(poi);
        self.revalidate_or_pop(|m| {
            m.pois.pop();
        })
    }

    pub fn remove_poi(&mut self, name: &str) -> Result<Poi, EditError> {
        let wanted = name.trim().to_lowercase();
        let idx = self
            .pois
            .iter()
            .position(|p| p.name.to_lowercase() == wanted)
            .ok_or_else(|| EditError::NotFound(format!("POI '{name}'")))?;
        Ok(self.pois.remove(idx))
    }

    pub fn add_portal(&mut self, portal: Portal<S>) -> Result<(), EditError> {
        self.portals.push(portal);
        self.revalidate_or_pop(|m| {
            m.portals.pop();
        })
    }

    pub fn remove_portal(&mut self, index: usize) -> Result<Portal<S>, EditError> {
        if index >= self.portals.len() {
            return Err(EditError::NotFound(format!("portal #{index}")));
        }
        Ok(self.portals.remove(index))
    }

    fn revalidate_or_pop(&mut self, undo: impl FnOnce(&mut Self)) -> Result<(), EditError> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            undo(self);
            Err(EditError::Invalid(violations))
        }
    }

    /// Converts every cost to another scalar type.
    pub fn cast<T: Scalar>(&self) -> BuildingMap<T> {
        BuildingMap {
            name: self.name.clone(),
            meters_per_cell: self.meters_per_cell,
            floors: self.floors.clone(),
            portals: self
                .portals
                .iter()
                .map(|p| Portal {
                    kind: p.kind,
                    a: p.a,
                    b: p.b,
                    cost: T::lossy_from_f64(p.cost.as_f64()),
                })
                .collect(),
            pois: self.pois.clone(),
        }
    }
}
