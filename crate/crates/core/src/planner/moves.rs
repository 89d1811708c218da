use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::gridmap::{CellCoord, OccupancyGrid};
use crate::num::Scalar;

/// Compass heading of a single grid step. Rows grow southwards, columns
/// eastwards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    N,
    S,
    W,
    E,
    NW,
    NE,
    SW,
    SE,
}

impl Direction {
    /// Neighbor enumeration order used by the search.
    pub const ALL: [Direction; 8] = [
        Direction::N,
        Direction::S,
        Direction::W,
        Direction::E,
        Direction::NW,
        Direction::NE,
        Direction::SW,
        Direction::SE,
    ];

    pub const fn offset(self) -> (isize, isize) {
        match self {
            Direction::N => (-1, 0),
            Direction::S => (1, 0),
            Direction::W => (0, -1),
            Direction::E => (0, 1),
            Direction::NW => (-1, -1),
            Direction::NE => (-1, 1),
            Direction::SW => (1, -1),
            Direction::SE => (1, 1),
        }
    }

    pub fn from_offset(di: isize, dj: isize) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.offset() == (di, dj))
    }

    pub const fn is_diagonal(self) -> bool {
        matches!(
            self,
            Direction::NW | Direction::NE | Direction::SW | Direction::SE
        )
    }

    pub fn cost<S: Scalar>(self) -> S {
        if self.is_diagonal() {
            S::SQRT_2()
        } else {
            S::one()
        }
    }

    pub const fn code(self) -> &'static str {
        match self {
            Direction::N => "N",
            Direction::S => "S",
            Direction::W => "W",
            Direction::E => "E",
            Direction::NW => "NW",
            Direction::NE => "NE",
            Direction::SW => "SW",
            Direction::SE => "SE",
        }
    }

    /// Spelled-out lowercase name ("southeast").
    pub const fn word(self) -> &'static str {
        match self {
            Direction::N => "north",
            Direction::S => "south",
            Direction::W => "west",
            Direction::E => "east",
            Direction::NW => "northwest",
            Direction::NE => "northeast",
            Direction::SW => "southwest",
            Direction::SE => "southeast",
        }
    }

    /// The diagonal produced by one step of `self` followed by one step of
    /// `other`, when both are orthogonal and perpendicular.
    pub fn combine(self, other: Direction) -> Option<Direction> {
        if self.is_diagonal() || other.is_diagonal() {
            return None;
        }
        let (a, b) = (self.offset(), other.offset());
        let sum = (a.0 + b.0, a.1 + b.1);
        if sum.0 == 0 || sum.1 == 0 {
            return None;
        }
        Direction::from_offset(sum.0, sum.1)
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let up = s.trim().to_ascii_uppercase();
        Direction::ALL
            .into_iter()
            .find(|d| d.code() == up || d.word().eq_ignore_ascii_case(&up))
            .ok_or_else(|| format!("unknown direction '{s}'"))
    }
}

/// One row of the 8-way movement table.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MoveOffset<S> {
    pub di: isize,
    pub dj: isize,
    pub cost: S,
    pub compass: Direction,
}

pub fn move_offsets<S: Scalar>() -> [MoveOffset<S>; 8] {
    Direction::ALL.map(|d| {
        let (di, dj) = d.offset();
        MoveOffset {
            di,
            dj,
            cost: d.cost(),
            compass: d,
        }
    })
}

/// Whether diagonal moves may slip between two blocked orthogonal cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CornerRule {
    /// No flank check on diagonals.
    #[default]
    Permissive,
    /// A diagonal needs both orthogonal flank cells free.
    Strict,
}

impl FromStr for CornerRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "permissive" => Ok(CornerRule::Permissive),
            "strict" => Ok(CornerRule::Strict),
            other => Err(format!(
                "unknown corner rule '{other}' (expected permissive|strict)"
            )),
        }
    }
}

impl fmt::Display for CornerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CornerRule::Permissive => "permissive",
            CornerRule::Strict => "strict",
        })
    }
}

/// Target cell of a single grid step from `from`, if the step is an edge of
/// the grid graph under `rule`. `from` itself is not checked.
#[inline]
pub fn step_target(
    grid: &OccupancyGrid,
    from: CellCoord,
    dir: Direction,
    rule: CornerRule,
) -> Option<CellCoord> {
    let (di, dj) = dir.offset();
    let (i, j) = (from.i as isize, from.j as isize);
    if !grid.is_free_at(i + di, j + dj) {
        return None;
    }
    if dir.is_diagonal()
        && rule == CornerRule::Strict
        && !(grid.is_free_at(i + di, j) && grid.is_free_at(i, j + dj))
    {
        return None;
    }
    Some(CellCoord::new((i + di) as usize, (j + dj) as usize))
}
