//! Tile grid, authored enemy routes and spawn scripts.
//!
//! Cells are addressed as `(x, y)`: `x` is the column counted from the left,
//! `y` the row counted from the top, both zero-indexed. Distances are
//! Euclidean between cell centers, in tile units.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A grid coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    /// True when `other` shares an edge with this cell.
    pub fn is_adjacent(self, other: Cell) -> bool {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y) == 1
    }

    pub fn distance(self, other: Cell) -> f64 {
        self.point().distance(other.point())
    }

    /// Center of the cell in continuous tile coordinates.
    pub fn point(self) -> Point {
        Point { x: f64::from(self.x), y: f64::from(self.y) }
    }
}

impl From<[u32; 2]> for Cell {
    fn from([x, y]: [u32; 2]) -> Self {
        Cell { x, y }
    }
}

impl From<Cell> for [u32; 2] {
    fn from(c: Cell) -> Self {
        [c.x, c.y]
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A continuous position on the map (cell centers sit on integer coordinates).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TileKind {
    Buildable,
    Path,
    Blocked,
    Base,
}

/// An ordered list of 4-adjacent path cells ending at the base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathRoute {
    pub waypoints: Vec<Cell>,
}

impl PathRoute {
    pub fn new(waypoints: Vec<Cell>) -> Self {
        Self { waypoints }
    }

    /// Route length in tile edges.
    pub fn total_length(&self) -> f64 {
        self.waypoints.len().saturating_sub(1) as f64
    }

    pub fn head(&self) -> Option<Cell> {
        self.waypoints.first().copied()
    }

    /// Position after travelling `progress` tiles from the head.
    pub fn position_at(&self, progress: f64) -> Point {
        let Some(last) = self.waypoints.len().checked_sub(1) else {
            return Point { x: 0.0, y: 0.0 };
        };
        let p = progress.clamp(0.0, last as f64);
        let i = (p.floor() as usize).min(last);
        if i == last {
            return self.waypoints[last].point();
        }
        let frac = p - i as f64;
        let a = self.waypoints[i].point();
        let b = self.waypoints[i + 1].point();
        Point { x: a.x + (b.x - a.x) * frac, y: a.y + (b.y - a.y) * frac }
    }

    /// Indices of waypoints that equal `cell`.
    pub fn indices_of(&self, cell: Cell) -> impl Iterator<Item = usize> + '_ {
        self.waypoints.iter().enumerate().filter(move |(_, c)| **c == cell).map(|(i, _)| i)
    }

    /// Corner cells: the head, the tail, and every cell where the step direction changes.
    pub fn corners(&self) -> Vec<Cell> {
        let w = &self.waypoints;
        if w.len() <= 2 {
            return w.clone();
        }
        let step = |a: Cell, b: Cell| (i64::from(b.x) - i64::from(a.x), i64::from(b.y) - i64::from(a.y));
        let mut out = vec![w[0]];
        for i in 1..w.len() - 1 {
            if step(w[i - 1], w[i]) != step(w[i], w[i + 1]) {
                out.push(w[i]);
            }
        }
        out.push(w[w.len() - 1]);
        out
    }

    /// Inverse of [`PathRoute::corners`]. Axis-aligned corner pairs are filled
    /// cell by cell; any other pair is kept as-is so validation can reject it.
    pub fn from_corners(corners: &[Cell]) -> Self {
        let mut waypoints = Vec::new();
        for (i, &c) in corners.iter().enumerate() {
            if i == 0 {
                waypoints.push(c);
                continue;
            }
            let prev = corners[i - 1];
            if prev.x == c.x && prev.y != c.y {
                let (a, b) = (prev.y, c.y);
                if a < b {
                    waypoints.extend((a + 1..=b).map(|y| Cell::new(c.x, y)));
                } else {
                    waypoints.extend((b..a).rev().map(|y| Cell::new(c.x, y)));
                }
            } else if prev.y == c.y && prev.x != c.x {
                let (a, b) = (prev.x, c.x);
                if a < b {
                    waypoints.extend((a + 1..=b).map(|x| Cell::new(x, c.y)));
                } else {
                    waypoints.extend((b..a).rev().map(|x| Cell::new(x, c.y)));
                }
            } else {
                waypoints.push(c);
            }
        }
        Self { waypoints }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpawnEntry {
    pub enemy: String,
    /// Seconds after the attack phase starts.
    pub at: f64,
}

/// The authored enemy sequence of one spawn point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpawnScript {
    pub route: usize,
    #[serde(default)]
    pub entries: Vec<SpawnEntry>,
}

/// The level terrain plus its routes and spawn scripts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapDoc", into = "MapDoc")]
pub struct GridMap {
    pub width: u32,
    pub height: u32,
    /// Row-major tile kinds, `width * height` entries.
    pub tiles: Vec<TileKind>,
    pub routes: Vec<PathRoute>,
    pub spawns: Vec<SpawnScript>,
    pub base: Cell,
}

impl GridMap {
    pub fn in_bounds(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    pub fn tile(&self, c: Cell) -> Option<TileKind> {
        if !self.in_bounds(c) {
            return None;
        }
        self.tiles.get((c.y * self.width + c.x) as usize).copied()
    }

    /// All cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Cell::new(x, y)))
    }

    pub fn count(&self, kind: TileKind) -> usize {
        self.tiles.iter().filter(|t| **t == kind).count()
    }

    /// Renders the tile grid as ASCII rows. Route heads used by a spawn
    /// script are drawn as `S`.
    pub fn ascii_rows(&self) -> Vec<String> {
        let heads: Vec<Cell> =
            self.spawns.iter().filter_map(|s| self.routes.get(s.route).and_then(PathRoute::head)).collect();
        (0..self.height)
            .map(|y| {
                (0..self.width)
                    .map(|x| {
                        let c = Cell::new(x, y);
                        match self.tile(c) {
                            Some(TileKind::Path) if heads.contains(&c) => 'S',
                            Some(TileKind::Path) => '>',
                            Some(TileKind::Buildable) => '.',
                            Some(TileKind::Blocked) | None => '#',
                            Some(TileKind::Base) => 'B',
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Builds a map from ASCII rows (`.` buildable, `#` blocked, `>` path,
    /// `S` spawn head, `B` base) and route corner lists.
    pub fn from_ascii<S: AsRef<str>>(
        rows: &[S],
        route_corners: &[Vec<Cell>],
        spawns: Vec<SpawnScript>,
    ) -> Result<Self, MapError> {
        let height = rows.len() as u32;
        let width = rows.first().map_or(0, |r| r.as_ref().chars().count()) as u32;
        let mut tiles = Vec::with_capacity((width * height) as usize);
        let mut base = None;
        for (y, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.chars().count() as u32 != width {
                return Err(MapError::RaggedRow { row: y });
            }
            for (x, ch) in row.chars().enumerate() {
                let kind = match ch {
                    '.' => TileKind::Buildable,
                    '#' => TileKind::Blocked,
                    '>' | 'S' => TileKind::Path,
                    'B' => {
                        if base.is_some() {
                            return Err(MapError::MultipleBases);
                        }
                        base = Some(Cell::new(x as u32, y as u32));
                        TileKind::Base
                    }
                    other => return Err(MapError::UnknownTile { ch: other, x: x as u32, y: y as u32 }),
                };
                tiles.push(kind);
            }
        }
        let base = base.ok_or(MapError::MissingBase)?;
        Ok(GridMap {
            width,
            height,
            tiles,
            routes: route_corners.iter().map(|c| PathRoute::from_corners(c)).collect(),
            spawns,
            base,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("map row {row} has a different width than row 0")]
    RaggedRow { row: usize },
    #[error("unknown tile character {ch:?} at ({x}, {y})")]
    UnknownTile { ch: char, x: u32, y: u32 },
    #[error("map has no base tile `B`")]
    MissingBase,
    #[error("map has more than one base tile `B`")]
    MultipleBases,
}

/// On-disk form of a [`GridMap`].
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapDoc {
    grid: Vec<String>,
    /// Each route as its corner cells.
    routes: Vec<Vec<Cell>>,
    #[serde(default)]
    spawns: Vec<SpawnScript>,
}

impl TryFrom<MapDoc> for GridMap {
    type Error = MapError;

    fn try_from(doc: MapDoc) -> Result<Self, Self::Error> {
        GridMap::from_ascii(&doc.grid, &doc.routes, doc.spawns)
    }
}

impl From<GridMap> for MapDoc {
    fn from(map: GridMap) -> Self {
        MapDoc {
            grid: map.ascii_rows(),
            routes: map.routes.iter().map(PathRoute::corners).collect(),
            spawns: map.spawns,
        }
    }
}
