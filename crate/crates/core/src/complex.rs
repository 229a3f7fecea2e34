//! Cubical sets on a dyadic grid over a rectangle, and the boundary
//! matrices of their (relative) chain complexes.
//!
//! At depth `d` the rectangle is cut into `2^d × 2^d` squares. Cells are
//! addressed by integer anchors: vertex `(i, j)` with `0 ≤ i, j ≤ 2^d`,
//! horizontal edge `(i, j)` from vertex `(i, j)` to `(i+1, j)`, vertical edge
//! `(i, j)` from `(i, j)` to `(i, j+1)`, and square `(i, j)` with lower-left
//! vertex `(i, j)`.
//!
//! Orientation: edges run toward increasing coordinate, so
//! `∂[edge] = end − start`, and `∂[square] = bottom + right − top − left`
//! (the product rule `∂(I×J) = ∂I×J − I×∂J`), which makes `d1 · d2 = 0`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::geometry::Point;
use crate::matrix::IntMatrix;

/// Largest supported grid depth.
pub const MAX_DEPTH: u8 = 12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComplexError {
    #[error("invalid rectangle [{x0}, {x1}] x [{y0}, {y1}]")]
    InvalidRect { x0: f64, x1: f64, y0: f64, y1: f64 },
    #[error("depth {0} exceeds the cap of {MAX_DEPTH}")]
    DepthTooLarge(u8),
    #[error("no grid cell satisfies the shape predicate")]
    EmptySet,
    #[error("L is not a subcomplex of N")]
    NotSubcomplex,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, ComplexError> {
        let ok = [x0, x1, y0, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1;
        if !ok {
            return Err(ComplexError::InvalidRect { x0, x1, y0, y1 });
        }
        Ok(Rect { x0, x1, y0, y1 })
    }

    /// Square of half-width `half` about `center`.
    pub fn square(center: Point, half: f64) -> Result<Self, ComplexError> {
        Rect::new(center.x - half, center.x + half, center.y - half, center.y + half)
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    /// Cell size `(dx, dy)` at `depth`.
    pub fn cell_size(&self, depth: u8) -> (f64, f64) {
        let n = (1u64 << depth) as f64;
        (self.width() / n, self.height() / n)
    }

    /// Grid vertex `(i, j)` at `depth`; exact at the rectangle's corners.
    pub fn vertex(&self, depth: u8, i: u32, j: u32) -> Point {
        let n = (1u64 << depth) as f64;
        let lerp = |a: f64, b: f64, k: u32| {
            let t = k as f64 / n;
            if k as f64 == n {
                b
            } else {
                a + (b - a) * t
            }
        };
        Point::new(lerp(self.x0, self.x1, i), lerp(self.y0, self.y1, j))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    Horizontal,
    Vertical,
}

impl Axis {
    pub fn tag(self) -> &'static str {
        match self {
            Axis::Horizontal => "h",
            Axis::Vertical => "v",
        }
    }
}

/// One cube of the grid. The derived order is the canonical cell order:
/// lexicographic by `(dim, j, i, axis)` (depth is uniform within a set).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub depth: u8,
    pub dim: u8,
    pub j: u32,
    pub i: u32,
    pub axis: Option<Axis>,
}

impl Cell {
    pub fn vertex(depth: u8, i: u32, j: u32) -> Self {
        Cell { depth, dim: 0, j, i, axis: None }
    }

    pub fn edge(depth: u8, axis: Axis, i: u32, j: u32) -> Self {
        Cell { depth, dim: 1, j, i, axis: Some(axis) }
    }

    pub fn square(depth: u8, i: u32, j: u32) -> Self {
        Cell { depth, dim: 2, j, i, axis: None }
    }

    /// Codimension-one faces with their incidence numbers.
    pub fn boundary(&self) -> Vec<(Cell, i64)> {
        let (d, i, j) = (self.depth, self.i, self.j);
        match (self.dim, self.axis) {
            (2, _) => vec![
                (Cell::edge(d, Axis::Horizontal, i, j), 1),
                (Cell::edge(d, Axis::Vertical, i + 1, j), 1),
                (Cell::edge(d, Axis::Horizontal, i, j + 1), -1),
                (Cell::edge(d, Axis::Vertical, i, j), -1),
            ],
            (1, Some(Axis::Horizontal)) => {
                vec![(Cell::vertex(d, i + 1, j), 1), (Cell::vertex(d, i, j), -1)]
            }
            (1, Some(Axis::Vertical)) => {
                vec![(Cell::vertex(d, i, j + 1), 1), (Cell::vertex(d, i, j), -1)]
            }
            _ => Vec::new(),
        }
    }

    /// Axis-aligned bounding box `(min, max)` of the cell's realization.
    pub fn bounds(&self, rect: &Rect) -> (Point, Point) {
        let (d, i, j) = (self.depth, self.i, self.j);
        let lo = rect.vertex(d, i, j);
        let hi = match (self.dim, self.axis) {
            (2, _) => rect.vertex(d, i + 1, j + 1),
            (1, Some(Axis::Horizontal)) => rect.vertex(d, i + 1, j),
            (1, Some(Axis::Vertical)) => rect.vertex(d, i, j + 1),
            _ => lo,
        };
        (lo, hi)
    }

    pub fn center(&self, rect: &Rect) -> Point {
        let (lo, hi) = self.bounds(rect);
        (lo + hi) * 0.5
    }
}

/// A closed set of grid cells at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicalSet {
    rect: Rect,
    depth: u8,
    cells: BTreeSet<Cell>,
}

impl CubicalSet {
    pub fn empty(rect: Rect, depth: u8) -> Self {
        CubicalSet { rect, depth, cells: BTreeSet::new() }
    }

    /// Closure of the given cells.
    pub fn from_cells(rect: Rect, depth: u8, cells: impl IntoIterator<Item = Cell>) -> Self {
        let mut set = CubicalSet::empty(rect, depth);
        for c in cells {
            set.insert_closed(c);
        }
        set
    }

    fn insert_closed(&mut self, c: Cell) {
        debug_assert_eq!(c.depth, self.depth);
        if self.cells.insert(c) {
            for (f, _) in c.boundary() {
                self.insert_closed(f);
            }
        }
    }

    pub fn rect(&self) -> &Rect {
        &self.rect
    }

    pub fn depth(&self) -> u8 {
        self.depth
    }

    pub fn cells(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter()
    }

    pub fn cells_of_dim(&self, dim: u8) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter().filter(move |c| c.dim == dim)
    }

    pub fn squares(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells_of_dim(2)
    }

    pub fn count(&self, dim: u8) -> usize {
        self.cells_of_dim(dim).count()
    }

    /// `(#vertices, #edges, #squares)`.
    pub fn counts(&self) -> [usize; 3] {
        [self.count(0), self.count(1), self.count(2)]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: &Cell) -> bool {
        self.cells.contains(c)
    }

    /// Cells not a face of any other member.
    pub fn top_cells(&self) -> Vec<Cell> {
        let faces: BTreeSet<Cell> = self
            .cells
            .iter()
            .flat_map(|c| c.boundary().into_iter().map(|(f, _)| f))
            .collect();
        self.cells.iter().filter(|c| !faces.contains(c)).copied().collect()
    }

    /// Re-closes the set; a no-op for any value built by this module.
    pub fn closure(&self) -> CubicalSet {
        CubicalSet::from_cells(self.rect, self.depth, self.cells.iter().copied())
    }

    pub fn is_subset_of(&self, other: &CubicalSet) -> bool {
        self.depth == other.depth
            && self.rect == other.rect
            && self.cells.iter().all(|c| other.cells.contains(c))
    }

    pub fn union(&self, other: &CubicalSet) -> CubicalSet {
        let mut out = self.clone();
        out.cells.extend(other.cells.iter().copied());
        out
    }

    pub fn intersection(&self, other: &CubicalSet) -> CubicalSet {
        CubicalSet {
            rect: self.rect,
            depth: self.depth,
            cells: self.cells.intersection(&other.cells).copied().collect(),
        }
    }

    /// Edges that bound exactly one square of the set, each paired with that
    /// square. These form the topological boundary of the union of squares.
    pub fn boundary_edges(&self) -> Vec<(Cell, Cell)> {
        let mut seen: std::collections::BTreeMap<Cell, (usize, Cell)> = Default::default();
        for sq in self.squares() {
            for (e, _) in sq.boundary() {
                seen.entry(e).and_modify(|(n, _)| *n += 1).or_insert((1, *sq));
            }
        }
        seen.into_iter().filter(|(_, (n, _))| *n == 1).map(|(e, (_, sq))| (e, sq)).collect()
    }

    /// Whether the squares form one piece under edge adjacency.
    pub fn is_edge_connected(&self) -> bool {
        let squares: Vec<Cell> = self.squares().copied().collect();
        let Some(&first) = squares.first() else {
            return false;
        };
        let all: BTreeSet<Cell> = squares.iter().copied().collect();
        let mut seen = BTreeSet::from([first]);
        let mut stack = vec![first];
        while let Some(c) = stack.pop() {
            let (i, j) = (c.i as i64, c.j as i64);
            for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let (ni, nj) = (i + di, j + dj);
                if ni < 0 || nj < 0 {
                    continue;
                }
                let n = Cell::square(self.depth, ni as u32, nj as u32);
                if all.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        seen.len() == all.len()
    }

    /// Squares whose closed realization contains `p`.
    pub fn squares_containing(&self, p: Point, slack: f64) -> Vec<Cell> {
        self.squares()
            .filter(|c| {
                let (lo, hi) = c.bounds(&self.rect);
                p.x >= lo.x - slack && p.x <= hi.x + slack && p.y >= lo.y - slack && p.y <= hi.y + slack
            })
            .copied()
            .collect()
    }

    pub fn contains_point(&self, p: Point) -> bool {
        !self.squares_containing(p, 0.0).is_empty()
    }
}

/// Squares whose centers satisfy `predicate`, closed under faces.
pub fn build_set(
    rect: Rect,
    depth: u8,
    predicate: impl Fn(Point) -> bool,
) -> Result<CubicalSet, ComplexError> {
    if depth > MAX_DEPTH {
        return Err(ComplexError::DepthTooLarge(depth));
    }
    let n = 1u32 << depth;
    let mut squares = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let c = Cell::square(depth, i, j);
            if predicate(c.center(&rect)) {
                squares.push(c);
            }
        }
    }
    if squares.is_empty() {
        return Err(ComplexError::EmptySet);
    }
    Ok(CubicalSet::from_cells(rect, depth, squares))
}

/// Boundary matrices of a chain complex, with the cells indexing rows and
/// columns listed in canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrices {
    /// `cells[k]` indexes the k-chains.
    pub cells: [Vec<Cell>; 3],
    /// 1-cells → 0-cells (rows: `cells[0]`, columns: `cells[1]`).
    pub d1: IntMatrix,
    /// 2-cells → 1-cells (rows: `cells[1]`, columns: `cells[2]`).
    pub d2: IntMatrix,
}

impl BoundaryMatrices {
    pub fn counts(&self) -> [usize; 3] {
        [self.cells[0].len(), self.cells[1].len(), self.cells[2].len()]
    }

    /// Alternating cell count `#0 − #1 + #2`.
    pub fn euler_from_cells(&self) -> i64 {
        let [c0, c1, c2] = self.counts();
        c0 as i64 - c1 as i64 + c2 as i64
    }
}

pub fn boundary_matrices(s: &CubicalSet) -> BoundaryMatrices {
    let empty = CubicalSet::empty(s.rect, s.depth);
    relative_complex(s, &empty).expect("the empty set is a subcomplex")
}

/// Chain complex of the quotient `C(N)/C(L)`: cells of `l` are deleted from
/// every index set.
pub fn relative_complex(n: &CubicalSet, l: &CubicalSet) -> Result<BoundaryMatrices, ComplexError> {
    if !l.is_empty() && !l.is_subset_of(n) {
        return Err(ComplexError::NotSubcomplex);
    }
    let mut cells: [Vec<Cell>; 3] = Default::default();
    for c in n.cells.iter().filter(|c| !l.contains(c)) {
        cells[c.dim as usize].push(*c);
    }
    let index = |dim: usize| -> std::collections::HashMap<Cell, usize> {
        cells[dim].iter().enumerate().map(|(k, c)| (*c, k)).collect()
    };
    let build = |dim: usize| -> IntMatrix {
        let rows = index(dim - 1);
        let mut m = IntMatrix::zeros(cells[dim - 1].len(), cells[dim].len());
        for (col, c) in cells[dim].iter().enumerate() {
            for (f, sign) in c.boundary() {
                if let Some(&row) = rows.get(&f) {
                    m.set(row, col, sign);
                }
            }
        }
        m
    };
    let d1 = build(1);
    let d2 = build(2);
    Ok(BoundaryMatrices { cells, d1, d2 })
}

pub const CELL_CSV_HEADER: &str = "dim,depth,i,j,axis,x_min,y_min,x_max,y_max";

/// One CSV row (no newline) in the cell-geometry format.
pub fn cell_csv_row(c: &Cell, rect: &Rect) -> String {
    let (lo, hi) = c.bounds(rect);
    format!(
        "{},{},{},{},{},{},{},{},{}",
        c.dim,
        c.depth,
        c.i,
        c.j,
        c.axis.map_or("", Axis::tag),
        lo.x,
        lo.y,
        hi.x,
        hi.y
    )
}

/// Cell geometry export, one row per cell in canonical order.
pub fn cells_csv(s: &CubicalSet) -> String {
    let mut out = String::from(CELL_CSV_HEADER);
    out.push('\n');
    for c in s.cells() {
        let _ = writeln!(out, "{}", cell_csv_row(c, &s.rect));
    }
    out
}
