//! Polyomino geometry: cells, the dual graph, the boundary cycle and cuts.
//!
//! Cells are addressed by integer coordinates with `y` growing upward. A
//! lattice vertex `(x, y)` is the lower-left corner of cell `(x, y)`.

use std::collections::VecDeque;
use crate::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NONE: u32 = u32::MAX;

/// Neighbour offsets in the order east, west, north, south.
pub const DIRS: [(i32, i32); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub x: i32,
    pub y: i32,
}

impl CellCoord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i32, dy: i32) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }

    pub fn manhattan(self, other: Self) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn is_adjacent(self, other: Self) -> bool {
        self.manhattan(other) == 1
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeVertex {
    pub x: i32,
    pub y: i32,
}

impl LatticeVertex {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }
}

impl fmt::Display for LatticeVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DomainError {
    #[error("map contains no cells")]
    EmptyDomain,
    #[error("cells are not 4-connected")]
    Disconnected,
    #[error("polyomino has a hole")]
    HasHole,
    #[error("unexpected character {ch:?} at line {line}, column {column}")]
    BadCharacter { line: usize, column: usize, ch: char },
    #[error("cell {0} is not part of the domain")]
    CellNotInDomain(CellCoord),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
}

/// A simple polyomino together with a dense index over its bounding box.
#[derive(Clone)]
pub struct Polyomino {
    cells: Vec<CellCoord>,
    min_x: i32,
    min_y: i32,
    width: i32,
    height: i32,
    index: Vec<u32>,
    adj: Vec<[u32; 4]>,
}

impl PartialEq for Polyomino {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for Polyomino {}

impl fmt::Debug for Polyomino {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polyomino(n={}, origin=({}, {}))\n{}", self.area(), self.min_x, self.min_y, self.to_ascii())
    }
}

impl Polyomino {
    /// Builds a polyomino from cells, checking connectivity and simplicity.
    pub fn new(cells: impl IntoIterator<Item = CellCoord>) -> Result<Self, DomainError> {
        let p = Self::build(cells)?;
        if !p.is_connected() {
            return Err(DomainError::Disconnected);
        }
        if p.has_hole() {
            return Err(DomainError::HasHole);
        }
        Ok(p)
    }

    fn build(cells: impl IntoIterator<Item = CellCoord>) -> Result<Self, DomainError> {
        let mut cells: Vec<CellCoord> = cells.into_iter().collect();
        cells.sort_unstable();
        cells.dedup();
        if cells.is_empty() {
            return Err(DomainError::EmptyDomain);
        }
        let min_x = cells.iter().map(|c| c.x).min().unwrap();
        let max_x = cells.iter().map(|c| c.x).max().unwrap();
        let min_y = cells.iter().map(|c| c.y).min().unwrap();
        let max_y = cells.iter().map(|c| c.y).max().unwrap();
        let width = max_x - min_x + 1;
        let height = max_y - min_y + 1;
        let mut index = vec![NONE; (width as usize) * (height as usize)];
        for (i, c) in cells.iter().enumerate() {
            index[((c.y - min_y) * width + (c.x - min_x)) as usize] = i as u32;
        }
        let mut p = Self { cells, min_x, min_y, width, height, index, adj: Vec::new() };
        p.adj = p
            .cells
            .iter()
            .map(|c| {
                let mut a = [NONE; 4];
                for (k, (dx, dy)) in DIRS.iter().enumerate() {
                    a[k] = p.index_of(c.offset(*dx, *dy)).map_or(NONE, |i| i as u32);
                }
                a
            })
            .collect();
        Ok(p)
    }

    /// Parses an ASCII map: `#` is a cell, `.` (or space) is empty, the first
    /// row is the topmost one. The result is normalised to a (0, 0) origin.
    pub fn parse(text: &str) -> Result<Self, DomainError> {
        let rows: Vec<&str> = text
            .lines()
            .map(|l| l.trim_end_matches(['\r', ' ']))
            .collect::<Vec<_>>();
        // trailing blank lines carry no cells
        let end = rows.iter().rposition(|r| !r.is_empty()).map_or(0, |i| i + 1);
        let rows = &rows[..end];
        let h = rows.len() as i32;
        let mut cells = Vec::new();
        for (line, row) in rows.iter().enumerate() {
            for (column, ch) in row.chars().enumerate() {
                match ch {
                    '#' => cells.push(CellCoord::new(column as i32, h - 1 - line as i32)),
                    '.' | ' ' => {}
                    _ => return Err(DomainError::BadCharacter { line: line + 1, column: column + 1, ch }),
                }
            }
        }
        let p = Self::new(cells)?;
        Ok(p.normalized())
    }

    /// Translates so that the bounding-box minimum is the origin.
    pub fn normalized(&self) -> Self {
        if self.min_x == 0 && self.min_y == 0 {
            return self.clone();
        }
        let (dx, dy) = (self.min_x, self.min_y);
        Self::build(self.cells.iter().map(|c| c.offset(-dx, -dy))).expect("non-empty")
    }

    pub fn to_ascii(&self) -> String {
        let mut out = String::with_capacity(((self.width + 1) * self.height) as usize);
        for y in (self.min_y..self.min_y + self.height).rev() {
            let mut row = String::with_capacity(self.width as usize);
            for x in self.min_x..self.min_x + self.width {
                row.push(if self.contains(CellCoord::new(x, y)) { '#' } else { '.' });
            }
            out.push_str(row.trim_end_matches('.'));
            out.push('\n');
        }
        out
    }

    pub fn area(&self) -> usize {
        self.cells.len()
    }

    pub fn cells(&self) -> &[CellCoord] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> CellCoord {
        self.cells[i]
    }

    /// Bounding box as `(min_x, min_y, width, height)`.
    pub fn bbox(&self) -> (i32, i32, i32, i32) {
        (self.min_x, self.min_y, self.width, self.height)
    }

    pub fn index_of(&self, c: CellCoord) -> Option<usize> {
        let x = c.x - self.min_x;
        let y = c.y - self.min_y;
        if x < 0 || y < 0 || x >= self.width || y >= self.height {
            return None;
        }
        let i = self.index[(y * self.width + x) as usize];
        (i != NONE).then_some(i as usize)
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        self.index_of(c).is_some()
    }

    /// Neighbour indices of cell `i` in the dual graph.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[i].iter().filter(|&&j| j != NONE).map(|&j| j as usize)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].iter().filter(|&&j| j != NONE).count()
    }

    /// Raw neighbour table (east, west, north, south; `NONE` when absent).
    pub fn adjacency(&self) -> &[[u32; 4]] {
        &self.adj
    }

    /// Adjacency lists of the dual graph.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        (0..self.area()).map(|i| self.neighbors(i).collect()).collect()
    }

    /// Dual-graph edges as index pairs `(a, b)` with `a < b`.
    pub fn dual_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::with_capacity(2 * self.area());
        for i in 0..self.area() {
            for j in [self.adj[i][0], self.adj[i][2]] {
                if j != NONE {
                    let j = j as usize;
                    edges.push((i.min(j), i.max(j)));
                }
            }
        }
        edges
    }

    fn is_connected(&self) -> bool {
        let d = self.bfs_from(&[0]);
        d.iter().all(|&x| x != NONE)
    }

    fn has_hole(&self) -> bool {
        // flood the complement inside the bounding box grown by one
        let w = self.width + 2;
        let h = self.height + 2;
        let mut seen = vec![false; (w * h) as usize];
        let occupied = |x: i32, y: i32| self.contains(CellCoord::new(x + self.min_x - 1, y + self.min_y - 1));
        let mut empty_total = 0usize;
        for y in 0..h {
            for x in 0..w {
                if !occupied(x, y) {
                    empty_total += 1;
                }
            }
        }
        let mut queue = VecDeque::from([(0, 0)]);
        seen[0] = true;
        let mut reached = 0usize;
        while let Some((x, y)) = queue.pop_front() {
            reached += 1;
            for (dx, dy) in DIRS {
                let (nx, ny) = (x + dx, y + dy);
                if nx < 0 || ny < 0 || nx >= w || ny >= h {
                    continue;
                }
                let k = (ny * w + nx) as usize;
                if !seen[k] && !occupied(nx, ny) {
                    seen[k] = true;
                    queue.push_back((nx, ny));
                }
            }
        }
        reached != empty_total
    }

    /// Multi-source BFS distances over the dual graph (`NONE` = unreachable).
    pub fn bfs_from(&self, sources: &[usize]) -> Vec<u32> {
        self.bfs_within(sources, |_| true)
    }

    /// BFS restricted to cells accepted by `allowed`.
    pub fn bfs_within(&self, sources: &[usize], allowed: impl Fn(usize) -> bool) -> Vec<u32> {
        let mut dist = vec![NONE; self.area()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] == NONE && allowed(s) {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            for v in self.neighbors(u) {
                if dist[v] == NONE && allowed(v) {
                    dist[v] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn geodesic_distance(&self, a: CellCoord, b: CellCoord) -> Result<u32, DomainError> {
        let ia = self.index_of(a).ok_or(DomainError::CellNotInDomain(a))?;
        let ib = self.index_of(b).ok_or(DomainError::CellNotInDomain(b))?;
        if ia == ib {
            return Ok(0);
        }
        Ok(self.bfs_from(&[ia])[ib])
    }

    /// Number of cells with at least one side on the boundary.
    pub fn is_boundary_cell(&self, i: usize) -> bool {
        self.adj[i].iter().any(|&j| j == NONE)
    }

    /// The outer boundary as a closed counterclockwise lattice cycle starting
    /// at the lexicographically smallest vertex. The start is not repeated.
    pub fn boundary_cycle(&self) -> Vec<LatticeVertex> {
        let mut next: HashMap<LatticeVertex, LatticeVertex> = HashMap::default();
        for c in &self.cells {
            let (x, y) = (c.x, c.y);
            let v = LatticeVertex::new;
            if !self.contains(c.offset(0, -1)) {
                next.insert(v(x, y), v(x + 1, y));
            }
            if !self.contains(c.offset(1, 0)) {
                next.insert(v(x + 1, y), v(x + 1, y + 1));
            }
            if !self.contains(c.offset(0, 1)) {
                next.insert(v(x + 1, y + 1), v(x, y + 1));
            }
            if !self.contains(c.offset(-1, 0)) {
                next.insert(v(x, y + 1), v(x, y));
            }
        }
        let start = *next.keys().min().expect("non-empty boundary");
        let mut cycle = Vec::with_capacity(next.len());
        let mut cur = start;
        loop {
            cycle.push(cur);
            cur = next[&cur];
            if cur == start {
                break;
            }
        }
        cycle
    }

    pub fn perimeter(&self) -> usize {
        4 * self.area() - 2 * self.dual_edges().len()
    }

    /// Whether the lattice edge between two adjacent vertices has cells of
    /// `self` on both sides.
    pub fn is_interior_edge(&self, a: LatticeVertex, b: LatticeVertex) -> bool {
        self.crossed_cells(a, b).is_some()
    }

    /// The pair of cells on both sides of a unit lattice edge, if both exist.
    pub fn crossed_cells(&self, a: LatticeVertex, b: LatticeVertex) -> Option<(CellCoord, CellCoord)> {
        let (c1, c2) = crossed_pair(a, b)?;
        (self.contains(c1) && self.contains(c2)).then_some((c1, c2))
    }

    /// Number of cells among the four around a lattice vertex.
    pub fn vertex_occupancy(&self, v: LatticeVertex) -> u8 {
        [(-1, -1), (0, -1), (-1, 0), (0, 0)]
            .iter()
            .filter(|(dx, dy)| self.contains(CellCoord::new(v.x + dx, v.y + dy)))
            .count() as u8
    }

    /// Sub-polyomino on the given cell indices (must be simple and connected).
    pub fn subpolyomino(&self, indices: &[usize]) -> Result<Self, DomainError> {
        Self::new(indices.iter().map(|&i| self.cells[i]))
    }
}

/// The two cells separated by a unit lattice edge (ordered low to high).
pub fn crossed_pair(a: LatticeVertex, b: LatticeVertex) -> Option<(CellCoord, CellCoord)> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    if a.y == b.y && b.x == a.x + 1 {
        Some((CellCoord::new(a.x, a.y - 1), CellCoord::new(a.x, a.y)))
    } else if a.x == b.x && b.y == a.y + 1 {
        Some((CellCoord::new(a.x - 1, a.y), CellCoord::new(a.x, a.y)))
    } else {
        None
    }
}

/// A cut: a simple lattice path between two boundary vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cut {
    pub path: Vec<LatticeVertex>,
}

impl Cut {
    pub fn new(path: Vec<LatticeVertex>) -> Self {
        Self { path }
    }

    pub fn len(&self) -> usize {
        self.path.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dual edges crossed by the path.
    pub fn cut_edges(&self) -> Vec<(CellCoord, CellCoord)> {
        self.path.windows(2).filter_map(|w| crossed_pair(w[0], w[1])).collect()
    }

    pub fn endpoints(&self) -> (LatticeVertex, LatticeVertex) {
        (self.path[0], *self.path.last().unwrap())
    }
}

/// Boundary cycle with a vertex → position lookup.
pub struct Boundary {
    pub cycle: Vec<LatticeVertex>,
    pos: HashMap<LatticeVertex, usize>,
}

impl Boundary {
    pub fn of(p: &Polyomino) -> Self {
        let cycle = p.boundary_cycle();
        let pos = cycle.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        Self { cycle, pos }
    }

    pub fn position(&self, v: LatticeVertex) -> Option<usize> {
        self.pos.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Length of the shorter boundary arc between two boundary positions.
    pub fn shorter_arc(&self, i: usize, j: usize) -> usize {
        let d = i.abs_diff(j);
        d.min(self.cycle.len() - d)
    }
}

impl Polyomino {
    /// Checks every cut invariant and returns the two sides as index sets.
    pub fn validate_cut(&self, cut: &Cut) -> Result<(Vec<usize>, Vec<usize>), DomainError> {
        let bad = |m: &str| Err(DomainError::InvalidCut(m.to_string()));
        if cut.len() == 0 {
            return bad("path has no edges");
        }
        let boundary = Boundary::of(self);
        let (s, t) = cut.endpoints();
        if boundary.position(s).is_none() || boundary.position(t).is_none() {
            return bad("endpoints must lie on the boundary");
        }
        let mut seen = crate::HashSet::default();
        for v in &cut.path {
            if !seen.insert(*v) {
                return bad("path is not simple");
            }
        }
        for v in &cut.path[1..cut.path.len() - 1] {
            if boundary.position(*v).is_some() || self.vertex_occupancy(*v) != 4 {
                return bad("inner path vertex touches the boundary");
            }
        }
        let mut crossed = Vec::with_capacity(cut.len());
        for w in cut.path.windows(2) {
            match self.crossed_cells(w[0], w[1]) {
                Some((a, b)) => crossed.push((self.index_of(a).unwrap(), self.index_of(b).unwrap())),
                None => return bad("path uses a non-interior edge"),
            }
        }
        let sides = self.components_without(&crossed);
        if sides.len() != 2 {
            return bad("cut does not separate the domain into two parts");
        }
        let mut it = sides.into_iter();
        Ok((it.next().unwrap(), it.next().unwrap()))
    }

    /// Connected components of the dual graph after deleting `removed` edges.
    pub fn components_without(&self, removed: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let blocked: crate::HashSet<(usize, usize)> =
            removed.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let mut comp = vec![NONE; self.area()];
        let mut out = Vec::new();
        for s in 0..self.area() {
            if comp[s] != NONE {
                continue;
            }
            let id = out.len() as u32;
            let mut members = vec![s];
            comp[s] = id;
            let mut k = 0;
            while k < members.len() {
                let u = members[k];
                k += 1;
                for v in self.neighbors(u) {
                    if comp[v] == NONE && !blocked.contains(&(u.min(v), u.max(v))) {
                        comp[v] = id;
                        members.push(v);
                    }
                }
            }
            out.push(members);
        }
        out
    }

    /// A cut is trivial when a boundary arc between its endpoints is no
    /// longer than the cut.
    pub fn is_trivial_cut(&self, cut: &Cut) -> Result<bool, DomainError> {
        self.validate_cut(cut)?;
        let b = Boundary::of(self);
        let (s, t) = cut.endpoints();
        let arc = b.shorter_arc(b.position(s).unwrap(), b.position(t).unwrap());
        Ok(arc <= cut.len())
    }

    /// Splits along a cut into two simple pieces.
    pub fn split(&self, cut: &Cut) -> Result<(Polyomino, Polyomino), DomainError> {
        let (a, b) = self.validate_cut(cut)?;
        Ok((self.subpolyomino(&a)?, self.subpolyomino(&b)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polyomino {
        Polyomino::parse(s).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("##\n##").area(), 4);
        assert_eq!(Polyomino::parse("###\n#.#\n###"), Err(DomainError::HasHole));
        assert_eq!(Polyomino::parse("#.#"), Err(DomainError::Disconnected));
        assert_eq!(Polyomino::parse("...\n"), Err(DomainError::EmptyDomain));
        assert!(matches!(Polyomino::parse("#x"), Err(DomainError::BadCharacter { line: 1, column: 2, .. })));
    }

    #[test]
    fn pinched_corner_is_a_hole() {
        // the enclosed pocket only touches the outside through a corner
        assert_eq!(Polyomino::parse("##.\n#.#\n###"), Err(DomainError::HasHole));
    }

    #[test]
    fn first_row_is_top() {
        let u = p("#.\n##");
        assert!(u.contains(CellCoord::new(0, 1)));
        assert!(!u.contains(CellCoord::new(1, 1)));
        assert_eq!(u.to_ascii(), "#\n##\n");
    }

    #[test]
    fn geodesic_examples() {
        let sq = p("###\n###\n###");
        assert_eq!(sq.geodesic_distance(CellCoord::new(0, 0), CellCoord::new(2, 2)).unwrap(), 4);
        assert_eq!(sq.geodesic_distance(CellCoord::new(1, 1), CellCoord::new(1, 1)).unwrap(), 0);
        let u = p("#.#\n#.#\n###");
        assert_eq!(u.geodesic_distance(CellCoord::new(0, 2), CellCoord::new(2, 2)).unwrap(), 6);
        assert_eq!(
            u.geodesic_distance(CellCoord::new(1, 2), CellCoord::new(0, 0)),
            Err(DomainError::CellNotInDomain(CellCoord::new(1, 2)))
        );
    }

    #[test]
    fn boundary_examples() {
        let one = p("#");
        let c = one.boundary_cycle();
        assert_eq!(c, vec![LatticeVertex::new(0, 0), LatticeVertex::new(1, 0), LatticeVertex::new(1, 1), LatticeVertex::new(0, 1)]);
        assert_eq!(p("##\n##").boundary_cycle().len(), 8);
        let l = p("#.\n##");
        assert_eq!(l.boundary_cycle().len(), 8);
        assert_eq!(l.perimeter(), 8);
    }

    #[test]
    fn trivial_cut_examples() {
        let sq = p("###\n###\n###");
        let v = LatticeVertex::new;
        let corner = Cut::new(vec![v(1, 0), v(1, 1), v(0, 1)]);
        assert!(sq.is_trivial_cut(&corner).unwrap());
        let straight = Cut::new(vec![v(1, 0), v(1, 1), v(1, 2), v(1, 3)]);
        assert!(!sq.is_trivial_cut(&straight).unwrap());
        let strip = p("#####");
        assert!(!strip.is_trivial_cut(&Cut::new(vec![v(2, 0), v(2, 1)])).unwrap());
        // runs along the boundary
        assert!(sq.is_trivial_cut(&Cut::new(vec![v(0, 0), v(1, 0)])).is_err());
    }

    #[test]
    fn split_examples() {
        let v = LatticeVertex::new;
        let dom = p("##");
        let (a, b) = dom.split(&Cut::new(vec![v(1, 0), v(1, 1)])).unwrap();
        assert_eq!((a.area(), b.area()), (1, 1));
        let sq = p("###\n###\n###");
        let (a, b) = sq.split(&Cut::new(vec![v(1, 0), v(1, 1), v(1, 2), v(1, 3)])).unwrap();
        let mut areas = [a.area(), b.area()];
        areas.sort();
        assert_eq!(areas, [3, 6]);
    }
}
