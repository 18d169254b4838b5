//! Shape parameters of a polyomino (bottleneck, depth, scale) and the
//! skeleton / watershed geometry built on top of the bottleneck.

use std::collections::VecDeque;
use crate::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::domain::{Boundary, CellCoord, Cut, LatticeVertex, Polyomino, NONE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("bottleneck {0} is below 8")]
    BottleneckTooSmall(usize),
    #[error("skeleton invariant violated: {0}")]
    SkeletonInvariantViolation(String),
    #[error("tile ({0}, {1}) is not part of the skeleton")]
    TileNotInSkeleton(i32, i32),
}

/// 2D prefix sums over cell occupancy, for O(1) "is this rectangle inside P".
#[derive(Debug, Clone)]
pub struct Occupancy {
    min_x: i32,
    min_y: i32,
    w: i32,
    h: i32,
    sums: Vec<u32>,
}

impl Occupancy {
    pub fn new(p: &Polyomino) -> Self {
        let (min_x, min_y, w, h) = p.bbox();
        let stride = (w + 1) as usize;
        let mut sums = vec![0u32; stride * (h + 1) as usize];
        for y in 0..h {
            for x in 0..w {
                let here = p.contains(CellCoord::new(min_x + x, min_y + y)) as u32;
                let (xu, yu) = (x as usize, y as usize);
                sums[(yu + 1) * stride + xu + 1] =
                    here + sums[yu * stride + xu + 1] + sums[(yu + 1) * stride + xu] - sums[yu * stride + xu];
            }
        }
        Self { min_x, min_y, w, h, sums }
    }

    /// Number of cells in the half-open box `[x, x + w) × [y, y + h)`.
    pub fn count(&self, x: i32, y: i32, w: i32, h: i32) -> u32 {
        let x0 = (x - self.min_x).clamp(0, self.w) as usize;
        let y0 = (y - self.min_y).clamp(0, self.h) as usize;
        let x1 = (x + w - self.min_x).clamp(0, self.w) as usize;
        let y1 = (y + h - self.min_y).clamp(0, self.h) as usize;
        if x1 <= x0 || y1 <= y0 {
            return 0;
        }
        let s = (self.w + 1) as usize;
        self.sums[y1 * s + x1] + self.sums[y0 * s + x0] - self.sums[y0 * s + x1] - self.sums[y1 * s + x0]
    }

    pub fn is_full(&self, x: i32, y: i32, w: i32, h: i32) -> bool {
        self.count(x, y, w, h) == (w * h) as u32
    }
}

/// Depth: multi-source BFS from all boundary cells. Returns the maximum
/// distance and a cell attaining it (smallest such cell on ties).
pub fn compute_depth(p: &Polyomino) -> (u32, CellCoord) {
    let sources: Vec<usize> = (0..p.area()).filter(|&i| p.is_boundary_cell(i)).collect();
    let dist = p.bfs_from(&sources);
    let mut best = (0u32, p.cell(0));
    for (i, &d) in dist.iter().enumerate() {
        if d > best.0 {
            best = (d, p.cell(i));
        }
    }
    best
}

/// Shortest interior lattice paths between boundary vertices.
pub struct CutFinder<'a> {
    p: &'a Polyomino,
    pub boundary: Boundary,
    vx0: i32,
    vy0: i32,
    vw: i32,
    vh: i32,
    occ: Vec<u8>,
}

impl<'a> CutFinder<'a> {
    pub fn new(p: &'a Polyomino) -> Self {
        let (min_x, min_y, w, h) = p.bbox();
        let (vw, vh) = (w + 1, h + 1);
        let mut occ = vec![0u8; (vw * vh) as usize];
        for y in 0..vh {
            for x in 0..vw {
                occ[(y * vw + x) as usize] = p.vertex_occupancy(LatticeVertex::new(min_x + x, min_y + y));
            }
        }
        Self { p, boundary: Boundary::of(p), vx0: min_x, vy0: min_y, vw, vh, occ }
    }

    fn vid(&self, v: LatticeVertex) -> Option<usize> {
        let x = v.x - self.vx0;
        let y = v.y - self.vy0;
        (x >= 0 && y >= 0 && x < self.vw && y < self.vh).then(|| (y * self.vw + x) as usize)
    }

    fn vertex(&self, id: usize) -> LatticeVertex {
        let id = id as i32;
        LatticeVertex::new(self.vx0 + id % self.vw, self.vy0 + id / self.vw)
    }

    /// BFS from boundary position `i`. Boundary vertices terminate paths;
    /// only interior lattice edges are used. Returns distances and parents
    /// over the vertex grid.
    pub fn search(&self, i: usize) -> (Vec<u32>, Vec<u32>) {
        let n = (self.vw * self.vh) as usize;
        let mut dist = vec![NONE; n];
        let mut parent = vec![NONE; n];
        let start = self.vid(self.boundary.cycle[i]).unwrap();
        dist[start] = 0;
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            if u != start && self.occ[u] != 4 {
                continue;
            }
            let uv = self.vertex(u);
            for (dx, dy) in crate::domain::DIRS {
                let w = LatticeVertex::new(uv.x + dx, uv.y + dy);
                let Some(wid) = self.vid(w) else { continue };
                if dist[wid] != NONE || !self.p.is_interior_edge(uv, w) {
                    continue;
                }
                dist[wid] = dist[u] + 1;
                parent[wid] = u as u32;
                queue.push_back(wid);
            }
        }
        (dist, parent)
    }

    pub fn path(&self, parent: &[u32], end: LatticeVertex) -> Cut {
        let mut id = self.vid(end).unwrap();
        let mut path = vec![self.vertex(id)];
        while parent[id] != NONE {
            id = parent[id] as usize;
            path.push(self.vertex(id));
        }
        path.reverse();
        Cut::new(path)
    }

    /// For boundary position `i`, every other boundary vertex reached by a
    /// non-trivial shortest cut: `(position, length)`.
    pub fn nontrivial_from(&self, i: usize) -> (Vec<(usize, u32)>, Vec<u32>) {
        let (dist, parent) = self.search(i);
        let mut out = Vec::new();
        for (j, v) in self.boundary.cycle.iter().enumerate() {
            if j == i {
                continue;
            }
            let d = dist[self.vid(*v).unwrap()];
            if d != NONE && (d as usize) < self.boundary.shorter_arc(i, j) {
                out.push((j, d));
            }
        }
        (out, parent)
    }

    /// All shortest non-trivial cuts with length at most `max_len`, one per
    /// unordered endpoint pair.
    pub fn nontrivial_cuts(&self, max_len: u32) -> Vec<Cut> {
        let mut cuts = Vec::new();
        for i in 0..self.boundary.len() {
            let (hits, parent) = self.nontrivial_from(i);
            for (j, d) in hits {
                if j > i && d <= max_len {
                    cuts.push(self.path(&parent, self.boundary.cycle[j]));
                }
            }
        }
        cuts
    }

    /// For each boundary vertex, its shortest non-trivial cut (if any).
    pub fn shortest_per_vertex(&self) -> Vec<Cut> {
        let mut cuts = Vec::new();
        for i in 0..self.boundary.len() {
            let (hits, parent) = self.nontrivial_from(i);
            if let Some(&(j, _)) = hits.iter().min_by_key(|(j, d)| (*d, *j)) {
                if j > i || !hits.is_empty() {
                    cuts.push(self.path(&parent, self.boundary.cycle[j]));
                }
            }
        }
        cuts.sort_by(|a, b| a.path.cmp(&b.path));
        cuts.dedup_by(|a, b| {
            let (a0, a1) = a.endpoints();
            let (b0, b1) = b.endpoints();
            (a0 == b1 && a1 == b0) || (a0 == b0 && a1 == b1)
        });
        cuts
    }
}

/// Bottleneck: the length of a shortest non-trivial cut, or `n + 1` when
/// no non-trivial cut exists.
pub fn compute_bottleneck(p: &Polyomino) -> (usize, Option<Cut>) {
    let finder = CutFinder::new(p);
    let mut best: Option<(u32, usize, usize)> = None;
    for i in 0..finder.boundary.len() {
        let (hits, _) = finder.nontrivial_from(i);
        for (j, d) in hits {
            if best.map_or(true, |(bd, _, _)| d < bd) {
                best = Some((d, i, j));
            }
        }
    }
    match best {
        None => (p.area() + 1, None),
        Some((d, i, j)) => {
            let (_, parent) = finder.search(i);
            (d as usize, Some(finder.path(&parent, finder.boundary.cycle[j])))
        }
    }
}

/// Scale: the largest `c` such that `P` is tiled by aligned `c × c` tiles,
/// with the tiling offset in `[0, c)²`.
pub fn compute_scale(p: &Polyomino) -> (usize, (i32, i32)) {
    let (_, _, w, h) = p.bbox();
    let n = p.area();
    for c in (2..=w.min(h)).rev() {
        if n % (c * c) as usize != 0 {
            continue;
        }
        if let Some(off) = scale_offset(p, c) {
            return (c as usize, off);
        }
    }
    (1, (0, 0))
}

fn scale_offset(p: &Polyomino, c: i32) -> Option<(i32, i32)> {
    let mut ox = None;
    let mut oy = None;
    for cell in p.cells() {
        if !p.contains(cell.offset(-1, 0)) {
            let r = cell.x.rem_euclid(c);
            if *ox.get_or_insert(r) != r {
                return None;
            }
        }
        if !p.contains(cell.offset(0, -1)) {
            let r = cell.y.rem_euclid(c);
            if *oy.get_or_insert(r) != r {
                return None;
            }
        }
    }
    let (ox, oy) = (ox?, oy?);
    let occ = Occupancy::new(p);
    for cell in p.cells() {
        let tx = cell.x - (cell.x - ox).rem_euclid(c);
        let ty = cell.y - (cell.y - oy).rem_euclid(c);
        if !occ.is_full(tx, ty, c, c) {
            return None;
        }
    }
    Some((ox, oy))
}

/// All four shape parameters with their witnesses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeProfile {
    pub area: usize,
    pub bottleneck: usize,
    pub bottleneck_witness: Option<Cut>,
    pub depth: u32,
    pub depth_witness: CellCoord,
    pub scale: usize,
    pub scale_offset: (i32, i32),
}

impl ShapeProfile {
    pub fn compute(p: &Polyomino) -> Self {
        let (bottleneck, bottleneck_witness) = compute_bottleneck(p);
        let (depth, depth_witness) = compute_depth(p);
        let (scale, scale_offset) = compute_scale(p);
        Self { area: p.area(), bottleneck, bottleneck_witness, depth, depth_witness, scale, scale_offset }
    }

    pub fn has_bottleneck(&self) -> bool {
        self.bottleneck <= self.area
    }

    /// Skeleton tile size `⌊ζ/4⌋`.
    pub fn lambda(&self) -> usize {
        self.bottleneck / 4
    }

    /// Flat `key=value` rendering.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "area={}", self.area);
        let _ = writeln!(s, "bottleneck={}", self.bottleneck);
        match &self.bottleneck_witness {
            Some(cut) => {
                let pts: Vec<String> = cut.path.iter().map(|v| v.to_string()).collect();
                let _ = writeln!(s, "bottleneck_witness={}", pts.join(";"));
            }
            None => {
                let _ = writeln!(s, "bottleneck_witness=none");
            }
        }
        let _ = writeln!(s, "depth={}", self.depth);
        let _ = writeln!(s, "depth_witness={}", self.depth_witness);
        let _ = writeln!(s, "scale={}", self.scale);
        let _ = writeln!(s, "scale_offset={},{}", self.scale_offset.0, self.scale_offset.1);
        let _ = writeln!(s, "lambda={}", self.lambda());
        s
    }
}

/// Grid-aligned `λ × λ` tiles fully inside `P`, addressed by tile
/// coordinates `(kx, ky)` with lower-left cell `origin + λ·(kx, ky)`.
#[derive(Debug, Clone)]
pub struct Skeleton {
    pub lambda: i32,
    pub origin: (i32, i32),
    pub tiles: Vec<(i32, i32)>,
    lookup: HashMap<(i32, i32), usize>,
}

impl Skeleton {
    /// Skeleton of `P` for an explicit tile size (λ ≥ 1), without checks.
    pub fn with_lambda(p: &Polyomino, lambda: i32) -> Self {
        let (min_x, min_y, w, h) = p.bbox();
        let occ = Occupancy::new(p);
        let mut tiles = Vec::new();
        for ky in 0..(h / lambda) {
            for kx in 0..(w / lambda) {
                if occ.is_full(min_x + kx * lambda, min_y + ky * lambda, lambda, lambda) {
                    tiles.push((kx, ky));
                }
            }
        }
        let lookup = tiles.iter().enumerate().map(|(i, t)| (*t, i)).collect();
        Self { lambda, origin: (min_x, min_y), tiles, lookup }
    }

    pub fn tile_index(&self, t: (i32, i32)) -> Option<usize> {
        self.lookup.get(&t).copied()
    }

    pub fn tile_origin(&self, t: (i32, i32)) -> CellCoord {
        CellCoord::new(self.origin.0 + t.0 * self.lambda, self.origin.1 + t.1 * self.lambda)
    }

    pub fn tile_cells(&self, t: (i32, i32)) -> Vec<CellCoord> {
        let o = self.tile_origin(t);
        let mut out = Vec::with_capacity((self.lambda * self.lambda) as usize);
        for dx in 0..self.lambda {
            for dy in 0..self.lambda {
                out.push(o.offset(dx, dy));
            }
        }
        out
    }

    /// Tile containing the cell, if that tile belongs to the skeleton.
    pub fn tile_of(&self, c: CellCoord) -> Option<(i32, i32)> {
        let t = (
            (c.x - self.origin.0).div_euclid(self.lambda),
            (c.y - self.origin.1).div_euclid(self.lambda),
        );
        self.lookup.contains_key(&t).then_some(t)
    }

    /// Tile adjacency lists (by tile index).
    pub fn tile_graph(&self) -> Vec<Vec<usize>> {
        self.tiles
            .iter()
            .map(|&(x, y)| {
                [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)]
                    .iter()
                    .filter_map(|t| self.tile_index(*t))
                    .collect()
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.tiles.is_empty() {
            return false;
        }
        let g = self.tile_graph();
        let mut seen = vec![false; g.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &g[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == g.len()
    }
}

/// Skeleton with `λ = ⌊ζ/4⌋`, grid anchored at the bounding-box origin.
pub fn compute_skeleton(p: &Polyomino) -> Result<Skeleton, ShapeError> {
    let (zeta, _) = compute_bottleneck(p);
    compute_skeleton_with(p, zeta)
}

/// Same as [`compute_skeleton`] with an already known bottleneck.
pub fn compute_skeleton_with(p: &Polyomino, zeta: usize) -> Result<Skeleton, ShapeError> {
    if zeta < 8 {
        return Err(ShapeError::BottleneckTooSmall(zeta));
    }
    let (_, _, w, h) = p.bbox();
    // the no-bottleneck sentinel can exceed the box
    let lambda = ((zeta / 4) as i32).min(w.min(h) / 2).max(1);
    let s = Skeleton::with_lambda(p, lambda);
    verify_skeleton(p, &s)?;
    Ok(s)
}

pub fn verify_skeleton(p: &Polyomino, s: &Skeleton) -> Result<(), ShapeError> {
    if !s.is_connected() {
        return Err(ShapeError::SkeletonInvariantViolation("skeleton tiles are not connected".into()));
    }
    let occ = Occupancy::new(p);
    let l = s.lambda;
    for (sx, sy) in square_placements(p, &occ, 2 * l) {
        let tx = (sx - s.origin.0 + l - 1).div_euclid(l);
        let ty = (sy - s.origin.1 + l - 1).div_euclid(l);
        if s.tile_index((tx, ty)).is_none() {
            return Err(ShapeError::SkeletonInvariantViolation(format!(
                "2λ-square at ({sx}, {sy}) contains no skeleton tile"
            )));
        }
    }
    Ok(())
}

/// Lower-left corners of every `side × side` square inside `P`.
pub fn square_placements(p: &Polyomino, occ: &Occupancy, side: i32) -> Vec<(i32, i32)> {
    let (min_x, min_y, w, h) = p.bbox();
    let mut out = Vec::new();
    for y in min_y..=(min_y + h - side) {
        for x in min_x..=(min_x + w - side) {
            if occ.is_full(x, y, side, side) {
                out.push((x, y));
            }
        }
    }
    out
}

/// The maximal cover of `P` by `2λ × 2λ` squares. Errors when the squares'
/// center cells do not form a connected set.
pub fn square_cover_2lambda(p: &Polyomino, zeta: usize) -> Result<Vec<(i32, i32)>, ShapeError> {
    if zeta < 8 {
        return Err(ShapeError::BottleneckTooSmall(zeta));
    }
    let side = 2 * (zeta / 4) as i32;
    let occ = Occupancy::new(p);
    let squares = square_placements(p, &occ, side);
    let set: crate::HashSet<(i32, i32)> = squares.iter().copied().collect();
    if let Some(&first) = squares.first() {
        let mut seen = crate::HashSet::from_iter([first]);
        let mut stack = vec![first];
        while let Some((x, y)) = stack.pop() {
            for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
                if set.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        if seen.len() != squares.len() {
            return Err(ShapeError::SkeletonInvariantViolation("2λ-square centers are not connected".into()));
        }
    }
    Ok(squares)
}

/// Union of every `2λ × 2λ` square inside `P` that contains a skeleton tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Watershed {
    pub tile: (i32, i32),
    pub cells: Vec<CellCoord>,
}

impl Watershed {
    pub fn bbox(&self) -> (i32, i32, i32, i32) {
        bbox_of(&self.cells)
    }
}

pub fn bbox_of(cells: &[CellCoord]) -> (i32, i32, i32, i32) {
    let min_x = cells.iter().map(|c| c.x).min().unwrap_or(0);
    let max_x = cells.iter().map(|c| c.x).max().unwrap_or(-1);
    let min_y = cells.iter().map(|c| c.y).min().unwrap_or(0);
    let max_y = cells.iter().map(|c| c.y).max().unwrap_or(-1);
    (min_x, min_y, max_x - min_x + 1, max_y - min_y + 1)
}

/// Every row and every column of the cell set is one contiguous run.
pub fn is_hv_convex(cells: &[CellCoord]) -> bool {
    let mut rows: HashMap<i32, Vec<i32>> = HashMap::default();
    let mut cols: HashMap<i32, Vec<i32>> = HashMap::default();
    for c in cells {
        rows.entry(c.y).or_default().push(c.x);
        cols.entry(c.x).or_default().push(c.y);
    }
    let contiguous = |v: &mut Vec<i32>| {
        v.sort_unstable();
        v.dedup();
        v.last().unwrap() - v[0] + 1 == v.len() as i32
    };
    rows.values_mut().all(contiguous) && cols.values_mut().all(contiguous)
}

pub fn compute_watershed(p: &Polyomino, s: &Skeleton, tile: (i32, i32)) -> Result<Watershed, ShapeError> {
    compute_watershed_with(p, &Occupancy::new(p), s, tile)
}

pub fn compute_watershed_with(
    p: &Polyomino,
    occ: &Occupancy,
    s: &Skeleton,
    tile: (i32, i32),
) -> Result<Watershed, ShapeError> {
    if s.tile_index(tile).is_none() {
        return Err(ShapeError::TileNotInSkeleton(tile.0, tile.1));
    }
    let l = s.lambda;
    let o = s.tile_origin(tile);
    // local 3λ × 3λ window with the tile in the middle
    let side = 3 * l;
    let mut mark = vec![false; (side * side) as usize];
    let mut any = false;
    for sy in (o.y - l)..=o.y {
        for sx in (o.x - l)..=o.x {
            if occ.is_full(sx, sy, 2 * l, 2 * l) {
                any = true;
                for y in sy..sy + 2 * l {
                    for x in sx..sx + 2 * l {
                        mark[((y - o.y + l) * side + (x - o.x + l)) as usize] = true;
                    }
                }
            }
        }
    }
    if !any {
        return Err(ShapeError::SkeletonInvariantViolation(format!(
            "tile ({}, {}) lies in no 2λ-square",
            tile.0, tile.1
        )));
    }
    let mut cells = Vec::new();
    for x in 0..side {
        for y in 0..side {
            if mark[(y * side + x) as usize] {
                cells.push(CellCoord::new(o.x - l + x, o.y - l + y));
            }
        }
    }
    debug_assert!(cells.iter().all(|c| p.contains(*c)));
    Ok(Watershed { tile, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polyomino {
        Polyomino::parse(s).unwrap()
    }

    fn rect(w: i32, h: i32) -> Polyomino {
        Polyomino::new((0..w).flat_map(|x| (0..h).map(move |y| CellCoord::new(x, y)))).unwrap()
    }

    #[test]
    fn depth_examples() {
        assert_eq!(compute_depth(&rect(7, 1)).0, 0);
        assert_eq!(compute_depth(&rect(3, 3)), (1, CellCoord::new(1, 1)));
        assert_eq!(compute_depth(&rect(5, 5)), (2, CellCoord::new(2, 2)));
    }

    #[test]
    fn bottleneck_examples() {
        let (z, cut) = compute_bottleneck(&rect(5, 1));
        assert_eq!(z, 1);
        assert_eq!(cut.unwrap().len(), 1);
        let sq = rect(3, 3);
        let (z, cut) = compute_bottleneck(&sq);
        assert_eq!(z, 3);
        assert!(!sq.is_trivial_cut(&cut.unwrap()).unwrap());
        assert_eq!(compute_bottleneck(&rect(1, 1)), (2, None));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(compute_scale(&p("#.\n##")).0, 1);
        assert_eq!(compute_scale(&rect(4, 4)).0, 4);
        let l = p("##..\n##..\n####\n####");
        assert_eq!(compute_scale(&l), (2, (0, 0)));
        assert_eq!(compute_scale(&rect(6, 3)), (3, (0, 0)));
    }

    #[test]
    fn skeleton_examples() {
        let s = compute_skeleton(&rect(8, 8)).unwrap();
        assert_eq!((s.lambda, s.tiles.len()), (2, 16));
        let s = compute_skeleton(&rect(9, 8)).unwrap();
        assert_eq!(s.tiles.len(), 16);
        assert!(s.tiles.iter().all(|&(kx, _)| kx < 4));
        assert_eq!(compute_skeleton(&rect(7, 7)).unwrap_err(), ShapeError::BottleneckTooSmall(7));
    }

    #[test]
    fn watershed_examples() {
        let sq = rect(4, 4);
        let s = Skeleton::with_lambda(&sq, 2);
        for &t in &s.tiles {
            assert_eq!(compute_watershed(&sq, &s, t).unwrap().cells.len(), 16);
        }
        let r = rect(8, 4);
        let s = Skeleton::with_lambda(&r, 2);
        assert_eq!(compute_watershed(&r, &s, (0, 0)).unwrap().bbox(), (0, 0, 4, 4));
        assert_eq!(compute_watershed(&r, &s, (1, 0)).unwrap().bbox(), (0, 0, 6, 4));
        assert!(compute_watershed(&r, &s, (9, 9)).is_err());
    }

    #[test]
    fn watershed_near_reflex_corner() {
        // L-shape with λ = 2: tiles next to the inner corner get a staircase
        let l = p("####....\n####....\n####....\n####....\n########\n########\n########\n########");
        let s = Skeleton::with_lambda(&l, 2);
        for &t in &s.tiles {
            let ws = compute_watershed(&l, &s, t).unwrap();
            assert!(is_hv_convex(&ws.cells));
            let (_, _, w, h) = ws.bbox();
            assert!(w <= 6 && h <= 6);
        }
    }

    #[test]
    fn square_cover_examples() {
        assert_eq!(square_cover_2lambda(&rect(4, 4), 8).unwrap().len(), 1);
        assert_eq!(square_cover_2lambda(&rect(5, 4), 8).unwrap().len(), 2);
        assert_eq!(square_cover_2lambda(&rect(5, 4), 3), Err(ShapeError::BottleneckTooSmall(3)));
    }

    #[test]
    fn profile_text() {
        let t = ShapeProfile::compute(&rect(3, 3)).to_text();
        assert!(t.contains("bottleneck=3\n"));
        assert!(t.contains("depth=1\n"));
        assert!(t.contains("scale=3\n"));
    }
}
