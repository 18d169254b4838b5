//! Swap gadgets on the union of two overlapping 2×2 squares.
//!
//! Move tables are computed once by breadth-first search over the region's
//! configuration graph (single cycle rotations as generators), so every
//! permutation of the region is realized in the optimal number of steps.

use std::collections::VecDeque;
use crate::HashMap;
use std::sync::OnceLock;

use crate::domain::{CellCoord, Polyomino};
use crate::schedule::{Configuration, Schedule, Transformation};

use super::PrimitiveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GadgetKind {
    /// Squares share an edge-pair: a 2×3 or 3×2 block.
    Overlap2,
    /// Squares share a single cell diagonally.
    Overlap1,
}

/// The union of two overlapping 2×2 squares (given by lower-left corners).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GadgetRegion {
    pub squares: (CellCoord, CellCoord),
    pub cells: Vec<CellCoord>,
    pub kind: GadgetKind,
}

impl GadgetRegion {
    pub fn new(a: CellCoord, b: CellCoord) -> Result<Self, PrimitiveError> {
        let (dx, dy) = (b.x - a.x, b.y - a.y);
        let kind = match (dx.abs(), dy.abs()) {
            (1, 0) | (0, 1) => GadgetKind::Overlap2,
            (1, 1) => GadgetKind::Overlap1,
            _ => return Err(PrimitiveError::InvalidRegion(format!("squares at {a} and {b} do not overlap"))),
        };
        let mut cells: Vec<CellCoord> = [a, b]
            .iter()
            .flat_map(|s| [s.offset(0, 0), s.offset(1, 0), s.offset(0, 1), s.offset(1, 1)])
            .collect();
        cells.sort_unstable();
        cells.dedup();
        // canonical square order keeps regions comparable
        let squares = if a <= b { (a, b) } else { (b, a) };
        Ok(Self { squares, cells, kind })
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    /// Worst-case gadget makespan for this region kind.
    pub fn bound(&self) -> usize {
        match self.kind {
            GadgetKind::Overlap2 => 7,
            GadgetKind::Overlap1 => 14,
        }
    }

    /// Schedule realizing the permutation `dest` (local index → local index)
    /// of this region's cells: the agent on `cells[i]` ends on `cells[dest[i]]`.
    pub fn realize(&self, dest: &[u8]) -> Schedule {
        let table = table_for(self);
        let origin = CellCoord::new(self.cells.iter().map(|c| c.x).min().unwrap(), self.cells.iter().map(|c| c.y).min().unwrap());
        let steps = table
            .solve(dest)
            .into_iter()
            .map(|g| {
                let cyc: Vec<CellCoord> =
                    table.gens[g].iter().map(|&i| origin.offset(table.cells[i as usize].0, table.cells[i as usize].1)).collect();
                Transformation::cycle(&cyc)
            })
            .collect();
        Schedule::new(steps)
    }
}

/// Optimal move table of one region shape.
pub struct GadgetTable {
    /// Local cells (sorted), translated to a zero origin.
    pub cells: Vec<(i32, i32)>,
    /// Directed simple cycles (local indices); token on `c[i]` goes to `c[i+1]`.
    pub gens: Vec<Vec<u8>>,
    parent: HashMap<u32, (u32, u8)>,
    pub diameter: usize,
}

fn pack(state: &[u8]) -> u32 {
    state.iter().enumerate().fold(0, |acc, (i, &t)| acc | ((t as u32) << (3 * i)))
}

fn unpack(key: u32, k: usize) -> Vec<u8> {
    (0..k).map(|i| ((key >> (3 * i)) & 7) as u8).collect()
}

impl GadgetTable {
    fn build(cells: Vec<(i32, i32)>) -> Self {
        let k = cells.len();
        let adj: Vec<Vec<u8>> = (0..k)
            .map(|i| {
                (0..k)
                    .filter(|&j| (cells[i].0 - cells[j].0).abs() + (cells[i].1 - cells[j].1).abs() == 1)
                    .map(|j| j as u8)
                    .collect()
            })
            .collect();
        let gens = simple_cycles(&adj);
        let start: Vec<u8> = (0..k as u8).collect();
        let mut parent = HashMap::default();
        parent.insert(pack(&start), (u32::MAX, 0u8));
        let mut queue = VecDeque::from([(start, 0usize)]);
        let mut diameter = 0;
        while let Some((s, d)) = queue.pop_front() {
            diameter = diameter.max(d);
            let key = pack(&s);
            for (g, cyc) in gens.iter().enumerate() {
                let mut t = s.clone();
                for i in 0..cyc.len() {
                    t[cyc[(i + 1) % cyc.len()] as usize] = s[cyc[i] as usize];
                }
                let tk = pack(&t);
                if let std::collections::hash_map::Entry::Vacant(e) = parent.entry(tk) {
                    e.insert((key, g as u8));
                    queue.push_back((t, d + 1));
                }
            }
        }
        Self { cells, gens, parent, diameter }
    }

    /// Number of reachable arrangements.
    pub fn states(&self) -> usize {
        self.parent.len()
    }

    /// Generator sequence taking the identity arrangement to the one where
    /// the token from local cell `i` sits on `dest[i]`.
    pub fn solve(&self, dest: &[u8]) -> Vec<usize> {
        let k = self.cells.len();
        let mut fin = vec![0u8; k];
        for (i, &d) in dest.iter().enumerate() {
            fin[d as usize] = i as u8;
        }
        let mut key = pack(&fin);
        let mut out = Vec::new();
        loop {
            let &(p, g) = self.parent.get(&key).expect("region shapes are universally reconfigurable");
            if p == u32::MAX {
                break;
            }
            out.push(g as usize);
            key = p;
        }
        debug_assert_eq!(unpack(key, k), (0..k as u8).collect::<Vec<_>>());
        out.reverse();
        out
    }
}

/// All directed simple cycles of length ≥ 3 in a small graph.
fn simple_cycles(adj: &[Vec<u8>]) -> Vec<Vec<u8>> {
    fn dfs(adj: &[Vec<u8>], start: u8, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let last = *path.last().unwrap();
        for &w in &adj[last as usize] {
            if w == start && path.len() >= 3 {
                out.push(path.clone());
            } else if w > start && !path.contains(&w) {
                path.push(w);
                dfs(adj, start, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    for s in 0..adj.len() as u8 {
        dfs(adj, s, &mut vec![s], &mut out);
    }
    out
}

fn normalize(cells: &[CellCoord]) -> Vec<(i32, i32)> {
    let mx = cells.iter().map(|c| c.x).min().unwrap();
    let my = cells.iter().map(|c| c.y).min().unwrap();
    let mut v: Vec<(i32, i32)> = cells.iter().map(|c| (c.x - mx, c.y - my)).collect();
    v.sort_unstable();
    v
}

/// Tables for the four region shapes, built on first use.
pub fn table_for(region: &GadgetRegion) -> &'static GadgetTable {
    static TABLES: OnceLock<Vec<GadgetTable>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| {
        let o = CellCoord::new(0, 0);
        [(1, 0), (0, 1), (1, 1), (1, -1)]
            .iter()
            .map(|&(dx, dy)| GadgetTable::build(normalize(&GadgetRegion::new(o, o.offset(dx, dy)).unwrap().cells)))
            .collect()
    });
    let key = normalize(&region.cells);
    tables.iter().find(|t| t.cells == key).expect("known region shape")
}

/// Exchanges two labels inside the region; everything else is restored.
pub fn gadget_swap(
    p: &Polyomino,
    region: &GadgetRegion,
    c: &Configuration,
    pair: (u32, u32),
) -> Result<Schedule, PrimitiveError> {
    let local = |l: u32| -> Option<usize> {
        region.cells.iter().position(|&cell| p.index_of(cell).is_some_and(|i| c.label_at(i) == l))
    };
    let (a, b) = match (local(pair.0), local(pair.1)) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(PrimitiveError::LabelsOutsideRegion(pair.0, pair.1)),
    };
    if a == b {
        return Ok(Schedule::empty());
    }
    let mut dest: Vec<u8> = (0..region.cells.len() as u8).collect();
    dest.swap(a, b);
    Ok(region.realize(&dest))
}
