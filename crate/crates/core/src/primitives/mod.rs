//! Constant-size and linear-size building blocks: the 2×2 cover test,
//! swap gadgets, matching realization, rectangle and convex-piece routing.

mod gadget;
mod matching;
mod sorting;

use crate::{HashMap, HashSet};

use thiserror::Error;

use crate::domain::{CellCoord, Polyomino};
use crate::schedule::ScheduleError;

pub use gadget::{gadget_swap, table_for, GadgetKind, GadgetRegion, GadgetTable};
pub use matching::{realize_matching, realize_rounds, MATCHING_BOUND};
pub use sorting::{
    odd_even_rounds, route_convex_piece, route_convex_piece_report, route_region, sort_rectangle, ConvexReport, Rect,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrimitiveError {
    #[error("invalid gadget region: {0}")]
    InvalidRegion(String),
    #[error("labels {0} and {1} are not both inside the region")]
    LabelsOutsideRegion(u32, u32),
    #[error("not a matching: {0}")]
    NotAMatching(String),
    #[error("domain is not universally reconfigurable")]
    NotReconfigurable,
    #[error("rectangle side of length 1")]
    DegenerateRectangle,
    #[error("piece is not HV-convex")]
    NotHVConvex,
    #[error("target does not permute the region onto itself")]
    ForeignTarget,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}

/// 2×2 squares (lower-left corners) used for gadget regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareCover {
    pub squares: Vec<CellCoord>,
    set: HashSet<CellCoord>,
}

impl SquareCover {
    pub fn new(mut squares: Vec<CellCoord>) -> Self {
        squares.sort_unstable();
        squares.dedup();
        let set = squares.iter().copied().collect();
        Self { squares, set }
    }

    /// Every 2×2 square inside `P`.
    pub fn of(p: &Polyomino) -> Self {
        Self::within(p.cells(), |c| p.contains(c))
    }

    /// Every 2×2 square whose four cells satisfy `inside`, anchored on `cells`.
    pub fn within(cells: &[CellCoord], inside: impl Fn(CellCoord) -> bool) -> Self {
        let squares = cells
            .iter()
            .copied()
            .filter(|&c| inside(c) && inside(c.offset(1, 0)) && inside(c.offset(0, 1)) && inside(c.offset(1, 1)))
            .collect();
        Self::new(squares)
    }

    pub fn contains_square(&self, s: CellCoord) -> bool {
        self.set.contains(&s)
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// Squares overlapping `s` (sharing at least one cell).
    pub fn overlapping(&self, s: CellCoord) -> impl Iterator<Item = CellCoord> + '_ {
        (-1..=1)
            .flat_map(move |dx| (-1..=1).map(move |dy| s.offset(dx, dy)))
            .filter(move |&t| t != s && self.set.contains(&t))
    }

    pub fn intersection_graph(&self) -> Vec<Vec<usize>> {
        let pos: HashMap<CellCoord, usize> = self.squares.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        self.squares.iter().map(|&s| self.overlapping(s).map(|t| pos[&t]).collect()).collect()
    }

    pub fn is_connected(&self) -> bool {
        let g = self.intersection_graph();
        if g.is_empty() {
            return false;
        }
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

    pub fn covers(&self, c: CellCoord) -> bool {
        [(0, 0), (-1, 0), (0, -1), (-1, -1)].iter().any(|&(dx, dy)| self.set.contains(&c.offset(dx, dy)))
    }
}

/// Why a polyomino is not universally reconfigurable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NonReconfigurableWitness {
    /// A cell inside no 2×2 square.
    UncoverableCell(CellCoord),
    /// A bridge of the dual graph.
    CutEdge(CellCoord, CellCoord),
    /// Adjacent cells sharing no 2×2 square.
    NoCommonSquare(CellCoord, CellCoord),
    /// A single 2×2 square only admits rotations.
    SingleSquare,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reconfigurability {
    Yes(SquareCover),
    No(NonReconfigurableWitness),
}

impl Reconfigurability {
    pub fn is_yes(&self) -> bool {
        matches!(self, Reconfigurability::Yes(_))
    }
}

/// Decides universal reconfigurability through the 2×2 cover criterion.
/// A single cell is trivially reconfigurable and a lone 2×2 square is not.
pub fn check_universal_reconfigurability(p: &Polyomino) -> Reconfigurability {
    if p.area() == 1 {
        return Reconfigurability::Yes(SquareCover::new(Vec::new()));
    }
    let cover = SquareCover::of(p);
    if let Some(&c) = p.cells().iter().find(|&&c| !cover.covers(c)) {
        return Reconfigurability::No(NonReconfigurableWitness::UncoverableCell(c));
    }
    if cover.len() == 1 {
        return Reconfigurability::No(NonReconfigurableWitness::SingleSquare);
    }
    if cover.is_connected() {
        return Reconfigurability::Yes(cover);
    }
    for (a, b) in p.dual_edges() {
        let (ca, cb) = (p.cell(a), p.cell(b));
        if !common_square(&cover, ca, cb) {
            let bridge = p.components_without(&[(a, b)]).len() > 1;
            let w = if bridge {
                NonReconfigurableWitness::CutEdge(ca, cb)
            } else {
                NonReconfigurableWitness::NoCommonSquare(ca, cb)
            };
            return Reconfigurability::No(w);
        }
    }
    unreachable!("a covered polyomino whose adjacent cells all share squares has a connected cover")
}

/// Squares containing both (adjacent) cells.
pub fn squares_with_edge(a: CellCoord, b: CellCoord) -> [CellCoord; 2] {
    let lo = a.min(b);
    if a.y == b.y {
        [lo, lo.offset(0, -1)]
    } else {
        [lo, lo.offset(-1, 0)]
    }
}

fn common_square(cover: &SquareCover, a: CellCoord, b: CellCoord) -> bool {
    squares_with_edge(a, b).iter().any(|&s| cover.contains_square(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polyomino {
        Polyomino::parse(s).unwrap()
    }

    #[test]
    fn reconfigurability_examples() {
        match check_universal_reconfigurability(&p("###\n###")) {
            Reconfigurability::Yes(c) => {
                assert_eq!(c.len(), 2);
                assert!(c.is_connected());
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            check_universal_reconfigurability(&p("#####")),
            Reconfigurability::No(NonReconfigurableWitness::UncoverableCell(_))
        ));
        assert!(!check_universal_reconfigurability(&p(".#.\n###\n.#.")).is_yes());
        assert!(check_universal_reconfigurability(&p("#")).is_yes());
        assert_eq!(
            check_universal_reconfigurability(&p("##\n##")),
            Reconfigurability::No(NonReconfigurableWitness::SingleSquare)
        );
    }

    #[test]
    fn disconnected_cover_witness() {
        // two 2×2 blocks touching along a single edge
        let q = p("..##\n####\n##..");
        assert_eq!(
            check_universal_reconfigurability(&q),
            Reconfigurability::No(NonReconfigurableWitness::CutEdge(CellCoord::new(1, 1), CellCoord::new(2, 1)))
        );
        let s = p("##.\n###\n.##");
        assert!(check_universal_reconfigurability(&s).is_yes());
    }

    #[test]
    fn edge_squares() {
        let a = CellCoord::new(2, 3);
        assert_eq!(squares_with_edge(a, a.offset(1, 0)), [a, a.offset(0, -1)]);
        assert_eq!(squares_with_edge(a.offset(0, 1), a), [a, a.offset(-1, 0)]);
    }
}
