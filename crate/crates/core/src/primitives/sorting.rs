//! Routing inside rectangles and HV-convex pieces: three phases of
//! odd–even transposition sorting (columns, rows, columns), each round
//! compiled through matching realization.

use crate::HashMap;

use crate::domain::{CellCoord, Polyomino};
use crate::routing::{bfs_spanning_tree, tree_route};
use crate::schedule::{Configuration, Schedule, Transformation};
use crate::shape::is_hv_convex;

use super::{realize_rounds, PrimitiveError, SquareCover};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub w: i32,
    pub h: i32,
}

impl Rect {
    pub fn new(x: i32, y: i32, w: i32, h: i32) -> Self {
        Self { x, y, w, h }
    }

    pub fn cells(&self) -> Vec<CellCoord> {
        let mut v = Vec::with_capacity((self.w * self.h) as usize);
        for x in self.x..self.x + self.w {
            for y in self.y..self.y + self.h {
                v.push(CellCoord::new(x, y));
            }
        }
        v
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        c.x >= self.x && c.y >= self.y && c.x < self.x + self.w && c.y < self.y + self.h
    }
}

#[derive(Debug, Clone)]
pub struct ConvexReport {
    pub schedule: Schedule,
    /// Matching rounds before realization.
    pub rounds: usize,
    /// Whether the three-phase routing failed and tree routing was used.
    pub fallback: bool,
}

/// Odd–even transposition sort of every line (a path of cells with distinct
/// keys) in parallel. Keys are permuted in place; returns the swap rounds.
pub fn odd_even_rounds(lines: &mut [Vec<(CellCoord, i64)>]) -> Vec<Vec<(CellCoord, CellCoord)>> {
    let sorted = |l: &Vec<(CellCoord, i64)>| l.windows(2).all(|w| w[0].1 <= w[1].1);
    let mut active: Vec<usize> = (0..lines.len()).filter(|&i| !sorted(&lines[i])).collect();
    let mut rounds = Vec::new();
    let mut parity = 0;
    while !active.is_empty() {
        let mut round = Vec::new();
        for &li in &active {
            let line = &mut lines[li];
            let mut i = parity;
            while i + 1 < line.len() {
                if line[i].1 > line[i + 1].1 {
                    let (a, b) = (line[i].1, line[i + 1].1);
                    line[i].1 = b;
                    line[i + 1].1 = a;
                    round.push((line[i].0, line[i + 1].0));
                }
                i += 2;
            }
        }
        if !round.is_empty() {
            rounds.push(round);
        }
        parity ^= 1;
        active.retain(|&i| !sorted(&lines[i]));
    }
    rounds
}

#[derive(Clone, Copy)]
enum RowOrder {
    ShortFirst,
    LongFirst,
    Ascending,
    Descending,
}

/// Routes tokens inside an HV-convex, universally reconfigurable cell set.
/// `dest` maps each cell to the target cell of the token currently on it.
pub fn route_region(
    p: &Polyomino,
    cells: &[CellCoord],
    dest: &HashMap<CellCoord, CellCoord>,
) -> Result<ConvexReport, PrimitiveError> {
    let empty = ConvexReport { schedule: Schedule::empty(), rounds: 0, fallback: false };
    if cells.iter().all(|c| dest.get(c) == Some(c)) {
        return Ok(empty);
    }
    let inside: crate::HashSet<CellCoord> = cells.iter().copied().collect();
    if dest.len() != cells.len() || dest.iter().any(|(a, b)| !inside.contains(a) || !inside.contains(b)) {
        return Err(PrimitiveError::ForeignTarget);
    }
    if !is_hv_convex(cells) {
        return Err(PrimitiveError::NotHVConvex);
    }
    let cover = SquareCover::within(cells, |c| inside.contains(&c));
    if cells.len() == 4 && cover.len() == 1 {
        let schedule = rotate_square(cover.squares[0], dest)?;
        return Ok(ConvexReport { rounds: schedule.makespan(), schedule, fallback: false });
    }
    if !cover.is_connected() || cells.iter().any(|&c| !cover.covers(c)) {
        return Err(PrimitiveError::NotReconfigurable);
    }
    let mut attempt = None;
    'outer: for transposed in [false, true] {
        for order in [RowOrder::ShortFirst, RowOrder::LongFirst, RowOrder::Ascending, RowOrder::Descending] {
            if let Some(r) = three_phase(cells, dest, transposed, order) {
                attempt = Some(r);
                break 'outer;
            }
        }
    }
    let (rounds, fallback) = match attempt {
        Some(r) => (r, false),
        None => (tree_rounds(cells, dest), true),
    };
    let schedule = realize_rounds(p, &cover, &rounds)?;
    Ok(ConvexReport { schedule, rounds: rounds.len(), fallback })
}

fn rotate_square(s: CellCoord, dest: &HashMap<CellCoord, CellCoord>) -> Result<Schedule, PrimitiveError> {
    let cyc = [s, s.offset(1, 0), s.offset(1, 1), s.offset(0, 1)];
    for k in 0..4 {
        if (0..4).all(|i| dest[&cyc[i]] == cyc[(i + k) % 4]) {
            let fwd = Transformation::cycle(&cyc);
            let mut rev = cyc;
            rev.reverse();
            let back = Transformation::cycle(&rev);
            let steps = match k {
                0 => vec![],
                1 => vec![fwd],
                2 => vec![fwd.clone(), fwd],
                _ => vec![back],
            };
            return Ok(Schedule::new(steps));
        }
    }
    Err(PrimitiveError::NotReconfigurable)
}

fn tree_rounds(cells: &[CellCoord], dest: &HashMap<CellCoord, CellCoord>) -> Vec<Vec<(CellCoord, CellCoord)>> {
    let mut sorted = cells.to_vec();
    sorted.sort_unstable();
    let pos: HashMap<CellCoord, usize> = sorted.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let adj: Vec<Vec<usize>> = sorted
        .iter()
        .map(|c| {
            crate::domain::DIRS.iter().filter_map(|&(dx, dy)| pos.get(&c.offset(dx, dy)).copied()).collect()
        })
        .collect();
    let tree = bfs_spanning_tree(&adj, 0);
    let d: Vec<usize> = sorted.iter().map(|c| pos[&dest[c]]).collect();
    tree_route(&tree, &d)
        .expect("tree routing on a spanning tree succeeds")
        .into_iter()
        .map(|r| r.into_iter().map(|(a, b)| (sorted[a], sorted[b])).collect())
        .collect()
}

fn three_phase(
    cells: &[CellCoord],
    dest: &HashMap<CellCoord, CellCoord>,
    transposed: bool,
    order: RowOrder,
) -> Option<Vec<Vec<(CellCoord, CellCoord)>>> {
    let tf = |c: CellCoord| if transposed { CellCoord::new(c.y, c.x) } else { c };
    // tokens in transformed coordinates
    let tokens: Vec<(CellCoord, CellCoord)> = cells.iter().map(|&c| (tf(c), tf(dest[&c]))).collect();
    let mut rows: HashMap<i32, (i32, i32)> = HashMap::default();
    let mut cols: HashMap<i32, (i32, i32)> = HashMap::default();
    for &(c, _) in &tokens {
        let r = rows.entry(c.y).or_insert((c.x, c.x));
        r.0 = r.0.min(c.x);
        r.1 = r.1.max(c.x);
        let k = cols.entry(c.x).or_insert((c.y, c.y));
        k.0 = k.0.min(c.y);
        k.1 = k.1.max(c.y);
    }
    let mut buckets: HashMap<(i32, i32), Vec<usize>> = HashMap::default();
    for (t, &(s, d)) in tokens.iter().enumerate() {
        buckets.entry((s.x, d.x)).or_default().push(t);
    }
    let mut row_list: Vec<(i32, (i32, i32))> = rows.iter().map(|(&y, &iv)| (y, iv)).collect();
    match order {
        RowOrder::ShortFirst => row_list.sort_by_key(|&(y, (a, b))| (b - a, y)),
        RowOrder::LongFirst => row_list.sort_by_key(|&(y, (a, b))| (-(b - a), y)),
        RowOrder::Ascending => row_list.sort_by_key(|&(y, _)| y),
        RowOrder::Descending => row_list.sort_by_key(|&(y, _)| -y),
    }
    let mut mid_row = vec![0i32; tokens.len()];
    for &(r, (a, b)) in &row_list {
        let w = (b - a + 1) as usize;
        let adj: Vec<Vec<usize>> = (0..w)
            .map(|s| {
                (0..w).filter(|&d| buckets.get(&(a + s as i32, a + d as i32)).is_some_and(|v| !v.is_empty())).collect()
            })
            .collect();
        let m = perfect_matching(&adj)?;
        for (s, &d) in m.iter().enumerate() {
            let bucket = buckets.get_mut(&(a + s as i32, a + d as i32)).unwrap();
            let (k, _) = bucket
                .iter()
                .enumerate()
                .min_by_key(|&(_, &t)| ((tokens[t].0.y - r).abs() + (tokens[t].1.y - r).abs(), t))
                .unwrap();
            let t = bucket.swap_remove(k);
            mid_row[t] = r;
        }
    }
    let enc = |key: i32, t: usize| ((key as i64) << 24) | t as i64;
    let dec = |k: i64| (k & ((1 << 24) - 1)) as usize;
    let back = |c: CellCoord| if transposed { CellCoord::new(c.y, c.x) } else { c };
    let mut at: HashMap<CellCoord, usize> = tokens.iter().enumerate().map(|(t, &(s, _))| (s, t)).collect();
    let mut all_rounds = Vec::new();
    for phase in 0..3 {
        let mut lines: Vec<Vec<(CellCoord, i64)>> = Vec::new();
        if phase == 1 {
            for (&y, &(a, b)) in &rows {
                lines.push((a..=b).map(|x| {
                    let c = CellCoord::new(x, y);
                    let t = at[&c];
                    (c, enc(tokens[t].1.x, t))
                }).collect());
            }
        } else {
            for (&x, &(a, b)) in &cols {
                lines.push((a..=b).map(|y| {
                    let c = CellCoord::new(x, y);
                    let t = at[&c];
                    let key = if phase == 0 { mid_row[t] } else { tokens[t].1.y };
                    (c, enc(key, t))
                }).collect());
            }
        }
        lines.sort_by_key(|l| l[0].0);
        let rounds = odd_even_rounds(&mut lines);
        for l in &lines {
            for &(c, k) in l {
                at.insert(c, dec(k));
            }
        }
        all_rounds.extend(rounds.into_iter().map(|r| r.into_iter().map(|(a, b)| (back(a), back(b))).collect()));
    }
    debug_assert!(at.iter().all(|(c, &t)| tokens[t].1 == *c));
    Some(all_rounds)
}

/// Perfect matching of a bipartite graph with equal sides (augmenting paths).
fn perfect_matching(adj: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = adj.len();
    let mut match_right = vec![usize::MAX; n];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], match_right: &mut [usize]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if match_right[v] == usize::MAX || augment(match_right[v], adj, seen, match_right) {
                    match_right[v] = u;
                    return true;
                }
            }
        }
        false
    }
    let mut seen = vec![false; n];
    for u in 0..n {
        seen.iter_mut().for_each(|s| *s = false);
        if !augment(u, adj, &mut seen, &mut match_right) {
            return None;
        }
    }
    let mut m = vec![0; n];
    for (v, &u) in match_right.iter().enumerate() {
        m[u] = v;
    }
    Some(m)
}

fn dest_map(
    p: &Polyomino,
    cells: &[CellCoord],
    current: &Configuration,
    target: &Configuration,
) -> Result<HashMap<CellCoord, CellCoord>, PrimitiveError> {
    let tpos = target.positions();
    let mut dest = HashMap::with_capacity_and_hasher(cells.len(), Default::default());
    for &c in cells {
        let i = p.index_of(c).ok_or(PrimitiveError::ForeignTarget)?;
        let l = current.label_at(i);
        dest.insert(c, p.cell(tpos[l as usize - 1] as usize));
    }
    Ok(dest)
}

/// Sorts a rectangle of `P` so that its agents reach their target cells.
pub fn sort_rectangle(
    p: &Polyomino,
    rect: Rect,
    current: &Configuration,
    target: &Configuration,
) -> Result<Schedule, PrimitiveError> {
    if rect.w < 2 || rect.h < 2 {
        return Err(PrimitiveError::DegenerateRectangle);
    }
    let cells = rect.cells();
    let dest = dest_map(p, &cells, current, target)?;
    Ok(route_region(p, &cells, &dest)?.schedule)
}

/// Routes agents inside an HV-convex piece, reporting whether the tree
/// routing fallback was needed.
pub fn route_convex_piece_report(
    p: &Polyomino,
    piece: &[CellCoord],
    current: &Configuration,
    target: &Configuration,
) -> Result<ConvexReport, PrimitiveError> {
    let dest = dest_map(p, piece, current, target)?;
    route_region(p, piece, &dest)
}

pub fn route_convex_piece(
    p: &Polyomino,
    piece: &[CellCoord],
    current: &Configuration,
    target: &Configuration,
) -> Result<Schedule, PrimitiveError> {
    Ok(route_convex_piece_report(p, piece, current, target)?.schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_poly(w: i32, h: i32) -> Polyomino {
        Polyomino::new(Rect::new(0, 0, w, h).cells()).unwrap()
    }

    fn reversed(p: &Polyomino) -> Configuration {
        Configuration::new(p, (1..=p.area() as u32).rev().collect()).unwrap()
    }

    #[test]
    fn odd_even_sorts_lines() {
        let c = |x| CellCoord::new(x, 0);
        let mut lines = vec![vec![(c(0), 3), (c(1), 2), (c(2), 1), (c(3), 0)]];
        let r = odd_even_rounds(&mut lines);
        assert_eq!(r.len(), 4);
        assert!(lines[0].windows(2).all(|w| w[0].1 < w[1].1));
    }

    #[test]
    fn square_rotation() {
        let p = rect_poly(2, 2);
        let id = Configuration::identity(&p);
        let rot = Schedule::new(vec![Transformation::cycle(&[
            CellCoord::new(0, 0),
            CellCoord::new(1, 0),
            CellCoord::new(1, 1),
            CellCoord::new(0, 1),
        ])]);
        let t = rot.replay(&p, &id).unwrap();
        let s = sort_rectangle(&p, Rect::new(0, 0, 2, 2), &id, &t).unwrap();
        assert!(s.makespan() <= 3);
        assert_eq!(s.replay(&p, &id).unwrap(), t);
    }

    #[test]
    fn sorted_is_empty() {
        let p = rect_poly(3, 4);
        let id = Configuration::identity(&p);
        assert_eq!(sort_rectangle(&p, Rect::new(0, 0, 3, 4), &id, &id).unwrap().makespan(), 0);
        assert_eq!(sort_rectangle(&p, Rect::new(0, 0, 1, 4), &id, &id), Err(PrimitiveError::DegenerateRectangle));
    }

    #[test]
    fn reversal_in_rectangles() {
        for (w, h) in [(4, 4), (2, 3), (5, 3), (6, 2)] {
            let p = rect_poly(w, h);
            let id = Configuration::identity(&p);
            let t = reversed(&p);
            let s = sort_rectangle(&p, Rect::new(0, 0, w, h), &id, &t).unwrap();
            assert_eq!(s.replay(&p, &id).unwrap(), t, "{w}x{h}");
        }
    }

    #[test]
    fn convex_plus_piece() {
        let p = Polyomino::parse(".####.\n######\n######\n######\n######\n.####.").unwrap();
        let id = Configuration::identity(&p);
        let t = reversed(&p);
        let r = route_convex_piece_report(&p, p.cells(), &id, &t).unwrap();
        assert!(!r.fallback);
        assert_eq!(r.schedule.replay(&p, &id).unwrap(), t);
    }
}
