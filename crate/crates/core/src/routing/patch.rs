//! Breadth-first regions and their wavelets, cut expansions, and the patch
//! tree used for local (diameter-bounded) routing.

use std::collections::VecDeque;
use crate::HashSet;
use std::fmt::Write as _;

use crate::domain::{CellCoord, Cut, DomainError, Polyomino, NONE};

use super::group::GroupAssignment;

/// Result of a bounded breadth-first search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BfsRegion {
    pub region: Vec<CellCoord>,
    /// Connected components of the domain minus the region.
    pub components: Vec<Vec<CellCoord>>,
    /// For each component, the dual edges separating it from the region.
    pub wavelets: Vec<Vec<(CellCoord, CellCoord)>>,
}

/// Cells within geodesic distance `r` of `v`, the remaining components and
/// their separating wavefronts.
pub fn bfs_region(q: &Polyomino, v: CellCoord, r: u32) -> Result<BfsRegion, DomainError> {
    let src = q.index_of(v).ok_or(DomainError::CellNotInDomain(v))?;
    let dist = q.bfs_from(&[src]);
    let inside = |i: usize| dist[i] <= r;
    let region: Vec<CellCoord> = (0..q.area()).filter(|&i| inside(i)).map(|i| q.cell(i)).collect();
    let mut comp = vec![NONE; q.area()];
    let mut components = Vec::new();
    let mut wavelets = Vec::new();
    for s in 0..q.area() {
        if inside(s) || comp[s] != NONE {
            continue;
        }
        let id = components.len() as u32;
        let mut cells = vec![s];
        comp[s] = id;
        let mut k = 0;
        let mut wave = Vec::new();
        while k < cells.len() {
            let u = cells[k];
            k += 1;
            for w in q.neighbors(u) {
                if inside(w) {
                    wave.push((q.cell(w), q.cell(u)));
                } else if comp[w] == NONE {
                    comp[w] = id;
                    cells.push(w);
                }
            }
        }
        wave.sort_unstable();
        let mut cs: Vec<CellCoord> = cells.into_iter().map(|i| q.cell(i)).collect();
        cs.sort_unstable();
        components.push(cs);
        wavelets.push(wave);
    }
    Ok(BfsRegion { region, components, wavelets })
}

/// Cells lying on some path of length at most `k` that uses a cut edge:
/// everything within distance `k - 1` of a cell incident to the cut.
pub fn cut_expansion(p: &Polyomino, cut: &Cut, k: u32) -> Result<Vec<CellCoord>, DomainError> {
    p.validate_cut(cut)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let mut sources: Vec<usize> = cut
        .cut_edges()
        .iter()
        .flat_map(|&(a, b)| [p.index_of(a).unwrap(), p.index_of(b).unwrap()])
        .collect();
    sources.sort_unstable();
    sources.dedup();
    let dist = p.bfs_from(&sources);
    Ok((0..p.area()).filter(|&i| dist[i] < k).map(|i| p.cell(i)).collect())
}

/// Patches of units (groups) in bands of breadth-first depth, arranged in
/// a tree rooted at the patch of the first unit.
#[derive(Debug, Clone)]
pub struct PatchTree {
    /// Units (group indices) of each patch.
    pub units: Vec<Vec<usize>>,
    /// Cell indices of each patch.
    pub patches: Vec<Vec<usize>>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// Dual edges between each patch and its parent.
    pub cuts: Vec<Vec<(CellCoord, CellCoord)>>,
    /// Patches forming `F_i` (patch `i` and its children).
    pub regions_f: Vec<Vec<usize>>,
    /// Patch indices whose `F` regions run together: even depth, odd depth.
    pub bipartition: (Vec<usize>, Vec<usize>),
    pub patch_of_unit: Vec<usize>,
    pub patch_of_cell: Vec<u32>,
}

impl PatchTree {
    pub fn len(&self) -> usize {
        self.units.len()
    }

    pub fn is_empty(&self) -> bool {
        self.units.is_empty()
    }

    /// Child of `top` whose subtree contains `q`, if any.
    pub fn child_towards(&self, top: usize, q: usize) -> Option<usize> {
        let mut x = q;
        while self.depth[x] > self.depth[top] + 1 {
            x = self.parent[x]?;
        }
        (self.depth[x] == self.depth[top] + 1 && self.parent[x] == Some(top)).then_some(x)
    }

    /// Indented text rendering for debugging.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let mut stack: Vec<usize> = (0..self.len()).filter(|&i| self.parent[i].is_none()).collect();
        stack.reverse();
        while let Some(i) = stack.pop() {
            let _ = writeln!(
                s,
                "{}patch {} units={} cells={} cut={}",
                "  ".repeat(self.depth[i]),
                i,
                self.units[i].len(),
                self.patches[i].len(),
                self.cuts[i].len()
            );
            stack.extend(self.children[i].iter().rev());
        }
        s
    }
}

/// Bands of width `delta` (in unit hops) from unit 0; each connected piece
/// of a band becomes a patch whose parent is an adjacent patch one band up.
pub fn build_patch_tree(p: &Polyomino, groups: &GroupAssignment, delta: usize) -> PatchTree {
    let delta = delta.max(1);
    let k = groups.len();
    let mut dist = vec![usize::MAX; k];
    dist[0] = 0;
    let mut queue = VecDeque::from([0usize]);
    while let Some(u) = queue.pop_front() {
        for &v in &groups.adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let band: Vec<usize> = dist.iter().map(|&d| d / delta).collect();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by_key(|&u| (band[u], u));
    let mut patch_of_unit = vec![usize::MAX; k];
    let mut units: Vec<Vec<usize>> = Vec::new();
    for &s in &order {
        if patch_of_unit[s] != usize::MAX {
            continue;
        }
        let id = units.len();
        let mut comp = vec![s];
        patch_of_unit[s] = id;
        let mut q = 0;
        while q < comp.len() {
            let u = comp[q];
            q += 1;
            for &v in &groups.adj[u] {
                if band[v] == band[s] && patch_of_unit[v] == usize::MAX {
                    patch_of_unit[v] = id;
                    comp.push(v);
                }
            }
        }
        comp.sort_unstable();
        units.push(comp);
    }
    let m = units.len();
    let mut parent = vec![None; m];
    let mut children = vec![Vec::new(); m];
    let mut depth = vec![0; m];
    for i in 0..m {
        let b = band[units[i][0]];
        if b == 0 {
            continue;
        }
        let par = units[i]
            .iter()
            .flat_map(|&u| groups.adj[u].iter())
            .filter(|&&v| band[v] + 1 == b)
            .map(|&v| patch_of_unit[v])
            .min()
            .expect("a band has a neighbor in the previous band");
        parent[i] = Some(par);
        children[par].push(i);
        depth[i] = depth[par] + 1;
    }
    let mut patch_of_cell = vec![NONE; p.area()];
    let mut patches = vec![Vec::new(); m];
    for (c, &g) in groups.group_of.iter().enumerate() {
        if g != NONE {
            let pi = patch_of_unit[g as usize];
            patch_of_cell[c] = pi as u32;
            patches[pi].push(c);
        }
    }
    let cuts = (0..m)
        .map(|i| match parent[i] {
            None => Vec::new(),
            Some(par) => {
                let mut e = Vec::new();
                for &c in &patches[i] {
                    for w in p.neighbors(c) {
                        if patch_of_cell[w] == par as u32 {
                            e.push((p.cell(c), p.cell(w)));
                        }
                    }
                }
                e
            }
        })
        .collect();
    let regions_f = (0..m).map(|i| std::iter::once(i).chain(children[i].iter().copied()).collect()).collect();
    let (even, odd): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| depth[i] % 2 == 0);
    PatchTree { units, patches, parent, children, depth, cuts, regions_f, bipartition: (even, odd), patch_of_unit, patch_of_cell }
}

/// Whether the F regions of one side of the bipartition are pairwise disjoint.
pub fn f_regions_disjoint(t: &PatchTree, side: &[usize]) -> bool {
    let mut seen = HashSet::default();
    side.iter().all(|&i| t.regions_f[i].iter().all(|&q| seen.insert(q)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::LatticeVertex;

    #[test]
    fn bfs_region_examples() {
        let sq = Polyomino::parse(&"#####\n".repeat(5)).unwrap();
        let r = bfs_region(&sq, CellCoord::new(2, 2), 0).unwrap();
        assert_eq!(r.region, vec![CellCoord::new(2, 2)]);
        assert_eq!(r.components.len(), 1);
        assert!(r.wavelets.iter().map(Vec::len).sum::<usize>() <= 4);
        let r = bfs_region(&sq, CellCoord::new(0, 0), 8).unwrap();
        assert!(r.components.is_empty());
        let u = Polyomino::parse("#.#\n#.#\n###").unwrap();
        let r = bfs_region(&u, CellCoord::new(0, 2), 2).unwrap();
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.wavelets.len(), 1);
        assert!(bfs_region(&u, CellCoord::new(1, 2), 1).is_err());
    }

    #[test]
    fn cut_expansion_examples() {
        let strip = Polyomino::parse("######").unwrap();
        let unit = Cut::new(vec![LatticeVertex::new(3, 0), LatticeVertex::new(3, 1)]);
        assert!(cut_expansion(&strip, &unit, 0).unwrap().is_empty());
        assert_eq!(cut_expansion(&strip, &unit, 1).unwrap(), vec![CellCoord::new(2, 0), CellCoord::new(3, 0)]);
        let r = Polyomino::parse(&"#########\n".repeat(3)).unwrap();
        let cut = Cut::new((0..=3).map(|y| LatticeVertex::new(4, y)).collect());
        let a = cut_expansion(&r, &cut, 2).unwrap();
        let b = cut_expansion(&r, &cut, 3).unwrap();
        assert!(a.iter().all(|c| b.contains(c)));
        assert_eq!(b.len(), 18);
    }
}
