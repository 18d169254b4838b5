//! Exhaustive search over configurations of tiny domains.

use std::collections::VecDeque;
use crate::HashSet;

use crate::domain::Polyomino;
use crate::schedule::{Configuration, Instance};

/// Largest area the packed state encoding supports.
const MAX_CELLS: usize = 16;

/// A transformation as a packed permutation of cell nibbles.
#[derive(Debug, Clone)]
pub struct PackedMove {
    /// Cell index pairs `(from, to)`.
    pub moves: Vec<(u8, u8)>,
    keep: u64,
}

impl PackedMove {
    fn apply(&self, s: u64) -> u64 {
        let mut out = s & self.keep;
        for &(a, b) in &self.moves {
            out |= ((s >> (4 * a)) & 15) << (4 * b);
        }
        out
    }
}

/// Every non-empty transformation of a full domain: sets of pairwise
/// disjoint directed cycles of the dual graph.
pub fn transformations(p: &Polyomino) -> Vec<PackedMove> {
    let adj = p.adjacency_lists();
    let n = adj.len();
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    // simple cycles with smallest vertex first, both directions
    for s in 0..n {
        let mut path = vec![s];
        let mut on = vec![false; n];
        on[s] = true;
        extend_cycles(&adj, s, &mut path, &mut on, &mut cycles);
    }
    let masks: Vec<u32> = cycles.iter().map(|c| c.iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    subsets(&cycles, &masks, 0, 0, &mut chosen, &mut out);
    out
}

fn extend_cycles(adj: &[Vec<usize>], s: usize, path: &mut Vec<usize>, on: &mut [bool], out: &mut Vec<Vec<usize>>) {
    let u = *path.last().unwrap();
    for &v in &adj[u] {
        if v == s && path.len() >= 3 {
            out.push(path.clone());
        } else if v > s && !on[v] {
            on[v] = true;
            path.push(v);
            extend_cycles(adj, s, path, on, out);
            path.pop();
            on[v] = false;
        }
    }
}

fn subsets(
    cycles: &[Vec<usize>],
    masks: &[u32],
    from: usize,
    used: u32,
    chosen: &mut Vec<usize>,
    out: &mut Vec<PackedMove>,
) {
    for i in from..cycles.len() {
        if masks[i] & used != 0 {
            continue;
        }
        chosen.push(i);
        let mut moves = Vec::new();
        let mut keep = u64::MAX;
        for &k in chosen.iter() {
            let c = &cycles[k];
            for j in 0..c.len() {
                let (a, b) = (c[j], c[(j + 1) % c.len()]);
                moves.push((a as u8, b as u8));
                keep &= !(15u64 << (4 * b));
            }
        }
        out.push(PackedMove { moves, keep });
        subsets(cycles, masks, i + 1, used | masks[i], chosen, out);
        chosen.pop();
    }
}

fn pack(c: &Configuration) -> u64 {
    c.labels().iter().enumerate().fold(0, |s, (i, &l)| s | ((l as u64 - 1) << (4 * i)))
}

/// Minimum makespan by breadth-first search, or `None` when more than
/// `limit` configurations would be visited (or the domain is too large).
pub fn oracle_optimal(inst: &Instance, limit: usize) -> Option<usize> {
    let p = &inst.polyomino;
    if p.area() > MAX_CELLS {
        return None;
    }
    let (start, goal) = (pack(&inst.start), pack(&inst.target));
    if start == goal {
        return Some(0);
    }
    let moves = transformations(p);
    let mut seen = HashSet::from_iter([start]);
    let mut frontier = vec![start];
    let mut depth = 0;
    while !frontier.is_empty() {
        depth += 1;
        let mut next = Vec::new();
        for &s in &frontier {
            for m in &moves {
                let t = m.apply(s);
                if t == goal {
                    return Some(depth);
                }
                if seen.insert(t) {
                    if seen.len() > limit {
                        return None;
                    }
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    // target unreachable: the domain is not universally reconfigurable
    None
}

/// Number of configurations reachable from the identity, or `None` past
/// `limit`. Equals `n!` exactly when the domain is universally
/// reconfigurable.
pub fn reachable_configurations(p: &Polyomino, limit: usize) -> Option<usize> {
    if p.area() > MAX_CELLS {
        return None;
    }
    let start = pack(&Configuration::identity(p));
    let moves = transformations(p);
    let mut seen = HashSet::from_iter([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for m in &moves {
            let t = m.apply(s);
            if seen.insert(t) {
                if seen.len() > limit {
                    return None;
                }
                queue.push_back(t);
            }
        }
    }
    Some(seen.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_two_rotations() {
        let p = Polyomino::parse("##\n##").unwrap();
        assert_eq!(transformations(&p).len(), 2);
        assert_eq!(reachable_configurations(&p, 100), Some(4));
    }

    #[test]
    fn domino_pair_is_connected() {
        let p = Polyomino::parse("###\n###").unwrap();
        assert_eq!(reachable_configurations(&p, 1000), Some(720));
    }
}
