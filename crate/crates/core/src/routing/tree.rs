//! Token swapping on trees by centroid funnelling.
//!
//! Every token is first moved into the component (of the tree minus its
//! centroid) that contains its destination; the components are then solved
//! recursively and in parallel. The centroid forwards one token per round;
//! inside a component, tokens that must leave bubble towards its root while
//! tokens that belong there sink.

use std::collections::VecDeque;

use super::RoutingError;

const CENTER: usize = usize::MAX;

struct Work<'a> {
    adj: &'a [Vec<usize>],
    at: Vec<usize>,
    stamp: Vec<u32>,
    next_stamp: u32,
    comp: Vec<usize>,
    parent: Vec<usize>,
}

/// Rounds of disjoint swaps (edges of the tree) moving the token on `v` to
/// `dest[v]`, for every vertex `v`.
pub fn tree_route(adj: &[Vec<usize>], dest: &[usize]) -> Result<Vec<Vec<(usize, usize)>>, RoutingError> {
    let m = adj.len();
    if dest.len() != m {
        return Err(RoutingError::LabelMismatch(format!("{} destinations for {} vertices", dest.len(), m)));
    }
    let mut seen = vec![false; m];
    for &d in dest {
        if d >= m || std::mem::replace(&mut seen[d], true) {
            return Err(RoutingError::LabelMismatch(format!("destination {d} is repeated or out of range")));
        }
    }
    let edges: usize = adj.iter().map(Vec::len).sum();
    if m > 0 && edges != 2 * (m - 1) {
        return Err(RoutingError::NotATree);
    }
    let mut w = Work { adj, at: dest.to_vec(), stamp: vec![0; m], next_stamp: 0, comp: vec![0; m], parent: vec![0; m] };
    if m == 0 {
        return Ok(Vec::new());
    }
    let all: Vec<usize> = (0..m).collect();
    let rounds = w.route(all)?;
    debug_assert!(w.at.iter().enumerate().all(|(v, &d)| v == d));
    Ok(rounds)
}

fn zip(into: &mut Vec<Vec<(usize, usize)>>, part: Vec<Vec<(usize, usize)>>, offset: usize) {
    for (i, r) in part.into_iter().enumerate() {
        if into.len() <= offset + i {
            into.resize_with(offset + i + 1, Vec::new);
        }
        into[offset + i].extend(r);
    }
}

impl Work<'_> {
    fn route(&mut self, set: Vec<usize>) -> Result<Vec<Vec<(usize, usize)>>, RoutingError> {
        if set.len() <= 1 || set.iter().all(|&v| self.at[v] == v) {
            return Ok(Vec::new());
        }
        self.next_stamp += 1;
        let id = self.next_stamp;
        for &v in &set {
            self.stamp[v] = id;
        }
        let center = self.centroid(&set, id);
        // components of set − center, each rooted at a neighbor of center
        let roots: Vec<usize> = self.adj[center].iter().copied().filter(|&u| self.stamp[u] == id).collect();
        let mut comps: Vec<Vec<usize>> = Vec::with_capacity(roots.len());
        self.comp[center] = CENTER;
        for (i, &r) in roots.iter().enumerate() {
            let mut order = vec![r];
            self.comp[r] = i;
            self.parent[r] = center;
            let mut k = 0;
            while k < order.len() {
                let u = order[k];
                k += 1;
                for &x in &self.adj[u] {
                    if self.stamp[x] == id && x != self.parent[u] && x != center {
                        self.comp[x] = i;
                        self.parent[x] = u;
                        order.push(x);
                    }
                }
            }
            comps.push(order);
        }
        let mut rounds = self.funnel(center, &roots, &comps)?;
        let offset = rounds.len();
        for c in comps {
            let sub = self.route(c)?;
            zip(&mut rounds, sub, offset);
        }
        Ok(rounds)
    }

    fn centroid(&mut self, set: &[usize], id: u32) -> usize {
        let root = set[0];
        let mut order = Vec::with_capacity(set.len());
        let mut par = crate::HashMap::with_capacity_and_hasher(set.len(), Default::default());
        par.insert(root, usize::MAX);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &x in &self.adj[u] {
                if self.stamp[x] == id && !par.contains_key(&x) {
                    par.insert(x, u);
                    queue.push_back(x);
                }
            }
        }
        let n = order.len();
        let mut size: crate::HashMap<usize, usize> = order.iter().map(|&v| (v, 1)).collect();
        let mut heavy: crate::HashMap<usize, usize> = crate::HashMap::default();
        for &v in order.iter().rev() {
            let p = par[&v];
            if p != usize::MAX {
                let s = size[&v];
                *size.get_mut(&p).unwrap() += s;
                let h = heavy.entry(p).or_insert(0);
                *h = (*h).max(s);
            }
        }
        order
            .iter()
            .copied()
            .min_by_key(|v| (heavy.get(v).copied().unwrap_or(0).max(n - size[v]), *v))
            .unwrap()
    }

    fn class(&self, token_dest: usize) -> usize {
        self.comp[token_dest]
    }

    fn funnel(
        &mut self,
        center: usize,
        roots: &[usize],
        comps: &[Vec<usize>],
    ) -> Result<Vec<Vec<(usize, usize)>>, RoutingError> {
        let total: usize = comps.iter().map(Vec::len).sum::<usize>() + 1;
        let misplaced = |w: &Self| -> usize {
            let mut k = (w.class(w.at[center]) != CENTER) as usize;
            for (i, c) in comps.iter().enumerate() {
                k += c.iter().filter(|&&v| w.class(w.at[v]) != i).count();
            }
            k
        };
        let mut rounds = Vec::new();
        let cap = 8 * total + 16;
        let mut used = crate::HashSet::default();
        while misplaced(self) > 0 {
            if rounds.len() > cap {
                return Err(RoutingError::RoundCap(cap));
            }
            used.clear();
            let mut swaps = Vec::new();
            let x = self.class(self.at[center]);
            let target_root = if x != CENTER {
                let r = roots[x];
                (self.class(self.at[r]) != x).then_some(r)
            } else {
                roots.iter().enumerate().find(|&(i, &r)| self.class(self.at[r]) != i).map(|(_, &r)| r)
            };
            if let Some(r) = target_root {
                swaps.push((center, r));
                used.insert(r);
            }
            for (i, c) in comps.iter().enumerate() {
                for &u in c.iter().skip(1) {
                    let p = self.parent[u];
                    if used.contains(&u) || used.contains(&p) {
                        continue;
                    }
                    if self.class(self.at[u]) != i && self.class(self.at[p]) == i {
                        swaps.push((p, u));
                        used.insert(p);
                        used.insert(u);
                    }
                }
            }
            if swaps.is_empty() {
                return Err(RoutingError::Stuck);
            }
            for &(a, b) in &swaps {
                self.at.swap(a, b);
            }
            rounds.push(swaps);
        }
        Ok(rounds)
    }
}

/// BFS spanning tree of a graph given by adjacency lists, rooted at `root`.
pub fn bfs_spanning_tree(adj: &[Vec<usize>], root: usize) -> Vec<Vec<usize>> {
    let mut tree = vec![Vec::new(); adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                tree[u].push(v);
                tree[v].push(u);
                queue.push_back(v);
            }
        }
    }
    tree
}

#[cfg(test)]
mod tests {
    use super::*;

    fn replay(m: usize, rounds: &[Vec<(usize, usize)>], dest: &[usize]) -> Vec<usize> {
        let mut at = dest.to_vec();
        for r in rounds {
            let mut seen = crate::HashSet::default();
            for &(a, b) in r {
                assert!(seen.insert(a) && seen.insert(b), "round is not a matching");
                at.swap(a, b);
            }
        }
        assert_eq!(at.len(), m);
        at
    }

    fn path(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| [i.wrapping_sub(1), i + 1].into_iter().filter(|&j| j < n).collect()).collect()
    }

    #[test]
    fn two_vertex_swap() {
        let r = tree_route(&path(2), &[1, 0]).unwrap();
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn path_reversal() {
        for n in [3, 10, 41] {
            let dest: Vec<usize> = (0..n).rev().collect();
            let r = tree_route(&path(n), &dest).unwrap();
            assert!(r.len() <= 3 * n, "{n}: {}", r.len());
            assert_eq!(replay(n, &r, &dest), (0..n).collect::<Vec<_>>());
        }
    }

    #[test]
    fn star_cycle() {
        let adj = vec![vec![1, 2, 3, 4], vec![0], vec![0], vec![0], vec![0]];
        let dest = vec![1, 2, 3, 4, 0];
        let r = tree_route(&adj, &dest).unwrap();
        assert!(r.len() <= 15);
        assert_eq!(replay(5, &r, &dest), (0..5).collect::<Vec<_>>());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(tree_route(&path(3), &[0, 0, 1]).is_err());
        assert!(tree_route(&path(3), &[0, 1]).is_err());
    }
}
