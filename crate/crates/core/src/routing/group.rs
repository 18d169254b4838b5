//! Routing between groups of cells.
//!
//! Cells are partitioned into groups, each owning a rectangular core (a tile)
//! and an HV-convex work region containing all of its cells. Tokens are first
//! moved into their target groups: greedy exchange sweeps trade tokens
//! between the cores along straight runs of tiles (sorting the rectangle the
//! run spans), and a centroid funnel over a spanning tree of the group graph
//! finishes whatever the sweeps leave. Groups larger than their core first
//! stage the outgoing tokens into the core. Finally every group is sorted
//! inside its work region.
//!
//! The simulation works on label permutations and emits rounds of
//! [`Op`]s; [`realize_op_rounds`] turns them into a schedule, running ops of
//! a round whose regions overlap one after another.

use crate::{HashMap, HashSet};

use crate::domain::{CellCoord, Polyomino, NONE};
use crate::primitives::{check_universal_reconfigurability, route_region, PrimitiveError, Rect};
use crate::schedule::{zip_schedules, Schedule};
use crate::shape::{compute_watershed_with, is_hv_convex, Occupancy, ShapeError, Skeleton};

use super::tree::bfs_spanning_tree;
use super::RoutingError;

/// A permutation of tokens confined to a region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Op {
    pub region: Vec<CellCoord>,
    /// `(from, to)`: the token on `from` ends on `to`.
    pub moves: Vec<(CellCoord, CellCoord)>,
}

/// A partition of (part of) the domain into groups with cores.
#[derive(Debug, Clone)]
pub struct GroupAssignment {
    /// Grid coordinates of each group's tile.
    pub tiles: Vec<(i32, i32)>,
    /// Cell indices per group.
    pub groups: Vec<Vec<usize>>,
    pub cores: Vec<Rect>,
    pub work: Vec<Vec<CellCoord>>,
    pub adj: Vec<Vec<usize>>,
    /// Group of each cell index (`NONE` if ungrouped).
    pub group_of: Vec<u32>,
}

impl GroupAssignment {
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    fn core_area(&self) -> usize {
        self.cores.iter().map(|r| (r.w * r.h) as usize).min().unwrap_or(0)
    }

    /// Groups of exactly the aligned `c × c` tiles of a scaled polyomino.
    pub fn scaled(p: &Polyomino, c: i32, offset: (i32, i32)) -> Self {
        let mut tiles: Vec<(i32, i32)> = p
            .cells()
            .iter()
            .map(|cell| ((cell.x - offset.0).div_euclid(c), (cell.y - offset.1).div_euclid(c)))
            .collect();
        tiles.sort_unstable();
        tiles.dedup();
        let lookup: HashMap<(i32, i32), usize> = tiles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
        let mut groups = vec![Vec::new(); tiles.len()];
        let mut group_of = vec![NONE; p.area()];
        for (i, cell) in p.cells().iter().enumerate() {
            let g = lookup[&((cell.x - offset.0).div_euclid(c), (cell.y - offset.1).div_euclid(c))];
            groups[g].push(i);
            group_of[i] = g as u32;
        }
        let cores: Vec<Rect> =
            tiles.iter().map(|&(kx, ky)| Rect::new(offset.0 + kx * c, offset.1 + ky * c, c, c)).collect();
        let work = cores.iter().zip(&groups).map(|(r, g)| tight_region(p, g, r.cells())).collect();
        let adj = tile_adjacency(&tiles, &lookup);
        Self { tiles, groups, cores, work, adj, group_of }
    }
}

/// The group's own cells when they can be routed in isolation (HV-convex
/// and universally reconfigurable), else their bounding box if it lies in
/// the domain, else `fallback`.
fn tight_region(p: &Polyomino, cells: &[usize], fallback: Vec<CellCoord>) -> Vec<CellCoord> {
    let own: Vec<CellCoord> = cells.iter().map(|&i| p.cell(i)).collect();
    let routable = |r: &[CellCoord]| {
        is_hv_convex(r) && Polyomino::new(r.iter().copied()).is_ok_and(|q| check_universal_reconfigurability(&q).is_yes())
    };
    if routable(&own) {
        return own;
    }
    let (x0, x1) = own.iter().fold((i32::MAX, i32::MIN), |(a, b), c| (a.min(c.x), b.max(c.x)));
    let (y0, y1) = own.iter().fold((i32::MAX, i32::MIN), |(a, b), c| (a.min(c.y), b.max(c.y)));
    let bbox: Vec<CellCoord> = (x0..=x1).flat_map(|x| (y0..=y1).map(move |y| CellCoord::new(x, y))).collect();
    if bbox.len() < fallback.len() && bbox.iter().all(|&c| p.contains(c)) && routable(&bbox) {
        return bbox;
    }
    fallback
}

fn tile_adjacency(tiles: &[(i32, i32)], lookup: &HashMap<(i32, i32), usize>) -> Vec<Vec<usize>> {
    tiles
        .iter()
        .map(|&(x, y)| [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)].iter().filter_map(|t| lookup.get(t).copied()).collect())
        .collect()
}

/// Groups keyed by skeleton tiles: each tile's cells plus every remaining
/// cell assigned to the lexicographically smallest tile whose watershed
/// contains it.
pub fn group_by_watershed(p: &Polyomino, s: &Skeleton) -> Result<GroupAssignment, ShapeError> {
    let occ = Occupancy::new(p);
    let mut tiles = s.tiles.clone();
    tiles.sort_unstable();
    let lookup: HashMap<(i32, i32), usize> = tiles.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut group_of = vec![NONE; p.area()];
    let mut work = Vec::with_capacity(tiles.len());
    for (g, &t) in tiles.iter().enumerate() {
        for c in s.tile_cells(t) {
            group_of[p.index_of(c).expect("tile inside domain")] = g as u32;
        }
        work.push(compute_watershed_with(p, &occ, s, t)?.cells);
    }
    for (g, w) in work.iter().enumerate() {
        for &c in w {
            let i = p.index_of(c).expect("watershed inside domain");
            if group_of[i] == NONE {
                group_of[i] = g as u32;
            }
        }
    }
    if let Some(i) = group_of.iter().position(|&g| g == NONE) {
        return Err(ShapeError::SkeletonInvariantViolation(format!("cell {} lies in no watershed", p.cell(i))));
    }
    let mut groups = vec![Vec::new(); tiles.len()];
    for (i, &g) in group_of.iter().enumerate() {
        groups[g as usize].push(i);
    }
    let cores = tiles
        .iter()
        .map(|&t| {
            let o = s.tile_origin(t);
            Rect::new(o.x, o.y, s.lambda, s.lambda)
        })
        .collect();
    let work = work.into_iter().zip(&groups).map(|(w, g)| tight_region(p, g, w)).collect();
    let adj = tile_adjacency(&tiles, &lookup);
    Ok(GroupAssignment { tiles, groups, cores, work, adj, group_of })
}

/// Mutable token state: label per cell index and cell index per label.
#[derive(Clone)]
pub struct TokenState<'a> {
    pub p: &'a Polyomino,
    pub labels: Vec<u32>,
    pub pos: Vec<u32>,
}

impl<'a> TokenState<'a> {
    pub fn new(p: &'a Polyomino, labels: Vec<u32>) -> Self {
        let mut pos = vec![0u32; labels.len()];
        for (i, &l) in labels.iter().enumerate() {
            pos[l as usize - 1] = i as u32;
        }
        Self { p, labels, pos }
    }

    pub fn apply(&mut self, op: &Op) {
        let moved: Vec<(usize, u32)> = op
            .moves
            .iter()
            .map(|&(a, b)| (self.p.index_of(b).unwrap(), self.labels[self.p.index_of(a).unwrap()]))
            .collect();
        for (b, l) in moved {
            self.labels[b] = l;
            self.pos[l as usize - 1] = b as u32;
        }
    }

    pub fn cell_of(&self, label: u32) -> usize {
        self.pos[label as usize - 1] as usize
    }
}

const CENTER: usize = usize::MAX;

struct Funnel<'s, 'p> {
    spec: &'s GroupAssignment,
    state: &'s mut TokenState<'p>,
    /// Desired group per label (index `label - 1`).
    want: &'s [u32],
    tree: Vec<Vec<usize>>,
    comp: Vec<usize>,
    parent: Vec<usize>,
    stamp: Vec<u32>,
    next_stamp: u32,
    cap: usize,
    round_cap: usize,
}

fn zip_rounds(into: &mut Vec<Vec<Op>>, part: Vec<Vec<Op>>, offset: usize) {
    for (i, r) in part.into_iter().enumerate() {
        if into.len() <= offset + i {
            into.resize_with(offset + i + 1, Vec::new);
        }
        into[offset + i].extend(r);
    }
}

/// Hop distances between active groups (`u16::MAX` if unreachable).
fn group_distances(spec: &GroupAssignment, active: &[usize]) -> HashMap<usize, Vec<u16>> {
    let inside: HashSet<usize> = active.iter().copied().collect();
    let mut out = HashMap::with_capacity_and_hasher(active.len(), Default::default());
    for &src in active {
        let mut dist = vec![u16::MAX; spec.len()];
        dist[src] = 0;
        let mut queue = std::collections::VecDeque::from([src]);
        while let Some(u) = queue.pop_front() {
            for &v in &spec.adj[u] {
                if inside.contains(&v) && dist[v] == u16::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        out.insert(src, dist);
    }
    out
}

/// Longest straight link, in tile hops.
const MAX_HOPS: i32 = 6;

/// Exchange links of the active tile graph: straight runs of consecutive
/// active tiles `(a, intermediate groups, b)` of up to `max_hops` hops,
/// rightwards or upwards from `a`.
fn tile_links(spec: &GroupAssignment, active: &[usize], max_hops: i32) -> Vec<(usize, Vec<usize>, usize)> {
    let inside: HashSet<usize> = active.iter().copied().collect();
    let at: HashMap<(i32, i32), usize> = active.iter().map(|&g| (spec.tiles[g], g)).collect();
    let mut links = Vec::new();
    for &a in active {
        let (x, y) = spec.tiles[a];
        for (dx, dy) in [(1, 0), (0, 1)] {
            let mut via = Vec::new();
            for k in 1..=max_hops {
                let Some(&b) = at.get(&(x + k * dx, y + k * dy)) else { break };
                // consecutive tiles must be adjacent groups
                let prev = via.last().copied().unwrap_or(a);
                if !inside.contains(&b) || !spec.adj[prev].contains(&b) {
                    break;
                }
                links.push((a, via.clone(), b));
                via.push(b);
            }
        }
    }
    links.sort_unstable();
    links
}

/// Greedy exchange rounds. Every link proposes swapping the tokens that get
/// closer to their wanted group by crossing it, farthest first; a surplus on
/// one side is balanced with tokens that lose nothing by crossing. With
/// `permissive`, an adjacent pair that would otherwise stay idle may also
/// push tokens away from their group, as long as the summed distance does
/// not grow. Each round takes a maximal set of disjoint links in order of
/// decreasing gain per core. The sweep stops when no link proposes
/// anything or the summed distance has not improved for twelve rounds.
fn sweep(
    spec: &GroupAssignment,
    state: &mut TokenState<'_>,
    active: &[usize],
    want: &[u32],
    max_rounds: usize,
    permissive: bool,
    max_hops: i32,
) -> Vec<Vec<Op>> {
    let dist = group_distances(spec, active);
    let links = tile_links(spec, active, max_hops.max(1));
    let class = |a: usize, b: usize| {
        let (ta, tb) = (spec.tiles[a], spec.tiles[b]);
        if tb.0 != ta.0 { ta.0.rem_euclid(2) } else { 2 + ta.1.rem_euclid(2) }
    };
    let mut k = 0;
    let cap = spec.core_area().max(1);
    let d = |l: u32, g: usize| dist[&(want[l as usize - 1] as usize)][g] as i64;
    let mut potential: i64 = active
        .iter()
        .flat_map(|&g| spec.groups[g].iter().map(move |&c| (g, c)))
        .map(|(g, c)| d(state.labels[c], g))
        .sum();
    let mut best = potential;
    let mut stale = 0;
    let mut rounds = Vec::new();
    let mut used = vec![false; spec.len()];
    while potential > 0 && stale < 12 && rounds.len() < max_rounds {
        // (gain per core, gain, exchange)
        let mut proposals: Vec<(i64, i64, Exchange)> = Vec::new();
        for (a, via, b) in &links {
            let (a, b) = (*a, *b);
            if max_hops == 0 && class(a, b) != k % 4 {
                continue;
            }
            // gain tokens (most gain, then farthest first) and fillers
            // (least harm first)
            let lists = |from: usize, to: usize| {
                let mut gain = Vec::new();
                let mut filler = Vec::new();
                for &c in &spec.groups[from] {
                    let l = state.labels[c];
                    let delta = d(l, to) - d(l, from);
                    if delta < 0 {
                        gain.push((delta, std::cmp::Reverse(d(l, from)), l));
                    } else if via.is_empty() || delta == 0 {
                        filler.push((delta, d(l, from), l));
                    }
                }
                gain.sort_unstable();
                filler.sort_unstable();
                (gain.into_iter().map(|(delta, _, l)| (delta, l)).collect::<Vec<_>>(), filler)
            };
            let (ga, fa) = lists(a, b);
            let (gb, fb) = lists(b, a);
            let safe = |f: &[(i64, i64, u32)]| f.iter().filter(|x| x.0 == 0).count();
            let strict = ga.len().min(gb.len() + safe(&fb)).max(gb.len().min(ga.len() + safe(&fa)));
            let m = if strict > 0 || !permissive || !via.is_empty() {
                strict
            } else {
                ga.len().max(gb.len()).min(ga.len() + fa.len()).min(gb.len() + fb.len())
            }
            .min(cap);
            if m == 0 {
                continue;
            }
            let take = |g: Vec<(i64, u32)>, f: Vec<(i64, i64, u32)>| {
                let mut change = 0;
                let mut out = Vec::with_capacity(m);
                for (delta, l) in g.into_iter().map(|(delta, l)| (delta, l)).chain(f.into_iter().map(|(delta, _, l)| (delta, l))).take(m) {
                    change += delta;
                    out.push(l);
                }
                (out, change)
            };
            let (up, ca) = take(ga, fa);
            let (down, cb) = take(gb, fb);
            let gain = -(ca + cb);
            if gain >= 0 {
                let cores = via.len() as i64 + 2;
                proposals.push((60 * gain / cores, gain, Exchange { a, b, via: via.clone(), up, down }));
            }
        }
        proposals.sort_by(|x, y| (y.0, y.1, x.2.a, &x.2.via, x.2.b).cmp(&(x.0, x.1, y.2.a, &y.2.via, y.2.b)));
        used.iter_mut().for_each(|u| *u = false);
        let mut exchanges = Vec::new();
        for (_, gain, e) in proposals {
            let groups: Vec<usize> = e.via.iter().copied().chain([e.a, e.b]).collect();
            if groups.iter().any(|&g| used[g]) {
                continue;
            }
            groups.iter().for_each(|&g| used[g] = true);
            potential -= gain;
            exchanges.push(e);
        }
        k += 1;
        if exchanges.is_empty() {
            if max_hops == 0 && k % 4 != 0 {
                continue;
            }
            break;
        }
        if potential < best {
            best = potential;
            stale = 0;
        } else {
            stale += 1;
        }
        let (staging, swaps) = build_ops(spec, state, &exchanges);
        if !staging.is_empty() {
            rounds.push(staging);
        }
        rounds.push(swaps);
    }
    rounds
}

/// Op rounds bringing every token inside the `active` groups into the group
/// `want[label - 1]`. Token counts must balance: each active group must be
/// wanted by exactly as many tokens as it has cells.
pub fn route_to_groups(
    spec: &GroupAssignment,
    state: &mut TokenState<'_>,
    active: &[usize],
    want: &[u32],
) -> Result<Vec<Vec<Op>>, RoutingError> {
    if active.len() <= 1 {
        return Ok(Vec::new());
    }
    let k = spec.len();
    let inside: HashSet<usize> = active.iter().copied().collect();
    let local: Vec<Vec<usize>> =
        (0..k).map(|g| if inside.contains(&g) { spec.adj[g].iter().copied().filter(|h| inside.contains(h)).collect() } else { Vec::new() }).collect();
    let mut root = active[0];
    for &g in active {
        root = root.min(g);
    }
    let tree = bfs_spanning_tree(&local, root);
    let total_cells: usize = active.iter().map(|&g| spec.groups[g].len()).sum();
    let cap = spec.core_area().max(1);
    let budget = 8 * total_cells / cap + 16;
    let mut set = active.to_vec();
    set.sort_unstable();
    // Short links keep rounds cheap, long ones get past groups that are
    // already settled. Finishing with the funnel straight away suits compact
    // domains; a permissive sweep first suits chambers behind narrow
    // passages. Keep the cheapest combination.
    let mut best: Option<(usize, Vec<Vec<Op>>, TokenState<'_>)> = None;
    // hop limit 0: single hops restricted to one class of the fixed
    // 4-matching cover (horizontal even/odd, vertical even/odd) per round
    for hops in [0, 1, 2, MAX_HOPS] {
        let mut base = state.clone();
        let strict = sweep(spec, &mut base, active, want, budget, false, hops);
        for permissive in [false, true] {
            let mut st = base.clone();
            let mut rounds = strict.clone();
            if permissive {
                rounds.extend(sweep(spec, &mut st, active, want, budget, true, hops));
            }
            let mut f = Funnel {
                spec,
                state: &mut st,
                want,
                tree: tree.clone(),
                comp: vec![0; k],
                parent: vec![0; k],
                stamp: vec![0; k],
                next_stamp: 0,
                cap,
                round_cap: 16 * total_cells + 64,
            };
            rounds.extend(f.route(set.clone())?);
            let cost = estimated_cost(&rounds);
            if best.as_ref().map_or(true, |b| cost < b.0) {
                best = Some((cost, rounds, st));
            }
        }
    }
    let (_, rounds, st) = best.expect("at least one candidate");
    *state = st;
    Ok(rounds)
}

/// Rough makespan of op rounds, in units of roughly a step: an op costs
/// the half-perimeter of its bounding box times 7 plus 6 per fraction of
/// its cells that move, and overlapping ops of a round run one after
/// another, as in [`realize_op_rounds`].
fn estimated_cost(rounds: &[Vec<Op>]) -> usize {
    let mut total = 0;
    for r in rounds {
        let mut ops: Vec<(usize, &Op)> = r
            .iter()
            .map(|op| {
                let moved = op.moves.iter().filter(|(a, b)| a != b).count();
                (half_perimeter(&op.region) * (7 * op.region.len() + 6 * moved) / op.region.len().max(1), op)
            })
            .collect();
        ops.sort_by_key(|&(c, _)| std::cmp::Reverse(c));
        let mut batches: Vec<(HashSet<CellCoord>, usize)> = Vec::new();
        for (c, op) in ops {
            match batches.iter_mut().find(|(used, _)| op.region.iter().all(|x| !used.contains(x))) {
                Some((used, _)) => used.extend(op.region.iter().copied()),
                None => batches.push((op.region.iter().copied().collect(), c)),
            }
        }
        total += batches.iter().map(|b| b.1).sum::<usize>();
    }
    total
}

fn half_perimeter(cells: &[CellCoord]) -> usize {
    let (x0, x1) = cells.iter().fold((i32::MAX, i32::MIN), |(a, b), c| (a.min(c.x), b.max(c.x)));
    let (y0, y1) = cells.iter().fold((i32::MAX, i32::MIN), |(a, b), c| (a.min(c.y), b.max(c.y)));
    (x1 - x0 + y1 - y0 + 2).max(0) as usize
}

impl Funnel<'_, '_> {
    fn class_of_label(&self, l: u32) -> usize {
        self.comp[self.want[l as usize - 1] as usize]
    }

    fn route(&mut self, set: Vec<usize>) -> Result<Vec<Vec<Op>>, RoutingError> {
        if set.len() <= 1 {
            return Ok(Vec::new());
        }
        self.next_stamp += 1;
        let id = self.next_stamp;
        for &g in &set {
            self.stamp[g] = id;
        }
        let done = set.iter().all(|&g| {
            self.spec.groups[g].iter().all(|&c| self.want[self.state.labels[c] as usize - 1] as usize == g)
        });
        if done {
            return Ok(Vec::new());
        }
        let center = self.centroid(&set, id);
        let roots: Vec<usize> = self.tree[center].iter().copied().filter(|&u| self.stamp[u] == id).collect();
        let mut comps: Vec<Vec<usize>> = Vec::new();
        self.comp[center] = CENTER;
        for (i, &r) in roots.iter().enumerate() {
            let mut order = vec![r];
            self.comp[r] = i;
            self.parent[r] = center;
            let mut q = 0;
            while q < order.len() {
                let u = order[q];
                q += 1;
                for &x in &self.tree[u] {
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
            zip_rounds(&mut rounds, sub, offset);
        }
        Ok(rounds)
    }

    fn centroid(&self, set: &[usize], id: u32) -> usize {
        let root = set[0];
        let mut order = vec![root];
        let mut par: HashMap<usize, usize> = HashMap::from_iter([(root, usize::MAX)]);
        let mut q = 0;
        while q < order.len() {
            let u = order[q];
            q += 1;
            for &x in &self.tree[u] {
                if self.stamp[x] == id && !par.contains_key(&x) {
                    par.insert(x, u);
                    order.push(x);
                }
            }
        }
        let n = order.len();
        let mut size: HashMap<usize, usize> = order.iter().map(|&v| (v, 1)).collect();
        let mut heavy: HashMap<usize, usize> = HashMap::default();
        for &v in order.iter().rev() {
            let p = par[&v];
            if p != usize::MAX {
                let s = size[&v];
                *size.get_mut(&p).unwrap() += s;
                let h = heavy.entry(p).or_insert(0);
                *h = (*h).max(s);
            }
        }
        order.iter().copied().min_by_key(|v| (heavy.get(v).copied().unwrap_or(0).max(n - size[v]), *v)).unwrap()
    }

    /// Labels in group `g` whose class differs from (`out = true`) or equals
    /// (`out = false`) `cls`, tokens in the core first.
    fn pick(&self, g: usize, cls: usize, out: bool, limit: usize) -> Vec<u32> {
        let core = self.spec.cores[g];
        let mut v: Vec<(bool, u32)> = self.spec.groups[g]
            .iter()
            .map(|&c| self.state.labels[c])
            .filter(|&l| (self.class_of_label(l) != cls) == out)
            .map(|l| (!core.contains(self.state.p.cell(self.state.cell_of(l))), l))
            .collect();
        v.sort_unstable();
        v.truncate(limit);
        v.into_iter().map(|(_, l)| l).collect()
    }

    fn count(&self, g: usize, cls: usize, out: bool) -> usize {
        self.spec.groups[g].iter().filter(|&&c| (self.class_of_label(self.state.labels[c]) != cls) == out).count()
    }

    fn funnel(&mut self, center: usize, roots: &[usize], comps: &[Vec<usize>]) -> Result<Vec<Vec<Op>>, RoutingError> {
        let mut rounds = Vec::new();
        loop {
            let misplaced = self.count(center, CENTER, true)
                + comps.iter().enumerate().map(|(i, c)| c.iter().map(|&g| self.count(g, i, true)).sum::<usize>()).sum::<usize>();
            if misplaced == 0 {
                break;
            }
            if rounds.len() > self.round_cap {
                return Err(RoutingError::RoundCap(self.round_cap));
            }
            // (from-group, to-group, labels up, labels down)
            let mut exchanges: Vec<Exchange> = Vec::new();
            let mut used: HashSet<usize> = HashSet::default();
            let mut best: Option<(usize, usize)> = None;
            for (i, &r) in roots.iter().enumerate() {
                let k = self.count(center, i, false).min(self.count(r, i, true)).min(self.cap);
                if k > 0 && best.map_or(true, |(bk, _)| k > bk) {
                    best = Some((k, i));
                }
            }
            if let Some((k, i)) = best {
                let r = roots[i];
                let down = self.pick(center, i, false, k);
                let up = self.pick(r, i, true, k);
                exchanges.push(Exchange::pair(r, center, up, down));
                used.insert(r);
            } else {
                let spare = self.count(center, CENTER, false);
                let mut best: Option<(usize, usize)> = None;
                for (i, &r) in roots.iter().enumerate() {
                    let k = spare.min(self.count(r, i, true)).min(self.cap);
                    if k > 0 && best.map_or(true, |(bk, _)| k > bk) {
                        best = Some((k, i));
                    }
                }
                if let Some((k, i)) = best {
                    let r = roots[i];
                    let down = self.pick(center, CENTER, false, k);
                    let up = self.pick(r, i, true, k);
                    exchanges.push(Exchange::pair(r, center, up, down));
                    used.insert(r);
                }
            }
            for (i, c) in comps.iter().enumerate() {
                for &u in c.iter().skip(1) {
                    let p = self.parent[u];
                    if used.contains(&u) || used.contains(&p) {
                        continue;
                    }
                    let k = self.count(u, i, true).min(self.count(p, i, false)).min(self.cap);
                    if k > 0 {
                        let up = self.pick(u, i, true, k);
                        let down = self.pick(p, i, false, k);
                        exchanges.push(Exchange::pair(u, p, up, down));
                        used.insert(u);
                        used.insert(p);
                    }
                }
            }
            if exchanges.is_empty() {
                return Err(RoutingError::Stuck);
            }
            let (staging, swaps) = build_ops(self.spec, self.state, &exchanges);
            if !staging.is_empty() {
                rounds.push(staging);
            }
            rounds.push(swaps);
        }
        Ok(rounds)
    }
}

/// Tokens `up` leave group `a` for group `b` while `down` go the other way,
/// through the cores of the groups `via` lying between them.
struct Exchange {
    a: usize,
    b: usize,
    via: Vec<usize>,
    up: Vec<u32>,
    down: Vec<u32>,
}

impl Exchange {
    fn pair(a: usize, b: usize, up: Vec<u32>, down: Vec<u32>) -> Self {
        Self { a, b, via: Vec::new(), up, down }
    }
}

/// Staging ops (outgoing tokens into cores) followed by core exchanges.
fn build_ops(spec: &GroupAssignment, state: &mut TokenState<'_>, exchanges: &[Exchange]) -> (Vec<Op>, Vec<Op>) {
    let mut staging = Vec::new();
    for e in exchanges {
        for (g, out) in [(e.a, &e.up), (e.b, &e.down)] {
            if let Some(op) = stage(spec, state, g, out) {
                staging.push(op);
            }
        }
    }
    for op in &staging {
        state.apply(op);
    }
    let mut swaps = Vec::new();
    for e in exchanges {
        let mut xs: Vec<CellCoord> = e.up.iter().map(|&l| state.p.cell(state.cell_of(l))).collect();
        let mut ys: Vec<CellCoord> = e.down.iter().map(|&l| state.p.cell(state.cell_of(l))).collect();
        let (ca, cb) = (spec.cores[e.a], spec.cores[e.b]);
        // pair tokens so that cells near the shared side swap with each other
        let key_a = |c: &CellCoord| (c.x - cb.x).abs() + (c.y - cb.y).abs() + (c.x - (cb.x + cb.w - 1)).abs() + (c.y - (cb.y + cb.h - 1)).abs();
        let key_b = |c: &CellCoord| (c.x - ca.x).abs() + (c.y - ca.y).abs() + (c.x - (ca.x + ca.w - 1)).abs() + (c.y - (ca.y + ca.h - 1)).abs();
        xs.sort_by_key(|c| (key_a(c), *c));
        ys.sort_by_key(|c| (key_b(c), *c));
        let mut region = ca.cells();
        region.extend(cb.cells());
        for &m in &e.via {
            region.extend(spec.cores[m].cells());
        }
        let mut moves = Vec::with_capacity(2 * xs.len());
        for (&x, &y) in xs.iter().zip(&ys) {
            moves.push((x, y));
            moves.push((y, x));
        }
        swaps.push(Op { region, moves });
    }
    for op in &swaps {
        state.apply(op);
    }
    (staging, swaps)
}

fn stage(spec: &GroupAssignment, state: &TokenState<'_>, g: usize, out: &[u32]) -> Option<Op> {
    let core = spec.cores[g];
    let p = state.p;
    let outside: Vec<CellCoord> = out.iter().map(|&l| p.cell(state.cell_of(l))).filter(|c| !core.contains(*c)).collect();
    if outside.is_empty() {
        return None;
    }
    let chosen: HashSet<u32> = out.iter().copied().collect();
    let mut free: Vec<CellCoord> =
        core.cells().into_iter().filter(|&c| !chosen.contains(&state.labels[p.index_of(c).unwrap()])).collect();
    let mut moves = Vec::new();
    for c in outside {
        // nearest free core cell
        let (k, _) = free.iter().enumerate().min_by_key(|(_, f)| (f.manhattan(c), **f)).unwrap();
        let f = free.swap_remove(k);
        moves.push((c, f));
        moves.push((f, c));
    }
    Some(Op { region: spec.work[g].clone(), moves })
}

/// Final per-group sorts: every token in an active group goes to its target
/// cell, which must lie in the same group.
pub fn sort_groups(
    spec: &GroupAssignment,
    state: &mut TokenState<'_>,
    active: &[usize],
    target_pos: &[u32],
) -> Vec<Op> {
    let p = state.p;
    let mut ops = Vec::new();
    for &g in active {
        let moves: Vec<(CellCoord, CellCoord)> = spec.groups[g]
            .iter()
            .filter_map(|&c| {
                let t = target_pos[state.labels[c] as usize - 1] as usize;
                (t != c).then(|| (p.cell(c), p.cell(t)))
            })
            .collect();
        if !moves.is_empty() {
            ops.push(Op { region: spec.work[g].clone(), moves });
        }
    }
    for op in &ops {
        state.apply(op);
    }
    ops
}

/// Realizes op rounds; within a round, ops with overlapping regions run in
/// successive batches (their moved tokens are disjoint, so order is free).
pub fn realize_op_rounds(p: &Polyomino, rounds: &[Vec<Op>]) -> Result<Schedule, PrimitiveError> {
    let mut steps = Vec::new();
    for round in rounds {
        let mut parts: Vec<(Schedule, &Op)> = Vec::with_capacity(round.len());
        for op in round {
            let mut dest: HashMap<CellCoord, CellCoord> = op.region.iter().map(|&c| (c, c)).collect();
            for &(a, b) in &op.moves {
                dest.insert(a, b);
            }
            parts.push((route_region(p, &op.region, &dest)?.schedule, op));
        }
        parts.sort_by_key(|(s, _)| std::cmp::Reverse(s.makespan()));
        let mut batches: Vec<(HashSet<CellCoord>, Vec<&Schedule>)> = Vec::new();
        for (s, op) in &parts {
            if s.makespan() == 0 {
                continue;
            }
            match batches.iter_mut().find(|(used, _)| op.region.iter().all(|c| !used.contains(c))) {
                Some((used, members)) => {
                    used.extend(op.region.iter().copied());
                    members.push(s);
                }
                None => batches.push((op.region.iter().copied().collect(), vec![s])),
            }
        }
        for (_, members) in batches {
            steps.extend(zip_schedules(members.into_iter()).steps);
        }
    }
    Ok(Schedule::new(steps))
}

/// Zips independent op-round sequences (disjoint token sets) round by round.
pub fn zip_op_rounds(parts: Vec<Vec<Vec<Op>>>) -> Vec<Vec<Op>> {
    let mut out = Vec::new();
    for part in parts {
        zip_rounds(&mut out, part, 0);
    }
    out
}

/// Full routing of an instance between groups: tokens reach their target
/// groups, then their target cells.
pub fn group_route_labels(
    p: &Polyomino,
    spec: &GroupAssignment,
    start: &[u32],
    target_pos: &[u32],
) -> Result<Vec<Vec<Op>>, RoutingError> {
    let mut state = TokenState::new(p, start.to_vec());
    let want: Vec<u32> = target_pos.iter().map(|&c| spec.group_of[c as usize]).collect();
    let active: Vec<usize> = (0..spec.len()).collect();
    let mut rounds = route_to_groups(spec, &mut state, &active, &want)?;
    let last = sort_groups(spec, &mut state, &active, target_pos);
    if !last.is_empty() {
        rounds.push(last);
    }
    debug_assert!(state.labels.iter().enumerate().all(|(c, &l)| target_pos[l as usize - 1] as usize == c));
    Ok(rounds)
}
