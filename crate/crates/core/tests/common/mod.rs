//! Helpers shared by the integration tests. `replay` re-checks schedules with
//! its own collision rules, independent of the library validator.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};

use polyroute::domain::{CellCoord, Polyomino};
use polyroute::schedule::{Configuration, Instance, Schedule};

pub fn c(x: i32, y: i32) -> CellCoord {
    CellCoord { x, y }
}

pub fn square(side: usize) -> Polyomino {
    rect(side, side)
}

pub fn rect(w: usize, h: usize) -> Polyomino {
    Polyomino::parse(&format!("{}\n", "#".repeat(w)).repeat(h)).unwrap()
}

/// Instance whose target is `start` with labels permuted by `perm`
/// (cell index `i` of the target holds the start label of cell `perm[i]`).
pub fn permuted(p: &Polyomino, perm: &[usize]) -> Instance {
    let start = Configuration::identity(p);
    let labels = perm.iter().map(|&i| start.label_at(i)).collect();
    let target = Configuration::new(p, labels).unwrap();
    Instance::new(p.clone(), start, target).unwrap()
}

/// Replays `s` from `inst.start` with independently coded rules: moves
/// between adjacent domain cells, distinct sources, distinct targets, every
/// vacated cell refilled in the same step, and no two-agent swaps. Returns
/// the final labels per cell or a description of the first violation.
pub fn replay(inst: &Instance, s: &Schedule) -> Result<BTreeMap<(i32, i32), u32>, String> {
    let p = &inst.polyomino;
    let cells: HashSet<(i32, i32)> = p.cells().iter().map(|q| (q.x, q.y)).collect();
    let mut at: BTreeMap<(i32, i32), u32> =
        p.cells().iter().enumerate().map(|(i, q)| ((q.x, q.y), inst.start.label_at(i))).collect();
    for (k, t) in s.steps.iter().enumerate() {
        let mut dest: HashMap<(i32, i32), (i32, i32)> = HashMap::new();
        let mut targets = HashSet::new();
        for m in &t.moves {
            let (f, to) = ((m.from.x, m.from.y), (m.to.x, m.to.y));
            if f == to {
                continue;
            }
            if !cells.contains(&f) || !cells.contains(&to) {
                return Err(format!("step {k}: move outside the domain"));
            }
            if (f.0 - to.0).abs() + (f.1 - to.1).abs() != 1 {
                return Err(format!("step {k}: move between non-adjacent cells"));
            }
            if dest.insert(f, to).is_some() {
                return Err(format!("step {k}: two moves from one cell"));
            }
            if !targets.insert(to) {
                return Err(format!("step {k}: two moves into one cell"));
            }
        }
        for (f, to) in &dest {
            if dest.get(to) == Some(f) {
                return Err(format!("step {k}: swap"));
            }
            if !dest.contains_key(to) {
                return Err(format!("step {k}: move into an occupied cell"));
            }
        }
        let moved: Vec<((i32, i32), u32)> = dest.iter().map(|(f, to)| (*to, at[f])).collect();
        at.extend(moved);
    }
    Ok(at)
}

/// True when `s` is collision-free and ends in the target configuration.
pub fn reaches_target(inst: &Instance, s: &Schedule) -> bool {
    let Ok(end) = replay(inst, s) else { return false };
    inst.polyomino.cells().iter().enumerate().all(|(i, q)| end[&(q.x, q.y)] == inst.target.label_at(i))
}

/// Per-label geodesic distance maximum, by plain BFS over the cell set.
pub fn brute_diameter(inst: &Instance) -> u32 {
    let p = &inst.polyomino;
    let cells: HashSet<(i32, i32)> = p.cells().iter().map(|q| (q.x, q.y)).collect();
    let mut target_of = HashMap::new();
    for (i, q) in p.cells().iter().enumerate() {
        target_of.insert(inst.target.label_at(i), (q.x, q.y));
    }
    let mut best = 0;
    for (i, q) in p.cells().iter().enumerate() {
        let goal = target_of[&inst.start.label_at(i)];
        let mut dist = HashMap::from([((q.x, q.y), 0u32)]);
        let mut queue = std::collections::VecDeque::from([(q.x, q.y)]);
        while let Some(u) = queue.pop_front() {
            if u == goal {
                break;
            }
            for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let v = (u.0 + dx, u.1 + dy);
                if cells.contains(&v) && !dist.contains_key(&v) {
                    dist.insert(v, dist[&u] + 1);
                    queue.push_back(v);
                }
            }
        }
        best = best.max(dist[&goal]);
    }
    best
}
