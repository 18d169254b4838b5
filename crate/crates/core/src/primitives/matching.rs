//! Realizing a matching of dual edges as swaps in constant makespan.

use crate::{HashMap, HashSet};

use crate::domain::{CellCoord, Polyomino};
use crate::schedule::{zip_schedules, Move, Schedule, Transformation};

use super::{squares_with_edge, GadgetKind, GadgetRegion, PrimitiveError, SquareCover};

/// Construction bound: 36 region classes, at most 14 steps each.
pub const MATCHING_BOUND: usize = 36 * 14;

struct Placed {
    region: GadgetRegion,
    schedule: Schedule,
}

/// Schedule swapping the endpoints of every matched edge, fixing all other
/// agents. Gadget regions are drawn from `cover`.
pub fn realize_matching(
    p: &Polyomino,
    cover: &SquareCover,
    matching: &[(CellCoord, CellCoord)],
) -> Result<Schedule, PrimitiveError> {
    if matching.is_empty() {
        return Ok(Schedule::empty());
    }
    let mut partner: HashMap<CellCoord, CellCoord> = HashMap::with_capacity_and_hasher(2 * matching.len(), Default::default());
    for &(a, b) in matching {
        if !a.is_adjacent(b) || !p.contains(a) || !p.contains(b) {
            return Err(PrimitiveError::NotAMatching(format!("{a}-{b} is not a dual edge")));
        }
        if partner.insert(a, b).is_some() || partner.insert(b, a).is_some() {
            return Err(PrimitiveError::NotAMatching(format!("edges share an endpoint near {a}-{b}")));
        }
    }
    let mut edges: Vec<(CellCoord, CellCoord)> = matching.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    edges.sort_unstable();

    let mut done: HashSet<CellCoord> = HashSet::with_capacity_and_hasher(2 * edges.len(), Default::default());
    let mut occupied: HashSet<CellCoord> = HashSet::with_capacity_and_hasher(6 * edges.len(), Default::default());
    let mut placed = Vec::new();
    for &(a, b) in &edges {
        if done.contains(&a) {
            continue;
        }
        // (disjoint from placed regions, matched cells covered, overlap-2)
        let mut best: Option<(bool, usize, bool, GadgetRegion)> = None;
        for s in squares_with_edge(a, b) {
            if !cover.contains_square(s) {
                continue;
            }
            for t in cover.overlapping(s) {
                let region = GadgetRegion::new(s, t)?;
                let covered = region
                    .cells
                    .iter()
                    .filter(|c| !done.contains(c) && partner.get(c).is_some_and(|q| region.contains(*q)))
                    .count();
                let straight = region.kind == GadgetKind::Overlap2;
                let free = region.cells.iter().all(|c| !occupied.contains(c));
                let better = match &best {
                    None => true,
                    Some((bf, bc, bs, br)) => (free, covered, straight, std::cmp::Reverse(&region.squares))
                        > (*bf, *bc, *bs, std::cmp::Reverse(&br.squares)),
                };
                if better {
                    best = Some((free, covered, straight, region));
                }
            }
        }
        let Some((_, _, _, region)) = best else {
            return Err(PrimitiveError::NotReconfigurable);
        };
        let mut dest: Vec<u8> = (0..region.cells.len() as u8).collect();
        for (i, c) in region.cells.iter().enumerate() {
            if done.contains(c) {
                continue;
            }
            if let Some(q) = partner.get(c) {
                if let Some(j) = region.cells.iter().position(|x| x == q) {
                    dest[i] = j as u8;
                }
            }
        }
        for (i, c) in region.cells.iter().enumerate() {
            if dest[i] != i as u8 {
                done.insert(*c);
            }
        }
        occupied.extend(region.cells.iter().copied());
        let schedule = region.realize(&dest);
        placed.push(Placed { region, schedule });
    }
    Ok(schedule_regions(placed))
}

/// Concatenates the realizations of a sequence of matchings.
pub fn realize_rounds(
    p: &Polyomino,
    cover: &SquareCover,
    rounds: &[Vec<(CellCoord, CellCoord)>],
) -> Result<Schedule, PrimitiveError> {
    let mut steps = Vec::new();
    for m in rounds {
        steps.extend(realize_matching(p, cover, m)?.steps);
    }
    Ok(Schedule::new(steps))
}

/// Orders regions into batches of pairwise disjoint regions. Uses either the
/// fixed 36-class partition or a greedy first-fit packing, whichever is shorter.
fn schedule_regions(placed: Vec<Placed>) -> Schedule {
    let class_batches = {
        let mut classes: HashMap<(u8, i32, i32), Vec<usize>> = HashMap::default();
        for (i, pl) in placed.iter().enumerate() {
            classes.entry(class_of(&pl.region)).or_default().push(i);
        }
        let mut keys: Vec<_> = classes.keys().copied().collect();
        keys.sort_unstable();
        keys.into_iter().map(|k| classes.remove(&k).unwrap()).collect::<Vec<_>>()
    };
    let greedy_batches = {
        let mut order: Vec<usize> = (0..placed.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(placed[i].schedule.makespan()));
        let mut batches: Vec<(HashSet<CellCoord>, Vec<usize>)> = Vec::new();
        for i in order {
            let cells = &placed[i].region.cells;
            match batches.iter_mut().find(|(used, _)| cells.iter().all(|c| !used.contains(c))) {
                Some((used, members)) => {
                    used.extend(cells.iter().copied());
                    members.push(i);
                }
                None => batches.push((cells.iter().copied().collect(), vec![i])),
            }
        }
        batches.into_iter().map(|(_, m)| m).collect::<Vec<_>>()
    };
    let cost = |batches: &Vec<Vec<usize>>| -> usize {
        batches.iter().map(|b| b.iter().map(|&i| placed[i].schedule.makespan()).max().unwrap_or(0)).sum()
    };
    let batches = if cost(&greedy_batches) <= cost(&class_batches) { greedy_batches } else { class_batches };
    let listed = list_schedule(&placed);
    if listed.makespan() < cost(&batches) {
        return listed;
    }
    let mut steps = Vec::new();
    for b in batches {
        steps.extend(zip_schedules(b.iter().map(|&i| &placed[i].schedule)).steps);
    }
    Schedule::new(steps)
}

/// Longest first, each region starts as soon as all of its cells are free.
/// Regions overlapping in time are cell-disjoint, so steps can be merged.
fn list_schedule(placed: &[Placed]) -> Schedule {
    let mut order: Vec<usize> = (0..placed.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(placed[i].schedule.makespan()));
    let mut free_at: HashMap<CellCoord, usize> = HashMap::default();
    let mut steps: Vec<Vec<Move>> = Vec::new();
    for i in order {
        let pl = &placed[i];
        let start = pl.region.cells.iter().map(|c| free_at.get(c).copied().unwrap_or(0)).max().unwrap_or(0);
        let len = pl.schedule.makespan();
        for &c in &pl.region.cells {
            free_at.insert(c, start + len);
        }
        if steps.len() < start + len {
            steps.resize(start + len, Vec::new());
        }
        for (k, t) in pl.schedule.steps.iter().enumerate() {
            steps[start + k].extend(t.moves.iter().copied());
        }
    }
    Schedule::new(steps.into_iter().map(Transformation::new).collect())
}

/// Orientation of the second square relative to the first (↑ ↗ → ↘) and
/// the first square's position modulo 3.
fn class_of(r: &GadgetRegion) -> (u8, i32, i32) {
    // squares are stored in (x, y) order, so the offset is one of the four
    let (a, b) = r.squares;
    let orient = match (b.x - a.x, b.y - a.y) {
        (0, 1) => 0,
        (1, 1) => 1,
        (1, 0) => 2,
        _ => 3,
    };
    (orient, a.x.rem_euclid(3), a.y.rem_euclid(3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::Configuration;

    fn c(x: i32, y: i32) -> CellCoord {
        CellCoord::new(x, y)
    }

    fn check(p: &Polyomino, m: &[(CellCoord, CellCoord)]) -> Schedule {
        let cover = SquareCover::of(p);
        let s = realize_matching(p, &cover, m).unwrap();
        let id = Configuration::identity(p);
        let out = s.replay(p, &id).unwrap();
        let mut want = id.labels().to_vec();
        for &(a, b) in m {
            want.swap(p.index_of(a).unwrap(), p.index_of(b).unwrap());
        }
        assert_eq!(out.labels(), &want[..]);
        s
    }

    #[test]
    fn empty_matching() {
        let p = Polyomino::parse("###\n###").unwrap();
        assert_eq!(realize_matching(&p, &SquareCover::of(&p), &[]).unwrap().makespan(), 0);
    }

    #[test]
    fn two_parallel_edges_share_one_region() {
        let p = Polyomino::parse("##\n##\n##\n##").unwrap();
        let s = check(&p, &[(c(0, 0), c(0, 1)), (c(1, 0), c(1, 1))]);
        assert!(s.makespan() <= 7);
    }

    #[test]
    fn row_matching_on_square() {
        let p = Polyomino::parse(&"######\n".repeat(6)).unwrap();
        let m: Vec<_> = (0..6).flat_map(|y| (0..3).map(move |k| (c(2 * k, y), c(2 * k + 1, y)))).collect();
        let s = check(&p, &m);
        assert!(s.makespan() <= MATCHING_BOUND);
    }

    #[test]
    fn rejects_non_matching() {
        let p = Polyomino::parse("###\n###").unwrap();
        let cover = SquareCover::of(&p);
        assert!(realize_matching(&p, &cover, &[(c(0, 0), c(1, 0)), (c(1, 0), c(2, 0))]).is_err());
        assert!(realize_matching(&p, &cover, &[(c(0, 0), c(1, 1))]).is_err());
    }
}
