//! Instance generators, the benchmark harness and SVG frame rendering.

mod bench;
mod render;

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::domain::{CellCoord, Polyomino, DIRS};
use crate::primitives::check_universal_reconfigurability;
use crate::schedule::{Configuration, Instance};

pub use bench::{bench, bench_instance, run_suite, suite_instances, write_csv, BenchRecord, SUITES};
pub use render::{render_frame, render_svg};

#[derive(Debug, Error)]
pub enum ToolError {
    #[error("bad parameters: {0}")]
    BadParameters(String),
    #[error("unknown suite {0:?}")]
    UnknownSuite(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Plan(#[from] crate::planners::PlanError),
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rect_cells(x0: i32, y0: i32, w: i32, h: i32) -> impl Iterator<Item = CellCoord> {
    (x0..x0 + w).flat_map(move |x| (y0..y0 + h).map(move |y| CellCoord::new(x, y)))
}

/// Two `s × s` chambers joined by a `z`-wide, `len`-long corridor. Every
/// chamber agent trades places with its mirror image in the other chamber;
/// corridor agents stay.
pub fn gen_dumbbell(s: i32, z: i32, len: i32) -> Result<Instance, ToolError> {
    if s < 2 || z < 1 || z > s || len < 1 {
        return Err(ToolError::BadParameters(format!("need s ≥ 2, 1 ≤ z ≤ s, ℓ ≥ 1; got s={s} z={z} ℓ={len}")));
    }
    let y0 = (s - z) / 2;
    let width = 2 * s + len;
    let cells: Vec<CellCoord> =
        rect_cells(0, 0, s, s).chain(rect_cells(s, y0, len, z)).chain(rect_cells(s + len, 0, s, s)).collect();
    let p = Polyomino::new(cells).expect("dumbbell is a simple polyomino");
    let n = p.area();
    let mut labels = vec![0u32; n];
    for (i, c) in p.cells().iter().enumerate() {
        let mirrored = if c.x < s || c.x >= s + len { CellCoord::new(width - 1 - c.x, c.y) } else { *c };
        labels[p.index_of(mirrored).unwrap()] = i as u32 + 1;
    }
    let target = Configuration::new(&p, labels).expect("mirror is a bijection");
    Ok(Instance::new(p.clone(), Configuration::identity(&p), target).expect("sizes agree"))
}

/// Whether occupying `c` keeps the complement of `set` free of holes. The
/// test is local and conservative: the empty side-neighbours of `c` must be
/// linked through empty cells of its 8-ring.
fn keeps_simple(set: &HashSet<CellCoord>, c: CellCoord) -> bool {
    const RING: [(i32, i32); 8] = [(1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1), (0, -1), (1, -1)];
    let empty: Vec<bool> = RING.iter().map(|&(dx, dy)| !set.contains(&c.offset(dx, dy))).collect();
    // runs of consecutive empty ring cells containing a side neighbour
    let mut runs = 0;
    let start = match (0..8).find(|&k| !empty[k]) {
        Some(k) => k,
        None => return true,
    };
    let mut in_run = false;
    let mut has_side = false;
    for step in 1..=8 {
        let k = (start + step) % 8;
        if empty[k] {
            in_run = true;
            has_side |= k % 2 == 0;
        } else if in_run {
            runs += has_side as usize;
            in_run = false;
            has_side = false;
        }
    }
    runs <= 1
}

/// Random simple polyomino of `n` cells grown one cell at a time.
pub fn gen_random_simple(n: usize, seed: u64) -> Polyomino {
    let mut r = rng(seed);
    let mut set: HashSet<CellCoord> = HashSet::from([CellCoord::new(0, 0)]);
    let mut cells = vec![CellCoord::new(0, 0)];
    let mut frontier: Vec<CellCoord> = DIRS.iter().map(|&(dx, dy)| CellCoord::new(dx, dy)).collect();
    while cells.len() < n.max(1) {
        let k = r.gen_range(0..frontier.len());
        let c = frontier.swap_remove(k);
        if set.contains(&c) || !keeps_simple(&set, c) {
            continue;
        }
        set.insert(c);
        cells.push(c);
        for (dx, dy) in DIRS {
            let q = c.offset(dx, dy);
            if !set.contains(&q) {
                frontier.push(q);
            }
        }
    }
    Polyomino::new(cells).expect("accretion keeps the polyomino simple").normalized()
}

/// Random universally reconfigurable polyomino with at least `n` cells
/// (and at least two 2×2 squares), grown from overlapping 2×2 squares.
pub fn gen_random_ur(n: usize, seed: u64) -> Polyomino {
    let mut r = rng(seed);
    let mut set: HashSet<CellCoord> = rect_cells(0, 0, 2, 2).collect();
    let mut squares = vec![CellCoord::new(0, 0)];
    while set.len() < n || squares.len() < 2 {
        let base = squares[r.gen_range(0..squares.len())];
        let (dx, dy) = DIRS[r.gen_range(0..4)];
        let s = base.offset(dx, dy);
        let new: Vec<CellCoord> = rect_cells(s.x, s.y, 2, 2).filter(|c| !set.contains(c)).collect();
        let mut trial = set.clone();
        let mut ok = true;
        for &c in &new {
            if !keeps_simple(&trial, c) {
                ok = false;
                break;
            }
            trial.insert(c);
        }
        if ok {
            set = trial;
            squares.push(s);
        }
    }
    let p = Polyomino::new(set).expect("square accretion stays simple").normalized();
    debug_assert!(check_universal_reconfigurability(&p).is_yes());
    p
}

/// Uniformly random target for an identity start.
pub fn gen_random_instance(p: &Polyomino, seed: u64) -> Instance {
    let mut labels: Vec<u32> = (1..=p.area() as u32).collect();
    labels.shuffle(&mut rng(seed));
    let target = Configuration::new(p, labels).expect("shuffle is a permutation");
    Instance::new(p.clone(), Configuration::identity(p), target).expect("sizes agree")
}

/// Every cell of the template becomes a `c × c` block.
pub fn gen_scaled(template: &Polyomino, c: i32) -> Polyomino {
    let cells = template.cells().iter().flat_map(|t| rect_cells(t.x * c, t.y * c, c, c));
    Polyomino::new(cells).expect("scaling preserves simplicity")
}

/// A `len × width` corridor whose agents are permuted inside consecutive
/// blocks of `block` columns (each block mirrored left to right), so the
/// diameter stays fixed as the corridor grows.
pub fn gen_corridor(len: i32, width: i32, block: i32) -> Result<Instance, ToolError> {
    if len < 1 || width < 1 || block < 1 {
        return Err(ToolError::BadParameters(format!("corridor {len}×{width} with block {block}")));
    }
    let p = Polyomino::new(rect_cells(0, 0, len, width)).expect("rectangle");
    let mut labels = vec![0u32; p.area()];
    for (i, c) in p.cells().iter().enumerate() {
        let b0 = c.x - c.x % block;
        let b1 = (b0 + block).min(len);
        let to = CellCoord::new(b0 + b1 - 1 - c.x, c.y);
        labels[p.index_of(to).unwrap()] = i as u32 + 1;
    }
    let target = Configuration::new(&p, labels).expect("mirror is a bijection");
    Ok(Instance::new(p.clone(), Configuration::identity(&p), target).expect("sizes agree"))
}

/// Instance with an identity start and a random permutation of `k`
/// randomly chosen agents among themselves.
pub fn gen_partial_instance(p: &Polyomino, k: usize, seed: u64) -> Instance {
    let mut r = rng(seed);
    let mut idx: Vec<usize> = (0..p.area()).collect();
    idx.shuffle(&mut r);
    idx.truncate(k.min(p.area()));
    let mut perm = idx.clone();
    perm.shuffle(&mut r);
    let mut labels: Vec<u32> = (1..=p.area() as u32).collect();
    for (a, b) in idx.iter().zip(&perm) {
        labels[*b] = *a as u32 + 1;
    }
    let target = Configuration::new(p, labels).expect("permutation");
    Instance::new(p.clone(), Configuration::identity(p), target).expect("sizes agree")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shape::{compute_bottleneck, compute_scale};

    #[test]
    fn dumbbell_examples() {
        let i = gen_dumbbell(4, 2, 3).unwrap();
        assert_eq!(i.polyomino.area(), 38);
        assert_eq!(compute_bottleneck(&i.polyomino).0, 2);
        assert!(gen_dumbbell(2, 2, 1).is_ok());
        assert!(gen_dumbbell(3, 4, 1).is_err());
        let full = gen_dumbbell(5, 5, 2).unwrap();
        assert!(compute_bottleneck(&full.polyomino).0 >= 5);
    }

    #[test]
    fn random_simple_is_deterministic() {
        for seed in 0..5 {
            let a = gen_random_simple(60, seed);
            assert_eq!(a, gen_random_simple(60, seed));
            assert_eq!(a.area(), 60);
        }
    }

    #[test]
    fn scaled_examples() {
        let one = Polyomino::parse("#").unwrap();
        assert_eq!(gen_scaled(&one, 5).area(), 25);
        let l = Polyomino::parse("#.\n##").unwrap();
        assert_eq!(compute_scale(&gen_scaled(&l, 3)).0, 3);
    }

    #[test]
    fn random_ur_is_reconfigurable() {
        for seed in 0..5 {
            assert!(check_universal_reconfigurability(&gen_random_ur(40, seed)).is_yes());
        }
    }

    #[test]
    fn corridor_is_local() {
        let i = gen_corridor(50, 8, 6).unwrap();
        assert_eq!(crate::schedule::diameter(&i), 5);
    }
}
