//! Configurations, moves, transformations and schedules, with replay
//! validation and the text/JSON file formats.

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{CellCoord, DomainError, Polyomino};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("two moves leave {0}")]
    SourceCollision(CellCoord),
    #[error("two moves enter {0}")]
    TargetCollision(CellCoord),
    #[error("swap between {0} and {1} is forbidden")]
    SwapForbidden(CellCoord, CellCoord),
    #[error("{0} and {1} are not adjacent")]
    NotAdjacent(CellCoord, CellCoord),
    #[error("moves do not close into cycles at {0}")]
    BrokenCycle(CellCoord),
    #[error("cell {0} is not in the domain")]
    CellNotInDomain(CellCoord),
    #[error("regions overlap at {0}")]
    OverlappingRegions(CellCoord),
    #[error("move {0}->{1} leaves its region")]
    CrossRegionMove(CellCoord, CellCoord),
    #[error("labels are not a permutation of 1..n: {0}")]
    NotAPermutation(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Labels per cell index of the owning polyomino; labels are `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    labels: Vec<u32>,
}

impl Configuration {
    pub fn new(p: &Polyomino, labels: Vec<u32>) -> Result<Self, ScheduleError> {
        let n = p.area();
        if labels.len() != n {
            return Err(ScheduleError::NotAPermutation(format!("{} labels for {} cells", labels.len(), n)));
        }
        let mut seen = vec![false; n + 1];
        for &l in &labels {
            if l == 0 || l as usize > n || std::mem::replace(&mut seen[l as usize], true) {
                return Err(ScheduleError::NotAPermutation(format!("bad or repeated label {l}")));
            }
        }
        Ok(Self { labels })
    }

    /// Label `i + 1` on the `i`-th cell in sorted cell order.
    pub fn identity(p: &Polyomino) -> Self {
        Self { labels: (1..=p.area() as u32).collect() }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn label_at(&self, cell_index: usize) -> u32 {
        self.labels[cell_index]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Cell index of every label, indexed by `label - 1`.
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.labels.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            pos[l as usize - 1] = i as u32;
        }
        pos
    }
}

/// One agent step; `from == to` is a hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Move {
    pub from: CellCoord,
    pub to: CellCoord,
}

impl Move {
    pub fn new(from: CellCoord, to: CellCoord) -> Self {
        Self { from, to }
    }

    pub fn is_hold(&self) -> bool {
        self.from == self.to
    }
}

/// A parallel set of moves; unlisted cells hold.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transformation {
    pub moves: Vec<Move>,
}

impl Transformation {
    pub fn new(mut moves: Vec<Move>) -> Self {
        moves.retain(|m| !m.is_hold());
        moves.sort();
        Self { moves }
    }

    /// Moves along a cycle of cells: `cells[i] -> cells[i + 1]`, closing.
    pub fn cycle(cells: &[CellCoord]) -> Self {
        let k = cells.len();
        Self::new((0..k).map(|i| Move::new(cells[i], cells[(i + 1) % k])).collect())
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Decomposes the moves into directed cycles (cell sequences).
    pub fn cycles(&self) -> Vec<Vec<CellCoord>> {
        let next: crate::HashMap<CellCoord, CellCoord> =
            self.moves.iter().map(|m| (m.from, m.to)).collect();
        let mut seen = crate::HashSet::default();
        let mut out = Vec::new();
        for m in &self.moves {
            if seen.contains(&m.from) {
                continue;
            }
            let mut cyc = vec![m.from];
            seen.insert(m.from);
            let mut c = m.to;
            while c != m.from {
                if !seen.insert(c) {
                    break;
                }
                cyc.push(c);
                match next.get(&c) {
                    Some(&n) => c = n,
                    None => break,
                }
            }
            out.push(cyc);
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub steps: Vec<Transformation>,
}

impl Schedule {
    pub fn new(steps: Vec<Transformation>) -> Self {
        Self { steps }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn makespan(&self) -> usize {
        self.steps.len()
    }

    pub fn push(&mut self, t: Transformation) {
        self.steps.push(t);
    }

    /// Replays every step; on error returns the failing step index.
    pub fn replay(&self, p: &Polyomino, c: &Configuration) -> Result<Configuration, (usize, ScheduleError)> {
        let mut cur = c.clone();
        for (i, t) in self.steps.iter().enumerate() {
            cur = apply_transformation(p, &cur, t).map_err(|e| (i, e))?;
        }
        Ok(cur)
    }

    /// All cells touched by any move.
    pub fn footprint(&self) -> Vec<CellCoord> {
        let mut cells: Vec<CellCoord> = self.steps.iter().flat_map(|t| t.moves.iter().map(|m| m.from)).collect();
        cells.sort_unstable();
        cells.dedup();
        cells
    }

    /// Schedule text format: `makespan M`, then one `t <i>:` line per step.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "makespan {}", self.makespan());
        for (i, t) in self.steps.iter().enumerate() {
            let toks: Vec<String> = t.moves.iter().map(|m| format!("{}->{}", m.from, m.to)).collect();
            let _ = writeln!(s, "t {}: {}", i, toks.join(";"));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, ScheduleError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let head = lines.next().ok_or_else(|| ScheduleError::Parse("empty schedule file".into()))?;
        let m: usize = head
            .strip_prefix("makespan")
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| ScheduleError::Parse(format!("bad header `{head}`")))?;
        let mut steps = Vec::with_capacity(m);
        for line in lines {
            let rest = line.strip_prefix('t').ok_or_else(|| ScheduleError::Parse(format!("bad line `{line}`")))?;
            let (idx, body) =
                rest.split_once(':').ok_or_else(|| ScheduleError::Parse(format!("missing `:` in `{line}`")))?;
            let idx: usize = idx.trim().parse().map_err(|_| ScheduleError::Parse(format!("bad index in `{line}`")))?;
            if idx != steps.len() {
                return Err(ScheduleError::Parse(format!("expected step {}, found {idx}", steps.len())));
            }
            let mut moves = Vec::new();
            for tok in body.split(';').map(str::trim).filter(|t| !t.is_empty()) {
                let (a, b) = tok.split_once("->").ok_or_else(|| ScheduleError::Parse(format!("bad move `{tok}`")))?;
                moves.push(Move::new(parse_coord(a)?, parse_coord(b)?));
            }
            steps.push(Transformation::new(moves));
        }
        if steps.len() != m {
            return Err(ScheduleError::Parse(format!("header says {m} steps, found {}", steps.len())));
        }
        Ok(Self { steps })
    }
}

fn parse_coord(s: &str) -> Result<CellCoord, ScheduleError> {
    let (x, y) = s.trim().split_once(',').ok_or_else(|| ScheduleError::Parse(format!("bad coordinate `{s}`")))?;
    let x = x.trim().parse().map_err(|_| ScheduleError::Parse(format!("bad coordinate `{s}`")))?;
    let y = y.trim().parse().map_err(|_| ScheduleError::Parse(format!("bad coordinate `{s}`")))?;
    Ok(CellCoord::new(x, y))
}

/// Checks the collision rules and applies one transformation.
pub fn apply_transformation(
    p: &Polyomino,
    c: &Configuration,
    t: &Transformation,
) -> Result<Configuration, ScheduleError> {
    let mut out = c.labels.clone();
    apply_in_place(p, &c.labels, &mut out, t)?;
    Ok(Configuration { labels: out })
}

fn apply_in_place(p: &Polyomino, src: &[u32], dst: &mut [u32], t: &Transformation) -> Result<(), ScheduleError> {
    let n = p.area();
    // next[i] = target index of the move leaving i
    let mut next: crate::HashMap<u32, u32> = crate::HashMap::with_capacity_and_hasher(t.moves.len(), Default::default());
    let mut entered = crate::HashSet::with_capacity_and_hasher(t.moves.len(), Default::default());
    for m in t.moves.iter().filter(|m| !m.is_hold()) {
        let a = p.index_of(m.from).ok_or(ScheduleError::CellNotInDomain(m.from))?;
        let b = p.index_of(m.to).ok_or(ScheduleError::CellNotInDomain(m.to))?;
        if !m.from.is_adjacent(m.to) {
            return Err(ScheduleError::NotAdjacent(m.from, m.to));
        }
        if next.insert(a as u32, b as u32).is_some() {
            return Err(ScheduleError::SourceCollision(m.from));
        }
        if !entered.insert(b as u32) {
            return Err(ScheduleError::TargetCollision(m.to));
        }
    }
    for (&a, &b) in &next {
        if next.get(&b) == Some(&a) {
            return Err(ScheduleError::SwapForbidden(p.cell(a as usize), p.cell(b as usize)));
        }
        if !next.contains_key(&b) {
            // agent in b holds while someone enters
            return Err(ScheduleError::BrokenCycle(p.cell(b as usize)));
        }
    }
    debug_assert_eq!(src.len(), n);
    for (&a, &b) in &next {
        dst[b as usize] = src[a as usize];
    }
    Ok(())
}

/// Instance: polyomino plus start and target configurations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub polyomino: Polyomino,
    pub start: Configuration,
    pub target: Configuration,
}

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    map: Vec<String>,
    start: Vec<Vec<u32>>,
    target: Vec<Vec<u32>>,
}

impl Instance {
    pub fn new(polyomino: Polyomino, start: Configuration, target: Configuration) -> Result<Self, ScheduleError> {
        let n = polyomino.area();
        if start.len() != n || target.len() != n {
            return Err(ScheduleError::NotAPermutation("configuration size differs from area".into()));
        }
        Ok(Self { polyomino, start, target })
    }

    pub fn identity(p: Polyomino) -> Self {
        let c = Configuration::identity(&p);
        Self { polyomino: p, start: c.clone(), target: c }
    }

    /// For each label (indexed `label - 1`) its target cell index.
    pub fn target_positions(&self) -> Vec<u32> {
        self.target.positions()
    }

    /// Geodesic start-to-target distance per label (indexed `label - 1`).
    pub fn label_distances(&self) -> Vec<u32> {
        let p = &self.polyomino;
        let n = p.area();
        let sp = self.start.positions();
        let tp = self.target.positions();
        let mut stamp = vec![0u32; n];
        let mut dist = vec![0u32; n];
        let mut queue = VecDeque::new();
        let mut out = vec![0u32; n];
        for l in 0..n {
            let (s, t) = (sp[l] as usize, tp[l] as usize);
            if s == t {
                continue;
            }
            let tag = l as u32 + 1;
            queue.clear();
            queue.push_back(s);
            stamp[s] = tag;
            dist[s] = 0;
            'bfs: while let Some(u) = queue.pop_front() {
                for v in p.neighbors(u) {
                    if stamp[v] != tag {
                        stamp[v] = tag;
                        dist[v] = dist[u] + 1;
                        if v == t {
                            out[l] = dist[v];
                            break 'bfs;
                        }
                        queue.push_back(v);
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let p = &self.polyomino;
        let (min_x, min_y, w, h) = p.bbox();
        let grid = |c: &Configuration| -> Vec<Vec<u32>> {
            (0..h)
                .rev()
                .map(|y| {
                    (0..w)
                        .map(|x| p.index_of(CellCoord::new(min_x + x, min_y + y)).map_or(0, |i| c.label_at(i)))
                        .collect()
                })
                .collect()
        };
        let map = (0..h)
            .rev()
            .map(|y| {
                (0..w)
                    .map(|x| if p.contains(CellCoord::new(min_x + x, min_y + y)) { '#' } else { '.' })
                    .collect()
            })
            .collect();
        let file = InstanceFile { map, start: grid(&self.start), target: grid(&self.target) };
        serde_json::to_string(&file).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ScheduleError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| ScheduleError::Parse(e.to_string()))?;
        let p = Polyomino::parse(&file.map.join("\n"))?;
        let h = file.map.len() as i32;
        let read = |rows: &Vec<Vec<u32>>, what: &str| -> Result<Configuration, ScheduleError> {
            if rows.len() != file.map.len() {
                return Err(ScheduleError::Parse(format!("{what} has {} rows, map has {h}", rows.len())));
            }
            let mut labels = vec![0u32; p.area()];
            for (r, row) in rows.iter().enumerate() {
                let y = h - 1 - r as i32;
                for (x, &l) in row.iter().enumerate() {
                    let c = CellCoord::new(x as i32, y);
                    match (p.index_of(c), l) {
                        (Some(i), l) if l != 0 => labels[i] = l,
                        (None, 0) => {}
                        _ => return Err(ScheduleError::Parse(format!("{what} disagrees with map at {c}"))),
                    }
                }
            }
            Configuration::new(&p, labels)
        };
        let start = read(&file.start, "start")?;
        let target = read(&file.target, "target")?;
        Ok(Self { polyomino: p, start, target })
    }
}

/// Maximum start-to-target geodesic distance over all agents.
pub fn diameter(inst: &Instance) -> u32 {
    inst.label_distances().into_iter().max().unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub valid: bool,
    pub failing_step: Option<usize>,
    pub reason: Option<String>,
    pub makespan: usize,
    pub diameter: u32,
    pub stretch: f64,
}

pub fn validate_schedule(inst: &Instance, s: &Schedule) -> ValidationReport {
    let d = diameter(inst);
    let makespan = s.makespan();
    let stretch = if d == 0 { makespan as f64 } else { makespan as f64 / d as f64 };
    let (valid, failing_step, reason) = match s.replay(&inst.polyomino, &inst.start) {
        Ok(c) if c == inst.target => (true, None, None),
        Ok(_) => (false, None, Some("TargetMismatch".to_string())),
        Err((i, e)) => (false, Some(i), Some(format!("{e:?}"))),
    };
    ValidationReport { valid, failing_step, reason, makespan, diameter: d, stretch }
}

pub fn concat(a: &Schedule, b: &Schedule) -> Schedule {
    let mut steps = a.steps.clone();
    steps.extend(b.steps.iter().cloned());
    Schedule { steps }
}

/// Zips schedules that act on pairwise disjoint regions.
pub fn merge_parallel(parts: &[(Vec<CellCoord>, Schedule)]) -> Result<Schedule, ScheduleError> {
    let mut owner = crate::HashMap::default();
    for (k, (region, _)) in parts.iter().enumerate() {
        for &c in region {
            if owner.insert(c, k).is_some_and(|o| o != k) {
                return Err(ScheduleError::OverlappingRegions(c));
            }
        }
    }
    for (k, (_, s)) in parts.iter().enumerate() {
        for m in s.steps.iter().flat_map(|t| &t.moves) {
            if owner.get(&m.from) != Some(&k) || owner.get(&m.to) != Some(&k) {
                return Err(ScheduleError::CrossRegionMove(m.from, m.to));
            }
        }
    }
    Ok(zip_schedules(parts.iter().map(|(_, s)| s)))
}

/// Zips schedules step by step without checking disjointness.
pub fn zip_schedules<'a>(parts: impl IntoIterator<Item = &'a Schedule>) -> Schedule {
    let mut steps: Vec<Vec<Move>> = Vec::new();
    for s in parts {
        if steps.len() < s.steps.len() {
            steps.resize_with(s.steps.len(), Vec::new);
        }
        for (i, t) in s.steps.iter().enumerate() {
            steps[i].extend_from_slice(&t.moves);
        }
    }
    Schedule { steps: steps.into_iter().map(Transformation::new).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq2() -> Polyomino {
        Polyomino::parse("##\n##").unwrap()
    }

    fn c(x: i32, y: i32) -> CellCoord {
        CellCoord::new(x, y)
    }

    fn rotation() -> Transformation {
        Transformation::cycle(&[c(0, 0), c(1, 0), c(1, 1), c(0, 1)])
    }

    #[test]
    fn rotation_moves_every_label() {
        let p = sq2();
        let id = Configuration::identity(&p);
        let r = apply_transformation(&p, &id, &rotation()).unwrap();
        // cells sorted: (0,0)=0 (0,1)=1 (1,0)=2 (1,1)=3
        assert_eq!(r.labels(), &[2, 4, 1, 3]);
    }

    #[test]
    fn empty_transformation_is_identity() {
        let p = sq2();
        let id = Configuration::identity(&p);
        assert_eq!(apply_transformation(&p, &id, &Transformation::default()).unwrap(), id);
    }

    #[test]
    fn collision_rules() {
        let p = sq2();
        let id = Configuration::identity(&p);
        let swap = Transformation::new(vec![Move::new(c(0, 0), c(1, 0)), Move::new(c(1, 0), c(0, 0))]);
        assert!(matches!(apply_transformation(&p, &id, &swap), Err(ScheduleError::SwapForbidden(..))));
        let far = Transformation::new(vec![Move::new(c(0, 0), c(1, 1))]);
        assert!(matches!(apply_transformation(&p, &id, &far), Err(ScheduleError::NotAdjacent(..))));
        let open = Transformation::new(vec![Move::new(c(0, 0), c(1, 0)), Move::new(c(1, 0), c(1, 1))]);
        assert!(matches!(apply_transformation(&p, &id, &open), Err(ScheduleError::BrokenCycle(..))));
        let t2 = Transformation { moves: vec![Move::new(c(0, 0), c(1, 0)), Move::new(c(0, 1), c(1, 1)), Move::new(c(1, 1), c(1, 0))] };
        assert!(matches!(apply_transformation(&p, &id, &t2), Err(ScheduleError::TargetCollision(..))));
        let t3 = Transformation { moves: vec![Move::new(c(0, 0), c(1, 0)), Move::new(c(0, 0), c(0, 1))] };
        assert!(matches!(apply_transformation(&p, &id, &t3), Err(ScheduleError::SourceCollision(..))));
    }

    #[test]
    fn validation_reports() {
        let p = sq2();
        let inst = Instance::identity(p.clone());
        let r = validate_schedule(&inst, &Schedule::empty());
        assert!(r.valid);
        assert_eq!(r.makespan, 0);

        let target = apply_transformation(&p, &inst.start, &rotation()).unwrap();
        let rot = Instance::new(p.clone(), inst.start.clone(), target).unwrap();
        let s = Schedule::new(vec![rotation()]);
        let r = validate_schedule(&rot, &s);
        assert!(r.valid);
        assert_eq!((r.makespan, r.diameter, r.stretch), (1, 1, 1.0));

        let r = validate_schedule(&rot, &Schedule::empty());
        assert!(!r.valid);
        assert_eq!(r.reason.as_deref(), Some("TargetMismatch"));
    }

    #[test]
    fn merge_and_concat() {
        let p = Polyomino::parse("####\n####").unwrap();
        let left = Schedule::new(vec![rotation()]);
        let right_cycle = Transformation::cycle(&[c(2, 0), c(3, 0), c(3, 1), c(2, 1)]);
        let right = Schedule::new(vec![right_cycle.clone(); 3]);
        let lr = vec![c(0, 0), c(1, 0), c(0, 1), c(1, 1)];
        let rr = vec![c(2, 0), c(3, 0), c(2, 1), c(3, 1)];
        let m = merge_parallel(&[(lr.clone(), left.clone()), (rr.clone(), right.clone())]).unwrap();
        assert_eq!(m.makespan(), 3);
        assert_eq!(m.steps[0].moves.len(), 8);
        assert!(m.replay(&p, &Configuration::identity(&p)).is_ok());
        assert!(matches!(
            merge_parallel(&[(lr.clone(), left.clone()), (lr.clone(), right.clone())]),
            Err(ScheduleError::OverlappingRegions(_))
        ));
        assert!(matches!(merge_parallel(&[(rr, left.clone())]), Err(ScheduleError::CrossRegionMove(..))));
        assert_eq!(concat(&left, &Schedule::empty()), left);
    }

    #[test]
    fn schedule_text_round_trip() {
        let s = Schedule::new(vec![rotation(), Transformation::default(), rotation()]);
        let text = s.to_text();
        assert!(text.starts_with("makespan 3\nt 0: "));
        assert_eq!(Schedule::from_text(&text).unwrap(), s);
        assert!(Schedule::from_text("makespan 2\nt 0: \n").is_err());
    }

    #[test]
    fn instance_json_round_trip() {
        let p = Polyomino::parse("#.\n##").unwrap();
        let inst = Instance::identity(p);
        let j = inst.to_json();
        assert!(j.contains("\"map\":[\"#.\",\"##\"]"));
        assert_eq!(Instance::from_json(&j).unwrap(), inst);
        let bad = r###"{"map":["##"],"start":[[1,1]],"target":[[1,2]]}"###;
        assert!(Instance::from_json(bad).is_err());
    }

    #[test]
    fn diameter_examples() {
        let p = Polyomino::parse("#.#\n#.#\n###").unwrap();
        assert_eq!(diameter(&Instance::identity(p.clone())), 0);
        let mut labels: Vec<u32> = (1..=7).collect();
        let a = p.index_of(c(0, 2)).unwrap();
        let b = p.index_of(c(2, 2)).unwrap();
        labels.swap(a, b);
        let inst = Instance::new(p.clone(), Configuration::identity(&p), Configuration::new(&p, labels).unwrap()).unwrap();
        assert_eq!(diameter(&inst), 6);
    }
}
