//! Schedule synthesis: one planner per structural regime, a dispatcher, the
//! exhaustive oracle and the cut-congestion lower bound.

mod narrow;
mod oracle;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::CellCoord;
use crate::primitives::{
    check_universal_reconfigurability, realize_matching, NonReconfigurableWitness, PrimitiveError, Reconfigurability,
};
use crate::routing::{bfs_spanning_tree, group_by_watershed, group_route_labels, realize_op_rounds, tree_route};
use crate::routing::{GroupAssignment, RoutingError};
use crate::schedule::{apply_transformation, diameter, validate_schedule, Instance, Schedule, Transformation};
use crate::shape::{compute_skeleton_with, CutFinder, ShapeError, ShapeProfile};

pub use narrow::plan_narrow;
pub use oracle::{oracle_optimal, reachable_configurations, transformations};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("domain is not universally reconfigurable")]
    NotReconfigurable,
    #[error("scale {0} is below 3")]
    ScaleTooSmall(usize),
    #[error("bottleneck {0} is below 8")]
    BottleneckTooSmall(usize),
    #[error("planner produced an invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error(transparent)]
    Routing(#[from] RoutingError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

/// Planner tags, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Any,
    Scaled,
    Bottleneck,
    Narrow,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [Algorithm::Any, Algorithm::Scaled, Algorithm::Bottleneck, Algorithm::Narrow];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Any => "any",
            Algorithm::Scaled => "scaled",
            Algorithm::Bottleneck => "bottleneck",
            Algorithm::Narrow => "narrow",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.tag() == s)
    }

    pub fn run(self, inst: &Instance) -> Result<PlanResult, PlanError> {
        match self {
            Algorithm::Any => plan_any(inst),
            Algorithm::Scaled => plan_scaled(inst),
            Algorithm::Bottleneck => plan_bottleneck(inst),
            Algorithm::Narrow => plan_narrow(inst),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub schedule: Schedule,
    pub algorithm: Algorithm,
    pub makespan: usize,
    pub diameter: u32,
    pub lower_bound: usize,
    pub stretch_vs_lb: f64,
}

#[derive(Serialize)]
struct Metrics {
    algorithm: Algorithm,
    makespan: usize,
    diameter: u32,
    lower_bound: usize,
    stretch_vs_lb: f64,
}

impl PlanResult {
    /// Validates `schedule` and attaches metrics.
    pub fn new(inst: &Instance, schedule: Schedule, algorithm: Algorithm) -> Result<Self, PlanError> {
        let report = validate_schedule(inst, &schedule);
        if !report.valid {
            let at = report.failing_step.map_or(String::new(), |i| format!(" at step {i}"));
            return Err(PlanError::InvalidSchedule(format!("{}{at}", report.reason.unwrap_or_default())));
        }
        let lb = lower_bound(inst);
        let makespan = schedule.makespan();
        Ok(Self {
            algorithm,
            makespan,
            diameter: report.diameter,
            lower_bound: lb,
            stretch_vs_lb: if lb == 0 { makespan as f64 } else { makespan as f64 / lb as f64 },
            schedule,
        })
    }

    pub fn metrics_json(&self) -> String {
        let m = Metrics {
            algorithm: self.algorithm,
            makespan: self.makespan,
            diameter: self.diameter,
            lower_bound: self.lower_bound,
            stretch_vs_lb: self.stretch_vs_lb,
        };
        serde_json::to_string_pretty(&m).expect("metrics serialize")
    }
}

fn require_reconfigurable(inst: &Instance) -> Result<(), PlanError> {
    match check_universal_reconfigurability(&inst.polyomino) {
        Reconfigurability::Yes(_) => Ok(()),
        Reconfigurability::No(_) => Err(PlanError::NotReconfigurable),
    }
}

fn is_identity(inst: &Instance) -> bool {
    inst.start == inst.target
}

/// Token swapping on a BFS spanning tree of the dual graph; every round of
/// swaps is realized as a matching.
pub fn plan_any(inst: &Instance) -> Result<PlanResult, PlanError> {
    if is_identity(inst) {
        return PlanResult::new(inst, Schedule::empty(), Algorithm::Any);
    }
    let p = &inst.polyomino;
    let cover = match check_universal_reconfigurability(p) {
        Reconfigurability::Yes(c) => c,
        Reconfigurability::No(NonReconfigurableWitness::SingleSquare) => {
            let s = square_rotations(inst).ok_or(PlanError::NotReconfigurable)?;
            return PlanResult::new(inst, s, Algorithm::Any);
        }
        Reconfigurability::No(_) => return Err(PlanError::NotReconfigurable),
    };
    let tp = inst.target_positions();
    let dest: Vec<usize> = (0..p.area()).map(|v| tp[inst.start.label_at(v) as usize - 1] as usize).collect();
    let tree = bfs_spanning_tree(&p.adjacency_lists(), 0);
    let rounds = tree_route(&tree, &dest)?;
    let mut steps = Vec::new();
    for r in rounds {
        let m: Vec<(CellCoord, CellCoord)> = r.into_iter().map(|(a, b)| (p.cell(a), p.cell(b))).collect();
        steps.extend(realize_matching(p, &cover, &m)?.steps);
    }
    PlanResult::new(inst, Schedule::new(steps), Algorithm::Any)
}

/// A lone 2×2 square only rotates: reach a rotated target the short way
/// round, or `None` if the target is not a rotation of the start.
fn square_rotations(inst: &Instance) -> Option<Schedule> {
    let p = &inst.polyomino;
    let (x, y, _, _) = p.bbox();
    let ring = [CellCoord::new(x, y), CellCoord::new(x + 1, y), CellCoord::new(x + 1, y + 1), CellCoord::new(x, y + 1)];
    let mut back = ring;
    back.reverse();
    let (fwd, rev) = (Transformation::cycle(&ring), Transformation::cycle(&back));
    let mut c = inst.start.clone();
    for k in 1..4 {
        c = apply_transformation(p, &c, &fwd).ok()?;
        if c == inst.target {
            let (t, times) = if k <= 2 { (fwd, k) } else { (rev, 4 - k) };
            return Some(Schedule::new(vec![t; times]));
        }
    }
    None
}

fn route_groups(inst: &Instance, groups: &GroupAssignment, algorithm: Algorithm) -> Result<PlanResult, PlanError> {
    let p = &inst.polyomino;
    let rounds = group_route_labels(p, groups, inst.start.labels(), &inst.target_positions())?;
    let schedule = realize_op_rounds(p, &rounds)?;
    PlanResult::new(inst, schedule, algorithm)
}

/// Routing between the aligned `c × c` tiles of a scaled polyomino.
pub fn plan_scaled(inst: &Instance) -> Result<PlanResult, PlanError> {
    let p = &inst.polyomino;
    let (c, offset) = crate::shape::compute_scale(p);
    if c < 3 {
        return Err(PlanError::ScaleTooSmall(c));
    }
    if is_identity(inst) {
        return PlanResult::new(inst, Schedule::empty(), Algorithm::Scaled);
    }
    route_groups(inst, &GroupAssignment::scaled(p, c as i32, offset), Algorithm::Scaled)
}

/// Routing between skeleton tiles, each group owning its watershed.
pub fn plan_bottleneck(inst: &Instance) -> Result<PlanResult, PlanError> {
    let p = &inst.polyomino;
    let zeta = crate::shape::compute_bottleneck(p).0;
    if zeta < 8 {
        return Err(PlanError::BottleneckTooSmall(zeta));
    }
    require_reconfigurable(inst)?;
    if is_identity(inst) {
        return PlanResult::new(inst, Schedule::empty(), Algorithm::Bottleneck);
    }
    let skeleton = compute_skeleton_with(p, zeta)?;
    let groups = group_by_watershed(p, &skeleton)?;
    route_groups(inst, &groups, Algorithm::Bottleneck)
}

/// `max(d, ⌈crossings / 2·len⌉)` over one shortest non-trivial cut per
/// boundary vertex. Each transformation moves at most one agent per cut
/// edge and direction across a cut.
pub fn lower_bound(inst: &Instance) -> usize {
    let p = &inst.polyomino;
    let mut best = diameter(inst) as usize;
    if is_identity(inst) {
        return 0;
    }
    let sp = inst.start.positions();
    let tp = inst.target_positions();
    let finder = CutFinder::new(p);
    let mut side = vec![0u32; p.area()];
    for cut in finder.shortest_per_vertex() {
        let edges: Vec<(usize, usize)> = cut
            .cut_edges()
            .into_iter()
            .map(|(a, b)| (p.index_of(a).unwrap(), p.index_of(b).unwrap()))
            .collect();
        let comps = p.components_without(&edges);
        if comps.len() < 2 {
            continue;
        }
        for (k, comp) in comps.iter().enumerate() {
            for &c in comp {
                side[c] = k as u32;
            }
        }
        let crossings = sp.iter().zip(&tp).filter(|&(&s, &t)| side[s as usize] != side[t as usize]).count();
        best = best.max(crossings.div_ceil(2 * cut.len()));
    }
    best
}

/// Strongest applicable planner, or with `race` every applicable planner
/// (run concurrently) keeping the smallest makespan.
pub fn auto_plan(inst: &Instance, race: bool) -> Result<PlanResult, PlanError> {
    require_reconfigurable(inst)?;
    let profile = ShapeProfile::compute(&inst.polyomino);
    let applicable = applicable_algorithms(&profile);
    if !race {
        return applicable[0].run(inst);
    }
    let results: Vec<(Algorithm, Result<PlanResult, PlanError>)> = std::thread::scope(|s| {
        let handles: Vec<_> = applicable.iter().map(|&a| (a, s.spawn(move || a.run(inst)))).collect();
        handles.into_iter().map(|(a, h)| (a, h.join().expect("planner thread panicked"))).collect()
    });
    let mut best: Option<PlanResult> = None;
    let mut first_err = None;
    for (_, r) in results {
        match r {
            Ok(r) => {
                if best.as_ref().map_or(true, |b| (r.makespan, r.algorithm) < (b.makespan, b.algorithm)) {
                    best = Some(r);
                }
            }
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.expect("at least one planner ran"))
}

/// Applicable planners for a (universally reconfigurable) domain, strongest
/// first.
pub fn applicable_algorithms(profile: &ShapeProfile) -> Vec<Algorithm> {
    let mut v = Vec::new();
    if profile.bottleneck >= 8 {
        v.push(Algorithm::Narrow);
        v.push(Algorithm::Bottleneck);
    }
    if profile.scale >= 3 {
        v.push(Algorithm::Scaled);
    }
    v.push(Algorithm::Any);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Polyomino;
    use crate::schedule::Configuration;

    fn rotated_square(k: usize) -> Instance {
        let p = Polyomino::parse("##\n##").unwrap();
        // cycle order around the square by cell index: (0,0) (1,0) (1,1) (0,1)
        let ring = [CellCoord::new(0, 0), CellCoord::new(1, 0), CellCoord::new(1, 1), CellCoord::new(0, 1)];
        let mut labels = vec![0; 4];
        for (i, c) in ring.iter().enumerate() {
            labels[p.index_of(ring[(i + k) % 4]).unwrap()] = p.index_of(*c).unwrap() as u32 + 1;
        }
        let target = Configuration::new(&p, labels).unwrap();
        Instance::new(p.clone(), Configuration::identity(&p), target).unwrap()
    }

    #[test]
    fn lower_bound_small_examples() {
        let p = Polyomino::parse("###\n###").unwrap();
        assert_eq!(lower_bound(&Instance::identity(p)), 0);
        assert_eq!(lower_bound(&rotated_square(1)), 1);
    }

    #[test]
    fn algorithm_tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_tag(a.tag()), Some(a));
        }
        assert!(Algorithm::Any < Algorithm::Narrow);
    }

    #[test]
    fn applicable_for_large_square() {
        let p = Polyomino::parse(&"#########\n".repeat(9)).unwrap();
        let prof = ShapeProfile::compute(&p);
        assert_eq!(applicable_algorithms(&prof)[0], Algorithm::Narrow);
    }
}
