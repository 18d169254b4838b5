//! Patch-local routing for instances whose diameter is small compared to
//! the domain.
//!
//! Groups are banded by hop distance into patches forming a tree. Tokens
//! travel patch by patch: in each phase, every region `F_i` (patch `i` and
//! its children) of one depth parity reroutes its tokens towards their
//! target patches, then the other parity does. Once all tokens sit in their
//! target patch, every patch finishes independently.

use crate::routing::{
    build_patch_tree, group_by_watershed, group_route_labels, realize_op_rounds, route_to_groups, sort_groups,
    zip_op_rounds, GroupAssignment, Op, PatchTree, TokenState,
};
use crate::schedule::{diameter, Instance, Schedule};
use crate::shape::{compute_skeleton_with, ShapeProfile};

use super::{require_reconfigurable, Algorithm, PlanError, PlanResult};

pub fn plan_narrow(inst: &Instance) -> Result<PlanResult, PlanError> {
    let p = &inst.polyomino;
    let profile = ShapeProfile::compute(p);
    if profile.bottleneck < 8 {
        return Err(PlanError::BottleneckTooSmall(profile.bottleneck));
    }
    require_reconfigurable(inst)?;
    if inst.start == inst.target {
        return PlanResult::new(inst, Schedule::empty(), Algorithm::Narrow);
    }
    let lambda = compute_skeleton_with(p, profile.bottleneck)?.lambda as usize;
    let (groups, side) = if profile.scale >= 3.max(lambda) {
        (GroupAssignment::scaled(p, profile.scale as i32, profile.scale_offset), profile.scale)
    } else {
        let s = compute_skeleton_with(p, profile.bottleneck)?;
        (group_by_watershed(p, &s)?, s.lambda as usize)
    };
    let d = diameter(inst) as usize;
    let delta = (3 * d).div_ceil(side).max(1);
    let tree = build_patch_tree(p, &groups, delta);
    let target_pos = inst.target_positions();
    let rounds = if tree.len() == 1 {
        group_route_labels(p, &groups, inst.start.labels(), &target_pos)?
    } else {
        patch_rounds(inst, &groups, &tree, &target_pos)?
    };
    let schedule = realize_op_rounds(p, &rounds)?;
    PlanResult::new(inst, schedule, Algorithm::Narrow)
}

fn patch_rounds(
    inst: &Instance,
    groups: &GroupAssignment,
    tree: &PatchTree,
    target_pos: &[u32],
) -> Result<Vec<Vec<Op>>, PlanError> {
    let p = &inst.polyomino;
    let mut state = TokenState::new(p, inst.start.labels().to_vec());
    let final_group: Vec<u32> = target_pos.iter().map(|&c| groups.group_of[c as usize]).collect();
    let target_patch: Vec<usize> = final_group.iter().map(|&g| tree.patch_of_unit[g as usize]).collect();
    let max_depth = tree.depth.iter().copied().max().unwrap_or(0);
    let mut rounds: Vec<Vec<Op>> = Vec::new();
    let settled = |state: &TokenState<'_>| {
        state.labels.iter().enumerate().all(|(c, &l)| tree.patch_of_cell[c] as usize == target_patch[l as usize - 1])
    };
    let mut iterations = 0;
    while !settled(&state) {
        if iterations > 2 * max_depth + 4 {
            // no convergence: finish with one global routing
            rounds.extend(group_route_labels(p, groups, &state.labels, target_pos)?);
            return Ok(rounds);
        }
        iterations += 1;
        for side in [&tree.bipartition.0, &tree.bipartition.1] {
            let mut parts = Vec::new();
            for &top in side.iter() {
                if tree.regions_f[top].len() < 2 {
                    continue;
                }
                let want = region_wants(groups, tree, &state, top, &final_group, &target_patch);
                let active: Vec<usize> = tree.regions_f[top].iter().flat_map(|&q| tree.units[q].iter().copied()).collect();
                parts.push(route_to_groups(groups, &mut state, &active, &want)?);
            }
            rounds.extend(zip_op_rounds(parts));
        }
    }
    let mut parts = Vec::new();
    for q in 0..tree.len() {
        parts.push(route_to_groups(groups, &mut state, &tree.units[q], &final_group)?);
    }
    rounds.extend(zip_op_rounds(parts));
    let all: Vec<usize> = (0..groups.len()).collect();
    let last = sort_groups(groups, &mut state, &all, target_pos);
    if !last.is_empty() {
        rounds.push(last);
    }
    Ok(rounds)
}

/// Desired group of every token inside `F_top`: the exact target group when
/// it lies in `F_top`, otherwise a group of the child leading to the target
/// (or of `top` itself for tokens heading elsewhere). Capacities are
/// respected; overflow spills to the nearest free group of the region.
fn region_wants(
    groups: &GroupAssignment,
    tree: &PatchTree,
    state: &TokenState<'_>,
    top: usize,
    final_group: &[u32],
    target_patch: &[usize],
) -> Vec<u32> {
    let region = &tree.regions_f[top];
    let in_region = |q: usize| region.contains(&q);
    let mut want: Vec<u32> = state.labels.iter().map(|_| 0).collect();
    for (c, &l) in state.labels.iter().enumerate() {
        want[l as usize - 1] = groups.group_of[c];
    }
    let units: Vec<usize> = region.iter().flat_map(|&q| tree.units[q].iter().copied()).collect();
    let mut free: crate::HashMap<usize, usize> = units.iter().map(|&g| (g, groups.groups[g].len())).collect();
    let mut pending = Vec::new();
    for &g in &units {
        for &c in &groups.groups[g] {
            let l = state.labels[c];
            let fg = final_group[l as usize - 1] as usize;
            if in_region(target_patch[l as usize - 1]) {
                want[l as usize - 1] = fg as u32;
                *free.get_mut(&fg).unwrap() -= 1;
            } else {
                let q = tree.child_towards(top, target_patch[l as usize - 1]).unwrap_or(top);
                let here = tree.patch_of_cell[c] as usize;
                // tokens already in their preferred patch keep priority
                pending.push((here != q, c, l, q));
            }
        }
    }
    pending.sort_unstable();
    for (_, c, l, q) in pending {
        let cell = state.p.cell(c);
        let pick = |restrict: bool| {
            units
                .iter()
                .copied()
                .filter(|g| free[g] > 0 && (!restrict || tree.patch_of_unit[*g] == q))
                .min_by_key(|&g| {
                    let r = groups.cores[g];
                    let dx = (r.x - cell.x).max(cell.x - (r.x + r.w - 1)).max(0);
                    let dy = (r.y - cell.y).max(cell.y - (r.y + r.h - 1)).max(0);
                    (dx + dy, g)
                })
        };
        let g = pick(true).or_else(|| pick(false)).expect("region capacity matches its tokens");
        *free.get_mut(&g).unwrap() -= 1;
        want[l as usize - 1] = g as u32;
    }
    want
}
