//! Permutation routing engines and domain partitioning: tree routing, BFS
//! patches and wavelets, cut expansions, watershed groups and group routing.

mod group;
mod patch;
mod tree;

use thiserror::Error;

pub use group::{
    group_by_watershed, group_route_labels, realize_op_rounds, route_to_groups, sort_groups, zip_op_rounds,
    GroupAssignment, Op, TokenState,
};
pub use patch::{bfs_region, build_patch_tree, cut_expansion, f_regions_disjoint, BfsRegion, PatchTree};
pub use tree::{bfs_spanning_tree, tree_route};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RoutingError {
    #[error("labelings disagree: {0}")]
    LabelMismatch(String),
    #[error("graph is not a tree")]
    NotATree,
    #[error("no swap possible before the labeling is sorted")]
    Stuck,
    #[error("round cap {0} exceeded")]
    RoundCap(usize),
}
