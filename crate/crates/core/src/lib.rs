//! Collision-free reconfiguration schedules for labeled agents packed into
//! simple polyominoes.

pub mod domain;
pub mod shape;
pub mod schedule;
pub mod primitives;
pub mod routing;
pub mod planners;
pub mod tooling;

pub use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};
