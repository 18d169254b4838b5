//! Benchmark suites producing one record per (instance, algorithm).

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::domain::Polyomino;
use crate::planners::{applicable_algorithms, Algorithm};
use crate::primitives::check_universal_reconfigurability;
use crate::schedule::{diameter, Instance};
use crate::shape::ShapeProfile;

use super::{gen_corridor, gen_dumbbell, gen_random_instance, gen_random_ur, gen_scaled, ToolError};

pub const SUITES: [&str; 4] = ["std", "dumbbell-scaling", "corridor-scaling", "random"];

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRecord {
    pub instance_id: String,
    pub n: usize,
    pub d: u32,
    pub zeta: usize,
    pub mu: u32,
    pub c: usize,
    pub algorithm: String,
    pub makespan: usize,
    pub lower_bound: usize,
    pub stretch_vs_lb: f64,
    pub wall_time: f64,
}

fn square(side: i32) -> Polyomino {
    Polyomino::parse(&format!("{}\n", "#".repeat(side as usize)).repeat(side as usize)).unwrap()
}

/// Named instances of a suite, sorted by id.
pub fn suite_instances(suite: &str) -> Result<Vec<(String, Instance)>, ToolError> {
    let mut v: Vec<(String, Instance)> = Vec::new();
    match suite {
        "std" => {
            for side in [8, 16, 32, 64] {
                v.push((format!("square-{side:03}"), gen_random_instance(&square(side), side as u64)));
            }
            let l = Polyomino::parse("#.\n#.\n##").unwrap();
            for c in [3, 4, 8] {
                v.push((format!("scaled-l-{c:02}"), gen_random_instance(&gen_scaled(&l, c), c as u64)));
            }
            let t = Polyomino::parse("###\n.#.\n.#.").unwrap();
            v.push(("scaled-t-06".into(), gen_random_instance(&gen_scaled(&t, 6), 6)));
            for z in [8, 16, 32] {
                v.push((format!("dumbbell-{z:02}"), gen_dumbbell(z + 8, z, 4)?));
            }
            for (k, n) in [60usize, 200].into_iter().enumerate() {
                v.push((format!("ur-{n:04}"), gen_random_instance(&gen_random_ur(n, k as u64), k as u64)));
            }
        }
        "dumbbell-scaling" => {
            for s in [24, 32, 40, 48] {
                v.push((format!("dumbbell-s{s:02}-z08"), gen_dumbbell(s, 8, 4)?));
            }
        }
        "corridor-scaling" => {
            for len in [50, 100, 200] {
                v.push((format!("corridor-{len:03}"), gen_corridor(len, 10, 6)?));
            }
        }
        "random" => {
            for (k, n) in [20usize, 50, 100, 200].into_iter().enumerate() {
                let p = gen_random_ur(n, 100 + k as u64);
                v.push((format!("random-{n:04}"), gen_random_instance(&p, 100 + k as u64)));
            }
        }
        other => return Err(ToolError::UnknownSuite(other.to_string())),
    }
    v.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(v)
}

/// Runs every applicable planner on every instance of the suite.
pub fn run_suite(suite: &str) -> Result<Vec<BenchRecord>, ToolError> {
    let mut out = Vec::new();
    for (id, inst) in suite_instances(suite)? {
        out.extend(bench_instance(&id, &inst)?);
    }
    out.sort_by(|a, b| (&a.instance_id, &a.algorithm).cmp(&(&b.instance_id, &b.algorithm)));
    Ok(out)
}

/// Records for all planners applicable to one instance.
pub fn bench_instance(id: &str, inst: &Instance) -> Result<Vec<BenchRecord>, ToolError> {
    let p = &inst.polyomino;
    if !check_universal_reconfigurability(p).is_yes() {
        return Ok(Vec::new());
    }
    let profile = ShapeProfile::compute(p);
    let d = diameter(inst);
    let mut out = Vec::new();
    for algo in applicable_algorithms(&profile) {
        out.push(record(id, inst, &profile, d, algo)?);
    }
    Ok(out)
}

fn record(id: &str, inst: &Instance, profile: &ShapeProfile, d: u32, algo: Algorithm) -> Result<BenchRecord, ToolError> {
    let t = Instant::now();
    let r = algo.run(inst)?;
    Ok(BenchRecord {
        instance_id: id.to_string(),
        n: profile.area,
        d,
        zeta: profile.bottleneck,
        mu: profile.depth,
        c: profile.scale,
        algorithm: algo.tag().to_string(),
        makespan: r.makespan,
        lower_bound: r.lower_bound,
        stretch_vs_lb: r.stretch_vs_lb,
        wall_time: t.elapsed().as_secs_f64(),
    })
}

pub fn write_csv(records: &[BenchRecord], path: &Path) -> Result<(), ToolError> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Runs a suite and writes its CSV.
pub fn bench(suite: &str, csv: &Path) -> Result<Vec<BenchRecord>, ToolError> {
    let records = run_suite(suite)?;
    write_csv(&records, csv)?;
    Ok(records)
}
