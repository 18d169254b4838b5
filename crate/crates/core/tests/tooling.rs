mod common;

use common::{reaches_target, square};
use polyroute::domain::Polyomino;
use polyroute::planners::{plan_bottleneck, Algorithm};
use polyroute::primitives::check_universal_reconfigurability;
use polyroute::schedule::{Instance, Schedule, Transformation};
use polyroute::shape::{compute_bottleneck, compute_scale};
use polyroute::tooling::{
    bench, bench_instance, gen_corridor, gen_dumbbell, gen_partial_instance, gen_random_instance, gen_random_simple,
    gen_random_ur, gen_scaled, render_svg, suite_instances, SUITES,
};

#[test]
fn dumbbell_shapes() {
    let inst = gen_dumbbell(4, 2, 3).unwrap();
    assert_eq!(inst.polyomino.area(), 38);
    assert_eq!(compute_bottleneck(&inst.polyomino).0, 2);

    let tiny = gen_dumbbell(2, 2, 1).unwrap();
    assert_eq!(tiny.polyomino.area(), 10);
    assert_eq!(tiny.polyomino.bbox(), (0, 0, 5, 2));

    let wide = gen_dumbbell(6, 6, 2).unwrap();
    assert_eq!(compute_bottleneck(&wide.polyomino).0, 6);
    assert!(gen_dumbbell(4, 5, 1).is_err());
}

#[test]
fn dumbbell_target_mirrors_chambers() {
    let inst = gen_dumbbell(8, 4, 4).unwrap();
    let p = &inst.polyomino;
    let tp = inst.target_positions();
    for (i, q) in p.cells().iter().enumerate() {
        let to = p.cell(tp[inst.start.label_at(i) as usize - 1] as usize);
        if q.x < 8 || q.x >= 12 {
            assert_eq!((to.x, to.y), (19 - q.x, q.y));
        } else {
            assert_eq!(to, *q);
        }
    }
}

#[test]
fn scaled_generator() {
    assert_eq!(gen_scaled(&square(1), 5), square(5));
    let l = gen_scaled(&Polyomino::parse("#.\n##").unwrap(), 3);
    assert_eq!(l.area(), 27);
    assert_eq!(compute_scale(&l).0, 3);
}

#[test]
fn random_generators_are_deterministic() {
    for seed in 0..5 {
        let a = gen_random_simple(40, seed);
        assert_eq!(a, gen_random_simple(40, seed));
        assert_eq!(a.area(), 40);
        assert_eq!(gen_random_instance(&a, seed), gen_random_instance(&a, seed));
        let u = gen_random_ur(40, seed);
        assert!(u.area() >= 40);
        assert!(check_universal_reconfigurability(&u).is_yes());
    }
    assert_ne!(gen_random_simple(40, 1), gen_random_simple(40, 2));
}

#[test]
fn partial_instances_move_few_agents() {
    let p = square(6);
    let inst = gen_partial_instance(&p, 5, 3);
    let moved = (0..p.area()).filter(|&i| inst.start.label_at(i) != inst.target.label_at(i)).count();
    assert!(moved <= 5);
}

#[test]
fn corridor_blocks_are_mirrored() {
    let inst = gen_corridor(20, 3, 6).unwrap();
    assert_eq!(inst.polyomino.area(), 60);
    // the last block is only 2 columns wide
    assert_eq!(polyroute::schedule::diameter(&inst), 5);
}

#[test]
fn frame_counts() {
    let dir = tempfile::tempdir().unwrap();
    let inst = Instance::identity(square(2));
    assert_eq!(render_svg(&inst, &Schedule::empty(), dir.path()).unwrap().len(), 1);

    let ring = Transformation::cycle(&[common::c(0, 0), common::c(1, 0), common::c(1, 1), common::c(0, 1)]);
    let one = Schedule::new(vec![ring]);
    let target = one.replay(&inst.polyomino, &inst.start).unwrap();
    let rotated = Instance::new(inst.polyomino.clone(), inst.start.clone(), target).unwrap();
    let d = dir.path().join("rot");
    let files = render_svg(&rotated, &one, &d).unwrap();
    assert_eq!(files.len(), 2);
    assert!(std::fs::read_to_string(&files[1]).unwrap().starts_with("<svg"));

    let bell = gen_dumbbell(8, 8, 2).unwrap();
    let r = plan_bottleneck(&bell).unwrap();
    assert!(reaches_target(&bell, &r.schedule));
    let d = dir.path().join("bell");
    assert_eq!(render_svg(&bell, &r.schedule, &d).unwrap().len(), r.makespan + 1);
    assert_eq!(std::fs::read_dir(&d).unwrap().count(), r.makespan + 1);
}

#[test]
fn suites_are_known() {
    for s in SUITES {
        assert!(!suite_instances(s).unwrap().is_empty());
    }
    assert!(suite_instances("nope").is_err());
}

#[test]
fn csv_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("random.csv");
    let records = bench("random", &path).unwrap();
    assert_eq!(records.len(), 4);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(str::to_string).collect();
    assert_eq!(
        header,
        [
            "instance_id", "n", "d", "zeta", "mu", "c", "algorithm", "makespan", "lower_bound", "stretch_vs_lb",
            "wall_time"
        ]
    );
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    for (row, rec) in rows.iter().zip(&records) {
        assert_eq!(&row[0], rec.instance_id);
        let makespan: usize = row[7].parse().unwrap();
        let lb: usize = row[8].parse().unwrap();
        assert!(makespan >= lb);
        let stretch: f64 = row[9].parse().unwrap();
        assert!(lb == 0 || stretch >= 1.0);
    }
}

#[test]
fn bench_covers_applicable_planners() {
    let inst = gen_random_instance(&square(9), 0);
    let algos: Vec<String> = bench_instance("sq9", &inst).unwrap().into_iter().map(|r| r.algorithm).collect();
    let expect: Vec<String> =
        [Algorithm::Narrow, Algorithm::Bottleneck, Algorithm::Scaled, Algorithm::Any].iter().map(|a| a.tag().to_string()).collect();
    assert_eq!(algos, expect);
    // non-reconfigurable domains produce no records
    let strip = Instance::identity(Polyomino::parse("####").unwrap());
    assert!(bench_instance("strip", &strip).unwrap().is_empty());
}
