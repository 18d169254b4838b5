//! Command-line front end: shape parameters, generators, planners, the
//! validator, the oracle, benchmarks and frame rendering.
//!
//! Exit codes: 0 success (or a valid schedule), 1 invalid input, 2 planning
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};

use polyroute::domain::Polyomino;
use polyroute::planners::{auto_plan, oracle_optimal, Algorithm, PlanResult};
use polyroute::primitives::{check_universal_reconfigurability, NonReconfigurableWitness, Reconfigurability};
use polyroute::schedule::{validate_schedule, Instance, Schedule};
use polyroute::shape::ShapeProfile;
use polyroute::tooling::{
    bench, gen_corridor, gen_dumbbell, gen_partial_instance, gen_random_instance, gen_random_simple, gen_random_ur,
    gen_scaled, render_svg,
};

#[derive(Parser)]
#[command(name = "polyroute", version, about = "Collision-free schedules for labeled agents in simple polyominoes")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print bottleneck, depth, scale and skeleton size of an ASCII map.
    Params { map: PathBuf },
    /// Decide universal reconfigurability of an ASCII map.
    CheckUr { map: PathBuf },
    /// Generate an instance file.
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Chamber side (dumbbell) or square side.
        #[arg(long, default_value_t = 8)]
        side: i32,
        /// Corridor width (dumbbell, corridor).
        #[arg(long, default_value_t = 4)]
        width: i32,
        /// Corridor length (dumbbell, corridor).
        #[arg(long, default_value_t = 4)]
        len: i32,
        /// Mirrored block length (corridor).
        #[arg(long, default_value_t = 6)]
        block: i32,
        /// Cell count (random, random-ur).
        #[arg(long, default_value_t = 50)]
        cells: usize,
        /// Scale factor (scaled).
        #[arg(long, default_value_t = 3)]
        scale: i32,
        /// Template ASCII map (scaled); an L tromino by default.
        #[arg(long)]
        template: Option<PathBuf>,
        /// Only permute this many agents (random, random-ur, square).
        #[arg(long)]
        agents: Option<usize>,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Plan a schedule; writes the schedule and a `.metrics.json` sidecar.
    Plan {
        #[arg(long, value_enum, default_value_t = AlgoArg::Auto)]
        algo: AlgoArg,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Run every applicable planner and keep the shortest schedule.
        #[arg(long)]
        race: bool,
    },
    /// Check a schedule against an instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sched: PathBuf,
    },
    /// Exact optimal makespan by exhaustive search (at most 16 agents).
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        /// Give up after this many explored configurations.
        #[arg(long, default_value_t = 5_000_000)]
        limit: usize,
    },
    /// Run a benchmark suite and write its CSV.
    Bench {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        csv: PathBuf,
    },
    /// Write one SVG frame per configuration of a schedule.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        sched: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Dumbbell,
    Corridor,
    Square,
    Scaled,
    Random,
    RandomUr,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Any,
    Scaled,
    Bottleneck,
    Narrow,
    Auto,
}

enum Failure {
    Input(anyhow::Error),
    Plan(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Plan(e)) => {
            eprintln!("planning failed: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_map(path: &Path) -> anyhow::Result<Polyomino> {
    Polyomino::parse(&read(path)?).with_context(|| format!("parsing map {}", path.display()))
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    Instance::from_json(&read(path)?).with_context(|| format!("parsing instance {}", path.display()))
}

fn read_schedule(path: &Path) -> anyhow::Result<Schedule> {
    Schedule::from_text(&read(path)?).with_context(|| format!("parsing schedule {}", path.display()))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn witness_text(w: &NonReconfigurableWitness) -> String {
    match w {
        NonReconfigurableWitness::UncoverableCell(c) => format!("cell {c} lies in no 2x2 square"),
        NonReconfigurableWitness::CutEdge(a, b) => format!("edge {a}-{b} is a bridge of the dual graph"),
        NonReconfigurableWitness::NoCommonSquare(a, b) => format!("adjacent cells {a} and {b} share no 2x2 square"),
        NonReconfigurableWitness::SingleSquare => "a lone 2x2 square only admits rotations".to_string(),
    }
}

fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Params { map } => {
            let p = read_map(&map)?;
            print!("{}", ShapeProfile::compute(&p).to_text());
        }
        Command::CheckUr { map } => {
            let p = read_map(&map)?;
            match check_universal_reconfigurability(&p) {
                Reconfigurability::Yes(_) => println!("yes"),
                Reconfigurability::No(w) => println!("no: {}", witness_text(&w)),
            }
        }
        Command::Gen { family, seed, side, width, len, block, cells, scale, template, agents, out } => {
            let permuted = |p: &Polyomino| match agents {
                Some(k) => gen_partial_instance(p, k, seed),
                None => gen_random_instance(p, seed),
            };
            let inst = match family {
                Family::Dumbbell => gen_dumbbell(side, width, len).map_err(|e| anyhow!(e))?,
                Family::Corridor => gen_corridor(len, width, block).map_err(|e| anyhow!(e))?,
                Family::Square => {
                    if side < 1 {
                        return Err(anyhow!("square side must be positive").into());
                    }
                    permuted(&Polyomino::parse(&format!("{}\n", "#".repeat(side as usize)).repeat(side as usize)).map_err(|e| anyhow!(e))?)
                }
                Family::Scaled => {
                    if scale < 1 {
                        return Err(anyhow!("scale must be positive").into());
                    }
                    let t = match template {
                        Some(path) => read_map(&path)?,
                        None => Polyomino::parse("#.\n##").expect("L tromino"),
                    };
                    permuted(&gen_scaled(&t, scale))
                }
                Family::Random => permuted(&gen_random_simple(cells, seed)),
                Family::RandomUr => permuted(&gen_random_ur(cells, seed)),
            };
            match out {
                Some(path) => write(&path, &inst.to_json())?,
                None => println!("{}", inst.to_json()),
            }
        }
        Command::Plan { algo, input, out, race } => {
            let inst = read_instance(&input)?;
            let result: anyhow::Result<PlanResult> = match algo {
                AlgoArg::Auto => auto_plan(&inst, race).map_err(Into::into),
                AlgoArg::Any => Algorithm::Any.run(&inst).map_err(Into::into),
                AlgoArg::Scaled => Algorithm::Scaled.run(&inst).map_err(Into::into),
                AlgoArg::Bottleneck => Algorithm::Bottleneck.run(&inst).map_err(Into::into),
                AlgoArg::Narrow => Algorithm::Narrow.run(&inst).map_err(Into::into),
            };
            let r = result.map_err(Failure::Plan)?;
            write(&out, &r.schedule.to_text())?;
            write(&out.with_extension("metrics.json"), &r.metrics_json())?;
            println!("{}: makespan {} (lower bound {})", r.algorithm, r.makespan, r.lower_bound);
        }
        Command::Validate { input, sched } => {
            let inst = read_instance(&input)?;
            let s = read_schedule(&sched)?;
            let report = validate_schedule(&inst, &s);
            if report.valid {
                println!("valid: makespan {} diameter {} stretch {:.2}", report.makespan, report.diameter, report.stretch);
            } else {
                let at = report.failing_step.map_or(String::new(), |i| format!(" at step {i}"));
                return Err(anyhow!("invalid{at}: {}", report.reason.unwrap_or_default()).into());
            }
        }
        Command::Oracle { input, limit } => {
            let inst = read_instance(&input)?;
            if inst.polyomino.area() > 16 {
                return Err(anyhow!("the oracle handles at most 16 agents, got {}", inst.polyomino.area()).into());
            }
            match oracle_optimal(&inst, limit) {
                Some(m) => println!("optimal makespan {m}"),
                None => {
                    return Err(Failure::Plan(anyhow!(
                        "unknown: target unreachable or more than {limit} configurations explored"
                    )))
                }
            }
        }
        Command::Bench { suite, csv } => {
            let records = bench(&suite, &csv).map_err(|e| match e {
                polyroute::tooling::ToolError::Plan(p) => Failure::Plan(p.into()),
                other => Failure::Input(other.into()),
            })?;
            println!("{} records written to {}", records.len(), csv.display());
        }
        Command::Render { input, sched, out } => {
            let inst = read_instance(&input)?;
            let s = read_schedule(&sched)?;
            if !validate_schedule(&inst, &s).valid {
                return Err(anyhow!("schedule is not valid for the instance").into());
            }
            let files = render_svg(&inst, &s, &out).map_err(|e| anyhow!(e))?;
            println!("{} frames written to {}", files.len(), out.display());
        }
    }
    Ok(())
}
