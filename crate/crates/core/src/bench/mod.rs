//! Benchmark instances, the run matrix and per-class medians.

mod generate;
mod summary;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

pub use generate::{draw_house, gen_graph_colouring, gen_house, gnm_edges, HouseDraw};
pub use summary::{median, summarize_medians, write_records_csv, write_summary_csv, SummaryRow};

use crate::oracle::OracleError;
use crate::program::{parse_program, Program};
use crate::solving::{solve, SolveError, SolveMode, SolveOptions, SolveStatus};

pub const GRAPH_COLOURING_ENCODING: &str = include_str!("../../encodings/graph_colouring.lp");
pub const HOUSE_ENCODING: &str = include_str!("../../encodings/house.lp");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BenchError {
    #[error("{edges} edges do not fit on {nodes} nodes (at most {max})")]
    TooManyEdges { nodes: u32, edges: u32, max: u64 },
    #[error("at least one colour is needed")]
    NoColours,
    #[error("at least two things are needed, got {0}")]
    TooFewThings(u32),
    #[error("replica count must be odd, got {0}")]
    EvenReplicas(u32),
}

fn check_replicas(r: u32) -> Result<(), BenchError> {
    if r % 2 == 1 {
        Ok(())
    } else {
        Err(BenchError::EvenReplicas(r))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GraphColouringClass {
    pub v: u32,
    pub e: u32,
    pub c: u32,
    pub seed: u64,
    pub replicas: u32,
}

impl GraphColouringClass {
    pub fn max_edges(v: u32) -> u64 {
        u64::from(v) * u64::from(v.saturating_sub(1)) / 2
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let max = Self::max_edges(self.v);
        if u64::from(self.e) > max {
            return Err(BenchError::TooManyEdges {
                nodes: self.v,
                edges: self.e,
                max,
            });
        }
        if self.c == 0 {
            return Err(BenchError::NoColours);
        }
        check_replicas(self.replicas)
    }

    pub fn id(&self) -> String {
        format!("v{}_e{}_c{}", self.v, self.e, self.c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HouseClass {
    pub t: u32,
    pub seed: u64,
    pub replicas: u32,
}

impl HouseClass {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.t < 2 {
            return Err(BenchError::TooFewThings(self.t));
        }
        check_replicas(self.replicas)
    }

    /// Size of the cabinet and room domains.
    pub fn cabinets(&self) -> u32 {
        self.t
    }

    pub fn id(&self) -> String {
        format!("t{}", self.t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemClass {
    GraphColouring(GraphColouringClass),
    House(HouseClass),
}

impl ProblemClass {
    pub fn problem(&self) -> &'static str {
        match self {
            ProblemClass::GraphColouring(_) => "graph_colouring",
            ProblemClass::House(_) => "house",
        }
    }

    pub fn id(&self) -> String {
        match self {
            ProblemClass::GraphColouring(c) => c.id(),
            ProblemClass::House(c) => c.id(),
        }
    }

    pub fn replicas(&self) -> u32 {
        match self {
            ProblemClass::GraphColouring(c) => c.replicas,
            ProblemClass::House(c) => c.replicas,
        }
    }

    pub fn encoding(&self) -> &'static str {
        match self {
            ProblemClass::GraphColouring(_) => GRAPH_COLOURING_ENCODING,
            ProblemClass::House(_) => HOUSE_ENCODING,
        }
    }

    /// Instance facts only.
    pub fn instance(&self, i: u64) -> Result<Program, BenchError> {
        match self {
            ProblemClass::GraphColouring(c) => gen_graph_colouring(c, i),
            ProblemClass::House(c) => gen_house(c, i),
        }
    }

    /// Encoding plus instance facts, ready to solve.
    pub fn program(&self, i: u64) -> Result<Program, BenchError> {
        let mut p = parse_program(self.encoding()).expect("shipped encodings parse");
        p.extend(self.instance(i)?);
        Ok(p)
    }
}

/// The reduced class grid used by default: `V` in 10..=50, `E/V` in
/// {4, 8, 16} and `C` in {3, 5} where the edges fit, and `T` in {5, 10, 15}.
pub fn default_grid(seed: u64, replicas: u32) -> Vec<ProblemClass> {
    let mut out = Vec::new();
    for v in (10..=50).step_by(10) {
        for ratio in [4, 8, 16] {
            for c in [3, 5] {
                let cls = GraphColouringClass {
                    v,
                    e: v * ratio,
                    c,
                    seed,
                    replicas,
                };
                if cls.validate().is_ok() {
                    out.push(ProblemClass::GraphColouring(cls));
                }
            }
        }
    }
    out.extend(
        [5, 10, 15]
            .into_iter()
            .map(|t| ProblemClass::House(HouseClass { t, seed, replicas })),
    );
    out
}

/// One solver run. Only the columns of the results file are serialized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub problem: String,
    pub class: String,
    pub instance: u64,
    pub strategy: String,
    pub answersets: u64,
    pub guesses: u64,
    pub conflicts: u64,
    pub time_s: f64,
    pub timeout: bool,
    /// Grounding hit the instantiation cap.
    #[serde(skip)]
    pub memory_cap: bool,
    #[serde(skip)]
    pub error: Option<String>,
}

impl RunRecord {
    pub fn solved(&self) -> bool {
        !self.timeout && !self.memory_cap && self.error.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Answer sets requested per run.
    pub n: usize,
    pub timeout: Duration,
    /// Worker threads; 0 lets the pool decide.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            n: 10,
            timeout: Duration::from_secs(60),
            jobs: 0,
        }
    }
}

/// Runs every instance of every class under every strategy. Records come
/// back in matrix order regardless of scheduling.
pub fn run_benchmark(
    classes: &[ProblemClass],
    strategies: &[SolveMode],
    opts: &RunOptions,
) -> Vec<RunRecord> {
    let cells: Vec<(ProblemClass, u64, SolveMode)> = classes
        .iter()
        .flat_map(|cls| {
            (0..u64::from(cls.replicas()))
                .flat_map(move |i| strategies.iter().map(move |&s| (*cls, i, s)))
        })
        .collect();
    let run = || -> Vec<RunRecord> {
        cells
            .par_iter()
            .map(|&(cls, i, mode)| run_one(&cls, i, mode, opts))
            .collect()
    };
    match rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(e) => {
            log::warn!("thread pool unavailable ({e}); running on the global pool");
            run()
        }
    }
}

pub fn run_one(cls: &ProblemClass, i: u64, mode: SolveMode, opts: &RunOptions) -> RunRecord {
    let mut record = RunRecord {
        problem: cls.problem().to_string(),
        class: cls.id(),
        instance: i,
        strategy: mode.to_string(),
        answersets: 0,
        guesses: 0,
        conflicts: 0,
        time_s: 0.0,
        timeout: false,
        memory_cap: false,
        error: None,
    };
    let program = match cls.program(i) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{} {} #{i}: {e}", record.problem, record.class);
            record.error = Some(e.to_string());
            return record;
        }
    };
    let start = Instant::now();
    let solve_opts = SolveOptions::first(opts.n).with_timeout(opts.timeout);
    match solve(&program, mode, &solve_opts) {
        Ok(out) => {
            record.answersets = out.answer_sets.len() as u64;
            record.guesses = out.stats.guesses;
            record.conflicts = out.stats.conflicts;
            record.time_s = out.stats.time_s;
            record.timeout = out.status == SolveStatus::Timeout;
        }
        Err(SolveError::Grounding(e)) => {
            log::warn!("{} {} #{i} under {mode}: {e}", record.problem, record.class);
            record.memory_cap = matches!(e, OracleError::Cap { .. });
            record.error = Some(e.to_string());
            record.time_s = opts
                .timeout
                .as_secs_f64()
                .max(start.elapsed().as_secs_f64());
        }
    }
    record
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grounding::StrategyConfig;

    #[test]
    fn encodings_parse_with_instances() {
        let gc = ProblemClass::GraphColouring(GraphColouringClass {
            v: 6,
            e: 8,
            c: 3,
            seed: 1,
            replicas: 1,
        });
        let house = ProblemClass::House(HouseClass {
            t: 5,
            seed: 1,
            replicas: 1,
        });
        for cls in [gc, house] {
            let p = cls.program(0).unwrap();
            assert!(!p.is_empty());
        }
    }

    #[test]
    fn matrix_is_cartesian() {
        let classes: Vec<ProblemClass> = [(4, 3), (5, 4)]
            .iter()
            .map(|&(v, e)| {
                ProblemClass::GraphColouring(GraphColouringClass {
                    v,
                    e,
                    c: 3,
                    seed: 9,
                    replicas: 3,
                })
            })
            .collect();
        let strategies = [
            SolveMode::Lazy(StrategyConfig::DEFAULT),
            SolveMode::Lazy("k:inf,0".parse().unwrap()),
        ];
        let opts = RunOptions {
            n: 2,
            timeout: Duration::from_secs(10),
            jobs: 2,
        };
        let records = run_benchmark(&classes, &strategies, &opts);
        assert_eq!(records.len(), 12);
        assert!(records.iter().all(|r| r.solved() && r.answersets == 2));
        let again = run_benchmark(&classes, &strategies, &opts);
        let guesses = |rs: &[RunRecord]| rs.iter().map(|r| r.guesses).collect::<Vec<_>>();
        assert_eq!(guesses(&records), guesses(&again));
    }

    #[test]
    fn timeout_keeps_partial_stats() {
        let cls = ProblemClass::GraphColouring(GraphColouringClass {
            v: 40,
            e: 320,
            c: 5,
            seed: 2,
            replicas: 1,
        });
        let r = run_one(
            &cls,
            0,
            SolveMode::Lazy(StrategyConfig::DEFAULT),
            &RunOptions {
                n: usize::MAX,
                timeout: Duration::from_millis(1),
                jobs: 1,
            },
        );
        assert!(r.timeout);
        assert!(r.answersets < u64::MAX);
    }

    #[test]
    fn default_grid_is_valid() {
        let grid = default_grid(0, 11);
        assert!(grid.iter().all(|c| match c {
            ProblemClass::GraphColouring(g) => g.validate().is_ok(),
            ProblemClass::House(h) => h.validate().is_ok(),
        }));
        assert!(grid.len() > 20);
    }
}
