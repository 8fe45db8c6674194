//! Search over nogoods, interleaved with lazy grounding.
//!
//! Each ground rule with a head gets a body atom `β`; branching happens only
//! on body atoms, true first. When nothing is left to branch on, remaining
//! atoms are closed to false one at a time and the total assignment is
//! checked for minimality before it is reported.

mod assignment;
mod heuristic;
mod nogoods;
mod search;
mod translate;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

pub use assignment::{Lit, NogoodId, TruthAssignment, Var};
pub use heuristic::{choose_branch, init_heuristic_moms, HeuristicParams, HeuristicState};
pub use nogoods::{analyze_conflict, Analysis, Nogood, NogoodStore, Unsatisfiable};
pub use translate::{rule_to_nogoods, TranslateError};

use crate::grounding::{AtomStore, LazyGrounder, StrategyConfig};
use crate::oracle::{full_ground, GroundOptions, OracleError};
use crate::program::{program_meta, Atom, Program};

/// How ground rules reach the solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMode {
    Lazy(StrategyConfig),
    /// Ground everything first, then search without a grounder.
    Upfront {
        cap: u64,
    },
}

impl std::fmt::Display for SolveMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMode::Lazy(c) => c.fmt(f),
            SolveMode::Upfront { .. } => f.write_str("upfront"),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Stop after this many answer sets; `None` enumerates all.
    pub max_answer_sets: Option<usize>,
    pub timeout: Option<Duration>,
    pub heuristic: HeuristicParams,
}

impl SolveOptions {
    pub fn first(n: usize) -> Self {
        SolveOptions {
            max_answer_sets: Some(n),
            ..Default::default()
        }
    }

    pub fn all() -> Self {
        Self::default()
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = Some(timeout);
        self
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SolveStats {
    /// Heuristic decisions on body atoms.
    pub guesses: u64,
    pub conflicts: u64,
    /// Distinct ground rules handed to the solver.
    pub rules: u64,
    pub time_s: f64,
    pub answer_sets: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Search space exhausted: every answer set was reported.
    Exhausted,
    /// Stopped after the requested number of answer sets.
    LimitReached,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Answer sets without complement atoms, in discovery order.
    pub answer_sets: Vec<BTreeSet<Atom>>,
    pub stats: SolveStats,
    pub status: SolveStatus,
}

impl SolveOutcome {
    pub fn is_unsat(&self) -> bool {
        self.status == SolveStatus::Exhausted && self.answer_sets.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Grounding(#[from] OracleError),
}

pub fn solve(
    program: &Program,
    mode: SolveMode,
    opts: &SolveOptions,
) -> Result<SolveOutcome, SolveError> {
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let meta = program_meta(program);
    let mut store = AtomStore::new();
    let (ground, grounder) = match mode {
        SolveMode::Lazy(config) => {
            let ground = Program::new(
                program
                    .rules
                    .iter()
                    .filter(|r| r.is_ground())
                    .cloned()
                    .collect(),
            );
            let g = LazyGrounder::for_program(config, program, &meta, &mut store);
            (ground, Some(g))
        }
        SolveMode::Upfront { cap } => {
            let gp = full_ground(
                program,
                GroundOptions {
                    cap,
                    drop_inactive: true,
                },
            )?;
            (gp.to_program(), None)
        }
    };
    let mut search = search::Search::new(program, &meta, &ground, grounder, store, opts);
    let mut answer_sets = Vec::new();
    let status = search.run(opts.max_answer_sets, deadline, &mut answer_sets);
    let mut stats = search.stats;
    stats.time_s = start.elapsed().as_secs_f64();
    Ok(SolveOutcome {
        answer_sets,
        stats,
        status,
    })
}
