//! Fixtures shared by the criterion benchmarks in `benches/`.

use lazyasp::bench::{GraphColouringClass, HouseClass, ProblemClass};
use lazyasp::program::Program;
use lazyasp::solving::SolveMode;

/// Strategies compared in the solving benchmarks.
pub const STRATEGIES: [&str; 5] = ["default", "k:0,0", "k:inf,0", "k:1,1+acc", "upfront"];

pub fn mode(name: &str) -> SolveMode {
    if name == "upfront" {
        SolveMode::Upfront {
            cap: lazyasp::oracle::DEFAULT_CAP,
        }
    } else {
        SolveMode::Lazy(name.parse().expect("known strategy"))
    }
}

/// Small instances that every strategy finishes in well under a second.
pub fn fixtures() -> Vec<(String, Program)> {
    let classes = [
        ProblemClass::GraphColouring(GraphColouringClass {
            v: 10,
            e: 20,
            c: 3,
            seed: 0,
            replicas: 1,
        }),
        ProblemClass::GraphColouring(GraphColouringClass {
            v: 20,
            e: 40,
            c: 3,
            seed: 0,
            replicas: 1,
        }),
        ProblemClass::House(HouseClass {
            t: 5,
            seed: 0,
            replicas: 1,
        }),
    ];
    classes
        .iter()
        .map(|c| {
            (
                format!("{}_{}", c.problem(), c.id()),
                c.program(0).expect("valid class"),
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use lazyasp::solving::{solve, SolveOptions};

    #[test]
    fn fixtures_solve_under_every_strategy() {
        for (name, p) in fixtures() {
            for s in STRATEGIES {
                let out = solve(&p, mode(s), &SolveOptions::first(1)).unwrap();
                assert!(out.stats.time_s < 5.0, "{name} under {s}");
            }
        }
    }
}
