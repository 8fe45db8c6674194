//! Random safe programs and assignments shared by the integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use lazyasp::grounding::{Assignment, GrounderMemory};
use lazyasp::oracle::{full_ground, GroundOptions};
use lazyasp::program::{Atom, Constant, Program, Term};
use rand::seq::IndexedRandom;
use rand::Rng;

const VARS: [&str; 2] = ["X", "Y"];
/// Derivable predicates with their arities; `d/1` only ever holds facts.
const PREDS: [(&str, usize); 5] = [("p", 1), ("q", 1), ("e", 2), ("a", 0), ("b", 0)];

fn arg(rng: &mut impl Rng, vars: &[&str], consts: u32) -> String {
    if !vars.is_empty() && rng.random_bool(0.7) {
        vars.choose(rng).unwrap().to_string()
    } else {
        rng.random_range(1..=consts).to_string()
    }
}

fn atom(rng: &mut impl Rng, name: &str, arity: usize, vars: &[&str], consts: u32) -> String {
    if arity == 0 {
        return name.to_string();
    }
    let args: Vec<String> = (0..arity).map(|_| arg(rng, vars, consts)).collect();
    format!("{name}({})", args.join(","))
}

fn body_pred(rng: &mut impl Rng) -> (&'static str, usize) {
    if rng.random_bool(0.3) {
        ("d", 1)
    } else {
        *PREDS.choose(rng).unwrap()
    }
}

fn vars_of(text: &str) -> BTreeSet<&'static str> {
    VARS.iter().copied().filter(|v| text.contains(v)).collect()
}

/// A safe program with at most `max_rules` non-fact rules, at most two
/// variables per rule and at most four constants. Facts come on top.
pub fn random_program_text(rng: &mut impl Rng, max_rules: usize) -> String {
    let consts = rng.random_range(1..=4u32);
    let mut out = String::new();
    for c in 1..=consts {
        if c == 1 || rng.random_bool(0.7) {
            out.push_str(&format!("d({c}). "));
        }
    }
    if rng.random_bool(0.3) {
        let c = rng.random_range(1..=consts);
        out.push_str(&format!("p({c}). "));
    }
    let rules = rng.random_range(1..=max_rules);
    for _ in 0..rules {
        let n_pos = rng.random_range(0..=2);
        let pos: Vec<String> = (0..n_pos)
            .map(|_| {
                let (name, arity) = body_pred(rng);
                atom(rng, name, arity, &VARS, consts)
            })
            .collect();
        let bound: Vec<&str> = vars_of(&pos.join(" ")).into_iter().collect();
        let neg: Vec<String> = (0..rng.random_range(0..=1))
            .map(|_| {
                let (name, arity) = *PREDS.choose(rng).unwrap();
                format!("not {}", atom(rng, name, arity, &bound, consts))
            })
            .collect();
        let body: Vec<String> = pos.into_iter().chain(neg).collect();
        let body = body.join(", ");
        let (name, arity) = *PREDS.choose(rng).unwrap();
        let head = atom(rng, name, arity, &bound, consts);
        let rule = match rng.random_range(0..3) {
            0 if !body.is_empty() => format!(":- {body}."),
            1 => {
                if body.is_empty() {
                    format!("{{{head}}}.")
                } else {
                    format!("{{{head}}} :- {body}.")
                }
            }
            _ => {
                if body.is_empty() {
                    format!("{head}.")
                } else {
                    format!("{head} :- {body}.")
                }
            }
        };
        out.push_str(&rule);
        out.push(' ');
    }
    out
}

/// Size of the brute-force guess pool: head atoms that occur negated in
/// the full grounding.
pub fn guess_pool(p: &Program) -> usize {
    let gp = full_ground(p, GroundOptions::default()).expect("small programs ground");
    let heads = gp.heads();
    gp.rules
        .iter()
        .flat_map(|r| r.negative.iter())
        .filter(|a| heads.contains(a))
        .collect::<BTreeSet<_>>()
        .len()
}

/// Every atom over the program's predicates and constants.
pub fn universe(p: &Program) -> Vec<Atom> {
    let mut preds = BTreeSet::new();
    let mut consts: BTreeSet<Constant> = BTreeSet::new();
    for r in &p.rules {
        for a in r.head.iter().chain(&r.positive).chain(&r.negative) {
            preds.insert((a.name.clone(), a.args.len()));
            for t in &a.args {
                if let Term::Const(c) = t {
                    consts.insert(c.clone());
                }
            }
        }
    }
    let consts: Vec<Constant> = consts.into_iter().collect();
    let mut out = Vec::new();
    for (name, arity) in preds {
        let mut tuples: Vec<Vec<Term>> = vec![vec![]];
        for _ in 0..arity {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    consts.iter().map(move |c| {
                        let mut t = t.clone();
                        t.push(Term::Const(c.clone()));
                        t
                    })
                })
                .collect();
        }
        out.extend(tuples.into_iter().map(|args| Atom::new(&name, args)));
    }
    out
}

/// A consistent random assignment over `universe`.
pub fn random_assignment(rng: &mut impl Rng, universe: &[Atom]) -> Assignment {
    let mut a = Assignment::default();
    for atom in universe {
        match rng.random_range(0..10) {
            0..4 => {
                a.positive.insert(atom.clone());
            }
            4..7 => {
                a.negative.insert(atom.clone());
            }
            _ => {}
        }
    }
    a
}

pub fn random_memory(rng: &mut impl Rng, universe: &[Atom]) -> GrounderMemory {
    GrounderMemory::new(universe.iter().filter(|_| rng.random_bool(0.3)).cloned())
}
