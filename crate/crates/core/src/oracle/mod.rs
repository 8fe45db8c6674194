//! Reference semantics: naive full grounding, reducts, answer-set checking
//! and brute-force enumeration. Deliberately simple; the solver is the fast
//! path and this module is what it gets compared against.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::grounding::is_inactive;
use crate::program::{
    apply_substitution, program_meta, Atom, Constant, Program, Rule, Substitution,
};

pub const DEFAULT_CAP: u64 = 1_000_000;
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("full grounding needs {needed} instantiations, cap is {cap}")]
    Cap { needed: u64, cap: u64 },
    #[error("{atoms} atoms to guess over, limit is {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GroundProgram {
    pub rules: BTreeSet<Rule>,
    pub herbrand_base: BTreeSet<Atom>,
}

impl GroundProgram {
    pub fn new(rules: impl IntoIterator<Item = Rule>) -> Self {
        let rules: BTreeSet<Rule> = rules.into_iter().collect();
        let herbrand_base = rules.iter().flat_map(|r| r.atoms().cloned()).collect();
        GroundProgram {
            rules,
            herbrand_base,
        }
    }

    pub fn to_program(&self) -> Program {
        Program::new(self.rules.iter().cloned().collect())
    }

    /// Atoms occurring in some rule head.
    pub fn heads(&self) -> BTreeSet<Atom> {
        self.rules.iter().filter_map(|r| r.head.clone()).collect()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interpretation {
    pub true_atoms: BTreeSet<Atom>,
}

impl Interpretation {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        Interpretation {
            true_atoms: atoms.into_iter().collect(),
        }
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.true_atoms.contains(a)
    }

    /// The atoms outside the reserved complement namespace.
    pub fn visible(&self) -> BTreeSet<Atom> {
        self.true_atoms
            .iter()
            .filter(|a| !a.is_complement())
            .cloned()
            .collect()
    }

    /// Inverse of [`Interpretation::visible`] for desugared choices: each
    /// complement head is added when its rule body holds.
    pub fn with_complements(visible: impl IntoIterator<Item = Atom>, gp: &GroundProgram) -> Self {
        let mut i = Interpretation::new(visible);
        let extra: Vec<Atom> = gp
            .rules
            .iter()
            .filter(|r| r.head.as_ref().is_some_and(|h| h.is_complement()) && body_true(r, &i))
            .filter_map(|r| r.head.clone())
            .collect();
        i.true_atoms.extend(extra);
        i
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundOptions {
    /// Maximum number of rule instantiations considered.
    pub cap: u64,
    /// Drop instances that can never fire.
    pub drop_inactive: bool,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions {
            cap: DEFAULT_CAP,
            drop_inactive: false,
        }
    }
}

/// Every instance of every rule over the constants of `p`.
pub fn full_ground(p: &Program, opts: GroundOptions) -> Result<GroundProgram, OracleError> {
    let meta = program_meta(p);
    let universe: Vec<Constant> = meta.constants.iter().cloned().collect();
    let mut needed: u64 = 0;
    for r in &p.rules {
        let n = (universe.len() as u64).saturating_pow(r.vars().len() as u32);
        needed = needed.saturating_add(n);
    }
    if needed > opts.cap {
        return Err(OracleError::Cap {
            needed,
            cap: opts.cap,
        });
    }
    let mut rules = Vec::new();
    for r in &p.rules {
        let vars: Vec<_> = r.vars().into_iter().collect();
        let mut idx = vec![0usize; vars.len()];
        if !vars.is_empty() && universe.is_empty() {
            continue;
        }
        loop {
            let mut s = Substitution::new();
            for (v, &i) in vars.iter().zip(&idx) {
                s.insert(v.clone(), universe[i].clone());
            }
            let g = apply_substitution(r, &s).expect("substitution covers all variables");
            if !(opts.drop_inactive && is_inactive(&g, &meta).unwrap_or(false)) {
                rules.push(g);
            }
            if !advance(&mut idx, universe.len()) {
                break;
            }
        }
    }
    Ok(GroundProgram::new(rules))
}

fn advance(idx: &mut [usize], base: usize) -> bool {
    for d in idx.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn body_true(r: &Rule, i: &Interpretation) -> bool {
    r.positive.iter().all(|a| i.contains(a)) && !r.negative.iter().any(|a| i.contains(a))
}

/// Rules whose body `I` satisfies.
pub fn flp_reduct(gp: &GroundProgram, i: &Interpretation) -> GroundProgram {
    GroundProgram {
        rules: gp
            .rules
            .iter()
            .filter(|r| body_true(r, i))
            .cloned()
            .collect(),
        herbrand_base: gp.herbrand_base.clone(),
    }
}

pub fn is_model(gp: &GroundProgram, i: &Interpretation) -> bool {
    gp.rules
        .iter()
        .all(|r| !body_true(r, i) || r.head.as_ref().is_some_and(|h| i.contains(h)))
}

/// Least model of the positive parts of `rules`, negation ignored.
fn least_model<'a>(rules: impl Iterator<Item = &'a Rule>) -> BTreeSet<Atom> {
    let rules: Vec<&Rule> = rules.filter(|r| r.head.is_some()).collect();
    let mut waiting: BTreeMap<&Atom, Vec<usize>> = BTreeMap::new();
    let mut missing: Vec<usize> = Vec::with_capacity(rules.len());
    let mut queue = Vec::new();
    for (k, r) in rules.iter().enumerate() {
        missing.push(r.positive.len());
        for b in &r.positive {
            waiting.entry(b).or_default().push(k);
        }
        if r.positive.is_empty() {
            queue.push(k);
        }
    }
    let mut model = BTreeSet::new();
    while let Some(k) = queue.pop() {
        let h = rules[k].head.as_ref().unwrap();
        if model.insert(h.clone()) {
            if let Some(ws) = waiting.get(h) {
                for &w in ws {
                    missing[w] -= 1;
                    if missing[w] == 0 {
                        queue.push(w);
                    }
                }
            }
        }
    }
    model
}

/// `I` is an answer set iff it is a model and equals the least model of the
/// reduct read positively.
pub fn is_answer_set(gp: &GroundProgram, i: &Interpretation) -> bool {
    if !is_model(gp, i) {
        return false;
    }
    let reduct = flp_reduct(gp, i);
    least_model(reduct.rules.iter()) == i.true_atoms
}

/// Subset-minimality of `I` among models of the reduct, checked by trying
/// every proper subset. Exponential; a cross-check for the fixpoint test.
pub fn is_answer_set_exhaustive(
    gp: &GroundProgram,
    i: &Interpretation,
) -> Result<bool, OracleError> {
    if i.true_atoms.len() > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooManyAtoms {
            atoms: i.true_atoms.len(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    if !is_model(gp, i) {
        return Ok(false);
    }
    let reduct = flp_reduct(gp, i);
    let atoms: Vec<&Atom> = i.true_atoms.iter().collect();
    let full = (1u64 << atoms.len()) - 1;
    for mask in 0..full {
        let j = Interpretation::new(
            atoms
                .iter()
                .enumerate()
                .filter(|(k, _)| mask >> k & 1 == 1)
                .map(|(_, a)| (*a).clone()),
        );
        if is_model(&reduct, &j) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BruteForceMode {
    /// Guess the truth of atoms that occur negated, derive the rest.
    #[default]
    Guess,
    /// Try every subset of the head atoms.
    Exhaustive,
}

/// All answer sets of `p`, by brute force over its full grounding.
pub fn enumerate_answer_sets_bruteforce(
    p: &Program,
    mode: BruteForceMode,
    opts: GroundOptions,
) -> Result<BTreeSet<Interpretation>, OracleError> {
    let gp = full_ground(p, opts)?;
    let heads = gp.heads();
    let pool: Vec<Atom> = match mode {
        BruteForceMode::Exhaustive => heads.iter().cloned().collect(),
        BruteForceMode::Guess => gp
            .rules
            .iter()
            .flat_map(|r| r.negative.iter())
            .filter(|a| heads.contains(a))
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    if pool.len() > EXHAUSTIVE_LIMIT {
        return Err(OracleError::TooManyAtoms {
            atoms: pool.len(),
            limit: EXHAUSTIVE_LIMIT,
        });
    }
    let mut found = BTreeSet::new();
    for mask in 0..(1u64 << pool.len()) {
        let guess: BTreeSet<&Atom> = pool
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| a)
            .collect();
        let candidate = match mode {
            BruteForceMode::Exhaustive => Interpretation::new(guess.into_iter().cloned()),
            BruteForceMode::Guess => {
                let applicable = gp
                    .rules
                    .iter()
                    .filter(|r| !r.negative.iter().any(|a| guess.contains(a)));
                let m = least_model(applicable);
                if pool.iter().any(|a| m.contains(a) != guess.contains(a)) {
                    continue;
                }
                Interpretation::new(m)
            }
        };
        if is_answer_set(&gp, &candidate) {
            found.insert(candidate);
        }
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::{parse_atom, parse_program};

    #[test]
    fn complements_restore_choice_answer_sets() {
        let g = gp("q(1). q(2). {p(X)} :- q(X).");
        let vis = [
            parse_atom("q(1)").unwrap(),
            parse_atom("q(2)").unwrap(),
            parse_atom("p(1)").unwrap(),
        ];
        let i = Interpretation::with_complements(vis.iter().cloned(), &g);
        assert_eq!(i.true_atoms.len(), 4);
        assert!(is_answer_set(&g, &i));
        assert_eq!(i.visible(), vis.into_iter().collect());
    }

    fn interp(atoms: &[&str]) -> Interpretation {
        Interpretation::new(atoms.iter().map(|a| parse_atom(a).unwrap()))
    }

    fn gp(text: &str) -> GroundProgram {
        full_ground(&parse_program(text).unwrap(), GroundOptions::default()).unwrap()
    }

    #[test]
    fn grounds_over_constants() {
        let g = gp("q(1). q(2). p(X) :- q(X).");
        let rules: Vec<String> = g.rules.iter().map(|r| r.to_string()).collect();
        assert!(rules.contains(&"p(1) :- q(1).".to_string()));
        assert!(rules.contains(&"p(2) :- q(2).".to_string()));
        assert_eq!(g.rules.len(), 4);
    }

    #[test]
    fn ground_program_is_fixed_point() {
        let p = parse_program("a :- not b. b :- not a. :- a, b.").unwrap();
        let g = full_ground(&p, GroundOptions::default()).unwrap();
        assert_eq!(g.rules, p.rules.iter().cloned().collect());
    }

    #[test]
    fn cap_is_enforced() {
        let mut text: String = (1..=100).map(|i| format!("d({i}). ")).collect();
        text.push_str("t(X,Y,Z) :- d(X), d(Y), d(Z).");
        let p = parse_program(&text).unwrap();
        let err = full_ground(
            &p,
            GroundOptions {
                cap: 100_000,
                drop_inactive: false,
            },
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::Cap { needed, .. } if needed >= 1_000_000));
    }

    #[test]
    fn inactive_filter() {
        let p = parse_program("q(1). p(X) :- q(X), s(X).").unwrap();
        let g = full_ground(
            &p,
            GroundOptions {
                drop_inactive: true,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(g.rules.len(), 1);
    }

    #[test]
    fn reduct_examples() {
        let g = gp("a :- not b. b :- not a.");
        let r = flp_reduct(&g, &interp(&["a"]));
        let rules: Vec<String> = r.rules.iter().map(|r| r.to_string()).collect();
        assert_eq!(rules, ["a :- not b."]);

        let pos = gp("a :- b. b :- c.");
        assert!(flp_reduct(&pos, &Interpretation::default())
            .rules
            .is_empty());

        let facts = gp("a. b :- not a.");
        assert!(flp_reduct(&facts, &Interpretation::default())
            .rules
            .contains(&parse_program("a.").unwrap().rules[0]));
    }

    #[test]
    fn answer_set_examples() {
        let g = gp("a :- not b. b :- not a.");
        assert!(is_answer_set(&g, &interp(&["a"])));
        assert!(!is_answer_set(&g, &interp(&["a", "b"])));
        let loop_ = gp("a :- a.");
        assert!(!is_answer_set(&loop_, &interp(&["a"])));
        assert!(is_answer_set(&loop_, &interp(&[])));
    }

    #[test]
    fn exhaustive_check_agrees() {
        let g = gp("a :- not b. b :- not a. c :- a. c :- d. d :- c.");
        for cand in [
            &["a", "c"][..],
            &["b"],
            &["a", "c", "d"],
            &["b", "c", "d"],
            &[],
        ] {
            let i = interp(cand);
            assert_eq!(
                is_answer_set(&g, &i),
                is_answer_set_exhaustive(&g, &i).unwrap(),
                "{cand:?}"
            );
        }
    }

    #[test]
    fn bruteforce_examples() {
        for mode in [BruteForceMode::Guess, BruteForceMode::Exhaustive] {
            let p = parse_program("a :- not b. b :- not a.").unwrap();
            let got = enumerate_answer_sets_bruteforce(&p, mode, GroundOptions::default()).unwrap();
            assert_eq!(got, [interp(&["a"]), interp(&["b"])].into());

            let p = parse_program("a.").unwrap();
            let got = enumerate_answer_sets_bruteforce(&p, mode, GroundOptions::default()).unwrap();
            assert_eq!(got, [interp(&["a"])].into());

            let p = parse_program("a :- not a.").unwrap();
            let got = enumerate_answer_sets_bruteforce(&p, mode, GroundOptions::default()).unwrap();
            assert!(got.is_empty());
        }
    }

    #[test]
    fn choice_desugaring_matches_hand_expansion() {
        let p = parse_program("{a}. {b} :- a. :- b, not a.").unwrap();
        let got: BTreeSet<BTreeSet<Atom>> =
            enumerate_answer_sets_bruteforce(&p, BruteForceMode::Guess, GroundOptions::default())
                .unwrap()
                .iter()
                .map(Interpretation::visible)
                .collect();
        let hand =
            parse_program("a :- not na. na :- not a. b :- a, not nb. nb :- a, not b. :- b, not a.")
                .unwrap();
        let expected: BTreeSet<BTreeSet<Atom>> = enumerate_answer_sets_bruteforce(
            &hand,
            BruteForceMode::Exhaustive,
            GroundOptions::default(),
        )
        .unwrap()
        .iter()
        .map(|i| {
            i.true_atoms
                .iter()
                .filter(|a| !a.name.starts_with('n'))
                .cloned()
                .collect()
        })
        .collect();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 3);
    }
}
