use std::collections::BTreeSet;

use smallvec::SmallVec;

use super::store::{Args, AtomStore, ConstId, PredId};
use crate::program::{Atom, Predicate, Rule, Substitution, Term, Variable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PTerm {
    Const(ConstId),
    Var(u32),
}

/// An atom with constants interned and variables numbered per rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pattern {
    pub pred: PredId,
    pub args: SmallVec<[PTerm; 4]>,
}

impl Pattern {
    pub fn vars(&self) -> impl Iterator<Item = u32> + '_ {
        self.args.iter().filter_map(|t| match t {
            PTerm::Var(v) => Some(*v),
            PTerm::Const(_) => None,
        })
    }

    pub fn is_bound(&self, binding: &[Option<ConstId>]) -> bool {
        self.vars().all(|v| binding[v as usize].is_some())
    }

    /// Ground arguments under a binding that covers all variables of the pattern.
    pub fn instantiate(&self, binding: &[ConstId]) -> Args {
        self.args
            .iter()
            .map(|t| match *t {
                PTerm::Const(c) => c,
                PTerm::Var(v) => binding[v as usize],
            })
            .collect()
    }

    pub fn instantiate_partial(&self, binding: &[Option<ConstId>]) -> Option<Args> {
        self.args
            .iter()
            .map(|t| match *t {
                PTerm::Const(c) => Some(c),
                PTerm::Var(v) => binding[v as usize],
            })
            .collect()
    }
}

/// A rule prepared for matching against interned atoms.
#[derive(Clone, Debug)]
pub struct CompiledRule {
    pub origin: Rule,
    pub vars: Vec<Variable>,
    pub head: Option<Pattern>,
    pub positive: Vec<Pattern>,
    pub negative: Vec<Pattern>,
    /// Some positive body predicate heads no rule, so every instance is inactive.
    pub dead: bool,
}

impl CompiledRule {
    pub fn compile(
        rule: &Rule,
        store: &mut AtomStore,
        head_predicates: &BTreeSet<Predicate>,
    ) -> Self {
        let vars: Vec<Variable> = rule.vars().into_iter().collect();
        let mut pattern = |a: &Atom| Pattern {
            pred: store.intern_pred(&a.predicate()),
            args: a
                .args
                .iter()
                .map(|t| match t {
                    Term::Const(c) => PTerm::Const(store.intern_const(c)),
                    Term::Var(v) => PTerm::Var(vars.binary_search(v).unwrap() as u32),
                })
                .collect(),
        };
        let head = rule.head.as_ref().map(&mut pattern);
        let positive: Vec<Pattern> = rule.positive.iter().map(&mut pattern).collect();
        let negative: Vec<Pattern> = rule.negative.iter().map(&mut pattern).collect();
        let dead = rule
            .positive
            .iter()
            .any(|a| !head_predicates.contains(&a.predicate()));
        CompiledRule {
            origin: rule.clone(),
            vars,
            head,
            positive,
            negative,
            dead,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn substitution(&self, store: &AtomStore, binding: &[ConstId]) -> Substitution {
        let mut s = Substitution::new();
        for (v, &c) in self.vars.iter().zip(binding) {
            s.insert(v.clone(), store.constant(c).clone());
        }
        s
    }

    /// Binds the head pattern against a ground atom. Returns the partial
    /// binding, or `None` if the head does not unify.
    pub fn unify_head(&self, pred: PredId, args: &[ConstId]) -> Option<Vec<Option<ConstId>>> {
        let head = self.head.as_ref()?;
        if head.pred != pred || head.args.len() != args.len() {
            return None;
        }
        let mut binding = vec![None; self.num_vars()];
        for (t, &c) in head.args.iter().zip(args) {
            match *t {
                PTerm::Const(k) if k != c => return None,
                PTerm::Const(_) => {}
                PTerm::Var(v) => match binding[v as usize] {
                    Some(prev) if prev != c => return None,
                    _ => binding[v as usize] = Some(c),
                },
            }
        }
        Some(binding)
    }
}
