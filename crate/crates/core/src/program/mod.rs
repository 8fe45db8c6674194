//! Normal logic programs: terms, atoms, rules, the text parser and the
//! program-level transformations (safety, choice desugaring, substitution).

mod parser;
mod transform;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub use parser::{parse_atom, parse_atom_set, parse_program, ParseError};
pub use transform::{
    apply_substitution, check_safety, desugar_choice, program_meta, ProgramMeta, Safety,
    SubstitutionError,
};

/// Predicate-name prefix reserved for the complement atoms introduced by
/// choice desugaring. The parser rejects identifiers starting with `_`, so
/// these never collide with user predicates.
pub const COMPLEMENT_PREFIX: &str = "_not_";

/// A constant of the Herbrand universe. Integers sort before symbols.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constant {
    Int(i64),
    Sym(Arc<str>),
}

impl Constant {
    pub fn sym(name: &str) -> Self {
        Constant::Sym(Arc::from(name))
    }
}

impl From<i64> for Constant {
    fn from(v: i64) -> Self {
        Constant::Int(v)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constant::Int(v) => write!(f, "{v}"),
            Constant::Sym(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(pub Arc<str>);

impl Variable {
    pub fn new(name: &str) -> Self {
        Variable(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A term is a constant or a variable; constants order before variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Const(Constant),
    Var(Variable),
}

impl Term {
    pub fn int(v: i64) -> Self {
        Term::Const(Constant::Int(v))
    }

    pub fn sym(name: &str) -> Self {
        Term::Const(Constant::sym(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(Variable::new(name))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => c.fmt(f),
            Term::Var(v) => v.fmt(f),
        }
    }
}

/// Predicate symbol with its arity, printed as `name/arity`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Predicate {
    pub name: Arc<str>,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: &str, arity: usize) -> Self {
        Predicate {
            name: Arc::from(name),
            arity,
        }
    }

    pub fn is_complement(&self) -> bool {
        self.name.starts_with(COMPLEMENT_PREFIX)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// `p(t1, ..., tn)`. The arity is the length of `args`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub name: Arc<str>,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(name: &str, args: Vec<Term>) -> Self {
        Atom {
            name: Arc::from(name),
            args,
        }
    }

    pub fn predicate(&self) -> Predicate {
        Predicate {
            name: self.name.clone(),
            arity: self.args.len(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn vars(&self) -> impl Iterator<Item = &Variable> {
        self.args.iter().filter_map(Term::as_var)
    }

    pub fn is_complement(&self) -> bool {
        self.name.starts_with(COMPLEMENT_PREFIX)
    }
}

impl Ord for Atom {
    fn cmp(&self, other: &Self) -> Ordering {
        self.name
            .cmp(&other.name)
            .then(self.args.len().cmp(&other.args.len()))
            .then_with(|| self.args.cmp(&other.args))
    }
}

impl PartialOrd for Atom {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, t) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// An atom or its default negation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Atom,
    pub negated: bool,
}

impl Literal {
    pub fn pos(atom: Atom) -> Self {
        Literal {
            atom,
            negated: false,
        }
    }

    pub fn neg(atom: Atom) -> Self {
        Literal {
            atom,
            negated: true,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not ")?;
        }
        self.atom.fmt(f)
    }
}

/// A normal rule `h :- b1, ..., bm, not bm+1, ..., not bn.`
///
/// Bodies have set semantics: constructors drop repeated atoms while keeping
/// first-occurrence order, which is also the printing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rule {
    pub head: Option<Atom>,
    pub positive: Vec<Atom>,
    pub negative: Vec<Atom>,
}

impl Rule {
    pub fn new(head: Option<Atom>, positive: Vec<Atom>, negative: Vec<Atom>) -> Self {
        Rule {
            head,
            positive: dedup(positive),
            negative: dedup(negative),
        }
    }

    pub fn fact(head: Atom) -> Self {
        Rule::new(Some(head), Vec::new(), Vec::new())
    }

    pub fn constraint(positive: Vec<Atom>, negative: Vec<Atom>) -> Self {
        Rule::new(None, positive, negative)
    }

    pub fn is_constraint(&self) -> bool {
        self.head.is_none()
    }

    pub fn is_fact(&self) -> bool {
        self.head.is_some() && self.positive.is_empty() && self.negative.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.atoms().all(Atom::is_ground)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.head
            .iter()
            .chain(self.positive.iter())
            .chain(self.negative.iter())
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.atoms().flat_map(|a| a.vars().cloned()).collect()
    }

    pub fn positive_vars(&self) -> BTreeSet<Variable> {
        self.positive
            .iter()
            .flat_map(|a| a.vars().cloned())
            .collect()
    }

    pub fn body(&self) -> impl Iterator<Item = Literal> + '_ {
        self.positive
            .iter()
            .cloned()
            .map(Literal::pos)
            .chain(self.negative.iter().cloned().map(Literal::neg))
    }
}

fn dedup(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(h) = &self.head {
            write!(f, "{h}")?;
        }
        let mut first = true;
        for lit in self.body() {
            if first {
                if self.head.is_some() {
                    f.write_str(" ")?;
                }
                f.write_str(":- ")?;
                first = false;
            } else {
                f.write_str(", ")?;
            }
            write!(f, "{lit}")?;
        }
        if self.head.is_none() && first {
            f.write_str(":-")?;
        }
        f.write_str(".")
    }
}

/// A finite list of normal rules; choice rules are already desugared.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Self {
        Program { rules }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Concatenates two programs, e.g. an encoding and an instance.
    pub fn extend(&mut self, other: Program) {
        self.rules.extend(other.rules);
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A mapping from variables to constants.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution {
    pub bindings: BTreeMap<Variable, Constant>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: &str, value: impl Into<Constant>) -> Self {
        self.bindings.insert(Variable::new(var), value.into());
        self
    }

    pub fn get(&self, var: &Variable) -> Option<&Constant> {
        self.bindings.get(var)
    }

    pub fn insert(&mut self, var: Variable, value: Constant) {
        self.bindings.insert(var, value);
    }

    pub fn domain(&self) -> BTreeSet<Variable> {
        self.bindings.keys().cloned().collect()
    }

    /// Applies the substitution to an atom; unbound variables stay in place.
    pub fn apply_atom(&self, atom: &Atom) -> Atom {
        Atom {
            name: atom.name.clone(),
            args: atom
                .args
                .iter()
                .map(|t| match t {
                    Term::Var(v) => match self.bindings.get(v) {
                        Some(c) => Term::Const(c.clone()),
                        None => t.clone(),
                    },
                    Term::Const(_) => t.clone(),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, c)) in self.bindings.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}->{c}")?;
        }
        f.write_str("}")
    }
}

/// Formats a set of ground atoms as `{a, p(1,2)}` in canonical order.
pub fn format_atom_set<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> String {
    let sorted: BTreeSet<&Atom> = atoms.into_iter().collect();
    let mut out = String::from("{");
    for (i, a) in sorted.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&a.to_string());
    }
    out.push('}');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_order_puts_integers_first() {
        let mut ts = vec![Term::var("X"), Term::sym("a"), Term::int(2), Term::int(-1)];
        ts.sort();
        assert_eq!(
            ts,
            vec![Term::int(-1), Term::int(2), Term::sym("a"), Term::var("X")]
        );
    }

    #[test]
    fn atom_order_compares_arity_before_args() {
        let a = Atom::new("p", vec![Term::int(5)]);
        let b = Atom::new("p", vec![Term::int(1), Term::int(1)]);
        assert!(a < b);
    }

    #[test]
    fn rule_display() {
        let r = Rule::new(
            Some(Atom::new("p", vec![Term::var("X")])),
            vec![Atom::new("q", vec![Term::var("X")])],
            vec![Atom::new("r", vec![Term::var("X")])],
        );
        assert_eq!(r.to_string(), "p(X) :- q(X), not r(X).");
        assert_eq!(Rule::fact(Atom::new("a", vec![])).to_string(), "a.");
        let c = Rule::constraint(vec![Atom::new("a", vec![])], vec![]);
        assert_eq!(c.to_string(), ":- a.");
    }

    #[test]
    fn bodies_are_sets() {
        let d = Atom::new("dom", vec![Term::int(1)]);
        let r = Rule::constraint(vec![d.clone(), d.clone()], vec![]);
        assert_eq!(r.positive, vec![d]);
    }

    #[test]
    fn atom_set_formatting() {
        let s = format_atom_set(&[
            Atom::new("b", vec![]),
            Atom::new("a", vec![Term::int(1), Term::sym("x")]),
        ]);
        assert_eq!(s, "{a(1,x), b}");
        assert_eq!(format_atom_set(&[]), "{}");
    }
}
