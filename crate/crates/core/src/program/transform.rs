use std::collections::BTreeSet;

use thiserror::Error;

use super::{
    Atom, Constant, Predicate, Program, Rule, Substitution, Term, Variable, COMPLEMENT_PREFIX,
};

/// Outcome of the safety check: every variable of a rule must occur in its
/// positive body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Safety {
    Ok,
    Violation(BTreeSet<Variable>),
}

pub fn check_safety(rule: &Rule) -> Safety {
    let bound = rule.positive_vars();
    let unsafe_vars: BTreeSet<Variable> = rule
        .vars()
        .into_iter()
        .filter(|v| !bound.contains(v))
        .collect();
    if unsafe_vars.is_empty() {
        Safety::Ok
    } else {
        Safety::Violation(unsafe_vars)
    }
}

/// A choice rule as written in the input, before desugaring. Only a single
/// unbounded element is supported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceRule {
    pub elements: Vec<Atom>,
    pub lower: Option<i64>,
    pub upper: Option<i64>,
    pub positive: Vec<Atom>,
    pub negative: Vec<Atom>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DesugarError {
    #[error("cardinality bounds on choice rules")]
    Bounds,
    #[error("choice rules with {0} elements (exactly one is supported)")]
    Elements(usize),
}

/// Complement atom `_not_p(..)` for `p(..)`.
pub fn complement(atom: &Atom) -> Atom {
    Atom {
        name: format!("{COMPLEMENT_PREFIX}{}", atom.name).into(),
        args: atom.args.clone(),
    }
}

/// `{h} :- body.` becomes `h :- body, not h'.` and `h' :- body, not h.`
pub fn desugar_choice(choice: &ChoiceRule) -> Result<[Rule; 2], DesugarError> {
    if choice.lower.is_some() || choice.upper.is_some() {
        return Err(DesugarError::Bounds);
    }
    let [head] = choice.elements.as_slice() else {
        return Err(DesugarError::Elements(choice.elements.len()));
    };
    let comp = complement(head);
    let with_neg = |extra: &Atom| {
        let mut neg = choice.negative.clone();
        neg.push(extra.clone());
        neg
    };
    Ok([
        Rule::new(Some(head.clone()), choice.positive.clone(), with_neg(&comp)),
        Rule::new(Some(comp.clone()), choice.positive.clone(), with_neg(head)),
    ])
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstitutionError {
    #[error("substitution does not cover variable {0}")]
    Incomplete(Variable),
}

/// Applies `sigma` to every atom of `rule`; the substitution must bind all
/// variables of the rule.
pub fn apply_substitution(rule: &Rule, sigma: &Substitution) -> Result<Rule, SubstitutionError> {
    if let Some(v) = rule.vars().into_iter().find(|v| sigma.get(v).is_none()) {
        return Err(SubstitutionError::Incomplete(v));
    }
    Ok(Rule::new(
        rule.head.as_ref().map(|h| sigma.apply_atom(h)),
        rule.positive.iter().map(|a| sigma.apply_atom(a)).collect(),
        rule.negative.iter().map(|a| sigma.apply_atom(a)).collect(),
    ))
}

/// Static program information used by the inactivity test.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProgramMeta {
    /// `pred(heads(P))`, complement heads included.
    pub head_predicates: BTreeSet<Predicate>,
    /// Ground atoms stated as facts.
    pub fact_atoms: BTreeSet<Atom>,
    /// Herbrand universe: all constants occurring in the program.
    pub constants: BTreeSet<Constant>,
}

pub fn program_meta(program: &Program) -> ProgramMeta {
    let mut meta = ProgramMeta::default();
    for rule in &program.rules {
        if let Some(h) = &rule.head {
            meta.head_predicates.insert(h.predicate());
            if rule.is_fact() && h.is_ground() {
                meta.fact_atoms.insert(h.clone());
            }
        }
        for atom in rule.atoms() {
            for t in &atom.args {
                if let Term::Const(c) = t {
                    meta.constants.insert(c.clone());
                }
            }
        }
    }
    meta
}
