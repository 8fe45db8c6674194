//! Lazy-grounding strategies.
//!
//! Two layers live here. The functions in this file work on AST values
//! ([`Assignment`], [`GrounderMemory`], [`Rule`]) and implement the strategy
//! definitions directly; they are the reference the tests reason about. The
//! [`LazyGrounder`] in `engine` implements the same filters over interned
//! atoms and is what the solver calls.

mod compiled;
mod engine;
mod join;
mod store;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::program::{
    apply_substitution, Atom, Predicate, ProgramMeta, Rule, Substitution, Variable,
};

pub use compiled::{CompiledRule, PTerm, Pattern};
pub use engine::{Instance, LazyGrounder};
pub use join::{accepts, join_order, Filter, Join, TruthView};
pub use store::{Args, AtomId, AtomStore, ConstId, GroundAtom, PredId};

/// A natural number or `inf`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    Finite(u32),
    Unbounded,
}

impl Bound {
    pub fn admits(self, n: u32) -> bool {
        match self {
            Bound::Finite(k) => n <= k,
            Bound::Unbounded => true,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(k) => write!(f, "{k}"),
            Bound::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            return Ok(Bound::Unbounded);
        }
        s.parse()
            .map(Bound::Finite)
            .map_err(|_| StrategyParseError(format!("invalid bound `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StrategyFamily {
    Default,
    KUnassigned { k_co: Bound, k_ru: Bound },
}

/// Strategy selection. Text form: `default`, `k:<k_co>,<k_ru>`, each
/// optionally followed by `+acc`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StrategyConfig {
    pub family: StrategyFamily,
    pub accumulator: bool,
}

impl StrategyConfig {
    pub const DEFAULT: StrategyConfig = StrategyConfig {
        family: StrategyFamily::Default,
        accumulator: false,
    };

    pub fn k_unassigned(k_co: Bound, k_ru: Bound) -> Self {
        StrategyConfig {
            family: StrategyFamily::KUnassigned { k_co, k_ru },
            accumulator: false,
        }
    }

    pub fn with_accumulator(self, accumulator: bool) -> Self {
        StrategyConfig {
            accumulator,
            ..self
        }
    }
}

impl Default for StrategyConfig {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct StrategyParseError(pub String);

impl FromStr for StrategyConfig {
    type Err = StrategyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (base, accumulator) = match s.strip_suffix("+acc") {
            Some(b) => (b, true),
            None => (s, false),
        };
        let family = if base == "default" {
            StrategyFamily::Default
        } else if let Some(ks) = base.strip_prefix("k:") {
            let (co, ru) = ks.split_once(',').ok_or_else(|| {
                StrategyParseError(format!("expected k:<k_co>,<k_ru>, got `{s}`"))
            })?;
            StrategyFamily::KUnassigned {
                k_co: co.trim().parse()?,
                k_ru: ru.trim().parse()?,
            }
        } else {
            return Err(StrategyParseError(format!("unknown strategy `{s}`")));
        };
        Ok(StrategyConfig {
            family,
            accumulator,
        })
    }
}

impl fmt::Display for StrategyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            StrategyFamily::Default => f.write_str("default")?,
            StrategyFamily::KUnassigned { k_co, k_ru } => write!(f, "k:{k_co},{k_ru}")?,
        }
        if self.accumulator {
            f.write_str("+acc")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundingError {
    #[error("expected a ground rule, got `{0}`")]
    NonGround(Rule),
}

/// Signed ground atoms `A⁺` / `A⁻`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub positive: BTreeSet<Atom>,
    pub negative: BTreeSet<Atom>,
}

impl Assignment {
    pub fn new(
        positive: impl IntoIterator<Item = Atom>,
        negative: impl IntoIterator<Item = Atom>,
    ) -> Self {
        Assignment {
            positive: positive.into_iter().collect(),
            negative: negative.into_iter().collect(),
        }
    }

    pub fn is_consistent(&self) -> bool {
        self.positive.is_disjoint(&self.negative)
    }
}

/// `A ⊎ A′`: componentwise union.
pub fn combine(a: &Assignment, b: &Assignment) -> Assignment {
    Assignment {
        positive: a.positive.union(&b.positive).cloned().collect(),
        negative: a.negative.union(&b.negative).cloned().collect(),
    }
}

/// Atoms the grounder remembers across calls.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GrounderMemory {
    pub atoms: BTreeSet<Atom>,
}

impl GrounderMemory {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Self {
        GrounderMemory {
            atoms: atoms.into_iter().collect(),
        }
    }

    /// The memory read as an assignment with nothing false.
    pub fn as_assignment(&self) -> Assignment {
        Assignment {
            positive: self.atoms.clone(),
            negative: BTreeSet::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundInstance {
    pub ground: Rule,
    pub origin: Rule,
    pub substitution: Substitution,
}

impl GroundInstance {
    pub fn new(origin: &Rule, substitution: Substitution) -> Result<Self, GroundingError> {
        let ground = apply_substitution(origin, &substitution)
            .map_err(|_| GroundingError::NonGround(origin.clone()))?;
        Ok(GroundInstance {
            ground,
            origin: origin.clone(),
            substitution,
        })
    }
}

/// Positive body literals of the origin rule whose image is true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignedLiterals {
    pub literals: Vec<Atom>,
}

impl AssignedLiterals {
    pub fn of(inst: &GroundInstance, positive: &BTreeSet<Atom>) -> Self {
        AssignedLiterals {
            literals: inst
                .origin
                .positive
                .iter()
                .filter(|l| positive.contains(&inst.substitution.apply_atom(l)))
                .cloned()
                .collect(),
        }
    }

    pub fn vars(&self) -> BTreeSet<Variable> {
        self.literals
            .iter()
            .flat_map(|a| a.vars().cloned())
            .collect()
    }

    pub fn is_all_variable_assigning(&self, origin: &Rule) -> bool {
        self.vars() == origin.vars()
    }
}

pub fn is_inactive(g: &Rule, meta: &ProgramMeta) -> Result<bool, GroundingError> {
    if !g.is_ground() {
        return Err(GroundingError::NonGround(g.clone()));
    }
    Ok(g.positive
        .iter()
        .any(|a| !meta.head_predicates.contains(&a.predicate()))
        || g.negative.iter().any(|a| meta.fact_atoms.contains(a)))
}

pub fn is_of_interest(g: &Rule, a: &Assignment) -> bool {
    g.positive.iter().all(|b| a.positive.contains(b))
}

pub fn is_weakly_applicable(
    g: &Rule,
    a: &Assignment,
    meta: &ProgramMeta,
) -> Result<bool, GroundingError> {
    Ok(!g.positive.iter().any(|b| a.negative.contains(b)) && !is_inactive(g, meta)?)
}

pub fn is_k_unassigned(
    inst: &GroundInstance,
    a: &Assignment,
    k: Bound,
    meta: &ProgramMeta,
) -> bool {
    if !is_weakly_applicable(&inst.ground, a, meta).unwrap_or(false) {
        return false;
    }
    let assigned = AssignedLiterals::of(inst, &a.positive);
    let unassigned = inst.origin.positive.len() - assigned.literals.len();
    assigned.is_all_variable_assigning(&inst.origin) && k.admits(unassigned as u32)
}

/// An [`Assignment`] interned into a store.
pub(crate) struct SetView {
    positive: Vec<bool>,
    negative: Vec<bool>,
}

impl SetView {
    pub(crate) fn intern(store: &mut AtomStore, a: &Assignment) -> Self {
        let pos: Vec<AtomId> = a.positive.iter().map(|x| store.intern_atom(x)).collect();
        let neg: Vec<AtomId> = a.negative.iter().map(|x| store.intern_atom(x)).collect();
        let mut view = SetView {
            positive: vec![false; store.len()],
            negative: vec![false; store.len()],
        };
        for id in pos {
            view.positive[id.index()] = true;
        }
        for id in neg {
            view.negative[id.index()] = true;
        }
        view
    }
}

impl TruthView for SetView {
    fn is_true(&self, atom: AtomId) -> bool {
        self.positive.get(atom.index()).copied().unwrap_or(false)
    }

    fn is_false(&self, atom: AtomId) -> bool {
        self.negative.get(atom.index()).copied().unwrap_or(false)
    }
}

/// Every instance `rσ` for which some `L ⊆ B⁺(r)` binding all variables of
/// `r` has `Lσ ⊆ A⁺` and leaves at most `k` positive literals outside `L`.
/// Inactivity and `A⁻` are not consulted.
pub fn enumerate_candidates(
    r: &Rule,
    match_against: &Assignment,
    k: Bound,
) -> BTreeSet<GroundInstance> {
    let mut store = AtomStore::new();
    let view = SetView::intern(
        &mut store,
        &Assignment::new(match_against.positive.iter().cloned(), []),
    );
    let heads: BTreeSet<Predicate> = r.positive.iter().map(Atom::predicate).collect();
    let rule = CompiledRule::compile(r, &mut store, &heads);
    let mut counts = Vec::new();
    let order = join_order(&store, &view, &rule, &mut counts);
    let join = Join {
        store: &store,
        view: &view,
        rule: &rule,
        max_deferred: k,
        prune_false: false,
    };
    join.run(&order)
        .into_iter()
        .map(|binding| {
            GroundInstance::new(r, rule.substitution(&store, &binding))
                .expect("join binds every variable")
        })
        .collect()
}

/// Default strategy: instances that are not inactive and of interest.
pub fn ground_default(
    a: &Assignment,
    _memory: &GrounderMemory,
    r: &Rule,
    meta: &ProgramMeta,
) -> (GrounderMemory, BTreeSet<GroundInstance>) {
    (
        GrounderMemory::new(a.positive.iter().cloned()),
        of_interest_instances(r, a, meta),
    )
}

/// k-unassigned strategy with separate bounds for constraints and rules.
pub fn ground_k_unassigned(
    a: &Assignment,
    _memory: &GrounderMemory,
    r: &Rule,
    k_co: Bound,
    k_ru: Bound,
    meta: &ProgramMeta,
) -> (GrounderMemory, BTreeSet<GroundInstance>) {
    let k = if r.is_constraint() { k_co } else { k_ru };
    (
        GrounderMemory::new(a.positive.iter().cloned()),
        k_unassigned_instances(r, a, k, meta),
    )
}

/// Accumulator variants: the memory grows by `A⁺` and matching runs against
/// `G′ ⊎ A`.
pub fn ground_accumulator(
    a: &Assignment,
    memory: &GrounderMemory,
    r: &Rule,
    config: StrategyConfig,
    meta: &ProgramMeta,
) -> (GrounderMemory, BTreeSet<GroundInstance>) {
    let next = GrounderMemory::new(memory.atoms.union(&a.positive).cloned());
    let matching = combine(&next.as_assignment(), a);
    let instances = match config.family {
        StrategyFamily::Default => of_interest_instances(r, &matching, meta),
        StrategyFamily::KUnassigned { k_co, k_ru } => {
            let k = if r.is_constraint() { k_co } else { k_ru };
            k_unassigned_instances(r, &matching, k, meta)
        }
    };
    (next, instances)
}

/// Dispatches on the configuration.
pub fn ground(
    config: StrategyConfig,
    a: &Assignment,
    memory: &GrounderMemory,
    r: &Rule,
    meta: &ProgramMeta,
) -> (GrounderMemory, BTreeSet<GroundInstance>) {
    match (config.accumulator, config.family) {
        (true, _) => ground_accumulator(a, memory, r, config, meta),
        (false, StrategyFamily::Default) => ground_default(a, memory, r, meta),
        (false, StrategyFamily::KUnassigned { k_co, k_ru }) => {
            ground_k_unassigned(a, memory, r, k_co, k_ru, meta)
        }
    }
}

fn of_interest_instances(r: &Rule, a: &Assignment, meta: &ProgramMeta) -> BTreeSet<GroundInstance> {
    enumerate_candidates(r, a, Bound::Finite(0))
        .into_iter()
        .filter(|i| is_of_interest(&i.ground, a) && !is_inactive(&i.ground, meta).unwrap_or(true))
        .collect()
}

fn k_unassigned_instances(
    r: &Rule,
    a: &Assignment,
    k: Bound,
    meta: &ProgramMeta,
) -> BTreeSet<GroundInstance> {
    enumerate_candidates(r, a, k)
        .into_iter()
        .filter(|i| is_k_unassigned(i, a, k, meta))
        .collect()
}
