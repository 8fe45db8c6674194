//! The stateful grounder a solver drives: one strategy, persistent memory,
//! and duplicate suppression across calls.

use rustc_hash::FxHashSet;

use super::compiled::CompiledRule;
use super::join::{accepts, join_order, Filter, Join, TruthView};
use super::store::{Args, AtomId, AtomStore};
use super::{StrategyConfig, StrategyFamily};
use crate::program::{Program, ProgramMeta};

/// A freshly emitted ground instance, with all its atoms interned.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    /// Index into [`LazyGrounder::rules`].
    pub rule: usize,
    pub binding: Args,
    pub head: Option<AtomId>,
    pub positive: Vec<AtomId>,
    pub negative: Vec<AtomId>,
}

/// Grounder memory `G` laid over an assignment: true if in `G` or true in
/// the assignment, false only where the assignment says so.
struct WithMemory<'a, V: ?Sized> {
    memory: &'a [bool],
    inner: &'a V,
}

impl<V: TruthView + ?Sized> TruthView for WithMemory<'_, V> {
    fn is_true(&self, atom: AtomId) -> bool {
        self.memory.get(atom.index()).copied().unwrap_or(false) || self.inner.is_true(atom)
    }

    fn is_false(&self, atom: AtomId) -> bool {
        self.inner.is_false(atom)
    }
}

pub struct LazyGrounder {
    config: StrategyConfig,
    rules: Vec<CompiledRule>,
    facts: FxHashSet<AtomId>,
    memory: Vec<bool>,
    emitted: FxHashSet<(u32, Args)>,
    counts: Vec<Option<usize>>,
}

impl LazyGrounder {
    /// `rules` are the non-ground rules of the program; `facts` the interned
    /// fact atoms (used by the inactivity test).
    pub fn new(config: StrategyConfig, rules: Vec<CompiledRule>, facts: FxHashSet<AtomId>) -> Self {
        LazyGrounder {
            config,
            rules,
            facts,
            memory: Vec::new(),
            emitted: FxHashSet::default(),
            counts: Vec::new(),
        }
    }

    /// Compiles the non-ground rules of a program and interns its facts.
    pub fn for_program(
        config: StrategyConfig,
        program: &Program,
        meta: &ProgramMeta,
        store: &mut AtomStore,
    ) -> Self {
        let facts = meta
            .fact_atoms
            .iter()
            .map(|a| store.intern_atom(a))
            .collect();
        let rules = program
            .rules
            .iter()
            .filter(|r| !r.is_ground())
            .map(|r| CompiledRule::compile(r, store, &meta.head_predicates))
            .collect();
        Self::new(config, rules, facts)
    }

    pub fn config(&self) -> StrategyConfig {
        self.config
    }

    pub fn rules(&self) -> &[CompiledRule] {
        &self.rules
    }

    pub fn emitted_count(&self) -> usize {
        self.emitted.len()
    }

    /// Atoms currently held in the grounder memory (accumulator strategies only).
    pub fn memory(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.memory
            .iter()
            .enumerate()
            .filter(|(_, &m)| m)
            .map(|(i, _)| AtomId(i as u32))
    }

    fn filter_for(&self, rule: &CompiledRule) -> Filter {
        match self.config.family {
            StrategyFamily::Default => Filter::OfInterest,
            StrategyFamily::KUnassigned { k_co, k_ru } => {
                Filter::KUnassigned(if rule.is_constraint() { k_co } else { k_ru })
            }
        }
    }

    /// One strategy call for every rule against the current assignment.
    /// Returns only instances not emitted by earlier calls, in rule order and
    /// ascending binding order within a rule.
    pub fn step<V: TruthView + ?Sized>(
        &mut self,
        store: &mut AtomStore,
        view: &V,
    ) -> Vec<Instance> {
        let filters: Vec<Filter> = self.rules.iter().map(|r| self.filter_for(r)).collect();
        self.counts.clear();
        let found = if self.config.accumulator {
            self.memory.resize(store.len(), false);
            for (i, m) in self.memory.iter_mut().enumerate() {
                *m |= view.is_true(AtomId(i as u32));
            }
            let matching = WithMemory {
                memory: &self.memory,
                inner: view,
            };
            collect(
                store,
                &matching,
                &self.rules,
                &filters,
                &self.facts,
                &mut self.emitted,
                &mut self.counts,
            )
        } else {
            collect(
                store,
                view,
                &self.rules,
                &filters,
                &self.facts,
                &mut self.emitted,
                &mut self.counts,
            )
        };
        found
            .into_iter()
            .map(|(ri, binding)| {
                let rule = &self.rules[ri];
                let mut intern =
                    |p: &super::compiled::Pattern| store.intern(p.pred, &p.instantiate(&binding));
                Instance {
                    rule: ri,
                    head: rule.head.as_ref().map(&mut intern),
                    positive: rule.positive.iter().map(&mut intern).collect(),
                    negative: rule.negative.iter().map(&mut intern).collect(),
                    binding,
                }
            })
            .collect()
    }
}

fn collect<M: TruthView + ?Sized>(
    store: &AtomStore,
    matching: &M,
    rules: &[CompiledRule],
    filters: &[Filter],
    facts: &FxHashSet<AtomId>,
    emitted: &mut FxHashSet<(u32, Args)>,
    counts: &mut Vec<Option<usize>>,
) -> Vec<(usize, Args)> {
    let mut found = Vec::new();
    for (ri, rule) in rules.iter().enumerate() {
        if rule.dead {
            continue;
        }
        let filter = filters[ri];
        let order = join_order(store, matching, rule, counts);
        let join = Join {
            store,
            view: matching,
            rule,
            max_deferred: filter.max_deferred(),
            prune_false: matches!(filter, Filter::KUnassigned(_)),
        };
        let mut candidates = join.run(&order);
        candidates.sort_unstable();
        candidates.dedup();
        for binding in candidates {
            let key = (ri as u32, binding);
            if emitted.contains(&key) {
                continue;
            }
            if accepts(store, matching, rule, &key.1, filter, |a| {
                facts.contains(&a)
            }) {
                found.push((ri, key.1.clone()));
                emitted.insert(key);
            }
        }
    }
    found
}
