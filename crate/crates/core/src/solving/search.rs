//! The interleaved ground-and-solve loop.

use std::collections::BTreeSet;
use std::time::Instant;

use rustc_hash::{FxHashMap, FxHashSet};

use super::assignment::{Lit, NogoodId, TruthAssignment, Var};
use super::heuristic::{choose_branch, HeuristicState};
use super::nogoods::{analyze_with, NogoodStore, Unsatisfiable};
use super::translate::rule_to_nogoods;
use super::{SolveOptions, SolveStats, SolveStatus};
use crate::grounding::{
    AtomId, AtomStore, CompiledRule, ConstId, GroundAtom, LazyGrounder, PTerm, TruthView,
};
use crate::program::{Atom, Program, ProgramMeta};

const NO_VAR: u32 = u32::MAX;
/// Rule instances examined per unfounded-set explanation before giving up.
const JUSTIFY_BUDGET: usize = 200_000;
/// Atoms an unfounded set may grow to during one explanation.
const JUSTIFY_MAX_ATOMS: usize = 20_000;
/// Unfounded atoms tried one by one as seeds before falling back to the whole set.
const SEED_TRIES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum VarKind {
    Atom(AtomId),
    Body,
}

#[derive(Clone, Debug)]
struct GroundRule {
    head: Option<AtomId>,
    positive: Vec<AtomId>,
    negative: Vec<AtomId>,
}

/// Solver-side view the grounder matches against.
struct View<'a> {
    atom_var: &'a [u32],
    ta: &'a TruthAssignment,
}

impl View<'_> {
    fn value(&self, a: AtomId) -> Option<bool> {
        match self.atom_var.get(a.index()) {
            Some(&v) if v != NO_VAR => self.ta.value(Var(v)),
            _ => None,
        }
    }
}

impl TruthView for View<'_> {
    fn is_true(&self, atom: AtomId) -> bool {
        self.value(atom) == Some(true)
    }

    fn is_false(&self, atom: AtomId) -> bool {
        self.value(atom) == Some(false)
    }
}

pub(crate) struct Search {
    store: AtomStore,
    grounder: Option<LazyGrounder>,
    /// Every rule of the input program, used to explain unfounded atoms.
    all_rules: Vec<CompiledRule>,
    universe: Vec<ConstId>,
    atom_var: Vec<u32>,
    kinds: Vec<VarKind>,
    ta: TruthAssignment,
    nogoods: NogoodStore,
    heur: HeuristicState,
    rules: Vec<GroundRule>,
    rule_keys: FxHashSet<(Option<AtomId>, Vec<AtomId>, Vec<AtomId>)>,
    facts: Vec<AtomId>,
    /// Body atoms of the rules deriving each head.
    supports: FxHashMap<AtomId, Vec<Var>>,
    seen: Vec<bool>,
    pub stats: SolveStats,
    unsat: bool,
}

enum Candidate {
    AnswerSet(BTreeSet<Atom>),
    Rejected(Vec<Lit>),
}

impl Search {
    /// `ground` holds rules to assert up front; `grounder` (if any) handles
    /// the rest lazily. `source` is the original program.
    pub(crate) fn new(
        source: &Program,
        meta: &ProgramMeta,
        ground: &Program,
        grounder: Option<LazyGrounder>,
        store: AtomStore,
        opts: &SolveOptions,
    ) -> Self {
        let mut store = store;
        let all_rules = source
            .rules
            .iter()
            .filter(|r| !r.is_fact())
            .map(|r| CompiledRule::compile(r, &mut store, &meta.head_predicates))
            .collect();
        let universe = meta
            .constants
            .iter()
            .map(|c| store.intern_const(c))
            .collect();
        let mut s = Search {
            store,
            grounder,
            all_rules,
            universe,
            atom_var: Vec::new(),
            kinds: Vec::new(),
            ta: TruthAssignment::new(),
            nogoods: NogoodStore::new(),
            heur: HeuristicState::new(opts.heuristic),
            rules: Vec::new(),
            rule_keys: FxHashSet::default(),
            facts: Vec::new(),
            supports: FxHashMap::default(),
            seen: Vec::new(),
            stats: SolveStats::default(),
            unsat: false,
        };
        let mut batch = Vec::new();
        for r in &ground.rules {
            let head = r.head.as_ref().map(|h| s.store.intern_atom(h));
            let positive = r.positive.iter().map(|a| s.store.intern_atom(a)).collect();
            let negative = r.negative.iter().map(|a| s.store.intern_atom(a)).collect();
            batch.push(GroundRule {
                head,
                positive,
                negative,
            });
        }
        let complete = s.grounder.is_none();
        if s.add_rules(batch).is_err() || (complete && s.add_support_nogoods().is_err()) {
            s.unsat = true;
        }
        s
    }

    /// With every rule known in advance, a non-fact atom can only be true
    /// if one of its rule bodies is.
    fn add_support_nogoods(&mut self) -> Result<(), Unsatisfiable> {
        let facts: FxHashSet<AtomId> = self.facts.iter().copied().collect();
        for (i, &v) in self.atom_var.clone().iter().enumerate() {
            let a = AtomId(i as u32);
            if v == NO_VAR || facts.contains(&a) {
                continue;
            }
            let mut ng = vec![Lit::pos(Var(v))];
            if let Some(bodies) = self.supports.get(&a) {
                ng.extend(bodies.iter().map(|&b| Lit::neg(b)));
            }
            self.add_nogood(ng, false)?;
        }
        Ok(())
    }

    fn var_of(&mut self, a: AtomId, fresh: &mut Vec<Var>) -> Var {
        if self.atom_var.len() <= a.index() {
            self.atom_var.resize(a.index() + 1, NO_VAR);
        }
        match self.atom_var[a.index()] {
            NO_VAR => {
                let v = self.new_var(VarKind::Atom(a));
                self.atom_var[a.index()] = v.0;
                fresh.push(v);
                v
            }
            v => Var(v),
        }
    }

    fn new_var(&mut self, kind: VarKind) -> Var {
        let v = self.ta.new_var();
        self.kinds.push(kind);
        self.heur.add_var(v, kind == VarKind::Body);
        v
    }

    fn atom_value(&self, a: AtomId) -> Option<bool> {
        View {
            atom_var: &self.atom_var,
            ta: &self.ta,
        }
        .value(a)
    }

    /// Translates and asserts a batch of ground rules.
    fn add_rules(&mut self, batch: Vec<GroundRule>) -> Result<usize, Unsatisfiable> {
        let mut fresh = Vec::new();
        let mut pending: Vec<Vec<Lit>> = Vec::new();
        let mut added = 0;
        for mut r in batch {
            r.positive.sort_unstable();
            r.positive.dedup();
            r.negative.sort_unstable();
            r.negative.dedup();
            let key = (r.head, r.positive.clone(), r.negative.clone());
            if !self.rule_keys.insert(key) {
                continue;
            }
            added += 1;
            self.stats.rules += 1;
            let head = r.head.map(|h| self.var_of(h, &mut fresh));
            let pos: Vec<Var> = r
                .positive
                .iter()
                .map(|&a| self.var_of(a, &mut fresh))
                .collect();
            let neg: Vec<Var> = r
                .negative
                .iter()
                .map(|&a| self.var_of(a, &mut fresh))
                .collect();
            if r.positive.is_empty() && r.negative.is_empty() {
                match head {
                    Some(h) => {
                        self.facts.push(r.head.unwrap());
                        pending.push(vec![Lit::neg(h)]);
                    }
                    None => pending.push(Vec::new()),
                }
            } else {
                let beta = head.map(|_| {
                    let b = self.new_var(VarKind::Body);
                    fresh.push(b);
                    b
                });
                if let (Some(h), Some(b)) = (r.head, beta) {
                    self.supports.entry(h).or_default().push(b);
                }
                pending.extend(rule_to_nogoods(head, &pos, &neg, beta).expect("non-fact rule"));
            }
            self.rules.push(r);
        }
        let fresh_set: FxHashSet<Var> = fresh.into_iter().collect();
        self.heur.score_new(&pending, |v| fresh_set.contains(&v));
        for ng in pending {
            self.add_nogood(ng, false)?;
        }
        Ok(added)
    }

    fn backtrack(&mut self, level: u32) {
        for v in self.ta.backtrack(level) {
            self.heur.on_unassigned(v);
        }
    }

    /// Adds a nogood at any point of the search, repairing the assignment
    /// so that propagation invariants hold afterwards.
    fn add_nogood(&mut self, mut lits: Vec<Lit>, learned: bool) -> Result<(), Unsatisfiable> {
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return Ok(());
        }
        if lits.is_empty() {
            return Err(Unsatisfiable);
        }
        let ta = &self.ta;
        // Not-yet-holding literals first (unassigned before false), then
        // holding ones by descending level.
        lits.sort_by_key(|&l| match ta.lit_value(l) {
            None => (0, 0),
            Some(false) => (1, u32::MAX - ta.level(l.var())),
            Some(true) => (2, u32::MAX - ta.level(l.var())),
        });
        let open = lits.iter().take_while(|&&l| !ta.is_satisfied(l)).count();
        match open {
            0 => {
                let id = self.nogoods.insert(lits, learned);
                self.resolve_conflict(id)
            }
            1 => {
                let x = lits[0];
                let m = lits.get(1).map_or(0, |l| ta.level(l.var()));
                let late = ta.lit_value(x).is_none() || ta.level(x.var()) > m;
                if late {
                    self.backtrack(m);
                }
                let id = self.nogoods.insert(lits, learned);
                if self.ta.lit_value(x).is_none() {
                    self.ta.assign(x.negate(), Some(id));
                }
                Ok(())
            }
            _ => {
                self.nogoods.insert(lits, learned);
                Ok(())
            }
        }
    }

    /// Handles a violated, already stored nogood.
    fn resolve_conflict(&mut self, id: NogoodId) -> Result<(), Unsatisfiable> {
        let top = self
            .nogoods
            .get(id)
            .lits
            .iter()
            .map(|l| self.ta.level(l.var()))
            .max()
            .unwrap_or(0);
        if top == 0 {
            return Err(Unsatisfiable);
        }
        self.stats.conflicts += 1;
        self.heur.on_conflict();
        self.backtrack(top);
        let analysis = analyze_with(&self.ta, &self.nogoods, id, &mut self.seen)?;
        for &v in &analysis.involved {
            self.heur.bump(v);
        }
        self.backtrack(analysis.backjump);
        self.add_nogood(analysis.learned, true)
    }

    fn propagate(&mut self) -> Result<(), Unsatisfiable> {
        while let Some(c) = self.nogoods.propagate(&mut self.ta) {
            self.resolve_conflict(c)?;
        }
        Ok(())
    }

    /// One strategy call; returns whether new rules arrived.
    fn ground_step(&mut self) -> Result<bool, Unsatisfiable> {
        let Some(grounder) = self.grounder.as_mut() else {
            return Ok(false);
        };
        let view = View {
            atom_var: &self.atom_var,
            ta: &self.ta,
        };
        let instances = grounder.step(&mut self.store, &view);
        if instances.is_empty() {
            return Ok(false);
        }
        let batch = instances
            .into_iter()
            .map(|i| GroundRule {
                head: i.head,
                positive: i.positive,
                negative: i.negative,
            })
            .collect();
        Ok(self.add_rules(batch)? > 0)
    }

    fn unassigned_atom(&self) -> Option<Var> {
        (0..self.ta.num_vars() as u32).map(Var).find(|&v| {
            self.ta.value(v).is_none() && matches!(self.kinds[v.index()], VarKind::Atom(_))
        })
    }

    pub(crate) fn run(
        &mut self,
        n: Option<usize>,
        deadline: Option<Instant>,
        out: &mut Vec<BTreeSet<Atom>>,
    ) -> SolveStatus {
        if self.unsat {
            return SolveStatus::Exhausted;
        }
        let mut ticks: u32 = 0;
        loop {
            ticks = ticks.wrapping_add(1);
            if ticks.is_multiple_of(64) && deadline.is_some_and(|d| Instant::now() >= d) {
                return SolveStatus::Timeout;
            }
            if self.propagate().is_err() {
                return SolveStatus::Exhausted;
            }
            match self.ground_step() {
                Err(_) => return SolveStatus::Exhausted,
                Ok(true) => continue,
                Ok(false) => {}
            }
            if let Some(l) = choose_branch(&self.ta, &mut self.heur) {
                self.stats.guesses += 1;
                self.ta.decide(l);
                continue;
            }
            if let Some(v) = self.unassigned_atom() {
                self.ta.decide(Lit::neg(v));
                continue;
            }
            match self.check_candidate() {
                Candidate::AnswerSet(set) => {
                    out.push(set);
                    self.stats.answer_sets += 1;
                    if n.is_some_and(|n| out.len() >= n) {
                        return SolveStatus::LimitReached;
                    }
                    let blocker = self.ta.decisions();
                    if blocker.is_empty() {
                        return SolveStatus::Exhausted;
                    }
                    self.backtrack(0);
                    if self.add_nogood(blocker, true).is_err() {
                        return SolveStatus::Exhausted;
                    }
                }
                Candidate::Rejected(nogood) => {
                    if self.add_nogood(nogood, true).is_err() {
                        return SolveStatus::Exhausted;
                    }
                }
            }
        }
    }

    /// Confirms a total assignment. Rejections carry a violated nogood.
    fn check_candidate(&mut self) -> Candidate {
        let truth: Vec<bool> = (0..self.store.len())
            .map(|i| self.atom_value(AtomId(i as u32)) == Some(true))
            .collect();
        debug_assert!(self.rules.iter().all(|r| {
            let body = r.positive.iter().all(|a| truth[a.index()])
                && !r.negative.iter().any(|a| truth[a.index()]);
            !body || r.head.is_some_and(|h| truth[h.index()])
        }));
        let lm = self.least_model(&truth);
        let unfounded: Vec<AtomId> = (0..truth.len())
            .filter(|&i| truth[i] && !lm[i])
            .map(|i| AtomId(i as u32))
            .collect();
        if unfounded.is_empty() {
            let set = (0..truth.len())
                .filter(|&i| truth[i])
                .map(|i| self.store.to_atom(AtomId(i as u32)))
                .filter(|a| !a.is_complement())
                .collect();
            return Candidate::AnswerSet(set);
        }
        let mut best: Option<Vec<Lit>> = None;
        for &u in unfounded.iter().take(SEED_TRIES) {
            if let Some(ng) = self.explain_unfounded(&[u], &lm) {
                if best.as_ref().is_none_or(|b| ng.len() < b.len()) {
                    best = Some(ng);
                }
                if best.as_ref().is_some_and(|b| b.len() <= 1) {
                    break;
                }
            }
        }
        if best.is_none() {
            best = self.explain_unfounded(&unfounded, &lm);
        }
        if let Some(ng) = best {
            return Candidate::Rejected(ng);
        }
        log::debug!("unfounded atoms without explanation; blocking the branch");
        Candidate::Rejected(self.ta.decisions())
    }

    /// Least model of the emitted rules under the reduct for `truth`.
    fn least_model(&self, truth: &[bool]) -> Vec<bool> {
        let mut model = vec![false; truth.len()];
        let mut missing: Vec<usize> = Vec::with_capacity(self.rules.len());
        let mut waiting: FxHashMap<AtomId, Vec<usize>> = FxHashMap::default();
        let mut queue = Vec::new();
        for &f in &self.facts {
            if !model[f.index()] {
                model[f.index()] = true;
                queue.push(f);
            }
        }
        for (k, r) in self.rules.iter().enumerate() {
            let active = r.head.is_some() && !r.negative.iter().any(|a| truth[a.index()]);
            missing.push(if active { r.positive.len() } else { usize::MAX });
            if !active {
                continue;
            }
            for &b in &r.positive {
                waiting.entry(b).or_default().push(k);
            }
            if r.positive.is_empty() {
                let h = r.head.unwrap();
                if !model[h.index()] {
                    model[h.index()] = true;
                    queue.push(h);
                }
            }
        }
        while let Some(a) = queue.pop() {
            if let Some(ws) = waiting.get(&a) {
                for &k in ws {
                    missing[k] -= 1;
                    if missing[k] == 0 {
                        let h = self.rules[k].head.unwrap();
                        if !model[h.index()] {
                            model[h.index()] = true;
                            queue.push(h);
                        }
                    }
                }
            }
        }
        model
    }

    /// Builds `{T u} ∪ {a falsifying literal per external support}` for a
    /// set grown from `seed`. Whenever a support has no falsified literal the
    /// set takes one of its positive atoms that is not true or lies outside
    /// the least model `lm`. Returns `None` when some support is satisfied or
    /// the budget runs out.
    fn explain_unfounded(&self, seed: &[AtomId], lm: &[bool]) -> Option<Vec<Lit>> {
        let unfounded = seed;
        let mut in_set: FxHashSet<GroundAtom> = unfounded
            .iter()
            .map(|&a| self.store.atom(a).clone())
            .collect();
        let mut work: Vec<GroundAtom> = in_set.iter().cloned().collect();
        work.sort_by(|a, b| (a.pred, &a.args).cmp(&(b.pred, &b.args)));
        let mut blockers: BTreeSet<Lit> = BTreeSet::new();
        let mut budget = JUSTIFY_BUDGET;
        let mut binding: Vec<Option<ConstId>>;
        while let Some(u) = work.pop() {
            for rule in &self.all_rules {
                let Some(start) = rule.unify_head(u.pred, &u.args) else {
                    continue;
                };
                let free: Vec<u32> = (0..rule.num_vars() as u32)
                    .filter(|&v| start[v as usize].is_none())
                    .collect();
                if !free.is_empty() && self.universe.is_empty() {
                    continue;
                }
                let mut odo = vec![0usize; free.len()];
                loop {
                    if budget == 0 {
                        return None;
                    }
                    budget -= 1;
                    binding = start.clone();
                    for (&v, &i) in free.iter().zip(&odo) {
                        binding[v as usize] = Some(self.universe[i]);
                    }
                    let full: Vec<ConstId> = binding.iter().map(|c| c.unwrap()).collect();
                    let ground = |p: &crate::grounding::Pattern| GroundAtom {
                        pred: p.pred,
                        args: p
                            .args
                            .iter()
                            .map(|t| match *t {
                                PTerm::Const(c) => c,
                                PTerm::Var(v) => full[v as usize],
                            })
                            .collect(),
                    };
                    let pos: Vec<GroundAtom> = rule.positive.iter().map(ground).collect();
                    if !pos.iter().any(|a| in_set.contains(a)) {
                        let mut best: Option<(u32, Lit)> = None;
                        let mut consider = |l: Lit, lv: u32| {
                            if best.is_none_or(|(bl, _)| lv < bl) {
                                best = Some((lv, l));
                            }
                        };
                        for p in &rule.negative {
                            let g = ground(p);
                            if let Some(v) = self.var_for(&g) {
                                if self.ta.value(v) == Some(true) {
                                    consider(Lit::pos(v), self.ta.level(v));
                                }
                            }
                        }
                        let mut extend: Option<GroundAtom> = None;
                        for g in &pos {
                            match self.var_for(g) {
                                Some(v) if self.ta.value(v) == Some(false) => {
                                    consider(Lit::neg(v), self.ta.level(v))
                                }
                                Some(v)
                                    if self.ta.value(v) == Some(true)
                                        && self
                                            .store
                                            .lookup(g.pred, &g.args)
                                            .is_some_and(|id| lm[id.index()]) => {}
                                _ => {
                                    if extend.is_none() {
                                        extend = Some(g.clone());
                                    }
                                }
                            }
                        }
                        match (best, extend) {
                            (Some((_, l)), _) => {
                                blockers.insert(l);
                            }
                            (None, Some(g)) => {
                                if in_set.len() >= JUSTIFY_MAX_ATOMS {
                                    return None;
                                }
                                in_set.insert(g.clone());
                                work.push(g);
                            }
                            (None, None) => return None,
                        }
                    }
                    if !advance(&mut odo, self.universe.len()) {
                        break;
                    }
                }
            }
        }
        let anchor = unfounded
            .iter()
            .filter_map(|&a| {
                let v = Var(self.atom_var[a.index()]);
                (self.ta.value(v) == Some(true)).then(|| (self.ta.level(v), v))
            })
            .min()?;
        let mut ng: Vec<Lit> = vec![Lit::pos(anchor.1)];
        ng.extend(blockers);
        Some(ng)
    }

    fn var_for(&self, g: &GroundAtom) -> Option<Var> {
        let id = self.store.lookup(g.pred, &g.args)?;
        match self.atom_var.get(id.index()) {
            Some(&v) if v != NO_VAR => Some(Var(v)),
            _ => None,
        }
    }
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
