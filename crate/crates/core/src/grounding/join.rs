//! Substitution enumeration: an ordered join over the positive body that may
//! leave up to `k` literals unmatched.

use super::compiled::{CompiledRule, PTerm, Pattern};
use super::store::{Args, AtomId, AtomStore, ConstId};
use super::Bound;

/// Read access to a (partial) truth assignment over interned atoms.
pub trait TruthView {
    fn is_true(&self, atom: AtomId) -> bool;
    fn is_false(&self, atom: AtomId) -> bool;
}

/// Acceptance test applied to each enumerated substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Filter {
    /// Not inactive, whole positive body true.
    OfInterest,
    /// Not inactive, no positive atom false, assigned literals bind all
    /// variables, at most `k` positive literals unassigned.
    KUnassigned(Bound),
}

impl Filter {
    pub fn max_deferred(self) -> Bound {
        match self {
            Filter::OfInterest => Bound::Finite(0),
            Filter::KUnassigned(k) => k,
        }
    }
}

pub struct Join<'a, V: TruthView + ?Sized> {
    pub store: &'a AtomStore,
    pub view: &'a V,
    pub rule: &'a CompiledRule,
    pub max_deferred: Bound,
    /// Cut branches as soon as a fully bound positive literal is false.
    pub prune_false: bool,
}

impl<V: TruthView + ?Sized> Join<'_, V> {
    /// Candidate bindings (one constant per rule variable), possibly with
    /// duplicates. `order` is the preferred literal order.
    pub fn run(&self, order: &[usize]) -> Vec<Args> {
        let mut out = Vec::new();
        let mut remaining = order.to_vec();
        let mut binding = vec![None; self.rule.num_vars()];
        self.search(&mut remaining, &mut binding, 0, &mut out);
        out
    }

    fn search(
        &self,
        remaining: &mut Vec<usize>,
        binding: &mut Vec<Option<ConstId>>,
        deferred: u32,
        out: &mut Vec<Args>,
    ) {
        if remaining.is_empty() {
            if binding.iter().all(Option::is_some) {
                out.push(binding.iter().map(|c| c.unwrap()).collect());
            }
            return;
        }
        let positive = &self.rule.positive;
        let pick = remaining
            .iter()
            .position(|&i| positive[i].is_bound(binding))
            .unwrap_or(0);
        let lit = remaining.remove(pick);
        let pat = &positive[lit];
        let can_defer = self.max_deferred.admits(deferred + 1);

        if let Some(args) = pat.instantiate_partial(binding) {
            match self.store.lookup(pat.pred, &args) {
                Some(id) if self.view.is_true(id) => {
                    self.search(remaining, binding, deferred, out);
                }
                Some(id) if self.prune_false && self.view.is_false(id) => {}
                _ if can_defer => self.search(remaining, binding, deferred + 1, out),
                _ => {}
            }
        } else {
            let mut newly = Vec::with_capacity(pat.args.len());
            for &id in self.postings(pat, binding) {
                if !self.view.is_true(id) {
                    continue;
                }
                if unify(pat, &self.store.atom(id).args, binding, &mut newly) {
                    self.search(remaining, binding, deferred, out);
                }
                for v in newly.drain(..) {
                    binding[v as usize] = None;
                }
            }
            // Deferring only pays off if later literals can bind its variables.
            if can_defer
                && pat.vars().all(|v| {
                    binding[v as usize].is_some()
                        || remaining
                            .iter()
                            .any(|&j| positive[j].vars().any(|w| w == v))
                })
            {
                self.search(remaining, binding, deferred + 1, out);
            }
        }
        remaining.insert(pick, lit);
    }

    /// Shortest index list that contains every atom matching the bound
    /// positions of `pat`.
    fn postings(&self, pat: &Pattern, binding: &[Option<ConstId>]) -> &[AtomId] {
        let mut best = self.store.atoms_of(pat.pred);
        for (pos, t) in pat.args.iter().enumerate() {
            let c = match *t {
                PTerm::Const(c) => Some(c),
                PTerm::Var(v) => binding[v as usize],
            };
            if let Some(c) = c {
                let list = self.store.atoms_with(pat.pred, pos, c);
                if list.len() < best.len() {
                    best = list;
                }
            }
        }
        best
    }
}

fn unify(
    pat: &Pattern,
    args: &[ConstId],
    binding: &mut [Option<ConstId>],
    newly: &mut Vec<u32>,
) -> bool {
    for (t, &c) in pat.args.iter().zip(args) {
        match *t {
            PTerm::Const(k) => {
                if k != c {
                    return false;
                }
            }
            PTerm::Var(v) => match binding[v as usize] {
                Some(b) if b != c => return false,
                Some(_) => {}
                None => {
                    binding[v as usize] = Some(c);
                    newly.push(v);
                }
            },
        }
    }
    true
}

/// Literal order for the join: ascending number of true atoms of the
/// literal's predicate, ties by body position.
pub fn join_order<V: TruthView + ?Sized>(
    store: &AtomStore,
    view: &V,
    rule: &CompiledRule,
    counts: &mut Vec<Option<usize>>,
) -> Vec<usize> {
    if counts.len() < store.num_preds() {
        counts.resize(store.num_preds(), None);
    }
    let mut keyed: Vec<(usize, usize)> = rule
        .positive
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let n = *counts[p.pred as usize].get_or_insert_with(|| {
                store
                    .atoms_of(p.pred)
                    .iter()
                    .filter(|&&a| view.is_true(a))
                    .count()
            });
            (n, i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Exact acceptance test for one binding.
pub fn accepts<V: TruthView + ?Sized>(
    store: &AtomStore,
    view: &V,
    rule: &CompiledRule,
    binding: &[ConstId],
    filter: Filter,
    is_fact: impl Fn(AtomId) -> bool,
) -> bool {
    if rule.dead {
        return false;
    }
    for n in &rule.negative {
        if let Some(id) = store.lookup(n.pred, &n.instantiate(binding)) {
            if is_fact(id) {
                return false;
            }
        }
    }
    match filter {
        Filter::OfInterest => rule.positive.iter().all(|p| {
            store
                .lookup(p.pred, &p.instantiate(binding))
                .is_some_and(|id| view.is_true(id))
        }),
        Filter::KUnassigned(k) => {
            let mut unassigned = 0u32;
            let mut covered = vec![false; rule.num_vars()];
            for p in &rule.positive {
                match store.lookup(p.pred, &p.instantiate(binding)) {
                    Some(id) if view.is_false(id) => return false,
                    Some(id) if view.is_true(id) => {
                        for v in p.vars() {
                            covered[v as usize] = true;
                        }
                    }
                    _ => unassigned += 1,
                }
            }
            k.admits(unassigned) && covered.iter().all(|&c| c)
        }
    }
}
