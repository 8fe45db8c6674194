//! Nogood storage, two-watched-literal propagation and first-UIP analysis.
//!
//! A nogood is violated when every literal in it holds. Watches sit on two
//! literals that do not hold; when a watched literal becomes true the nogood
//! looks for a replacement, and if none exists the other watch is either
//! forced false or the nogood is in conflict.

use super::assignment::{Lit, NogoodId, TruthAssignment, Var};

#[derive(Clone, Debug)]
pub struct Nogood {
    pub lits: Vec<Lit>,
    pub learned: bool,
}

#[derive(Clone, Debug, Default)]
pub struct NogoodStore {
    nogoods: Vec<Nogood>,
    watches: Vec<Vec<NogoodId>>,
}

impl NogoodStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nogoods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nogoods.is_empty()
    }

    pub fn get(&self, id: NogoodId) -> &Nogood {
        &self.nogoods[id as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Nogood> {
        self.nogoods.iter()
    }

    pub fn learned_count(&self) -> usize {
        self.nogoods.iter().filter(|n| n.learned).count()
    }

    fn ensure(&mut self, var: Var) {
        let need = (var.index() + 1) * 2;
        if self.watches.len() < need {
            self.watches.resize(need, Vec::new());
        }
    }

    /// Stores a nogood and watches its first two literals. The caller is
    /// responsible for ordering the literals so that this is sound.
    pub fn insert(&mut self, lits: Vec<Lit>, learned: bool) -> NogoodId {
        let id = self.nogoods.len() as NogoodId;
        for l in &lits {
            self.ensure(l.var());
        }
        if lits.len() >= 2 {
            self.watches[lits[0].code()].push(id);
            self.watches[lits[1].code()].push(id);
        }
        self.nogoods.push(Nogood { lits, learned });
        id
    }

    /// Unit propagation to fixpoint. Returns a violated nogood, if any.
    pub fn propagate(&mut self, ta: &mut TruthAssignment) -> Option<NogoodId> {
        while ta.qhead < ta.trail().len() {
            let p = ta.trail()[ta.qhead];
            ta.qhead += 1;
            if p.code() >= self.watches.len() {
                continue;
            }
            let mut ws = std::mem::take(&mut self.watches[p.code()]);
            let mut keep = 0;
            let mut conflict = None;
            let mut i = 0;
            while i < ws.len() {
                let id = ws[i];
                i += 1;
                let lits = &mut self.nogoods[id as usize].lits;
                if lits[0] == p {
                    lits.swap(0, 1);
                }
                let other = lits[0];
                if ta.is_falsified(other) {
                    ws[keep] = id;
                    keep += 1;
                    continue;
                }
                if let Some(k) = (2..lits.len()).find(|&k| !ta.is_satisfied(lits[k])) {
                    lits.swap(1, k);
                    let moved = lits[1];
                    self.watches[moved.code()].push(id);
                    continue;
                }
                ws[keep] = id;
                keep += 1;
                if ta.lit_value(other).is_none() {
                    ta.assign(other.negate(), Some(id));
                } else {
                    conflict = Some(id);
                    while i < ws.len() {
                        ws[keep] = ws[i];
                        keep += 1;
                        i += 1;
                    }
                }
            }
            ws.truncate(keep);
            self.watches[p.code()] = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }
}

/// Result of conflict analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Analysis {
    /// Learned nogood; the first literal is the unique one from the
    /// conflict level, the second one (if any) has the backjump level.
    pub learned: Vec<Lit>,
    pub backjump: u32,
    /// Every variable met during resolution.
    pub involved: Vec<Var>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Unsatisfiable;

/// First-UIP analysis of a violated nogood whose highest level is the
/// current decision level.
pub fn analyze_conflict(
    ta: &TruthAssignment,
    store: &NogoodStore,
    conflict: NogoodId,
) -> Result<Analysis, Unsatisfiable> {
    let mut seen = vec![false; ta.num_vars()];
    analyze_with(ta, store, conflict, &mut seen)
}

pub(crate) fn analyze_with(
    ta: &TruthAssignment,
    store: &NogoodStore,
    conflict: NogoodId,
    seen: &mut Vec<bool>,
) -> Result<Analysis, Unsatisfiable> {
    let level = ta.decision_level();
    if level == 0 {
        return Err(Unsatisfiable);
    }
    if seen.len() < ta.num_vars() {
        seen.resize(ta.num_vars(), false);
    }
    let trail = ta.trail();
    let mut learned = vec![Lit::pos(Var(0))];
    let mut involved = Vec::new();
    let mut counter = 0usize;
    let mut idx = trail.len();
    let mut resolved: Option<Var> = None;
    let mut clause: &[Lit] = &store.get(conflict).lits;
    let uip = loop {
        for &q in clause {
            let v = q.var();
            if Some(v) == resolved || seen[v.index()] || ta.level(v) == 0 {
                continue;
            }
            seen[v.index()] = true;
            involved.push(v);
            if ta.level(v) == level {
                counter += 1;
            } else {
                learned.push(q);
            }
        }
        loop {
            idx -= 1;
            if seen[trail[idx].var().index()] {
                break;
            }
        }
        let t = trail[idx];
        seen[t.var().index()] = false;
        counter -= 1;
        if counter == 0 {
            break t;
        }
        resolved = Some(t.var());
        let reason = ta
            .reason(t.var())
            .expect("a non-decision literal at the conflict level has a reason");
        clause = &store.get(reason).lits;
    };
    learned[0] = uip;
    for l in &learned[1..] {
        seen[l.var().index()] = false;
    }
    let mut backjump = 0;
    let mut best = 1;
    for (i, l) in learned.iter().enumerate().skip(1) {
        let lv = ta.level(l.var());
        if lv > backjump {
            backjump = lv;
            best = i;
        }
    }
    if learned.len() > 1 {
        learned.swap(1, best);
    }
    Ok(Analysis {
        learned,
        backjump,
        involved,
    })
}
