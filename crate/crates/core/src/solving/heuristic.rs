//! Branching scores: MOMs-style initial activity for new atoms, VSIDS
//! bumping and periodic decay afterwards.

use super::assignment::{Lit, TruthAssignment, Var};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeuristicParams {
    /// Initial score per occurrence in a binary nogood.
    pub binary_weight: f64,
    /// Initial score per occurrence in a longer nogood.
    pub other_weight: f64,
    pub bump: f64,
    pub decay: f64,
    /// Conflicts between two decays.
    pub decay_interval: u64,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        HeuristicParams {
            binary_weight: 2.0,
            other_weight: 1.0,
            bump: 1.0,
            decay: 0.95,
            decay_interval: 100,
        }
    }
}

/// Occurrence-weighted scores of every variable in `nogoods`.
pub fn init_heuristic_moms(
    nogoods: &[Vec<Lit>],
    num_vars: usize,
    params: &HeuristicParams,
) -> Vec<f64> {
    let mut scores = vec![0.0; num_vars];
    for ng in nogoods {
        let w = if ng.len() == 2 {
            params.binary_weight
        } else {
            params.other_weight
        };
        for l in ng {
            scores[l.var().index()] += w;
        }
    }
    scores
}

#[derive(Clone, Debug)]
pub struct HeuristicState {
    pub params: HeuristicParams,
    activity: Vec<f64>,
    branchable: Vec<bool>,
    heap: VarHeap,
    conflicts: u64,
}

impl HeuristicState {
    pub fn new(params: HeuristicParams) -> Self {
        HeuristicState {
            params,
            activity: Vec::new(),
            branchable: Vec::new(),
            heap: VarHeap::default(),
            conflicts: 0,
        }
    }

    pub fn activity(&self, v: Var) -> f64 {
        self.activity[v.index()]
    }

    /// Registers a variable; only branchable ones are ever returned by
    /// [`choose_branch`].
    pub fn add_var(&mut self, v: Var, branchable: bool) {
        let i = v.index();
        if self.activity.len() <= i {
            self.activity.resize(i + 1, 0.0);
            self.branchable.resize(i + 1, false);
        }
        self.branchable[i] = branchable;
        if branchable {
            self.heap.insert(v, &self.activity);
        }
    }

    /// Adds MOMs scores of a batch of fresh nogoods to the variables for
    /// which `is_new` holds.
    pub fn score_new(&mut self, nogoods: &[Vec<Lit>], is_new: impl Fn(Var) -> bool) {
        for ng in nogoods {
            let w = if ng.len() == 2 {
                self.params.binary_weight
            } else {
                self.params.other_weight
            };
            for l in ng {
                if is_new(l.var()) {
                    self.raise(l.var(), w);
                }
            }
        }
    }

    fn raise(&mut self, v: Var, by: f64) {
        self.activity[v.index()] += by;
        if self.heap.contains(v) {
            self.heap.sift_up(v, &self.activity);
        }
    }

    pub fn bump(&mut self, v: Var) {
        self.raise(v, self.params.bump);
    }

    /// Counts a conflict; every `decay_interval` conflicts all activities
    /// shrink by the decay factor.
    pub fn on_conflict(&mut self) {
        self.conflicts += 1;
        if self.params.decay_interval > 0
            && self.conflicts.is_multiple_of(self.params.decay_interval)
        {
            for a in &mut self.activity {
                *a *= self.params.decay;
            }
            self.heap.rebuild(&self.activity);
        }
    }

    /// Puts freed variables back into the candidate heap.
    pub fn on_unassigned(&mut self, v: Var) {
        if self.branchable.get(v.index()).copied().unwrap_or(false) && !self.heap.contains(v) {
            self.heap.insert(v, &self.activity);
        }
    }
}

/// Highest-activity unassigned branchable variable, ties to the lowest id,
/// positive polarity.
pub fn choose_branch(ta: &TruthAssignment, h: &mut HeuristicState) -> Option<Lit> {
    while let Some(v) = h.heap.peek() {
        if ta.value(v).is_none() {
            return Some(Lit::pos(v));
        }
        h.heap.pop(&h.activity);
    }
    None
}

#[inline]
fn better(a: Var, b: Var, act: &[f64]) -> bool {
    let (x, y) = (act[a.index()], act[b.index()]);
    x > y || (x == y && a < b)
}

/// Binary max-heap over variables with position index.
#[derive(Clone, Debug, Default)]
struct VarHeap {
    heap: Vec<Var>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl VarHeap {
    fn contains(&self, v: Var) -> bool {
        self.pos.get(v.index()).is_some_and(|&p| p != ABSENT)
    }

    fn peek(&self) -> Option<Var> {
        self.heap.first().copied()
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.pos.len() <= v.index() {
            self.pos.resize(v.index() + 1, ABSENT);
        }
        if self.contains(v) {
            return;
        }
        self.pos[v.index()] = self.heap.len();
        self.heap.push(v);
        self.sift_up(v, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top.index()] = ABSENT;
        if last != top {
            self.heap[0] = last;
            self.pos[last.index()] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn sift_up(&mut self, v: Var, act: &[f64]) {
        let mut i = self.pos[v.index()];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !better(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i].index()] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && better(self.heap[r], self.heap[l], act) {
                r
            } else {
                l
            };
            if !better(self.heap[c], v, act) {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i].index()] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }

    fn rebuild(&mut self, act: &[f64]) {
        for i in (0..self.heap.len() / 2).rev() {
            self.sift_down(i, act);
        }
    }
}
