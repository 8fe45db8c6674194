use std::fmt;

pub type NogoodId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A signed variable: `T v` or `F v`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    #[inline]
    pub fn new(var: Var, truth: bool) -> Self {
        Lit(var.0 << 1 | truth as u32)
    }

    /// `T v`
    #[inline]
    pub fn pos(var: Var) -> Self {
        Lit::new(var, true)
    }

    /// `F v`
    #[inline]
    pub fn neg(var: Var) -> Self {
        Lit::new(var, false)
    }

    #[inline]
    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    #[inline]
    pub fn truth(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn negate(self) -> Self {
        Lit(self.0 ^ 1)
    }

    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            if self.truth() { "T" } else { "F" },
            self.var().0
        )
    }
}

/// Partial Boolean assignment with decision levels and a trail.
#[derive(Clone, Debug, Default)]
pub struct TruthAssignment {
    values: Vec<Option<bool>>,
    levels: Vec<u32>,
    reasons: Vec<Option<NogoodId>>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    /// Trail prefix already handed to propagation.
    pub(crate) qhead: usize,
}

impl TruthAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var(self.values.len() as u32);
        self.values.push(None);
        self.levels.push(0);
        self.reasons.push(None);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn value(&self, v: Var) -> Option<bool> {
        self.values[v.index()]
    }

    /// `Some(true)` if the literal holds, `Some(false)` if its complement does.
    #[inline]
    pub fn lit_value(&self, l: Lit) -> Option<bool> {
        self.values[l.var().index()].map(|b| b == l.truth())
    }

    #[inline]
    pub fn is_satisfied(&self, l: Lit) -> bool {
        self.lit_value(l) == Some(true)
    }

    #[inline]
    pub fn is_falsified(&self, l: Lit) -> bool {
        self.lit_value(l) == Some(false)
    }

    #[inline]
    pub fn level(&self, v: Var) -> u32 {
        self.levels[v.index()]
    }

    #[inline]
    pub fn reason(&self, v: Var) -> Option<NogoodId> {
        self.reasons[v.index()]
    }

    pub fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    pub fn trail(&self) -> &[Lit] {
        &self.trail
    }

    /// Makes `l` hold at the current level.
    pub fn assign(&mut self, l: Lit, reason: Option<NogoodId>) {
        let v = l.var().index();
        debug_assert!(self.values[v].is_none(), "{l:?} already assigned");
        self.values[v] = Some(l.truth());
        self.levels[v] = self.decision_level();
        self.reasons[v] = reason;
        self.trail.push(l);
    }

    /// Opens a new decision level with `l`.
    pub fn decide(&mut self, l: Lit) {
        self.trail_lim.push(self.trail.len());
        self.assign(l, None);
    }

    /// The decision literals of the current trail, in level order.
    pub fn decisions(&self) -> Vec<Lit> {
        self.trail_lim.iter().map(|&i| self.trail[i]).collect()
    }

    /// Undoes all levels above `level`; returns the freed variables.
    pub fn backtrack(&mut self, level: u32) -> Vec<Var> {
        let mut freed = Vec::new();
        if level >= self.decision_level() {
            return freed;
        }
        let keep = self.trail_lim[level as usize];
        for l in self.trail.drain(keep..) {
            let v = l.var().index();
            self.values[v] = None;
            self.reasons[v] = None;
            freed.push(l.var());
        }
        self.trail_lim.truncate(level as usize);
        self.qhead = self.qhead.min(self.trail.len());
        freed
    }

    pub fn is_complete(&self) -> bool {
        self.trail.len() == self.values.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_encoding() {
        let v = Var(5);
        assert_eq!(Lit::pos(v).var(), v);
        assert!(Lit::pos(v).truth());
        assert_eq!(Lit::pos(v).negate(), Lit::neg(v));
        assert_eq!(format!("{:?}", Lit::neg(v)), "F5");
    }

    #[test]
    fn backtracking_restores_levels() {
        let mut ta = TruthAssignment::new();
        let vs: Vec<Var> = (0..4).map(|_| ta.new_var()).collect();
        ta.assign(Lit::pos(vs[0]), None);
        ta.decide(Lit::neg(vs[1]));
        ta.assign(Lit::pos(vs[2]), Some(0));
        ta.decide(Lit::pos(vs[3]));
        assert_eq!(ta.decision_level(), 2);
        assert_eq!(ta.level(vs[2]), 1);
        assert_eq!(ta.decisions(), vec![Lit::neg(vs[1]), Lit::pos(vs[3])]);
        let freed = ta.backtrack(0);
        assert_eq!(freed, vec![vs[1], vs[2], vs[3]]);
        assert_eq!(ta.value(vs[0]), Some(true));
        assert_eq!(ta.value(vs[2]), None);
        assert!(ta.is_falsified(Lit::neg(vs[0])));
        assert!(!ta.is_complete());
    }
}
