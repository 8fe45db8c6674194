//! Interned ground atoms with per-predicate and per-argument indexes.

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use crate::program::{Atom, Constant, Predicate, Term};

pub type ConstId = u32;
pub type PredId = u32;
pub type Args = SmallVec<[ConstId; 4]>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomId(pub u32);

impl AtomId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Args,
}

/// Interner for constants, predicates and ground atoms.
///
/// Atom ids are dense and never reused. Every interned atom is indexed by
/// predicate and by `(predicate, position, constant)`, which is what the
/// grounder's join walks.
#[derive(Debug, Default, Clone)]
pub struct AtomStore {
    consts: Vec<Constant>,
    const_ids: FxHashMap<Constant, ConstId>,
    preds: Vec<Predicate>,
    pred_ids: FxHashMap<Predicate, PredId>,
    atoms: Vec<GroundAtom>,
    atom_ids: FxHashMap<GroundAtom, AtomId>,
    by_pred: Vec<Vec<AtomId>>,
    by_arg: FxHashMap<(PredId, u32, ConstId), Vec<AtomId>>,
}

impl AtomStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern_const(&mut self, c: &Constant) -> ConstId {
        if let Some(&id) = self.const_ids.get(c) {
            return id;
        }
        let id = self.consts.len() as ConstId;
        self.consts.push(c.clone());
        self.const_ids.insert(c.clone(), id);
        id
    }

    pub fn const_id(&self, c: &Constant) -> Option<ConstId> {
        self.const_ids.get(c).copied()
    }

    pub fn constant(&self, id: ConstId) -> &Constant {
        &self.consts[id as usize]
    }

    pub fn num_consts(&self) -> usize {
        self.consts.len()
    }

    pub fn intern_pred(&mut self, p: &Predicate) -> PredId {
        if let Some(&id) = self.pred_ids.get(p) {
            return id;
        }
        let id = self.preds.len() as PredId;
        self.preds.push(p.clone());
        self.pred_ids.insert(p.clone(), id);
        self.by_pred.push(Vec::new());
        id
    }

    pub fn pred_id(&self, p: &Predicate) -> Option<PredId> {
        self.pred_ids.get(p).copied()
    }

    pub fn predicate(&self, id: PredId) -> &Predicate {
        &self.preds[id as usize]
    }

    pub fn num_preds(&self) -> usize {
        self.preds.len()
    }

    pub fn intern(&mut self, pred: PredId, args: &[ConstId]) -> AtomId {
        let key = GroundAtom {
            pred,
            args: Args::from_slice(args),
        };
        if let Some(&id) = self.atom_ids.get(&key) {
            return id;
        }
        let id = AtomId(self.atoms.len() as u32);
        for (pos, &c) in args.iter().enumerate() {
            self.by_arg
                .entry((pred, pos as u32, c))
                .or_default()
                .push(id);
        }
        self.by_pred[pred as usize].push(id);
        self.atoms.push(key.clone());
        self.atom_ids.insert(key, id);
        id
    }

    pub fn lookup(&self, pred: PredId, args: &[ConstId]) -> Option<AtomId> {
        let key = GroundAtom {
            pred,
            args: Args::from_slice(args),
        };
        self.atom_ids.get(&key).copied()
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn atoms_of(&self, pred: PredId) -> &[AtomId] {
        &self.by_pred[pred as usize]
    }

    pub fn atoms_with(&self, pred: PredId, pos: usize, c: ConstId) -> &[AtomId] {
        self.by_arg
            .get(&(pred, pos as u32, c))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Interns a ground AST atom. Panics on variables.
    pub fn intern_atom(&mut self, atom: &Atom) -> AtomId {
        let pred = self.intern_pred(&atom.predicate());
        let args: Args = atom
            .args
            .iter()
            .map(|t| match t {
                Term::Const(c) => self.intern_const(c),
                Term::Var(v) => panic!("cannot intern non-ground atom (variable {v})"),
            })
            .collect();
        self.intern(pred, &args)
    }

    /// Looks up a ground AST atom without interning anything.
    pub fn lookup_atom(&self, atom: &Atom) -> Option<AtomId> {
        let pred = self.pred_id(&atom.predicate())?;
        let mut args = Args::new();
        for t in &atom.args {
            match t {
                Term::Const(c) => args.push(self.const_id(c)?),
                Term::Var(_) => return None,
            }
        }
        self.lookup(pred, &args)
    }

    pub fn to_atom(&self, id: AtomId) -> Atom {
        let g = self.atom(id);
        self.make_atom(g.pred, &g.args)
    }

    pub fn make_atom(&self, pred: PredId, args: &[ConstId]) -> Atom {
        let p = self.predicate(pred);
        Atom {
            name: p.name.clone(),
            args: args
                .iter()
                .map(|&c| Term::Const(self.constant(c).clone()))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_idempotent_and_indexed() {
        let mut s = AtomStore::new();
        let p = s.intern_pred(&Predicate::new("p", 2));
        let one = s.intern_const(&Constant::Int(1));
        let two = s.intern_const(&Constant::Int(2));
        let a = s.intern(p, &[one, two]);
        let b = s.intern(p, &[two, two]);
        assert_eq!(s.intern(p, &[one, two]), a);
        assert_eq!(s.atoms_of(p), &[a, b]);
        assert_eq!(s.atoms_with(p, 1, two), &[a, b]);
        assert_eq!(s.atoms_with(p, 0, one), &[a]);
        assert_eq!(s.lookup(p, &[one, one]), None);
        assert_eq!(s.to_atom(a).to_string(), "p(1,2)");
        assert_eq!(s.lookup_atom(&s.to_atom(b)), Some(b));
    }
}
