use super::{Elem, Env, FamilySpec, Structure};
use crate::logic::{StarAtom, StarBase, StarTerm};

/// The interval {0..len} with S(x) = min(x+1, len), c_init = 0, c_fin = len.
#[derive(Debug, Clone)]
pub struct IntervalModel {
    len: u32,
}

impl IntervalModel {
    pub fn new(len: u32) -> Self {
        IntervalModel { len }
    }

    pub fn len(&self) -> u32 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn term(&self, t: &StarTerm, env: &Env) -> Elem {
        let base = match t.base {
            StarBase::Var(v) => env.val(v),
            StarBase::Init => 0,
            StarBase::Fin => self.len as usize,
        };
        (base + t.k as usize).min(self.len as usize)
    }
}

impl Structure for IntervalModel {
    type Atom = StarAtom;

    fn spec(&self) -> FamilySpec {
        FamilySpec::Interval(self.len)
    }

    fn size(&self) -> usize {
        self.len as usize + 1
    }

    fn holds(&self, atom: &StarAtom, env: &Env) -> bool {
        self.term(&atom.0, env) == self.term(&atom.1, env)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn successor_saturates() {
        let m = IntervalModel::new(5);
        let env = Env::new();
        assert!(m.holds(&StarAtom(StarTerm { base: StarBase::Fin, k: 2 }, StarTerm::fin()), &env));
        assert_eq!(m.term(&StarTerm::init(3), &env), 3);
        assert_eq!(m.term(&StarTerm::init(9), &env), 5);
    }
}
