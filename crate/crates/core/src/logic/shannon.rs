//! Lazy case splitting on atoms. A computation asks for the truth of atoms
//! through an [`Oracle`]; each unknown atom becomes a branch point, and the
//! result is a list of pairwise exclusive guarded values covering all cases.

use thiserror::Error;

use super::formula::{Atom, Formula, Literal};
use super::normal::simplify;

/// Raised by the oracle for an undecided atom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Need<A>(pub A);

/// Optional closure deciding atoms that follow from the ones already decided.
pub type Implied<A> = dyn Fn(&[(A, bool)], &A) -> Option<bool>;

pub struct Oracle<'a, A: Atom> {
    decided: &'a [(A, bool)],
    implied: Option<&'a Implied<A>>,
}

impl<'a, A: Atom> Oracle<'a, A> {
    pub fn holds(&self, a: &A) -> Result<bool, Need<A>> {
        let a = a.canonical();
        if let Some(t) = a.truth() {
            return Ok(t);
        }
        if let Some((_, t)) = self.decided.iter().find(|(b, _)| *b == a) {
            return Ok(*t);
        }
        if let Some(t) = self.implied.and_then(|f| f(self.decided, &a)) {
            return Ok(t);
        }
        Err(Need(a))
    }

    pub fn decided(&self) -> &[(A, bool)] {
        self.decided
    }
}

/// Evaluates a quantifier-free formula, asking `atom` for each atom met.
/// Conjunctions and disjunctions stop at the first deciding child.
pub fn eval_lazy<A: Atom>(f: &Formula<A>, atom: &mut dyn FnMut(&A) -> Result<bool, Need<A>>) -> Result<bool, Need<A>> {
    Ok(match f {
        Formula::Atom(a) => atom(a)?,
        Formula::Not(g) => !eval_lazy(g, atom)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_lazy(g, atom)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_lazy(g, atom)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Exists(..) | Formula::Forall(..) => panic!("eval_lazy needs a quantifier-free formula"),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShannonError {
    #[error("case split exceeds {0} leaves")]
    TooManyLeaves(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leaf<A, V> {
    pub guard: Vec<Literal<A>>,
    pub value: V,
}

impl<A: Atom, V> Leaf<A, V> {
    pub fn guard_formula(&self) -> Formula<A> {
        Formula::and(self.guard.iter().map(|l| l.to_formula()).collect())
    }
}

pub fn shannon<A: Atom, V>(
    mut compute: impl FnMut(&Oracle<A>) -> Result<V, Need<A>>,
    implied: Option<&Implied<A>>,
    max_leaves: usize,
) -> Result<Vec<Leaf<A, V>>, ShannonError> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<(A, bool)>> = vec![Vec::new()];
    while let Some(decided) = stack.pop() {
        let oracle = Oracle {
            decided: &decided,
            implied,
        };
        match compute(&oracle) {
            Ok(value) => {
                if out.len() == max_leaves {
                    return Err(ShannonError::TooManyLeaves(max_leaves));
                }
                let guard = decided
                    .iter()
                    .map(|(a, t)| Literal {
                        atom: a.clone(),
                        positive: *t,
                    })
                    .collect();
                out.push(Leaf { guard, value });
            }
            Err(Need(a)) => {
                let mut f = decided.clone();
                f.push((a.clone(), false));
                let mut t = decided;
                t.push((a, true));
                stack.push(f);
                stack.push(t);
            }
        }
    }
    Ok(out)
}

/// Groups leaves by value and ORs their guards, keeping first-seen order.
pub fn merge_leaves<A: Atom, V: PartialEq>(leaves: Vec<Leaf<A, V>>) -> Vec<(Formula<A>, V)> {
    let mut groups: Vec<(Vec<Formula<A>>, V)> = Vec::new();
    for l in leaves {
        let g = l.guard_formula();
        match groups.iter_mut().find(|(_, v)| *v == l.value) {
            Some(e) => e.0.push(g),
            None => groups.push((vec![g], l.value)),
        }
    }
    groups.into_iter().map(|(gs, v)| (simplify(&Formula::or(gs)), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{EqAtom, Var};

    #[test]
    fn splits_only_on_queried_atoms() {
        let (x, y, z) = (Var::new("x"), Var::new("y"), Var::new("z"));
        let a = EqAtom::E(x, y);
        let b = EqAtom::E(y, z);
        let leaves = shannon(
            |o: &Oracle<EqAtom>| Ok(if o.holds(&a)? { 1 + o.holds(&b)? as u32 } else { 0 }),
            None,
            100,
        )
        .unwrap();
        assert_eq!(leaves.len(), 3);
        let merged = merge_leaves(leaves);
        assert_eq!(merged.len(), 3);
        assert!(shannon(|o: &Oracle<EqAtom>| o.holds(&EqAtom::E(x, x)), None, 1).unwrap().len() == 1);
    }

    #[test]
    fn leaf_cap() {
        let vs: Vec<Var> = (0..6).map(|i| Var::new(&format!("v{i}"))).collect();
        let r = shannon(
            |o: &Oracle<EqAtom>| {
                let mut c = 0;
                for w in vs.windows(2) {
                    c += o.holds(&EqAtom::Eq(w[0], w[1]))? as u32;
                }
                Ok(c)
            },
            None,
            8,
        );
        assert_eq!(r, Err(ShannonError::TooManyLeaves(8)));
    }
}
