//! Negation normal form, disjunctive normal form and a light simplifier.

use std::collections::BTreeSet;

use thiserror::Error;

use super::formula::{Atom, Formula, Literal, LiteralConjunction};

pub const DEFAULT_DNF_CAP: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalError {
    #[error("DNF exceeds the node cap of {cap} (input has {input_size} nodes)")]
    DnfCap { cap: usize, input_size: usize },
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalMode {
    Nnf,
    Dnf,
    LiteralSplit,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Normalized<A: Atom> {
    Formula(Formula<A>),
    Split(Vec<LiteralConjunction<A>>),
}

pub fn normalize<A: Atom>(f: &Formula<A>, mode: NormalMode, cap: usize) -> Result<Normalized<A>, NormalError> {
    match mode {
        NormalMode::Nnf => Ok(Normalized::Formula(nnf(f))),
        NormalMode::Dnf => Ok(Normalized::Formula(dnf_formula(f, cap)?)),
        NormalMode::LiteralSplit => Ok(Normalized::Split(
            dnf(f, cap)?.iter().map(|c| LiteralConjunction::from_literals(c)).collect(),
        )),
    }
}

/// Pushes negations down to atoms. Quantifiers are kept, with ¬∃ turned into ∀¬
/// and ¬∀ into ∃¬.
pub fn nnf<A: Atom>(f: &Formula<A>) -> Formula<A> {
    go_nnf(f, true)
}

fn go_nnf<A: Atom>(f: &Formula<A>, pos: bool) -> Formula<A> {
    match f {
        Formula::Atom(a) => {
            if pos {
                Formula::Atom(a.clone())
            } else {
                Formula::not(Formula::Atom(a.clone()))
            }
        }
        Formula::Not(g) => go_nnf(g, !pos),
        Formula::And(gs) | Formula::Or(gs) => {
            let parts = gs.iter().map(|g| go_nnf(g, pos)).collect();
            if matches!(f, Formula::And(_)) == pos {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            }
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let body = go_nnf(g, pos);
            if matches!(f, Formula::Exists(..)) == pos {
                Formula::exists(*v, body)
            } else {
                Formula::forall(*v, body)
            }
        }
    }
}

type Clause<A> = Vec<Literal<A>>;

/// Adds a literal to a sorted clause. Returns false when the clause becomes
/// contradictory.
fn push_lit<A: Atom>(c: &mut BTreeSet<Literal<A>>, l: Literal<A>) -> bool {
    let l = Literal {
        atom: l.atom.canonical(),
        positive: l.positive,
    };
    match l.atom.truth() {
        Some(t) if t == l.positive => return true,
        Some(_) => return false,
        None => {}
    }
    if c.contains(&l.negate()) {
        return false;
    }
    c.insert(l);
    true
}

/// The DNF of a quantifier-free formula as a list of literal clauses. Clauses
/// are deduplicated, contradictory ones dropped, and the empty list means ⊥.
pub fn dnf<A: Atom>(f: &Formula<A>, cap: usize) -> Result<Vec<Clause<A>>, NormalError> {
    if !f.is_quantifier_free() {
        return Err(NormalError::NotQuantifierFree);
    }
    let input_size = f.count_nodes();
    let sets = go_dnf(&nnf(f), cap, input_size)?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for s in sets {
        let c: Clause<A> = s.into_iter().collect();
        if seen.insert(c.clone()) {
            out.push(c);
        }
    }
    Ok(out)
}

fn go_dnf<A: Atom>(f: &Formula<A>, cap: usize, input_size: usize) -> Result<Vec<BTreeSet<Literal<A>>>, NormalError> {
    let over = || NormalError::DnfCap { cap, input_size };
    match f {
        Formula::Atom(a) => {
            let mut c = BTreeSet::new();
            Ok(if push_lit(&mut c, Literal::pos(a.clone())) { vec![c] } else { vec![] })
        }
        Formula::Not(g) => match g.as_ref() {
            Formula::Atom(a) => {
                let mut c = BTreeSet::new();
                Ok(if push_lit(&mut c, Literal::neg(a.clone())) { vec![c] } else { vec![] })
            }
            _ => unreachable!("input is in NNF"),
        },
        Formula::Or(gs) => {
            let mut out = Vec::new();
            let mut size = 0;
            for g in gs {
                for c in go_dnf(g, cap, input_size)? {
                    size += c.len().max(1);
                    if size > cap {
                        return Err(over());
                    }
                    out.push(c);
                }
            }
            Ok(out)
        }
        Formula::And(gs) => {
            let mut acc = vec![BTreeSet::new()];
            for g in gs {
                let part = go_dnf(g, cap, input_size)?;
                let mut next = Vec::new();
                let mut size = 0;
                for a in &acc {
                    for b in &part {
                        let mut c = a.clone();
                        if b.iter().all(|l| push_lit(&mut c, l.clone())) {
                            size += c.len().max(1);
                            if size > cap {
                                return Err(over());
                            }
                            next.push(c);
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
        Formula::Exists(..) | Formula::Forall(..) => Err(NormalError::NotQuantifierFree),
    }
}

pub fn clauses_to_formula<A: Atom>(cs: &[Clause<A>]) -> Formula<A> {
    Formula::or(
        cs.iter()
            .map(|c| Formula::and(c.iter().map(|l| l.to_formula()).collect()))
            .collect(),
    )
}

pub fn dnf_formula<A: Atom>(f: &Formula<A>, cap: usize) -> Result<Formula<A>, NormalError> {
    Ok(clauses_to_formula(&dnf(f, cap)?))
}

/// Constant folding, flattening and duplicate removal. Atoms are replaced by
/// their canonical representatives. Semantics are preserved in every structure.
pub fn simplify<A: Atom>(f: &Formula<A>) -> Formula<A> {
    match f {
        Formula::Atom(a) => match a.truth() {
            Some(true) => Formula::top(),
            Some(false) => Formula::bottom(),
            None => Formula::Atom(a.canonical()),
        },
        Formula::Not(g) => {
            let g = simplify(g);
            if g.is_top() {
                Formula::bottom()
            } else if g.is_bottom() {
                Formula::top()
            } else if let Formula::Not(h) = g {
                *h
            } else {
                Formula::not(g)
            }
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let is_and = matches!(f, Formula::And(_));
            let mut parts: Vec<Formula<A>> = Vec::new();
            for g in gs {
                let g = simplify(g);
                let absorbing = if is_and { g.is_bottom() } else { g.is_top() };
                if absorbing {
                    return g;
                }
                match g {
                    Formula::And(hs) if is_and => parts.extend(hs),
                    Formula::Or(hs) if !is_and => parts.extend(hs),
                    _ => parts.push(g),
                }
            }
            let mut seen = BTreeSet::new();
            parts.retain(|p| seen.insert(p.clone()));
            for p in &parts {
                let neg = match p {
                    Formula::Not(h) => (**h).clone(),
                    _ => Formula::not(p.clone()),
                };
                if seen.contains(&neg) {
                    return if is_and { Formula::bottom() } else { Formula::top() };
                }
            }
            if is_and {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let body = simplify(g);
            if body.is_top() || body.is_bottom() || !body.free_vars().contains(v) {
                // domains are nonempty
                return body;
            }
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(*v, body)
            } else {
                Formula::forall(*v, body)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::atoms::EqAtom;
    use crate::logic::parse::parse_formula;

    fn p(s: &str) -> Formula<EqAtom> {
        parse_formula(s).unwrap()
    }

    #[test]
    fn de_morgan() {
        assert_eq!(nnf(&p("(not (and (E a b) (E b c)))")), p("(or (not (E a b)) (not (E b c)))"));
    }

    #[test]
    fn distribution() {
        let d = dnf_formula(&p("(and (or (E a b) (E b c)) (E c d))"), DEFAULT_DNF_CAP).unwrap();
        assert_eq!(d, p("(or (and (E a b) (E c d)) (and (E b c) (E c d)))"));
    }

    #[test]
    fn literal_split_of_atom() {
        match normalize(&p("(E a b)"), NormalMode::LiteralSplit, DEFAULT_DNF_CAP).unwrap() {
            Normalized::Split(v) => {
                assert_eq!(v.len(), 1);
                assert_eq!(v[0].positives.len(), 1);
                assert!(v[0].negatives.is_empty());
            }
            _ => panic!(),
        }
    }

    #[test]
    fn cap_is_enforced() {
        let big = p("(and (or (E a b) (E b c)) (or (E c d) (E d e)) (or (E e f) (E f g)))");
        assert_eq!(
            dnf(&big, 10).unwrap_err(),
            NormalError::DnfCap {
                cap: 10,
                input_size: big.count_nodes()
            }
        );
    }

    #[test]
    fn contradictions_vanish() {
        assert!(dnf(&p("(and (E a b) (not (E b a)))"), 100).unwrap().is_empty());
        assert!(simplify(&p("(or (E a a) (E a b))")).is_top());
    }
}
