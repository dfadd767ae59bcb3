//! Fiber sizes of conjunctions with a link s0(x) = t0(y) or s0(x) E t0(y),
//! as polynomials in the size X of one class.
//!
//! The link pins the class of x to that of t0(y). Writing x through its
//! coordinates (see [`Layer`]), positive equalities fix or identify
//! coordinates, negated ones are removed by inclusion–exclusion, and each free
//! coordinate contributes a factor X. Facts about the parameters are decided
//! lazily through a Shannon split, so every leaf carries one polynomial.

use std::cell::Cell;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::json;
use thiserror::Error;

use super::trace::{Dsu, Layer};
use crate::counting::boolean::sign;
use crate::counting::Poly;
use crate::logic::normal::simplify;
use crate::logic::qe::QeError;
use crate::logic::shannon::{eval_lazy, merge_leaves, shannon, Need, Oracle, ShannonError};
use crate::logic::{Atom, FgString, Formula, LiteralConjunction, PairAtom, PairFormula, PairTerm, Var};
use crate::models::{eval, Env, ModelError, PairModel};
use crate::CardExpr;

use super::intermediate::IntermediateForm;

/// Name of the anchor-class size in every polynomial.
pub const ANCHOR: &str = "X";

const MAX_LEAVES: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyCardError {
    #[error("no positive literal links the variable to a parameter")]
    NoLink,
    #[error("no distinguished variable")]
    NoVariable,
    #[error("literal {0} does not mention the eliminated variable")]
    Stray(String),
    #[error("too many negated literals ({0}) for inclusion-exclusion")]
    TooManyNegations(usize),
    #[error("case {0} has the zero polynomial")]
    ZeroPoly(usize),
    #[error(transparent)]
    Shannon(#[from] ShannonError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCase {
    pub guard: PairFormula,
    pub poly: CardExpr,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyCardDef {
    pub x: Var,
    /// The fiber size is a polynomial in |[anchor]_E|.
    pub anchor: PairTerm,
    pub cases: Vec<PolyCase>,
    /// Exact on models with at least this many classes.
    pub min_n: u32,
}

/// 1 + max |a_i / a_d|, rounded up: no integer at or above it is a root.
pub fn cauchy_bound(p: &CardExpr) -> BigInt {
    let cs = p.coefficients_in(ANCHOR).expect("polynomial in the anchor only");
    let lead = cs.last().expect("nonempty").abs();
    if cs.len() == 1 {
        return BigInt::zero();
    }
    let worst = cs[..cs.len() - 1]
        .iter()
        .map(|c| (c.abs() + &lead - 1u32) / &lead)
        .max()
        .unwrap_or_default();
    worst + 1u32
}

/// The case of a definition that fires at one parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Firing {
    pub case: usize,
    pub anchor_size: usize,
    pub value: BigInt,
    /// Whether the anchor class is large enough for the case's root bound.
    pub above_bound: bool,
}

impl PolyCardDef {
    pub fn case_bound(&self, i: usize) -> BigInt {
        cauchy_bound(&self.cases[i].poly)
    }

    pub fn cauchy_bound(&self) -> BigInt {
        (0..self.cases.len()).map(|i| self.case_bound(i)).max().unwrap_or_default()
    }

    /// Evaluates the guards at `env`. Errors if two guards hold.
    pub fn fire(&self, m: &PairModel, env: &Env) -> Result<Option<Firing>, PolyCardError> {
        let mut hit = None;
        for (i, c) in self.cases.iter().enumerate() {
            if eval(m, &c.guard, env)? {
                if hit.is_some() {
                    return Err(PolyCardError::Model(ModelError::Invalid(format!("two guards hold for {}", self.anchor))));
                }
                hit = Some(i);
            }
        }
        Ok(hit.map(|i| {
            let size = m.class_size(m.class(m.term(&self.anchor, env)));
            let big = BigInt::from(size);
            let binding = [(ANCHOR.to_string(), big.clone())].into_iter().collect();
            Firing {
                case: i,
                anchor_size: size,
                value: self.cases[i].poly.eval(&binding).expect("anchor bound"),
                above_bound: big >= self.case_bound(i),
            }
        }))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let num = |c: &BigInt| c.to_i64().map_or_else(|| json!(c.to_string()), |v| json!(v));
        json!({
            "anchor": self.anchor.to_string(),
            "cases": self.cases.iter().map(|c| json!({
                "guard": c.guard.to_string(),
                "poly": c.poly.coefficients_in(ANCHOR).unwrap_or_default().iter().map(num).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "cauchy_bound": num(&self.cauchy_bound()),
            "min_n": self.min_n,
        })
    }
}

impl fmt::Display for PolyCardDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{ANCHOR} = |[{}]|", self.anchor)?;
        for c in &self.cases {
            writeln!(f, "  {} if {}", c.poly, c.guard)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Lit {
    /// E, Cinit or Cfin with x on the first side.
    Class(PairAtom, bool),
    /// s(x) = t(y) with y a parameter.
    Fix(FgString, PairTerm, bool),
    /// s(x) = t(x).
    Same(FgString, FgString, bool),
}

enum Con {
    Fix(usize, PairTerm),
    Join(usize, usize),
}

fn x_first(a: &PairTerm, b: &PairTerm, x: Var) -> (PairTerm, PairTerm) {
    if a.var == x {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn at(a: PairAtom) -> PairFormula {
    Formula::atom(a)
}

fn truth(b: bool) -> PairFormula {
    if b {
        Formula::top()
    } else {
        Formula::bottom()
    }
}

struct Engine {
    k: usize,
    s0: usize,
    t0: PairTerm,
    lits: Vec<Lit>,
    need: Cell<u32>,
}

type Ask<'a> = dyn FnMut(&PairAtom) -> Result<bool, Need<PairAtom>> + 'a;

impl Engine {
    fn up(&self, d: usize) -> PairTerm {
        self.t0.wrap(&FgString::f_power(d))
    }

    fn anchor(&self) -> PairTerm {
        self.up(self.k - self.s0)
    }

    fn guard(&self, layer: Layer) -> PairFormula {
        match layer {
            Layer::Generic(_) => {
                let mut g = vec![Formula::not(at(PairAtom::Cfin(0, self.anchor())))];
                g.extend((0..self.s0).map(|j| Formula::not(at(PairAtom::Cinit(j as u32, self.t0.clone())))));
                Formula::and(g)
            }
            Layer::Fin(l) => at(PairAtom::Cfin(l.saturating_sub(self.s0) as u32, self.t0.clone())),
        }
    }

    /// s(x) E t(y) with |s| = a.
    fn same_class(&self, layer: Layer, a: usize, t: &PairTerm) -> PairFormula {
        match layer {
            Layer::Generic(_) if a >= self.s0 => at(PairAtom::E(self.up(a - self.s0), t.clone())),
            Layer::Generic(_) => at(PairAtom::E(self.t0.clone(), t.wrap(&FgString::f_power(self.s0 - a)))),
            Layer::Fin(_) => at(PairAtom::Cfin(layer.excess(a) as u32, t.clone())),
        }
    }

    fn class_lit(&self, layer: Layer, atom: &PairAtom) -> PairFormula {
        match atom {
            PairAtom::E(s, t) if t.var == s.var => truth(match layer {
                Layer::Generic(_) => s.len() == t.len(),
                Layer::Fin(_) => layer.excess(s.len()) == layer.excess(t.len()),
            }),
            PairAtom::E(s, t) => self.same_class(layer, s.len(), t),
            PairAtom::Cinit(k, s) => {
                let (k, a) = (*k as usize, s.len());
                match layer {
                    Layer::Generic(_) if a >= self.s0 => at(PairAtom::Cinit(k as u32, self.up(a - self.s0))),
                    Layer::Generic(_) => at(PairAtom::Cinit((k + self.s0 - a) as u32, self.t0.clone())),
                    Layer::Fin(_) => {
                        let (e0, ea) = (layer.excess(self.s0), layer.excess(a));
                        if e0 == 0 {
                            // t0(y) sits in C_fin and says nothing about the number of classes
                            self.need.set(self.need.get().max((k + ea + 2) as u32));
                            Formula::bottom()
                        } else if ea <= e0 {
                            at(PairAtom::Cinit(k as u32, self.up(e0 - ea)))
                        } else {
                            at(PairAtom::Cinit((k + ea - e0) as u32, self.t0.clone()))
                        }
                    }
                }
            }
            PairAtom::Cfin(k, s) => {
                let (k, a) = (*k as usize, s.len());
                match layer {
                    Layer::Generic(_) if a >= self.s0 => at(PairAtom::Cfin(k as u32, self.up(a - self.s0))),
                    Layer::Generic(_) => {
                        let k2 = k as i64 + a as i64 - self.s0 as i64;
                        if k2 >= 1 {
                            at(PairAtom::Cfin(k2 as u32, self.t0.clone()))
                        } else {
                            Formula::bottom()
                        }
                    }
                    Layer::Fin(_) => truth(layer.excess(a) == k),
                }
            }
            PairAtom::Eq(..) => unreachable!("equalities are not class literals"),
        }
    }

    fn fixes(&self, layer: Layer, s: &FgString, t: &PairTerm) -> Vec<Con> {
        layer.coords(s).into_iter().map(|(u, p)| Con::Fix(p, t.wrap(&u))).collect()
    }

    /// X to the number of free coordinates, or None if the constraints clash.
    fn solutions(&self, layer: Layer, cons: &[&Con], ask: &mut Ask) -> Result<Option<u32>, Need<PairAtom>> {
        let size = 1 << layer.depth();
        let mut d = Dsu::new(size);
        for c in cons {
            if let Con::Join(a, b) = c {
                d.union(*a, *b);
            }
        }
        let mut fixed: Vec<Option<&PairTerm>> = vec![None; size];
        for c in cons {
            if let Con::Fix(p, t) = c {
                let r = d.find(*p);
                match fixed[r] {
                    None => fixed[r] = Some(t),
                    Some(u) => {
                        if !ask(&PairAtom::Eq(u.clone(), t.clone()))? {
                            return Ok(None);
                        }
                    }
                }
            }
        }
        Ok(Some((0..size).filter(|&p| d.find(p) == p && fixed[p].is_none()).count() as u32))
    }

    fn layer_count(&self, layer: Layer, ask: &mut Ask) -> Result<CardExpr, Need<PairAtom>> {
        let zero = Ok(Poly::zero());
        let mut base: Vec<Con> = Vec::new();
        let mut negs: Vec<Vec<Con>> = Vec::new();
        for lit in &self.lits {
            match lit {
                Lit::Class(a, pos) => {
                    if eval_lazy(&self.class_lit(layer, a), ask)? != *pos {
                        return zero;
                    }
                }
                Lit::Fix(s, t, pos) => {
                    let met = eval_lazy(&self.same_class(layer, s.len(), t), ask)?;
                    match (met, pos) {
                        (false, true) => return zero,
                        (false, false) => {}
                        (true, true) => base.extend(self.fixes(layer, s, t)),
                        (true, false) => negs.push(self.fixes(layer, s, t)),
                    }
                }
                Lit::Same(s, t, pos) => match (layer.self_pairs(s, t), pos) {
                    (None, true) => return zero,
                    (None, false) => {}
                    (Some(ps), true) => base.extend(ps.into_iter().map(|(a, b)| Con::Join(a, b))),
                    (Some(ps), false) => negs.push(ps.into_iter().map(|(a, b)| Con::Join(a, b)).collect()),
                },
            }
        }
        let x: CardExpr = Poly::var(ANCHOR);
        let mut total = Poly::zero();
        for mask in 0u32..(1 << negs.len()) {
            let mut cons: Vec<&Con> = base.iter().collect();
            for (i, n) in negs.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    cons.extend(n.iter());
                }
            }
            if let Some(free) = self.solutions(layer, &cons, ask)? {
                total = &total + &x.pow(free).scale(&sign::<BigInt>(mask.count_ones() as usize));
            }
        }
        Ok(total)
    }

    fn count(&self, oracle: &Oracle<PairAtom>) -> Result<CardExpr, Need<PairAtom>> {
        let mut ask = |a: &PairAtom| oracle.holds(a);
        let mut total = Poly::zero();
        for layer in Layer::all(self.k) {
            if eval_lazy(&self.guard(layer), &mut ask)? {
                total = &total + &self.layer_count(layer, &mut ask)?;
            }
        }
        Ok(total)
    }
}

/// Decides atoms that follow from the decided ones by equality reasoning.
pub fn pair_implied(decided: &[(PairAtom, bool)], a: &PairAtom) -> Option<bool> {
    let mut terms: Vec<PairTerm> = Vec::new();
    let id = |t: &PairTerm, terms: &mut Vec<PairTerm>| match terms.iter().position(|u| u == t) {
        Some(i) => i,
        None => {
            terms.push(t.clone());
            terms.len() - 1
        }
    };
    for (b, _) in decided.iter().chain(std::iter::once(&(a.clone(), true))) {
        for t in b.terms() {
            id(t, &mut terms);
        }
    }
    let ix = |t: &PairTerm| terms.iter().position(|u| u == t).expect("collected");
    let mut eq = Dsu::new(terms.len());
    let mut cls = Dsu::new(terms.len());
    let mut fin: Vec<Option<u32>> = vec![None; terms.len()];
    for (b, v) in decided {
        match (b, v) {
            (PairAtom::Eq(s, t), true) => {
                eq.union(ix(s), ix(t));
                cls.union(ix(s), ix(t));
            }
            (PairAtom::E(s, t), true) => cls.union(ix(s), ix(t)),
            _ => {}
        }
    }
    for (b, v) in decided {
        if let (PairAtom::Cfin(k, t), true) = (b, v) {
            let r = cls.find(ix(t));
            fin[r] = Some(*k);
        }
    }
    let apart = |s: usize, t: usize, cls: &mut Dsu| {
        let (rs, rt) = (cls.find(s), cls.find(t));
        let by_fin = matches!((fin[rs], fin[rt]), (Some(i), Some(j)) if i != j);
        by_fin
            || decided.iter().any(|(b, v)| match (b, v) {
                (PairAtom::E(c, d), false) => {
                    let (rc, rd) = (cls.find(ix(c)), cls.find(ix(d)));
                    (rc, rd) == (rs, rt) || (rc, rd) == (rt, rs)
                }
                _ => false,
            })
    };
    match a {
        PairAtom::Eq(s, t) => {
            let (s, t) = (ix(s), ix(t));
            if eq.find(s) == eq.find(t) {
                return Some(true);
            }
            if apart(s, t, &mut cls) {
                return Some(false);
            }
            let (rs, rt) = (eq.find(s), eq.find(t));
            decided
                .iter()
                .any(|(b, v)| match (b, v) {
                    (PairAtom::Eq(c, d), false) => {
                        let (rc, rd) = (eq.find(ix(c)), eq.find(ix(d)));
                        (rc, rd) == (rs, rt) || (rc, rd) == (rt, rs)
                    }
                    _ => false,
                })
                .then_some(false)
        }
        PairAtom::E(s, t) => {
            let (s, t) = (ix(s), ix(t));
            let (rs, rt) = (cls.find(s), cls.find(t));
            if rs == rt || matches!((fin[rs], fin[rt]), (Some(i), Some(j)) if i == j) {
                return Some(true);
            }
            apart(s, t, &mut cls).then_some(false)
        }
        PairAtom::Cinit(k, t) | PairAtom::Cfin(k, t) => {
            let r = cls.find(ix(t));
            let is_fin = matches!(a, PairAtom::Cfin(..));
            if is_fin {
                if let Some(j) = fin[r] {
                    return Some(j == *k);
                }
            }
            decided.iter().find_map(|(b, v)| match b {
                PairAtom::Cinit(j, u) if !is_fin && j == k && cls.find(ix(u)) == r => Some(*v),
                PairAtom::Cfin(j, u) if is_fin && j == k && cls.find(ix(u)) == r => Some(*v),
                _ => None,
            })
        }
    }
}

fn classify(lc: &LiteralConjunction<PairAtom>, x: Var) -> Result<(Vec<Lit>, Option<(FgString, PairTerm)>), PolyCardError> {
    let mut lits = Vec::new();
    let mut link = None;
    for l in lc.literals() {
        let a = l.atom.clone();
        if !a.mentions(x) {
            return Err(PolyCardError::Stray(l.to_formula().to_string()));
        }
        let lit = match &a {
            PairAtom::Eq(p, q) | PairAtom::E(p, q) => {
                let (s, t) = x_first(p, q, x);
                let is_eq = matches!(a, PairAtom::Eq(..));
                if t.var != x && l.positive && link.is_none() {
                    link = Some((s.s.clone(), t.clone()));
                }
                match (is_eq, t.var == x) {
                    (true, true) => Lit::Same(s.s, t.s, l.positive),
                    (true, false) => Lit::Fix(s.s, t, l.positive),
                    (false, _) => Lit::Class(PairAtom::E(s, t), l.positive),
                }
            }
            _ => Lit::Class(a.clone(), l.positive),
        };
        lits.push(lit);
    }
    Ok((lits, link))
}

/// Fiber sizes of the conjunction over its parameters. The conjunction needs a
/// positive literal s(x) = t(y) or s(x) E t(y) with y ≠ x.
pub fn polycard_literals(lc: &LiteralConjunction<PairAtom>) -> Result<PolyCardDef, PolyCardError> {
    let x = lc.distinguished.ok_or(PolyCardError::NoVariable)?;
    let (lits, link) = classify(lc, x)?;
    let (s0, t0) = link.ok_or(PolyCardError::NoLink)?;
    let negs = lits.iter().filter(|l| matches!(l, Lit::Fix(.., false) | Lit::Same(.., false))).count();
    if negs > 16 {
        return Err(PolyCardError::TooManyNegations(negs));
    }
    let k = lc.positives.iter().chain(&lc.negatives).map(|a| a.max_len()).max().unwrap_or(0);
    let engine = Engine {
        k,
        s0: s0.len(),
        t0,
        lits,
        need: Cell::new(k as u32 + 1),
    };
    let leaves = shannon(|o| engine.count(o), Some(&pair_implied), MAX_LEAVES)?;
    let cases = merge_leaves(leaves)
        .into_iter()
        .filter(|(g, v)| !v.is_zero() && !g.is_bottom())
        .map(|(guard, poly)| PolyCase { guard, poly })
        .collect();
    Ok(PolyCardDef {
        x,
        anchor: engine.anchor(),
        cases,
        min_n: engine.need.get(),
    })
}

/// The same computation for a conjunction already in intermediate form.
pub fn polycard_basic(form: &IntermediateForm) -> Result<PolyCardDef, PolyCardError> {
    let lc = LiteralConjunction::new(form.to_formula().atoms(), Vec::new()).with_distinguished(form.x);
    polycard_literals(&lc)
}

/// ∃x as the disjunction of the guards, with the root bound it relies on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedFormula {
    pub formula: PairFormula,
    /// Exact where the anchor class has at least this many elements.
    pub cauchy_bound: BigInt,
    pub min_n: u32,
}

pub fn exists_from_polycard(p: &PolyCardDef) -> Result<BoundedFormula, PolyCardError> {
    if let Some(i) = p.cases.iter().position(|c| c.poly.is_zero()) {
        return Err(PolyCardError::ZeroPoly(i));
    }
    Ok(BoundedFormula {
        formula: simplify(&Formula::or(p.cases.iter().map(|c| c.guard.clone()).collect())),
        cauchy_bound: p.cauchy_bound(),
        min_n: p.min_n,
    })
}

impl From<PolyCardError> for QeError {
    fn from(e: PolyCardError) -> Self {
        QeError::Unsupported(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::models::{count, for_each_tuple, Structure};

    fn lc(s: &str) -> LiteralConjunction<PairAtom> {
        let f: PairFormula = parse_formula(s).unwrap();
        let lits: Vec<_> = crate::logic::normal::dnf(&f, 64).unwrap().remove(0);
        LiteralConjunction::from_literals(&lits).with_distinguished(Var::new("x"))
    }

    fn poly(s: &[i64]) -> CardExpr {
        Poly::univariate(ANCHOR, &s.iter().map(|&c| BigInt::from(c)).collect::<Vec<_>>())
    }

    /// Brute-force check of every parameter tuple where the definition claims exactness.
    pub(crate) fn check(d: &PolyCardDef, body: &LiteralConjunction<PairAtom>, n: u32, m: u32) -> usize {
        if n < d.min_n {
            return 0;
        }
        let model = PairModel::new(n, m);
        let f = body.to_formula();
        let mut params: Vec<Var> = f.free_vars().into_iter().filter(|v| *v != d.x).collect();
        params.sort();
        let mut checked = 0;
        for_each_tuple(model.size(), params.len(), |t| {
            let env = Env::of(&params.iter().copied().zip(t.iter().copied()).collect::<Vec<_>>());
            let truth = count(&model, &f, &env, &[d.x]).unwrap();
            match d.fire(&model, &env).unwrap() {
                None => assert!(truth.is_zero(), "{f}: no guard but {truth} solutions at {t:?}"),
                Some(h) => {
                    assert_eq!(BigInt::from(truth), h.value, "{f} case {} at {t:?} in ({n},{m})\n{d}", h.case);
                }
            }
            checked += 1;
        });
        checked
    }

    #[test]
    fn single_link() {
        let d = polycard_literals(&lc(r#"(= (app "f" x) y)"#)).unwrap();
        assert_eq!(d.anchor.to_string(), "y");
        let mut polys: Vec<String> = d.cases.iter().map(|c| c.poly.to_string()).collect();
        polys.sort();
        assert_eq!(polys, vec!["X", "X + 1"]);
        let fin = d.cases.iter().find(|c| c.poly == poly(&[1, 1])).unwrap();
        assert_eq!(fin.guard, parse_formula("(Cfin 0 y)").unwrap());
        check(&d, &lc(r#"(= (app "f" x) y)"#), 3, 2);
        check(&d, &lc(r#"(= (app "f" x) y)"#), 4, 2);
    }

    #[test]
    fn two_links() {
        let body = lc(r#"(and (= (app "f" x) y) (= (app "g" x) z))"#);
        let d = polycard_literals(&body).unwrap();
        let mut polys: Vec<String> = d.cases.iter().map(|c| c.poly.to_string()).collect();
        polys.sort();
        assert_eq!(polys, vec!["1", "2"]);
        check(&d, &body, 3, 2);
        check(&d, &body, 4, 2);
    }

    #[test]
    fn deep_link_and_negation() {
        let body = lc(r#"(= (app "ff" x) y)"#);
        let d = polycard_literals(&body).unwrap();
        assert!(d.cases.iter().any(|c| c.poly == poly(&[0, 0, 0, 1])));
        check(&d, &body, 4, 2);

        let body = lc(r#"(and (E (app "f" x) y) (not (= (app "f" x) y)))"#);
        let d = polycard_literals(&body).unwrap();
        assert!(d.cases.iter().any(|c| c.poly == poly(&[0, -1, 1])));
        assert_eq!(check(&d, &body, 3, 2), 22);

        let (x, y) = (Var::new("x"), Var::new("y"));
        let contra = LiteralConjunction::new(
            vec![PairAtom::E(PairTerm::app("f", x), PairTerm::var(y))],
            vec![PairAtom::Eq(PairTerm::var(x), PairTerm::var(x))],
        )
        .with_distinguished(x);
        let d = polycard_literals(&contra).unwrap();
        assert!(d.cases.is_empty());
        assert!(exists_from_polycard(&d).unwrap().formula.is_bottom());
    }

    #[test]
    fn mixed_shapes() {
        for s in [
            r#"(and (= (app "f" x) y) (not (= (app "g" x) z)))"#,
            r#"(and (E x y) (not (= (app "f" x) (app "f" y))))"#,
            r#"(and (= (app "g" x) (app "f" y)) (= (app "f" x) (app "g" x)))"#,
            r#"(and (E (app "g" x) y) (Cfin 1 x) (not (= (app "ff" x) z)))"#,
            r#"(and (= (app "fg" x) y) (not (Cinit 1 (app "g" x))))"#,
            r#"(and (= x (app "f" y)) (not (E (app "g" x) z)))"#,
            r#"(and (E (app "f" x) (app "g" y)) (not (= (app "f" x) (app "g" x))) (not (= (app "g" x) z)))"#,
        ] {
            let body = lc(s);
            let d = polycard_literals(&body).unwrap();
            let mut total = 0;
            for (n, m) in [(3, 2), (3, 3), (4, 2)] {
                total += check(&d, &body, n, m);
            }
            assert!(total > 0, "{s} never checked");
        }
    }

    #[test]
    fn bounds_and_json() {
        assert_eq!(cauchy_bound(&poly(&[0, -1, 1])), BigInt::from(2));
        assert_eq!(cauchy_bound(&poly(&[0, 1])), BigInt::from(1));
        assert_eq!(cauchy_bound(&poly(&[2])), BigInt::from(0));
        let d = polycard_literals(&lc(r#"(= (app "f" x) y)"#)).unwrap();
        let j = d.to_json();
        assert_eq!(j["anchor"], "y");
        assert_eq!(j["cases"].as_array().unwrap().len(), 2);
        let e = exists_from_polycard(&PolyCardDef { cases: vec![], ..d.clone() }).unwrap();
        assert!(e.formula.is_bottom());
        let bad = PolyCardDef {
            cases: vec![PolyCase { guard: Formula::top(), poly: Poly::zero() }],
            ..d
        };
        assert_eq!(exists_from_polycard(&bad), Err(PolyCardError::ZeroPoly(0)));
    }

    #[test]
    fn intermediate_basic_agrees() {
        let x = Var::new("x");
        let body = lc(r#"(and (= (app "f" x) y) (= (app "g" x) (app "g" x)))"#);
        let form = super::super::intermediate::rewrite_intermediate(&body.positives, x);
        let d = polycard_basic(&form).unwrap();
        let blc = LiteralConjunction::new(form.to_formula().atoms(), vec![]).with_distinguished(x);
        check(&d, &blc, 4, 2);
    }

    #[test]
    fn implied_facts() {
        let (y, z, w) = (Var::new("y"), Var::new("z"), Var::new("w"));
        let t = |v| PairTerm::var(v);
        let d = vec![(PairAtom::Eq(t(y), t(z)), true), (PairAtom::Cfin(1, t(w)), true)];
        assert_eq!(pair_implied(&d, &PairAtom::E(t(z), t(y))), Some(true));
        assert_eq!(pair_implied(&d, &PairAtom::Cfin(2, t(w))), Some(false));
        assert_eq!(pair_implied(&d, &PairAtom::Eq(t(z), t(w))), None);
        let d = vec![(PairAtom::Cfin(0, t(y)), true), (PairAtom::Cfin(1, t(w)), true)];
        assert_eq!(pair_implied(&d, &PairAtom::Eq(t(y), t(w))), Some(false));
    }
}
