//! Elimination for the successor theory with endpoints, and the passage
//! between equivalence formulas of the pairing signature and that theory.
//!
//! On an interval {0..L} with S(x) = min(x+1, L), an atom S^a x = S^b w is,
//! depending on whether S^b w = c_fin, either the ray x ≥ L-a or the exact
//! equation x + a = w + b. Splitting on those parameter atoms leaves either an
//! equation that fixes x, or rays and excluded points, for which the top few
//! candidate values of x decide existence.

use crate::logic::normal::{simplify, DEFAULT_DNF_CAP};
use crate::logic::qe::{eliminate_all, Eliminator, QeError};
use crate::logic::{Atom, Formula, LiteralConjunction, PairAtom, PairFormula, PairTerm, StarAtom, StarBase, StarFormula, StarTerm, Var};
use crate::logic::FgString;

fn st(a: StarTerm, b: StarTerm) -> StarFormula {
    Formula::atom(StarAtom::new(a, b))
}

fn shift(t: StarTerm, d: u32) -> StarTerm {
    StarTerm { base: t.base, k: t.k + d }
}

#[derive(Debug, Clone)]
enum XLit {
    /// S^a x = c_fin.
    Ray { a: u32, pos: bool },
    /// S^a x = w with w a term not based on x or c_fin.
    Rel { a: u32, w: StarTerm, pos: bool },
    /// x + a ≠ w, where w lies strictly below c_fin.
    Excl { a: u32, w: StarTerm },
}

enum Pre {
    Lit(XLit),
    Const(bool),
}

fn classify(x: Var, atom: &StarAtom, pos: bool) -> Pre {
    let StarAtom(l, r) = *atom;
    let is_x = |t: StarTerm| t.base == StarBase::Var(x);
    match (is_x(l), is_x(r)) {
        (true, true) => {
            if l.k == r.k {
                Pre::Const(pos)
            } else {
                Pre::Lit(XLit::Ray { a: l.k.min(r.k), pos })
            }
        }
        (true, false) | (false, true) => {
            let (xt, w) = if is_x(l) { (l, r) } else { (r, l) };
            if w.base == StarBase::Fin {
                Pre::Lit(XLit::Ray { a: xt.k, pos })
            } else {
                Pre::Lit(XLit::Rel { a: xt.k, w, pos })
            }
        }
        (false, false) => Pre::Const(true),
    }
}

fn at_fin(w: StarTerm) -> StarFormula {
    st(w, StarTerm::fin())
}

/// All literals with x = S^o(base) substituted, where o may be negative and
/// base lies strictly below c_fin.
fn substituted(lits: &[XLit], base: StarTerm, o: i64) -> StarFormula {
    let mut out = Vec::new();
    for l in lits {
        let (a, rhs, positive) = match l {
            XLit::Ray { a, pos } => (*a, StarTerm::fin(), *pos),
            XLit::Rel { a, w, pos } => (*a, *w, *pos),
            XLit::Excl { a, w } => (*a, *w, false),
        };
        let k = o + a as i64;
        let atom = if k >= 0 {
            st(shift(base, k as u32), rhs)
        } else if rhs.base == StarBase::Fin {
            // S^a x lies below base, hence below c_fin
            Formula::bottom()
        } else {
            st(base, shift(rhs, (-k) as u32))
        };
        out.push(if positive { atom } else { Formula::not(atom) });
    }
    Formula::and(out)
}

fn candidates(lits: &[XLit]) -> StarFormula {
    let mut p: Option<u32> = None;
    let mut q: Option<u32> = None;
    let mut excl = Vec::new();
    for l in lits {
        match l {
            XLit::Ray { a, pos: true } => p = Some(p.map_or(*a, |p| p.min(*a))),
            XLit::Ray { a, pos: false } => q = Some(q.map_or(*a, |q| q.max(*a))),
            XLit::Excl { a, w } => excl.push((*a, *w)),
            XLit::Rel { .. } => unreachable!("relations are split before candidates"),
        }
    }
    let c0 = q.map_or(0, |q| q + 1);
    let top = c0 + excl.len() as u32;
    let top = p.map_or(top, |p| top.min(p));
    let mut out = Vec::new();
    for c in c0..=top {
        // x = L - c
        let mut conj = Vec::new();
        if c > 0 {
            conj.push(Formula::not(at_fin(StarTerm::init(c - 1))));
        }
        for (a, w) in &excl {
            if *a < c {
                let d = c - a;
                let hit = Formula::and(vec![at_fin(shift(*w, d)), Formula::not(at_fin(shift(*w, d - 1)))]);
                conj.push(Formula::not(hit));
            }
        }
        out.push(Formula::and(conj));
    }
    Formula::or(out)
}

fn ex(lits: Vec<XLit>) -> StarFormula {
    if let Some(i) = lits.iter().position(|l| matches!(l, XLit::Rel { pos: true, .. })) {
        let XLit::Rel { a, w, .. } = lits[i] else { unreachable!() };
        let p = at_fin(w);
        let mut ray = lits.clone();
        ray[i] = XLit::Ray { a, pos: true };
        let sat = ex(ray);
        // otherwise x + a = w exactly
        let base = StarTerm { base: w.base, k: 0 };
        let o = w.k as i64 - a as i64;
        let room = Formula::and((0..(-o).max(0) as u32).map(|i| Formula::not(st(base, StarTerm::init(i)))).collect());
        let rest = substituted(&lits, base, o);
        return simplify(&Formula::or(vec![
            Formula::and(vec![p.clone(), sat]),
            Formula::and(vec![Formula::not(p), room, rest]),
        ]));
    }
    if let Some(i) = lits.iter().position(|l| matches!(l, XLit::Rel { pos: false, .. })) {
        let XLit::Rel { a, w, .. } = lits[i] else { unreachable!() };
        let p = at_fin(w);
        let mut ray = lits.clone();
        ray[i] = XLit::Ray { a, pos: false };
        let mut pt = lits;
        pt[i] = XLit::Excl { a, w };
        return simplify(&Formula::or(vec![
            Formula::and(vec![p.clone(), ex(ray)]),
            Formula::and(vec![Formula::not(p), ex(pt)]),
        ]));
    }
    simplify(&candidates(&lits))
}

/// ∃x over a conjunction of successor literals.
pub fn star_exists(x: Var, lc: &LiteralConjunction<StarAtom>) -> StarFormula {
    let mut lits = Vec::new();
    let all = lc.positives.iter().map(|a| (a, true)).chain(lc.negatives.iter().map(|a| (a, false)));
    for (a, pos) in all {
        match classify(x, &a.canonical(), pos) {
            Pre::Const(true) => {}
            Pre::Const(false) => return Formula::bottom(),
            Pre::Lit(l) => lits.push(l),
        }
    }
    ex(lits)
}

#[derive(Debug, Default, Clone, Copy)]
pub struct StarEliminator;

impl Eliminator for StarEliminator {
    type Atom = StarAtom;

    fn eliminate_conjunction(&mut self, lc: &LiteralConjunction<StarAtom>) -> Result<StarFormula, QeError> {
        let x = lc
            .distinguished
            .ok_or_else(|| QeError::Unsupported("no distinguished variable".into()))?;
        Ok(star_exists(x, lc))
    }
}

/// Quantifier-free equivalent on every interval model. Ground atoms such as
/// S^3(c_init) = c_fin may remain; they record the dependence on the length.
pub fn qe_star(f: &StarFormula) -> Result<StarFormula, QeError> {
    eliminate_all(&mut StarEliminator, f, DEFAULT_DNF_CAP)
}

/// Evaluates ground atoms as in an infinite model. The result agrees with the
/// input on every interval of length at least the returned bound.
pub fn resolve_ground(f: &StarFormula) -> (StarFormula, u32) {
    let mut min_len = 0u32;
    let g = f.map_atoms(&mut |a| {
        let a = a.canonical();
        if a.0.var_of().is_some() || a.1.var_of().is_some() {
            return Formula::atom(a);
        }
        let (l, r) = (a.0, a.1);
        let truth = match (l.base, r.base) {
            (StarBase::Init, StarBase::Init) => {
                if l.k != r.k {
                    min_len = min_len.max(l.k.min(r.k) + 1);
                }
                l.k == r.k
            }
            (StarBase::Fin, StarBase::Fin) => true,
            (StarBase::Init, StarBase::Fin) | (StarBase::Fin, StarBase::Init) => {
                let k = if l.base == StarBase::Init { l.k } else { r.k };
                min_len = min_len.max(k + 1);
                false
            }
            _ => unreachable!(),
        };
        if truth {
            Formula::top()
        } else {
            Formula::bottom()
        }
    });
    (simplify(&g), min_len)
}

/// The successor-language image of an equivalence formula, read on the
/// quotient by E.
pub fn translate_to_star(f: &PairFormula) -> Result<StarFormula, QeError> {
    f.try_map_atoms(&mut |a| {
        Ok(match a {
            PairAtom::E(s, t) => st(StarTerm::var(s.var, s.len() as u32), StarTerm::var(t.var, t.len() as u32)),
            PairAtom::Cinit(k, t) => st(StarTerm::var(t.var, t.len() as u32), StarTerm::init(*k)),
            PairAtom::Cfin(k, t) => {
                let j = k + t.len() as u32;
                let hit = st(StarTerm::var(t.var, j), StarTerm::fin());
                if *k == 0 {
                    hit
                } else {
                    let before = st(StarTerm::var(t.var, j - 1), StarTerm::fin());
                    Formula::and(vec![hit, Formula::not(before)])
                }
            }
            PairAtom::Eq(..) => {
                return Err(QeError::Unsupported(format!(
                    "equality atom {} in an equivalence formula",
                    Formula::atom(a.clone())
                )))
            }
        })
    })
}

fn f_term(v: Var, a: u32) -> PairTerm {
    PairTerm::new(FgString::f_power(a as usize), v)
}

/// Reads a successor formula without ground atoms back as an equivalence formula.
pub fn pull_back(f: &StarFormula) -> Result<PairFormula, QeError> {
    f.try_map_atoms(&mut |a| {
        let StarAtom(l, r) = a.canonical();
        let atom = match (l.base, r.base) {
            (StarBase::Var(u), StarBase::Var(w)) => PairAtom::E(f_term(u, l.k), f_term(w, r.k)),
            (StarBase::Var(u), StarBase::Init) => PairAtom::Cinit(r.k, f_term(u, l.k)),
            (StarBase::Init, StarBase::Var(u)) => PairAtom::Cinit(l.k, f_term(u, r.k)),
            (StarBase::Var(u), StarBase::Fin) => PairAtom::Cfin(0, f_term(u, l.k)),
            (StarBase::Fin, StarBase::Var(u)) => PairAtom::Cfin(0, f_term(u, r.k)),
            _ => return Err(QeError::Unsupported(format!("ground atom {} has no pairing image", Formula::atom(a.clone())))),
        };
        Ok(Formula::atom(atom.canonical()))
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivElimination {
    pub formula: PairFormula,
    /// Smallest number of classes on which the output is exact.
    pub min_n: u32,
}

/// ∃x f for an equality-free pairing formula.
pub fn eliminate_equiv_exists(f: &PairFormula, x: Var) -> Result<EquivElimination, QeError> {
    let star = translate_to_star(f)?;
    let q = qe_star(&Formula::exists(x, star))?;
    let (r, min_len) = resolve_ground(&q);
    Ok(EquivElimination {
        formula: simplify(&pull_back(&r)?),
        min_n: min_len + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::models::table::{eval_table, qf_table};
    use crate::models::{IntervalModel, PairModel};

    fn sf(s: &str) -> StarFormula {
        parse_formula(s).unwrap()
    }

    fn pf(s: &str) -> PairFormula {
        parse_formula(s).unwrap()
    }

    fn agree_star(f: &StarFormula, lens: std::ops::RangeInclusive<u32>) {
        let q = qe_star(f).unwrap();
        assert!(q.is_quantifier_free());
        let mut vars = f.free_vars();
        vars.sort();
        for len in lens {
            let m = IntervalModel::new(len);
            assert_eq!(eval_table(&m, f, &vars).unwrap(), qf_table(&m, &q, &vars).unwrap(), "{f} -> {q} at len {len}");
        }
    }

    #[test]
    fn star_examples() {
        let f = sf("(exists x (= (S 1 x) y))");
        agree_star(&f, 0..=10);
        let (r, _) = resolve_ground(&qe_star(&f).unwrap());
        let y = vec![Var::new("y")];
        for len in 1..=8 {
            let m = IntervalModel::new(len);
            assert_eq!(qf_table(&m, &r, &y).unwrap(), qf_table(&m, &sf("(not (= y cinit))"), &y).unwrap());
        }
        assert!(qe_star(&sf("(exists x (= (S 1 x) (S 1 x)))")).unwrap().is_top());
        let f = sf("(exists x (and (= (S 2 x) cfin) (not (= x cfin))))");
        agree_star(&f, 0..=10);
        assert!(resolve_ground(&qe_star(&f).unwrap()).0.is_top());
    }

    #[test]
    fn star_mixed_shapes() {
        for s in [
            "(exists x (and (= (S 2 x) (S 1 y)) (not (= x z))))",
            "(exists x (and (not (= (S 1 x) y)) (not (= x z)) (not (= (S 2 x) cfin))))",
            "(exists x (and (= x (S 2 cinit)) (= (S 1 x) y)))",
            "(exists x (and (= (S 3 x) (S 1 y)) (not (= (S 1 x) z)) (not (= x (S 1 cinit)))))",
            "(forall x (or (= (S 1 x) y) (not (= x z))))",
            "(exists x (and (not (= x y)) (not (= x z)) (not (= x cinit))))",
        ] {
            agree_star(&sf(s), 0..=7);
        }
    }

    #[test]
    fn translation_examples() {
        assert_eq!(translate_to_star(&pf("(Cinit 2 x)")).unwrap(), sf("(= x (S 2 cinit))"));
        assert_eq!(
            translate_to_star(&pf("(Cfin 2 x)")).unwrap(),
            sf("(and (= (S 2 x) cfin) (not (= (S 1 x) cfin)))")
        );
        assert_eq!(translate_to_star(&pf(r#"(E (app "f" x) y)"#)).unwrap(), sf("(= (S 1 x) y)"));
        assert!(translate_to_star(&pf("(= x y)")).is_err());
    }

    #[test]
    fn equivalence_elimination_examples() {
        let w = Var::new("w");
        for (s, want) in [
            ("(and (E w y) (not (Cinit 0 w)))", "(not (Cinit 0 y))"),
            ("(Cfin 0 w)", "(and)"),
            ("(and (Cinit 0 w) (E w y))", "(Cinit 0 y)"),
        ] {
            let r = eliminate_equiv_exists(&pf(s), w).unwrap();
            for (n, m) in [(3, 2), (3, 3), (4, 2)] {
                if n < r.min_n {
                    continue;
                }
                let model = PairModel::new(n, m);
                let body = pf(s);
                let mut vars: Vec<Var> = body.free_vars().into_iter().filter(|v| *v != w).collect();
                vars.sort();
                let truth = eval_table(&model, &Formula::exists(w, body), &vars).unwrap();
                assert_eq!(truth, qf_table(&model, &r.formula, &vars).unwrap(), "{s}");
                assert_eq!(truth, qf_table(&model, &pf(want), &vars).unwrap(), "{s}");
            }
        }
    }
}
