//! Which classes meet the solution set of a one-variable formula.
//!
//! An element x of class c is determined by its coordinates u(x), |u| = K.
//! When c + K < n-1 those coordinates range freely over a single class; when
//! x lies l ≤ K steps before the final class only the words of length l
//! matter and the coordinates range over C_fin.

use crate::logic::normal::{dnf, simplify, DEFAULT_DNF_CAP};
use crate::logic::qe::QeError;
use crate::logic::{FgString, Formula, PairAtom, PairFormula, PairTerm, Var};

/// Position of x's class relative to the final class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Layer {
    /// K more steps still stay below C_fin.
    Generic(usize),
    /// x lies in C_{fin-l}.
    Fin(usize),
}

impl Layer {
    pub(crate) fn all(k: usize) -> Vec<Layer> {
        std::iter::once(Layer::Generic(k)).chain((0..=k).map(Layer::Fin)).collect()
    }

    /// Length of the coordinate words.
    pub(crate) fn depth(self) -> usize {
        match self {
            Layer::Generic(k) => k,
            Layer::Fin(l) => l,
        }
    }

    /// Steps from s(x) to C_fin, for the fin layers.
    pub(crate) fn excess(self, s: usize) -> usize {
        match self {
            Layer::Generic(_) => unreachable!("generic layer has no fixed distance"),
            Layer::Fin(l) => l.saturating_sub(s),
        }
    }

    /// Coordinate positions of s(x) together with the outer words u that
    /// reach them, so that u s(x) is the coordinate.
    pub(crate) fn coords(self, s: &FgString) -> Vec<(FgString, usize)> {
        match self {
            Layer::Generic(k) => FgString::all(k - s.len())
                .into_iter()
                .map(|u| {
                    let p = u.concat(s).index();
                    (u, p)
                })
                .collect(),
            Layer::Fin(l) => FgString::all(self.excess(s.len()))
                .into_iter()
                .map(|v| {
                    let p = v.concat(s).suffix(l).index();
                    (v, p)
                })
                .collect(),
        }
    }

    /// Coordinate pairs identified by s(x) = t(x), or None when the two sides
    /// lie in different classes.
    pub(crate) fn self_pairs(self, s: &FgString, t: &FgString) -> Option<Vec<(usize, usize)>> {
        let same_class = match self {
            Layer::Generic(_) => s.len() == t.len(),
            Layer::Fin(_) => self.excess(s.len()) == self.excess(t.len()),
        };
        if !same_class {
            return None;
        }
        Some(self.coords(s).into_iter().zip(self.coords(t)).map(|((_, a), (_, b))| (a, b)).collect())
    }
}

pub(crate) struct Dsu(Vec<usize>);

impl Dsu {
    pub(crate) fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }

    pub(crate) fn find(&mut self, a: usize) -> usize {
        let mut r = a;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut a = a;
        while self.0[a] != r {
            let next = self.0[a];
            self.0[a] = r;
            a = next;
        }
        r
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Whether the self equalities can hold together in the given layer, with
/// enough elements per class to separate the negated ones.
pub(crate) fn selves_consistent(layer: Layer, pos: &[(FgString, FgString)], neg: &[(FgString, FgString)]) -> bool {
    let mut d = Dsu::new(1 << layer.depth());
    for (s, t) in pos {
        match layer.self_pairs(s, t) {
            Some(ps) => ps.into_iter().for_each(|(a, b)| d.union(a, b)),
            None => return false,
        }
    }
    neg.iter().all(|(s, t)| match layer.self_pairs(s, t) {
        Some(ps) => ps.into_iter().any(|(a, b)| d.find(a) != d.find(b)),
        None => true,
    })
}

fn cfin(k: usize, w: Var) -> PairFormula {
    Formula::atom(PairAtom::Cfin(k as u32, PairTerm::var(w)))
}

/// C_fin(w) ∨ … ∨ C_{fin-a}(w): the classes from which a steps reach C_fin.
pub(crate) fn near_fin(a: usize, w: Var) -> PairFormula {
    Formula::or((0..=a).map(|j| cfin(j, w)).collect())
}

fn layer_guard(layer: Layer, w: Var) -> PairFormula {
    match layer {
        Layer::Generic(k) => Formula::not(near_fin(k, w)),
        Layer::Fin(l) => cfin(l, w),
    }
}

/// A class literal on x rewritten as a unary condition on x itself, plus the
/// least class count for which the rewriting is exact.
fn unary(atom: &PairAtom, x: Var) -> (PairFormula, u32) {
    match atom {
        PairAtom::Cinit(k, t) if !t.is_empty() => {
            let a = t.len() as u32;
            let f = if *k >= a {
                Formula::atom(PairAtom::Cinit(k - a, PairTerm::var(x)))
            } else {
                Formula::bottom()
            };
            (f, k + 2)
        }
        PairAtom::Cfin(k, t) if !t.is_empty() => {
            let a = t.len();
            if *k >= 1 {
                (cfin(*k as usize + a, x), 0)
            } else {
                (near_fin(a, x), 0)
            }
        }
        PairAtom::E(s, t) => {
            if s.len() == t.len() {
                (Formula::top(), 0)
            } else {
                (near_fin(s.len().min(t.len()), x), 0)
            }
        }
        _ => (Formula::atom(atom.clone()), 0),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTrace {
    pub var: Var,
    /// Condition on a class representative, in the predicates C_{init+i}, C_{fin-i}.
    pub theta: PairFormula,
    /// Exact on models with at least this many classes.
    pub min_n: u32,
    /// Exact when every class has more elements than this.
    pub negated_selves: usize,
}

/// θ(x) such that the solution set of f meets the class of d iff θ(d).
pub fn class_trace(f: &PairFormula) -> Result<ClassTrace, QeError> {
    let vars = f.free_vars();
    if vars.len() > 1 || !f.is_quantifier_free() {
        return Err(QeError::Unsupported(format!("class trace needs a quantifier-free formula in one variable: {f}")));
    }
    let Some(&x) = vars.first() else {
        return Err(QeError::Unsupported(format!("class trace needs a free variable: {f}")));
    };
    let mut min_n = 0;
    let mut negated_selves = 0;
    let mut out = Vec::new();
    for clause in dnf(&simplify(f), DEFAULT_DNF_CAP)? {
        let mut conds = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        let mut k = 0;
        for lit in &clause {
            k = k.max(lit.atom.max_len());
            match &lit.atom {
                PairAtom::Eq(s, t) => {
                    let side = if lit.positive { &mut pos } else { &mut neg };
                    side.push((s.s.clone(), t.s.clone()));
                }
                a => {
                    let (g, need) = unary(a, x);
                    min_n = min_n.max(need);
                    conds.push(if lit.positive { g } else { Formula::not(g) });
                }
            }
        }
        negated_selves = negated_selves.max(neg.len());
        let layers = Layer::all(k);
        let ok: Vec<Layer> = layers.iter().copied().filter(|l| selves_consistent(*l, &pos, &neg)).collect();
        if ok.len() < layers.len() {
            conds.push(Formula::or(ok.into_iter().map(|l| layer_guard(l, x)).collect()));
        }
        out.push(Formula::and(conds));
    }
    Ok(ClassTrace {
        var: x,
        theta: simplify(&Formula::or(out)),
        min_n,
        negated_selves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::models::{eval, Env, PairModel, Structure};

    fn pf(s: &str) -> PairFormula {
        parse_formula(s).unwrap()
    }

    /// Checks θ against the classes met by f, on every element as representative.
    fn check(f: &PairFormula, n: u32, m: u32) {
        let tr = class_trace(f).unwrap();
        let model = PairModel::new(n, m);
        let x = tr.var;
        let mut met = vec![false; n as usize];
        for e in 0..model.size() {
            if eval(&model, f, &Env::of(&[(x, e)])).unwrap() {
                met[model.class(e)] = true;
            }
        }
        for e in 0..model.size() {
            let got = eval(&model, &tr.theta, &Env::of(&[(x, e)])).unwrap();
            assert_eq!(got, met[model.class(e)], "{f} -> {} at element {e} of ({n},{m})", tr.theta);
        }
    }

    #[test]
    fn examples() {
        assert_eq!(class_trace(&pf(r#"(= (app "f" x) x)"#)).unwrap().theta, pf("(Cfin 0 x)"));
        assert_eq!(class_trace(&pf("(Cinit 0 x)")).unwrap().theta, pf("(Cinit 0 x)"));
        assert!(class_trace(&pf(r#"(= (app "f" x) (app "g" x))"#)).unwrap().theta.is_top());
        for (n, m) in [(3, 2), (4, 2)] {
            check(&pf(r#"(= (app "f" x) x)"#), n, m);
            check(&pf(r#"(= (app "f" x) (app "g" x))"#), n, m);
        }
    }

    #[test]
    fn brute_force_shapes() {
        for s in [
            r#"(and (= (app "f" x) (app "g" x)) (not (= (app "ff" x) (app "gf" x))))"#,
            r#"(and (= (app "ff" x) (app "f" x)) (not (= x (app "g" x))))"#,
            r#"(not (= (app "fg" x) (app "gf" x)))"#,
            r#"(and (Cfin 0 (app "f" x)) (not (Cfin 0 x)))"#,
            r#"(or (E (app "f" x) x) (Cfin 1 (app "g" x)))"#,
            r#"(and (Cinit 1 (app "f" x)) (not (= (app "f" x) (app "g" x))))"#,
            r#"(= (app "fg" x) (app "g" x))"#,
        ] {
            let f = pf(s);
            let tr = class_trace(&f).unwrap();
            for (n, m) in [(3, 3), (4, 2)] {
                if n >= tr.min_n && m as usize > tr.negated_selves {
                    check(&f, n, m);
                }
            }
        }
    }
}
