//! Giving and defining the sizes of fibers of tree-signature formulas.
//!
//! For fixed parameters the x-set of a quantifier-free formula is a boolean
//! combination of the sets U_σ together with finitely many points: each
//! B_{σ,τ}(x,b) holds of exactly one x when b ∈ U_τ, and x = b is B_{ε,ε}.
//! The count is the size of the combination with every point atom false,
//! corrected point by point.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use super::poly::CardError;
use crate::logic::normal::simplify;
use crate::logic::shannon::{eval_lazy, merge_leaves, shannon, Need, Oracle, ShannonError};
use crate::logic::{Atom, DigitString, Formula, TreeAtom, TreeFormula, Var};
use crate::models::{eval, Env, ModelError, StringModel};
use crate::CardExpr;

pub const DEFAULT_MAX_LEAVES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DefineError {
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error(transparent)]
    Shannon(#[from] ShannonError),
    #[error(transparent)]
    Card(#[from] CardError),
    #[error("{0}")]
    Layering(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardCase {
    #[serde(serialize_with = "as_display")]
    pub value: CardExpr,
    #[serde(serialize_with = "as_display")]
    pub guard: TreeFormula,
}

fn as_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Guarded values for |{x̄ : φ(x̄, ȳ)}|. The guards mention only ȳ, are
/// pairwise exclusive and cover every parameter tuple.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CardDefinition {
    pub target: Vec<Var>,
    pub params: Vec<Var>,
    pub cases: Vec<CardCase>,
}

pub fn tree_set_anchor(s: &DigitString) -> String {
    if s.is_empty() {
        "|M|".to_string()
    } else {
        format!("|U_{s}|")
    }
}

fn anchor_string(name: &str) -> Option<DigitString> {
    if name == "|M|" {
        return Some(DigitString::empty());
    }
    DigitString::parse(name.strip_prefix("|U_")?.strip_suffix('|')?).ok()
}

/// |U_σ| on StringModel(n): n^(n-|σ|) for σ in range, 0 otherwise.
pub fn tree_anchor_value(name: &str, n: u32) -> Option<BigInt> {
    let s = anchor_string(name)?;
    let m = StringModel::new(n);
    Some(if m.in_range(&s) {
        num_traits::pow(BigInt::from(n), n as usize - s.len())
    } else {
        BigInt::zero()
    })
}

pub fn tree_binding(n: u32, anchors: &[String]) -> Result<HashMap<String, BigInt>, CardError> {
    anchors
        .iter()
        .map(|a| {
            tree_anchor_value(a, n)
                .map(|v| (a.clone(), v))
                .ok_or_else(|| CardError::Unbound(a.clone()))
        })
        .collect()
}

impl CardDefinition {
    pub fn anchors(&self) -> Vec<String> {
        let mut v: Vec<String> = self.cases.iter().flat_map(|c| c.value.anchors()).collect();
        v.sort();
        v.dedup();
        v
    }

    /// Plain-language meaning of each anchor.
    pub fn anchor_descriptions(&self) -> Vec<(String, String)> {
        self.anchors()
            .into_iter()
            .map(|a| {
                let d = match anchor_string(&a) {
                    Some(s) if s.is_empty() => "size of the domain".to_string(),
                    Some(s) => format!("size of U_{s}"),
                    None => "unknown anchor".to_string(),
                };
                (a, d)
            })
            .collect()
    }

    /// The value of the unique case whose guard holds, or `None`.
    pub fn value_at(&self, m: &StringModel, env: &Env) -> Result<Option<BigInt>, DefineError> {
        let binding = tree_binding(m.n(), &self.anchors())?;
        let mut hit = None;
        for c in &self.cases {
            if eval(m, &c.guard, env)? {
                if hit.is_some() {
                    return Err(DefineError::Layering("two guards hold at once".into()));
                }
                hit = Some(c.value.eval(&binding)?);
            }
        }
        Ok(hit)
    }
}

/// Rewrites atoms whose truth is forced by their shape.
fn tidy(a: &TreeAtom) -> Result<TreeAtom, bool> {
    match a {
        TreeAtom::B(s, t, _, _) if s.len() != t.len() => Err(false),
        TreeAtom::B(s, t, v, w) if v == w => {
            if s == t {
                tidy(&TreeAtom::U(s.clone(), *v))
            } else {
                Err(false)
            }
        }
        TreeAtom::Eq(v, w) if v == w => Err(true),
        TreeAtom::U(s, _) if s.is_empty() => Err(true),
        _ => Ok(a.canonical()),
    }
}

/// Consequences of decided unary and binary literals on single variables.
pub fn tree_implied(decided: &[(TreeAtom, bool)], a: &TreeAtom) -> Option<bool> {
    let u_holds = |s: &DigitString, v: Var| -> Option<bool> {
        let facts = decided.iter().flat_map(|(d, t)| match d {
            TreeAtom::U(p, w) => vec![(p, *w, *t)],
            TreeAtom::B(p, q, w, z) if *t => vec![(p, *w, true), (q, *z, true)],
            _ => vec![],
        });
        for (p, w, pos) in facts {
            if w != v {
                continue;
            }
            if pos {
                if s.is_prefix_of(p) {
                    return Some(true);
                }
                if !s.compatible(p) {
                    return Some(false);
                }
            } else if p.is_prefix_of(s) {
                return Some(false);
            }
        }
        None
    };
    match a {
        TreeAtom::U(s, v) => u_holds(s, *v),
        TreeAtom::B(s, t, v, w) => {
            if u_holds(s, *v) == Some(false) || u_holds(t, *w) == Some(false) {
                Some(false)
            } else {
                None
            }
        }
        TreeAtom::Eq(..) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Point {
    sigma: DigitString,
    tau: DigitString,
    b: Var,
}

enum Site<'a> {
    Region(&'a DigitString),
    Point(&'a Point),
    /// Outside every region and point, used for the generic value at a point.
    Generic(&'a Point),
}

struct Shape {
    x: Var,
    f: TreeFormula,
    /// Prefix-closed set of region strings.
    regions: Vec<DigitString>,
    points: Vec<Point>,
}

fn shape(f: &TreeFormula, x: Var) -> Shape {
    // orient B so that x is first and fold atoms with x on both sides
    let f = simplify(f).map_atoms(&mut |a| {
        let a = match a {
            TreeAtom::B(s, t, v, w) if *w == x && *v != x => TreeAtom::B(t.clone(), s.clone(), *w, *v),
            TreeAtom::Eq(v, w) if *w == x && *v != x => TreeAtom::Eq(*w, *v),
            _ => a.clone(),
        };
        match tidy(&a) {
            Err(t) => {
                if t {
                    Formula::top()
                } else {
                    Formula::bottom()
                }
            }
            Ok(TreeAtom::B(s, t, v, w)) if v != x && w == x => Formula::atom(TreeAtom::B(t, s, w, v)),
            Ok(TreeAtom::Eq(v, w)) if v != x && w == x => Formula::atom(TreeAtom::Eq(w, v)),
            Ok(b) => Formula::atom(b),
        }
    });
    let mut regions = vec![DigitString::empty()];
    let mut points = Vec::new();
    f.visit_atoms(&mut |a| match a {
        TreeAtom::U(s, v) if *v == x => {
            for l in 1..=s.len() {
                let p = DigitString(s.0[..l].to_vec());
                if !regions.contains(&p) {
                    regions.push(p);
                }
            }
        }
        TreeAtom::B(s, t, v, w) if *v == x && *w != x => {
            let p = Point {
                sigma: s.clone(),
                tau: t.clone(),
                b: *w,
            };
            if !points.contains(&p) {
                points.push(p);
            }
        }
        TreeAtom::Eq(v, w) if *v == x && *w != x => {
            let p = Point {
                sigma: DigitString::empty(),
                tau: DigitString::empty(),
                b: *w,
            };
            if !points.contains(&p) {
                points.push(p);
            }
        }
        _ => {}
    });
    Shape { x, f, regions, points }
}

fn param(o: &Oracle<TreeAtom>, a: TreeAtom) -> Result<bool, Need<TreeAtom>> {
    match tidy(&a) {
        Err(t) => Ok(t),
        Ok(a) => o.holds(&a),
    }
}

/// Whether two existing points are the same element.
fn same_point(o: &Oracle<TreeAtom>, p: &Point, q: &Point) -> Result<bool, Need<TreeAtom>> {
    let (p, q) = if p.sigma.len() <= q.sigma.len() { (p, q) } else { (q, p) };
    if !p.sigma.is_prefix_of(&q.sigma) {
        return Ok(false);
    }
    let mu = q.sigma.strip(&p.sigma);
    param(o, TreeAtom::B(p.tau.concat(&mu), q.tau.clone(), p.b, q.b))
}

impl Shape {
    fn at(&self, o: &Oracle<TreeAtom>, site: &Site) -> Result<bool, Need<TreeAtom>> {
        let x = self.x;
        eval_lazy(&self.f, &mut |a| match a {
            TreeAtom::U(s, v) if *v == x => match site {
                Site::Region(r) => Ok(s.is_prefix_of(r)),
                Site::Point(p) | Site::Generic(p) => {
                    if s.is_prefix_of(&p.sigma) {
                        Ok(true)
                    } else if p.sigma.is_prefix_of(s) {
                        param(o, TreeAtom::U(p.tau.concat(&s.strip(&p.sigma)), p.b))
                    } else {
                        Ok(false)
                    }
                }
            },
            TreeAtom::B(s, t, v, w) if *v == x => {
                let q = Point {
                    sigma: s.clone(),
                    tau: t.clone(),
                    b: *w,
                };
                match site {
                    Site::Point(p) => Ok(param(o, TreeAtom::U(q.tau.clone(), q.b))? && same_point(o, p, &q)?),
                    _ => Ok(false),
                }
            }
            TreeAtom::Eq(v, w) if *v == x => match site {
                Site::Point(p) => same_point(
                    o,
                    p,
                    &Point {
                        sigma: DigitString::empty(),
                        tau: DigitString::empty(),
                        b: *w,
                    },
                ),
                _ => Ok(false),
            },
            _ => param(o, a.clone()),
        })
    }

    fn count(&self, o: &Oracle<TreeAtom>) -> Result<CardExpr, Need<TreeAtom>> {
        let mut total = CardExpr::zero();
        for r in &self.regions {
            if self.at(o, &Site::Region(r))? {
                let mut size = CardExpr::var(&tree_set_anchor(r));
                for c in self.regions.iter().filter(|c| c.len() == r.len() + 1 && r.is_prefix_of(c)) {
                    size = &size - &CardExpr::var(&tree_set_anchor(c));
                }
                total = &total + &size;
            }
        }
        let mut seen: Vec<&Point> = Vec::new();
        for p in &self.points {
            if !param(o, TreeAtom::U(p.tau.clone(), p.b))? {
                continue;
            }
            let mut dup = false;
            for q in &seen {
                if same_point(o, p, q)? {
                    dup = true;
                    break;
                }
            }
            if dup {
                continue;
            }
            seen.push(p);
            let real = self.at(o, &Site::Point(p))? as i64;
            let generic = self.at(o, &Site::Generic(p))? as i64;
            if real != generic {
                total = &total + &CardExpr::constant(BigInt::from(real - generic));
            }
        }
        Ok(total)
    }
}

fn sorted_params(f: &TreeFormula, target: &[Var]) -> Vec<Var> {
    let mut ps: Vec<Var> = f.free_vars().into_iter().filter(|v| !target.contains(v)).collect();
    ps.sort_by_key(|v| v.name());
    ps
}

/// The fiber size of a quantifier-free φ(x, ȳ) over x, as guarded values.
pub fn give_and_define(f: &TreeFormula, x: Var) -> Result<CardDefinition, DefineError> {
    if !f.is_quantifier_free() {
        return Err(DefineError::NotQuantifierFree);
    }
    let sh = shape(f, x);
    let leaves = shannon(|o| sh.count(o), Some(&tree_implied), DEFAULT_MAX_LEAVES)?;
    let cases = merge_leaves(leaves)
        .into_iter()
        .map(|(guard, value)| CardCase { value, guard })
        .collect();
    Ok(CardDefinition {
        target: vec![x],
        params: sorted_params(f, &[x]),
        cases,
    })
}

/// Combines an outer definition over x₁ (whose guards mention x₂…) with one
/// inner definition per outer case: c_σ = Σ c_i·c_{i,σ_i} under ⋀ θ_{i,σ_i}.
pub fn lift_tuple_cardinalities(outer: &CardDefinition, inner: &[CardDefinition]) -> Result<CardDefinition, DefineError> {
    if inner.len() != outer.cases.len() {
        return Err(DefineError::Layering(format!(
            "{} outer cases but {} inner definitions",
            outer.cases.len(),
            inner.len()
        )));
    }
    let target: Vec<Var> = outer.target.iter().chain(&inner.first().map_or(vec![], |d| d.target.clone())).copied().collect();
    if inner.iter().any(|d| Some(&d.target) != inner.first().map(|d| &d.target)) {
        return Err(DefineError::Layering("inner definitions disagree on their target".into()));
    }
    let mut acc: Vec<(CardExpr, Vec<TreeFormula>)> = vec![(CardExpr::zero(), Vec::new())];
    for (oc, def) in outer.cases.iter().zip(inner) {
        if oc.value.is_zero() {
            continue;
        }
        let mut next = Vec::new();
        for (v, gs) in &acc {
            for ic in &def.cases {
                let mut gs = gs.clone();
                gs.push(ic.guard.clone());
                let g = simplify(&Formula::and(gs.clone()));
                if g.is_bottom() {
                    continue;
                }
                next.push((v + &(&oc.value * &ic.value), vec![g]));
            }
        }
        acc = next;
    }
    let mut cases: Vec<CardCase> = Vec::new();
    for (value, gs) in acc {
        let g = simplify(&Formula::and(gs));
        match cases.iter_mut().find(|c| c.value == value) {
            Some(c) => c.guard = simplify(&Formula::or(vec![c.guard.clone(), g])),
            None => cases.push(CardCase { value, guard: g }),
        }
    }
    let params = inner.first().map_or_else(|| outer.params.clone(), |d| d.params.clone());
    Ok(CardDefinition { target, params, cases })
}

/// The fiber size over a tuple x̄, by induction on its length.
pub fn give_and_define_tuple(f: &TreeFormula, xs: &[Var]) -> Result<CardDefinition, DefineError> {
    match xs {
        [] => Err(DefineError::Layering("empty target tuple".into())),
        [x] => give_and_define(f, *x),
        [x, rest @ ..] => {
            let outer = give_and_define(f, *x)?;
            let mut inner = Vec::new();
            for c in &outer.cases {
                let mut d = give_and_define_tuple(&c.guard, rest)?;
                d.params = sorted_params(f, xs);
                inner.push(d);
            }
            let mut d = lift_tuple_cardinalities(&outer, &inner)?;
            d.params = sorted_params(f, xs);
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::models::{count, for_each_tuple};

    fn tf(s: &str) -> TreeFormula {
        parse_formula(s).unwrap()
    }

    fn cases(d: &CardDefinition) -> Vec<(String, String)> {
        d.cases.iter().map(|c| (c.value.to_string(), c.guard.to_string())).collect()
    }

    fn check(d: &CardDefinition, f: &TreeFormula, n: u32) {
        let m = StringModel::new(n);
        let params = d.params.clone();
        let size = (n as usize).pow(n);
        for_each_tuple(size, params.len(), |t| {
            let env = Env::of(&params.iter().copied().zip(t.iter().copied()).collect::<Vec<_>>());
            let want = count(&m, f, &env, &d.target).unwrap();
            let got = d.value_at(&m, &env).unwrap().expect("some guard holds");
            assert_eq!(BigInt::from(want), got, "{f} at {t:?}");
        });
    }

    #[test]
    fn single_variable_examples() {
        let x = Var::new("x");
        let f = tf(r#"(B "0" "1" x y)"#);
        let d = give_and_define(&f, x).unwrap();
        assert_eq!(d.cases.len(), 2);
        assert!(cases(&d).contains(&("1".into(), tf(r#"(U "1" y)"#).to_string())));
        check(&d, &f, 3);

        let f = tf(r#"(U "0" x)"#);
        let d = give_and_define(&f, x).unwrap();
        assert_eq!(cases(&d), vec![("|U_0|".to_string(), "(and)".to_string())]);

        let f = tf(r#"(and (U "0" x) (not (B "0" "1" x y)))"#);
        let d = give_and_define(&f, x).unwrap();
        let mut got = cases(&d);
        got.sort();
        assert_eq!(
            got,
            vec![
                ("|U_0|".to_string(), tf(r#"(not (U "1" y))"#).to_string()),
                ("|U_0| - 1".to_string(), tf(r#"(U "1" y)"#).to_string()),
            ]
        );
        check(&d, &f, 3);
    }

    #[test]
    fn tuple_examples() {
        let (x1, x2) = (Var::new("x1"), Var::new("x2"));
        let f = tf(r#"(and (U "0" x1) (U "1" x2))"#);
        let d = give_and_define_tuple(&f, &[x1, x2]).unwrap();
        assert_eq!(cases(&d), vec![("|U_0|*|U_1|".to_string(), "(and)".to_string())]);
        let f = tf(r#"(B "0" "1" x1 x2)"#);
        let d = give_and_define_tuple(&f, &[x1, x2]).unwrap();
        let nonzero: Vec<_> = d.cases.iter().filter(|c| !c.value.is_zero()).collect();
        assert_eq!(nonzero.len(), 1);
        check(&d, &f, 3);
    }

    #[test]
    fn mixed_points_and_regions() {
        let x = Var::new("x");
        for s in [
            r#"(or (= x y) (and (U "1" x) (not (B "1" "0" x z))))"#,
            r#"(and (not (U "01" x)) (or (B "0" "2" x y) (B "01" "20" x z)) (U "2" y))"#,
            r#"(or (B "1" "1" x y) (B "" "" x y) (not (U "" x)))"#,
        ] {
            let f = tf(s);
            let d = give_and_define(&f, x).unwrap();
            check(&d, &f, 3);
        }
    }
}
