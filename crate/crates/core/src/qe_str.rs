//! Quantifier elimination for the tree-of-bijections theory.
//!
//! A conjunction of literals mentioning `x` is brought to the shape
//! U_σ(x) ∧ ⋀¬U_{στ}(x) ∧ ⋀B_{σ,ρ_i}(x,y_i) ∧ ⋀¬B_{σ,θ_j}(x,z_j), plus negative
//! links whose source lies strictly below σ. An element of U_σ is σ followed
//! by a tail w, and each positive link pins w down to the tail of y_i.

use std::fmt;

use serde::Serialize;

use crate::logic::qe::{Eliminator, QeError};
use crate::logic::{Atom, DigitString, Formula, LiteralConjunction, TreeAtom, TreeFormula, Var};

/// ¬B_{σμ,θ}(x,z) for a nonempty extension μ of the base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct DeepNegLink {
    pub ext: DigitString,
    pub target: DigitString,
    pub var: Var,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrCanonicalForm {
    pub x: Var,
    pub base: DigitString,
    /// Full strings στ with ¬U_{στ}(x), τ nonempty.
    pub refinements: Vec<DigitString>,
    pub pos_links: Vec<(DigitString, Var)>,
    pub neg_links: Vec<(DigitString, Var)>,
    pub deep_neg_links: Vec<DeepNegLink>,
}

impl StrCanonicalForm {
    pub fn to_formula(&self) -> TreeFormula {
        let x = self.x;
        let mut out = vec![Formula::atom(TreeAtom::U(self.base.clone(), x))];
        for r in &self.refinements {
            out.push(Formula::not(Formula::atom(TreeAtom::U(r.clone(), x))));
        }
        for (r, y) in &self.pos_links {
            out.push(Formula::atom(TreeAtom::B(self.base.clone(), r.clone(), x, *y)));
        }
        for (t, z) in &self.neg_links {
            out.push(Formula::not(Formula::atom(TreeAtom::B(self.base.clone(), t.clone(), x, *z))));
        }
        for d in &self.deep_neg_links {
            let a = TreeAtom::B(self.base.concat(&d.ext), d.target.clone(), x, d.var);
            out.push(Formula::not(Formula::atom(a)));
        }
        Formula::and(out)
    }

    fn well_shaped(&self) -> bool {
        let l = self.base.len();
        self.pos_links.iter().all(|(r, _)| r.len() == l)
            && self.neg_links.iter().all(|(t, _)| t.len() == l)
            && self.refinements.iter().all(|r| self.base.is_prefix_of(r) && r.len() > l)
            && self.deep_neg_links.iter().all(|d| !d.ext.is_empty() && d.target.len() == l + d.ext.len())
    }
}

impl fmt::Display for StrCanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum StrNormal {
    Form(StrCanonicalForm),
    Unsat,
}

/// One literal with `x` in the first position of every B and no equality.
enum Lit {
    U(DigitString, bool),
    /// B_{σ,τ}(x,y), y ≠ x.
    B(DigitString, DigitString, Var, bool),
    Const(bool),
}

fn orient(x: Var, a: &TreeAtom, positive: bool) -> Result<Lit, QeError> {
    Ok(match a {
        TreeAtom::U(s, v) if *v == x => Lit::U(s.clone(), positive),
        TreeAtom::Eq(v, w) if *v == x && *w == x => Lit::Const(positive),
        TreeAtom::Eq(v, w) if *v == x || *w == x => {
            let y = if *v == x { *w } else { *v };
            Lit::B(DigitString::empty(), DigitString::empty(), y, positive)
        }
        TreeAtom::B(s, t, v, w) if *v == x && *w == x => {
            if s == t {
                Lit::U(s.clone(), positive)
            } else {
                Lit::Const(!positive)
            }
        }
        TreeAtom::B(s, t, v, w) if *v == x || *w == x => {
            let (s, t, y) = if *v == x { (s, t, *w) } else { (t, s, *v) };
            if s.len() != t.len() {
                Lit::Const(!positive)
            } else {
                Lit::B(s.clone(), t.clone(), y, positive)
            }
        }
        _ => return Err(QeError::Unsupported(format!("literal {a:?} does not mention {x}"))),
    })
}

pub fn normalize_str_conjunction(lc: &LiteralConjunction<TreeAtom>) -> Result<StrNormal, QeError> {
    let x = lc
        .distinguished
        .ok_or_else(|| QeError::Unsupported("no distinguished variable".into()))?;
    let mut lits = Vec::new();
    for a in &lc.positives {
        lits.push(orient(x, a, true)?);
    }
    for a in &lc.negatives {
        lits.push(orient(x, a, false)?);
    }
    if lits.iter().any(|l| matches!(l, Lit::Const(false))) {
        return Ok(StrNormal::Unsat);
    }

    // deepest positive source; all positive sources must form a chain
    let mut base = DigitString::empty();
    for l in &lits {
        let s = match l {
            Lit::U(s, true) | Lit::B(s, _, _, true) => s,
            _ => continue,
        };
        if !s.compatible(&base) {
            return Ok(StrNormal::Unsat);
        }
        if s.len() > base.len() {
            base = s.clone();
        }
    }

    let mut form = StrCanonicalForm {
        x,
        base: base.clone(),
        refinements: Vec::new(),
        pos_links: Vec::new(),
        neg_links: Vec::new(),
        deep_neg_links: Vec::new(),
    };
    for l in lits {
        match l {
            Lit::Const(_) | Lit::U(_, true) => {}
            Lit::B(s, t, y, true) => {
                let mu = base.strip(&s);
                push_unique(&mut form.pos_links, (t.concat(&mu), y));
            }
            Lit::U(s, false) => {
                if s.is_prefix_of(&base) {
                    return Ok(StrNormal::Unsat);
                }
                if base.is_prefix_of(&s) {
                    push_unique(&mut form.refinements, s);
                }
            }
            Lit::B(s, t, z, false) => {
                if s.is_prefix_of(&base) {
                    let mu = base.strip(&s);
                    push_unique(&mut form.neg_links, (t.concat(&mu), z));
                } else if base.is_prefix_of(&s) {
                    let d = DeepNegLink {
                        ext: s.strip(&base),
                        target: t,
                        var: z,
                    };
                    push_unique(&mut form.deep_neg_links, d);
                }
            }
        }
    }
    debug_assert!(form.well_shaped());
    Ok(StrNormal::Form(form))
}

fn push_unique<T: PartialEq>(v: &mut Vec<T>, t: T) {
    if !v.contains(&t) {
        v.push(t);
    }
}

/// Both readings of the elimination: `completed` adds the sort conjuncts
/// U_{ρ_i}(y_i) that `bare_literal` lacks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrElimination {
    pub normal: StrNormal,
    pub completed: TreeFormula,
    pub bare_literal: TreeFormula,
}

pub fn eliminate_exists_str(lc: &LiteralConjunction<TreeAtom>) -> Result<TreeFormula, QeError> {
    Ok(eliminate_exists_str_verbose(lc)?.completed)
}

pub fn eliminate_exists_str_verbose(lc: &LiteralConjunction<TreeAtom>) -> Result<StrElimination, QeError> {
    let normal = normalize_str_conjunction(lc)?;
    let (completed, bare_literal) = match &normal {
        StrNormal::Unsat => (Formula::bottom(), Formula::bottom()),
        StrNormal::Form(form) => conditions(form),
    };
    Ok(StrElimination {
        normal,
        completed,
        bare_literal,
    })
}

fn conditions(form: &StrCanonicalForm) -> (TreeFormula, TreeFormula) {
    let links = &form.pos_links;
    // without a positive link the tail of x is free; see the adequacy notes
    if links.is_empty() {
        return (Formula::top(), Formula::top());
    }
    let l = form.base.len();
    let mut sorts = Vec::new();
    let mut rest = Vec::new();
    for (r, y) in links {
        sorts.push(Formula::atom(TreeAtom::U(r.clone(), *y)));
    }
    for (i, (ri, yi)) in links.iter().enumerate() {
        for (rj, yj) in &links[i + 1..] {
            rest.push(Formula::atom(TreeAtom::B(ri.clone(), rj.clone(), *yi, *yj).canonical()));
        }
    }
    for (ri, yi) in links {
        for r in &form.refinements {
            let tail = DigitString(r.0[l..].to_vec());
            rest.push(Formula::not(Formula::atom(TreeAtom::U(ri.concat(&tail), *yi))));
        }
        for (t, z) in &form.neg_links {
            rest.push(Formula::not(Formula::atom(TreeAtom::B(ri.clone(), t.clone(), *yi, *z))));
        }
        for d in &form.deep_neg_links {
            let a = TreeAtom::B(ri.concat(&d.ext), d.target.clone(), *yi, d.var);
            rest.push(Formula::not(Formula::atom(a)));
        }
    }
    let bare = Formula::and(rest.clone());
    sorts.extend(rest);
    (Formula::and(sorts), bare)
}

/// Whether a conjunction lies in the range where the output is exact on
/// StringModel(n): letters below n, strings no longer than n, and enough room
/// in an unlinked base for the excluded points.
pub fn str_adequate(lc: &LiteralConjunction<TreeAtom>, n: u32) -> bool {
    let strings_ok = lc.positives.iter().chain(&lc.negatives).all(|a| match a {
        TreeAtom::U(s, _) => s.len() <= n as usize && s.0.iter().all(|&d| d < n),
        TreeAtom::B(s, t, _, _) => [s, t].iter().all(|s| s.len() <= n as usize && s.0.iter().all(|&d| d < n)),
        TreeAtom::Eq(..) => true,
    });
    if !strings_ok {
        return false;
    }
    let Ok(StrNormal::Form(form)) = normalize_str_conjunction(lc) else {
        return true;
    };
    if !form.pos_links.is_empty() {
        return true;
    }
    // tails of length L avoiding every refinement and every excluded point
    let len = n as usize - form.base.len();
    let l = form.base.len();
    let mut survivors: u128 = 0;
    let letters: Vec<u32> = (0..n).collect();
    let mut first_free = 0u128;
    for a in &letters {
        let blocked = form.refinements.iter().any(|r| r.0[l] == *a);
        if !blocked {
            first_free += 1;
        }
    }
    if len >= 1 {
        survivors = first_free * (n as u128).pow(len as u32 - 1);
    }
    let points = (form.neg_links.len() + form.deep_neg_links.len()) as u128;
    survivors > points
}

/// `∃x` over conjunctions in the tree signature.
#[derive(Debug, Default, Clone, Copy)]
pub struct StrEliminator;

impl Eliminator for StrEliminator {
    type Atom = TreeAtom;

    fn eliminate_conjunction(&mut self, lc: &LiteralConjunction<TreeAtom>) -> Result<TreeFormula, QeError> {
        eliminate_exists_str(lc)
    }
}
