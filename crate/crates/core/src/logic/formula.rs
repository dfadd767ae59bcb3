use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::parse::{ParseError, Sexp};
use super::var::Var;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Signature {
    Tree,
    Pair,
    Star,
    Eq,
}

impl Signature {
    pub fn name(self) -> &'static str {
        match self {
            Signature::Tree => "tree",
            Signature::Pair => "pair",
            Signature::Star => "star",
            Signature::Eq => "eq",
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Signature {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "tree" | "sig_tree" => Ok(Signature::Tree),
            "pair" | "sig_pair" => Ok(Signature::Pair),
            "star" | "sig_star" => Ok(Signature::Star),
            "eq" | "sig_eq" => Ok(Signature::Eq),
            _ => Err(format!("unknown signature {s:?}")),
        }
    }
}

/// Signature-specific atomic formulas.
pub trait Atom: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static {
    const SIGNATURE: Signature;

    /// Variables occurring in the atom, in order, possibly repeated.
    fn vars(&self) -> Vec<Var>;

    fn map_vars(&self, f: &mut dyn FnMut(Var) -> Var) -> Self;

    fn write_sexp(&self, out: &mut String);

    /// Builds an atom from a list head and its arguments. Heads that belong to
    /// no atom of this signature yield `ParseError::Signature`.
    fn from_sexp(head: &str, args: &[Sexp], pos: usize) -> Result<Self, ParseError>;

    /// Truth value when it is fixed by the syntax alone (for example `x = x`).
    fn truth(&self) -> Option<bool> {
        None
    }

    /// A representative of the atom up to symmetries that preserve meaning,
    /// used by the simplifier to merge duplicates.
    fn canonical(&self) -> Self {
        self.clone()
    }

    fn mentions(&self, v: Var) -> bool {
        self.vars().contains(&v)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula<A> {
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
    Exists(Var, Box<Formula<A>>),
    Forall(Var, Box<Formula<A>>),
}

impl<A: Atom> Formula<A> {
    pub fn top() -> Self {
        Formula::And(Vec::new())
    }

    pub fn bottom() -> Self {
        Formula::Or(Vec::new())
    }

    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula<A>>) -> Self {
        if fs.len() == 1 {
            fs.into_iter().next().unwrap()
        } else {
            Formula::And(fs)
        }
    }

    pub fn or(fs: Vec<Formula<A>>) -> Self {
        if fs.len() == 1 {
            fs.into_iter().next().unwrap()
        } else {
            Formula::Or(fs)
        }
    }

    pub fn exists(v: Var, body: Formula<A>) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula<A>) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    pub fn exists_many(vs: &[Var], body: Formula<A>) -> Self {
        vs.iter().rev().fold(body, |b, &v| Formula::exists(v, b))
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Formula::And(v) if v.is_empty())
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, Formula::Or(v) if v.is_empty())
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(|f| f.is_quantifier_free()),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
        match self {
            Formula::Atom(a) => {
                for v in a.vars() {
                    if !bound.contains(&v) && !out.contains(&v) {
                        out.push(v);
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                for f in fs {
                    f.collect_free(bound, out);
                }
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut s = BTreeSet::new();
        self.visit_atoms(&mut |a| s.extend(a.vars()));
        self.visit_binders(&mut |v| {
            s.insert(v);
        });
        s
    }

    pub fn bound_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.visit_binders(&mut |v| out.push(v));
        out
    }

    fn visit_binders(&self, f: &mut dyn FnMut(Var)) {
        match self {
            Formula::Atom(_) => {}
            Formula::Not(g) => g.visit_binders(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_binders(f)),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                f(*v);
                g.visit_binders(f);
            }
        }
    }

    pub fn visit_atoms(&self, f: &mut dyn FnMut(&A)) {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Exists(_, g) | Formula::Forall(_, g) => g.visit_atoms(f),
        }
    }

    pub fn atoms(&self) -> Vec<A> {
        let mut out = Vec::new();
        self.visit_atoms(&mut |a| out.push(a.clone()));
        out
    }

    pub fn count_nodes(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(g) => 1 + g.count_nodes(),
            Formula::And(gs) | Formula::Or(gs) => 1 + gs.iter().map(|g| g.count_nodes()).sum::<usize>(),
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.count_nodes(),
        }
    }

    pub fn quantifier_count(&self) -> usize {
        match self {
            Formula::Atom(_) => 0,
            Formula::Not(g) => g.quantifier_count(),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().map(|g| g.quantifier_count()).sum(),
            Formula::Exists(_, g) | Formula::Forall(_, g) => 1 + g.quantifier_count(),
        }
    }

    /// Replaces each atom by a formula. Binders are left alone.
    pub fn map_atoms<B: Atom>(&self, f: &mut dyn FnMut(&A) -> Formula<B>) -> Formula<B> {
        match self {
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::not(g.map_atoms(f)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Exists(v, g) => Formula::exists(*v, g.map_atoms(f)),
            Formula::Forall(v, g) => Formula::forall(*v, g.map_atoms(f)),
        }
    }

    pub fn try_map_atoms<B: Atom, E>(
        &self,
        f: &mut dyn FnMut(&A) -> Result<Formula<B>, E>,
    ) -> Result<Formula<B>, E> {
        Ok(match self {
            Formula::Atom(a) => f(a)?,
            Formula::Not(g) => Formula::not(g.try_map_atoms(f)?),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.try_map_atoms(f)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.try_map_atoms(f)).collect::<Result<_, _>>()?),
            Formula::Exists(v, g) => Formula::exists(*v, g.try_map_atoms(f)?),
            Formula::Forall(v, g) => Formula::forall(*v, g.try_map_atoms(f)?),
        })
    }

    /// Simultaneous substitution of variables for free variables. Binders that
    /// would capture an incoming variable are renamed first.
    pub fn rename_free(&self, map: &HashMap<Var, Var>) -> Formula<A> {
        match self {
            Formula::Atom(a) => Formula::Atom(a.map_vars(&mut |v| *map.get(&v).unwrap_or(&v))),
            Formula::Not(g) => Formula::not(g.rename_free(map)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.rename_free(map)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.rename_free(map)).collect()),
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                let mut inner = map.clone();
                inner.remove(v);
                let captures = inner.values().any(|w| w == v);
                let (nv, body) = if captures {
                    let nv = Var::fresh(&v.name());
                    inner.insert(*v, nv);
                    (nv, g.rename_free(&inner))
                } else {
                    (*v, g.rename_free(&inner))
                };
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(nv, body)
                } else {
                    Formula::forall(nv, body)
                }
            }
        }
    }

    pub fn substitute(&self, from: Var, to: Var) -> Formula<A> {
        let mut m = HashMap::new();
        m.insert(from, to);
        self.rename_free(&m)
    }

    pub fn to_sexp(&self) -> String {
        let mut s = String::new();
        self.write_sexp(&mut s);
        s
    }

    fn write_sexp(&self, out: &mut String) {
        match self {
            Formula::Atom(a) => a.write_sexp(out),
            Formula::Not(g) => {
                out.push_str("(not ");
                g.write_sexp(out);
                out.push(')');
            }
            Formula::And(gs) | Formula::Or(gs) => {
                out.push_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" });
                for g in gs {
                    out.push(' ');
                    g.write_sexp(out);
                }
                out.push(')');
            }
            Formula::Exists(v, g) | Formula::Forall(v, g) => {
                out.push_str(if matches!(self, Formula::Exists(..)) { "(exists " } else { "(forall " });
                out.push_str(&v.name());
                out.push(' ');
                g.write_sexp(out);
                out.push(')');
            }
        }
    }
}

impl<A: Atom> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexp())
    }
}

impl<A: Atom> fmt::Debug for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexp())
    }
}

/// A signed atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal<A> {
    pub atom: A,
    pub positive: bool,
}

impl<A: Atom> Literal<A> {
    pub fn pos(atom: A) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: A) -> Self {
        Literal { atom, positive: false }
    }

    pub fn negate(&self) -> Self {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }

    pub fn to_formula(&self) -> Formula<A> {
        if self.positive {
            Formula::Atom(self.atom.clone())
        } else {
            Formula::not(Formula::Atom(self.atom.clone()))
        }
    }
}

/// A conjunction of literals, split by sign, with an optional variable that
/// every literal is required to mention.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LiteralConjunction<A> {
    pub positives: Vec<A>,
    pub negatives: Vec<A>,
    pub distinguished: Option<Var>,
}

impl<A: Atom> LiteralConjunction<A> {
    pub fn new(positives: Vec<A>, negatives: Vec<A>) -> Self {
        LiteralConjunction {
            positives,
            negatives,
            distinguished: None,
        }
    }

    pub fn from_literals(lits: &[Literal<A>]) -> Self {
        let mut lc = LiteralConjunction::new(Vec::new(), Vec::new());
        for l in lits {
            if l.positive {
                lc.positives.push(l.atom.clone());
            } else {
                lc.negatives.push(l.atom.clone());
            }
        }
        lc
    }

    pub fn with_distinguished(mut self, x: Var) -> Self {
        self.distinguished = Some(x);
        self
    }

    pub fn literals(&self) -> Vec<Literal<A>> {
        self.positives
            .iter()
            .map(|a| Literal::pos(a.clone()))
            .chain(self.negatives.iter().map(|a| Literal::neg(a.clone())))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.positives.len() + self.negatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Checks that every literal mentions the distinguished variable.
    pub fn well_formed(&self) -> bool {
        match self.distinguished {
            None => true,
            Some(x) => self.positives.iter().chain(&self.negatives).all(|a| a.mentions(x)),
        }
    }

    pub fn to_formula(&self) -> Formula<A> {
        Formula::and(self.literals().iter().map(|l| l.to_formula()).collect())
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for a in self.positives.iter().chain(&self.negatives) {
            for v in a.vars() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}
